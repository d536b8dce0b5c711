"""
Main FastAPI application
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from pathchains import __version__
from pathchains.api.routes import router
from pathchains.core.config import settings
from pathchains.utils import setup_logging

setup_logging()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Log the computation defaults once per process"""
    logger.info(f"pathchains {__version__}: ring {settings.default_ring}, mutation cap {settings.mutation_cap}")
    if settings.debug_checks:
        logger.warning("⚠️ Debug checks on: every path boundary re-checks Omega membership of its argument")
    yield
    logger.info("pathchains API stopped")


app = FastAPI(
    title="pathchains",
    description="Exact path homology and inductive generators of digraphs",
    version=__version__,
    lifespan=lifespan
)

app.include_router(router)


@app.get("/")
async def root():
    return {"message": "pathchains API", "version": __version__, "endpoints": sorted(r.path for r in router.routes)}


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(
        "pathchains.main:app",
        host=settings.api_host,
        port=settings.api_port,
        reload=settings.api_reload,
    )
