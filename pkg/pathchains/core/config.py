"""
Core configuration module for pathchains
Handles environment variables and computation defaults
"""

import os
from pathlib import Path
from typing import Literal, Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Computation defaults
    default_ring: str = "q"
    max_dim: Optional[int] = None
    mutation_cap: int = 1_000_000
    dense_column_limit: int = 64
    debug_checks: bool = False

    # Face multihypergraph validation
    subset_check_limit: int = 12
    subset_samples: int = 4096
    canonical_permutation_limit: int = 5040

    # Random instances
    seed: int = 0

    # Output
    emit: Literal["json", "csv"] = "json"
    log_level: str = "INFO"

    # API Server Configuration
    api_host: str = "127.0.0.1"
    api_port: int = 8000
    api_reload: bool = False

    # Environment
    environment: Literal["development", "production", "testing"] = "development"

    class Config:
        """Pydantic config"""
        env_prefix = "PATHCHAINS_"
        env_file = os.path.join(Path(__file__).parent.parent.parent, ".env")
        case_sensitive = False


# Global settings instance
settings = Settings()

if settings.mutation_cap < 1:
    raise ValueError(
        "❌ PATHCHAINS_MUTATION_CAP must be a positive integer\n"
        f"   Got: {settings.mutation_cap}"
    )
