"""
Command-line interface
compute | gen | inductive | verify
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import NoReturn, Optional, Sequence

import pandas as pd
from pydantic import ValidationError

from pathchains.core.config import settings
from pathchains.core.exceptions import (
    DigraphParseError,
    DigraphValidationError,
    FamilyDomainError,
    MaxDimRequiredError,
    MutationCapExceeded,
    RingSpecError,
)
from pathchains.layers.digraph import Digraph, FAMILIES, gen_family, parse_digraph, serialize
from pathchains.layers.extensions import Direction
from pathchains.layers.homology import homology_report
from pathchains.layers.inductive import GeneratingSet, inductive_generators
from pathchains.layers.verification import VerificationSuite
from pathchains.models.schemas import CheckRow, GeneratingSetResponse, HomologyReportResponse, RunConfig
from pathchains.utils import dump_json, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_CHECKS_FAILED = 1


class UsageError(Exception):
    """Invalid command line"""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pathchains", description="Exact path homology of digraphs")
    parser.add_argument("--log-level", default=settings.log_level, help="logging level for standard error")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sub: argparse.ArgumentParser):
        sub.add_argument("--input", help="edge-list file ('-' reads standard input)")
        sub.add_argument("--ring", default=settings.default_ring, help="q | z | zp:<prime>")
        sub.add_argument("--mutation-cap", type=int, default=settings.mutation_cap)

    compute = commands.add_parser("compute", help="Omega dimensions, Betti numbers, torsion and Euler characteristic")
    common(compute)
    compute.add_argument("--max-dim", type=int, default=settings.max_dim)
    compute.add_argument("--emit", choices=["json", "csv"], default=settings.emit)
    compute.add_argument("--dim", type=int, help="also attach inductive generators of this dimension")
    compute.add_argument("--direction", choices=[d.value for d in Direction], default=Direction.UPPER.value)
    compute.add_argument("--boundaries", action="store_true", help="attach boundary matrices with basis manifests")

    gen = commands.add_parser("gen", help="edge list of an example family member")
    gen.add_argument("--family", required=True, choices=sorted(FAMILIES))
    gen.add_argument("--t", type=int, required=True)

    inductive = commands.add_parser("inductive", help="inductive generating set with structures")
    common(inductive)
    inductive.add_argument("--dim", type=int, required=True)
    inductive.add_argument("--direction", choices=[d.value for d in Direction], default=Direction.UPPER.value)

    verify = commands.add_parser("verify", help="run the acceptance checks")
    verify.add_argument("--seed", type=int, default=settings.seed)
    verify.add_argument("--mutation-cap", type=int, default=settings.mutation_cap)
    return parser


def _read_digraph(path: Optional[str]) -> Digraph:
    if path is None:
        raise UsageError("--input is required")
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise DigraphParseError(f"input is not UTF-8 text: {e.reason} at byte {e.start}") from e
    return parse_digraph(text)


def _require_determined(generators: GeneratingSet, cap: int):
    """Surface elements left undetermined by the mutation cap as a resource-limit error"""
    undetermined = generators.undetermined()
    if undetermined:
        logger.warning(f"⚠️ {len(undetermined)} inductive elements have undetermined strong connectedness")
        raise MutationCapExceeded(cap)


def cmd_compute(config: RunConfig) -> int:
    g = _read_digraph(config.input)
    ring = config.ring_value
    report = homology_report(g, config.max_dim, ring, include_boundaries=config.boundaries)
    generators = None
    if config.dim is not None:
        generators = inductive_generators(g, config.dim, ring, config.direction, config.mutation_cap)
    response = HomologyReportResponse.from_report(g, report, generators)
    if config.emit == "csv":
        frame = pd.DataFrame(
            {
                "dimension": range(len(report.omega_dims)),
                "omega_dim": report.omega_dims,
                "betti": report.betti,
            }
        )
        sys.stdout.write(frame.to_csv(index=False, lineterminator="\n"))
    else:
        sys.stdout.write(dump_json(response.to_payload()))
    if generators is not None:
        _require_determined(generators, config.mutation_cap)
    return EXIT_OK


def cmd_gen(config: RunConfig) -> int:
    g = gen_family(config.family, config.t)
    sys.stdout.write(serialize(g, header=f"family {config.family} t={config.t}"))
    return EXIT_OK


def cmd_inductive(config: RunConfig) -> int:
    g = _read_digraph(config.input)
    generators = inductive_generators(g, config.dim, config.ring_value, config.direction, config.mutation_cap)
    sys.stdout.write(dump_json(GeneratingSetResponse.from_generating_set(g, generators).model_dump(mode="json")))
    _require_determined(generators, config.mutation_cap)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    rows = [CheckRow(**row) for row in VerificationSuite(config.seed, config.mutation_cap).run()]
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=list(CheckRow.model_fields))
    sys.stdout.write(frame.to_string(index=False) + "\n")
    passed = all(row.passed for row in rows)
    logger.info(f"{'✅' if passed else '❌'} {sum(r.passed for r in rows)}/{len(rows)} checks passed")
    return EXIT_OK if passed else EXIT_CHECKS_FAILED


COMMANDS = {
    "compute": cmd_compute,
    "gen": cmd_gen,
    "inductive": cmd_inductive,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point

    Returns:
        int: 0 success, 1 usage, 2 input, 3 resource limit
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        sys.stderr.write(f"pathchains: error: {e}\n")
        return EXIT_USAGE
    setup_logging(args.log_level)
    options = {k: v for k, v in vars(args).items() if k != "log_level" and v is not None}

    try:
        config = RunConfig(**options)
        return COMMANDS[config.command](config)
    except (UsageError, ValidationError, FamilyDomainError, RingSpecError, MaxDimRequiredError) as e:
        sys.stderr.write(f"pathchains: error: {e}\n")
        return EXIT_USAGE
    except (DigraphParseError, DigraphValidationError, OSError) as e:
        sys.stderr.write(f"pathchains: input error: {e}\n")
        return EXIT_INPUT
    except MutationCapExceeded as e:
        sys.stderr.write(f"pathchains: resource limit: {e}\n")
        return EXIT_RESOURCE
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        raise


if __name__ == "__main__":
    sys.exit(main())
