# Command-line entry point
import argparse
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

from src.cli.commands import algebra, census, defect
from src.cli.common import EXIT_ERROR, EXIT_USAGE, CommandResult
from src.config.settings import settings
from src.errors import DefektError, UsageError
from src.models.report_models import ErrorReport, RunManifest, build_schema
from src.services.metrics import write_metrics

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parents[2] / "schemas" / "report.schema.json"

# argparse bookkeeping that is not a computation parameter
_INTERNAL = {"handler", "out", "metrics_out", "log_level", "format"}


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures become UsageError."""

    def error(self, message: str):
        raise UsageError(message)


def run_schema(args: argparse.Namespace) -> dict:
    return build_schema()


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of standard output")
    common.add_argument("--metrics-out", dest="metrics_out", help="write Prometheus metrics here")
    common.add_argument("--log-level", dest="log_level", help="override DEFEKT_LOG_LEVEL")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    parser = CliParser(
        prog="defekt",
        description="Exact singularity, defect and census computations for projective hypersurfaces",
    )
    parser.add_argument("--version", action="version", version=settings.TOOL_VERSION)
    subparsers = parser.add_subparsers(dest="command", required=True)
    algebra.register(subparsers, [common])
    defect.register(subparsers, [common])
    census.register(subparsers, [common])

    schema = subparsers.add_parser("schema", parents=[common], help="JSON schema of every report")
    schema.set_defaults(handler=run_schema)
    return parser


def configure_logging(level: Optional[str]) -> None:
    # Logs go to standard error so reports on standard output stay clean
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format=settings.LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def _parameters(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _INTERNAL}


def _subcommand(args: argparse.Namespace) -> str:
    kind = getattr(args, "census_kind", None)
    return f"{args.command} {kind}" if kind else args.command


def emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text + ("" if text.endswith("\n") else "\n"), encoding="utf-8")
    else:
        sys.stdout.write(text + ("" if text.endswith("\n") else "\n"))


def emit_error(exc: Exception, code: str, context: dict) -> None:
    report = ErrorReport(
        error=code,
        detail=getattr(exc, "message", str(exc)),
        context=context,
        timestamp=datetime.now(timezone.utc),
    )
    sys.stderr.write(report.model_dump_json() + "\n")


def run(args: argparse.Namespace) -> int:
    if args.format == "csv" and args.command != "census":
        raise UsageError(f"--format csv is only available for census tables, not {_subcommand(args)}")
    started = time.perf_counter()
    outcome = args.handler(args)

    if args.command == "schema":
        emit(json.dumps(outcome, indent=2), args.out)
        return 0

    result: CommandResult = outcome
    if args.format == "csv":
        emit(result.table.to_csv(index=False), args.out)
    else:
        result.report.manifest = RunManifest(
            subcommand=_subcommand(args),
            parameters=_parameters(args),
            seed=getattr(args, "seed", None),
            tool_version=settings.TOOL_VERSION,
            wall_time=round(time.perf_counter() - started, 6),
            input_digests=result.input_digests,
        )
        emit(result.report.model_dump_json(indent=2), args.out)

    if args.metrics_out:
        write_metrics(args.metrics_out)
    logger.info(f"{_subcommand(args)} finished with exit code {result.exit_code}")
    return result.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args.log_level)
        return run(args)
    except UsageError as e:
        emit_error(e, e.code, e.detail)
        return EXIT_USAGE
    except DefektError as e:
        logger.debug(f"{e.code}: {e.message}")
        emit_error(e, e.code, e.detail)
        return EXIT_ERROR
    except Exception as e:
        # Global exception handler
        logger.error(f"Unexpected error: {e}", exc_info=True)
        emit_error(e, "internal_error", {"type": type(e).__name__})
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
