# Shared helpers for the command modules
import argparse
import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pandas as pd

from src.algebra.exactfield import FieldSpec, parse_field
from src.algebra.polyring import Poly, parse_poly
from src.errors import UsageError
from src.models.report_models import Report

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64

VARIABLE = re.compile(r"x(\d+)")


@dataclass
class CommandResult:
    report: Report
    exit_code: int = EXIT_OK
    table: Optional[pd.DataFrame] = None
    input_digests: Dict[str, str] = field(default_factory=dict)


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def add_poly_arguments(parser: argparse.ArgumentParser, default_field: str = "Q") -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--poly", help="file holding the polynomial")
    source.add_argument("--expr", help="polynomial given inline")
    parser.add_argument("--field", default=default_field, help="Q, F<p>, F<q> or F<p>^<e>")
    parser.add_argument(
        "--nvars", type=int, help="number of variables (default: highest index + 1)"
    )


def read_source(args: argparse.Namespace) -> Tuple[str, Dict[str, str]]:
    """Polynomial text with comment lines removed, plus input digests."""
    if args.poly:
        path = Path(args.poly)
        if not path.is_file():
            raise UsageError(f"no such polynomial file: {args.poly}")
        raw = path.read_bytes()
        digests = {str(path): sha256_hex(raw)}
        text = raw.decode("utf-8")
    else:
        text = args.expr
        digests = {"--expr": sha256_hex(text.encode("utf-8"))}
    lines = [line.split("#", 1)[0] for line in text.splitlines()]
    return "\n".join(line for line in lines if line.strip()), digests


def infer_nvars(text: str, nvars: Optional[int]) -> int:
    if nvars is not None:
        if nvars < 1:
            raise UsageError("--nvars must be positive")
        return nvars
    indices = [int(i) for i in VARIABLE.findall(text)]
    if not indices:
        raise UsageError("cannot infer the number of variables; pass --nvars")
    return max(indices) + 1


def load_field(args: argparse.Namespace) -> FieldSpec:
    return parse_field(args.field)


def load_poly(args: argparse.Namespace) -> Tuple[Poly, Dict[str, str]]:
    text, digests = read_source(args)
    field_spec = load_field(args)
    return parse_poly(text, field_spec, infer_nvars(text, args.nvars)), digests


def load_polys(args: argparse.Namespace) -> Tuple[List[Poly], Dict[str, str]]:
    """Several polynomials, one per line or separated by ';'."""
    text, digests = read_source(args)
    field_spec = load_field(args)
    nvars = infer_nvars(text, args.nvars)
    chunks = [c for c in re.split(r"[;\n]", text) if c.strip()]
    return [parse_poly(c, field_spec, nvars) for c in chunks], digests
