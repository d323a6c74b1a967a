# Finite-field census commands
import argparse

import pandas as pd

from src.cli.common import CommandResult
from src.errors import UsageError
from src.models.report_models import DensityReport, SamplingMode
from src.services.census import (
    density_experiment,
    jet_census,
    omp_local_probability,
    quad_census,
)


def run_quad(args: argparse.Namespace) -> CommandResult:
    report = quad_census(args.n, args.q, brute=args.brute)
    if report.histogram:
        table = pd.DataFrame(
            {"rank": list(report.histogram), "forms": list(report.histogram.values())}
        )
    else:
        table = pd.DataFrame([{"n": report.n, "q": report.q, "count": report.count}])
    return CommandResult(report, table=table)


def run_jets(args: argparse.Namespace) -> CommandResult:
    report = jet_census(args.n, args.r)
    table = pd.DataFrame({"class": list(report.counts), "jets": list(report.counts.values())})
    return CommandResult(report, table=table)


def density_table(report: DensityReport) -> pd.DataFrame:
    rows = []
    for name in ("smooth", "mild", "certified_by_resolution", "certified_no_defect", "inconclusive"):
        est = getattr(report, name)
        rows.append(
            {
                "category": name,
                "count": est.count,
                "fraction": est.fraction,
                "value": est.value,
                "ci_low": est.ci_low,
                "ci_high": est.ci_high,
            }
        )
    rows.append({"category": "unclassified", "count": report.unclassified})
    return pd.DataFrame(rows)


def run_density(args: argparse.Namespace) -> CommandResult:
    if args.exhaustive:
        mode = SamplingMode.EXHAUSTIVE
    else:
        if args.samples is None or args.seed is None:
            raise UsageError("sampled density runs need --samples and --seed")
        mode = SamplingMode.SAMPLE
    report = density_experiment(
        args.n, args.q, args.d, mode=mode, samples=args.samples, seed=args.seed, jobs=args.jobs
    )
    return CommandResult(report, table=density_table(report))


def run_omp(args: argparse.Namespace) -> CommandResult:
    report = omp_local_probability(args.n, args.r, args.max_m)
    table = pd.DataFrame(
        {"m": list(report.smooth_forms), "smooth_forms": list(report.smooth_forms.values())}
    )
    return CommandResult(report, table=table)


def register(subparsers, parents) -> None:
    census = subparsers.add_parser("census", help="finite-field censuses")
    kinds = census.add_subparsers(dest="census_kind", required=True)

    quad = kinds.add_parser("quad", parents=parents, help="quadratic forms of rank >= n-1")
    quad.add_argument("--n", type=int, required=True)
    quad.add_argument("--q", type=int, required=True)
    quad.add_argument("--brute", action="store_true", help="enumerate every form")
    quad.set_defaults(handler=run_quad)

    jets = kinds.add_parser("jets", parents=parents, help="classify every 2-jet at a point")
    jets.add_argument("--n", type=int, required=True)
    jets.add_argument("--r", type=int, required=True)
    jets.set_defaults(handler=run_jets)

    density = kinds.add_parser(
        "density", parents=parents, help="smooth and certified-no-defect densities"
    )
    density.add_argument("--n", type=int, required=True)
    density.add_argument("--q", type=int, required=True)
    density.add_argument("--d", type=int, required=True)
    density.add_argument("--samples", type=int)
    density.add_argument("--seed", type=int)
    density.add_argument("--exhaustive", action="store_true")
    density.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
    density.set_defaults(handler=run_density)

    omp = kinds.add_parser(
        "omp", parents=parents, help="probability of an ordinary multiple point at a fixed point"
    )
    omp.add_argument("--n", type=int, required=True)
    omp.add_argument("--r", type=int, required=True)
    omp.add_argument("--max-m", type=int, required=True, dest="max_m")
    omp.set_defaults(handler=run_omp)
