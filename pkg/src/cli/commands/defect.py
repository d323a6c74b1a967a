# Defect, certificate, Betti and cone commands
import argparse

from src.cli.common import EXIT_INCONCLUSIVE, EXIT_OK, CommandResult, add_poly_arguments, load_poly
from src.errors import UsageError
from src.models.report_models import DefectMethod
from src.services.defect import (
    betti_blowup,
    betti_singular,
    betti_smooth,
    certify_no_defect,
    compute_defect,
    cone_defect,
    factoriality_certificate,
    obstruction_profile,
)


def run_defect(args: argparse.Namespace) -> CommandResult:
    F, digests = load_poly(args)
    report = compute_defect(F, assert_weighted_homogeneous=args.assert_weighted_homogeneous)
    code = EXIT_INCONCLUSIVE if report.method == DefectMethod.INCONCLUSIVE else EXIT_OK
    return CommandResult(report, exit_code=code, input_digests=digests)


def run_certify(args: argparse.Namespace) -> CommandResult:
    F, digests = load_poly(args)
    certificate = certify_no_defect(F, assert_weighted_homogeneous=args.assert_weighted_homogeneous)
    code = EXIT_OK if certificate.is_conclusive else EXIT_INCONCLUSIVE
    return CommandResult(certificate, exit_code=code, input_digests=digests)


def run_factorial(args: argparse.Namespace) -> CommandResult:
    F, digests = load_poly(args)
    certificate = factoriality_certificate(F)
    code = EXIT_OK if certificate.is_conclusive else EXIT_INCONCLUSIVE
    return CommandResult(certificate, exit_code=code, input_digests=digests)


def run_obstruction(args: argparse.Namespace) -> CommandResult:
    F, digests = load_poly(args)
    return CommandResult(obstruction_profile(F), input_digests=digests)


def run_cone(args: argparse.Namespace) -> CommandResult:
    G, digests = load_poly(args)
    return CommandResult(cone_defect(G), input_digests=digests)


def _betti_kind(args: argparse.Namespace) -> str:
    # "betti --smooth N m" and "betti --blowup n s" name the table and its parameters at once
    flagged = [kind for kind in ("smooth", "blowup", "singular") if getattr(args, kind) is not None]
    if len(flagged) > 1 or (flagged and args.kind not in (None, flagged[0])):
        raise UsageError("betti takes a single table kind")
    if args.smooth is not None:
        args.n, args.m = args.smooth
    if args.blowup is not None:
        args.n, args.s = args.blowup
    kind = args.kind or (flagged[0] if flagged else None)
    if kind is None:
        raise UsageError("betti needs a table kind: smooth, blowup or singular")
    return kind


def run_betti(args: argparse.Namespace) -> CommandResult:
    args.kind = _betti_kind(args)
    if args.kind == "smooth":
        if args.n is None or args.m is None:
            raise UsageError("betti smooth needs --n and --m")
        return CommandResult(betti_smooth(args.n, args.m))
    if args.kind == "blowup":
        if args.n is None or args.s is None:
            raise UsageError("betti blowup needs --n and --s")
        return CommandResult(betti_blowup(args.n, args.s))
    if not (args.poly or args.expr):
        raise UsageError("betti singular needs --poly or --expr")
    F, digests = load_poly(args)
    report = compute_defect(F)
    if report.defect is None:
        return CommandResult(report, exit_code=EXIT_INCONCLUSIVE, input_digests=digests)
    return CommandResult(betti_singular(F, report.defect), input_digests=digests)


def _certificate_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--assert-weighted-homogeneous",
        action="store_true",
        help="take every singular point as weighted homogeneous",
    )


def register(subparsers, parents) -> None:
    defect = subparsers.add_parser(
        "defect", parents=parents, help="defect of a hypersurface with isolated singularities"
    )
    add_poly_arguments(defect)
    _certificate_flags(defect)
    defect.set_defaults(handler=run_defect)

    certify = subparsers.add_parser("certify", parents=parents, help="no-defect certificate")
    add_poly_arguments(certify)
    _certificate_flags(certify)
    certify.set_defaults(handler=run_certify)

    factorial = subparsers.add_parser(
        "factorial", parents=parents, help="factoriality of a nodal threefold in P^4 over F_q"
    )
    add_poly_arguments(factorial, default_field="F5")
    factorial.set_defaults(handler=run_factorial)

    obstruction = subparsers.add_parser(
        "obstruction", parents=parents, help="cokernels of the graded restriction maps"
    )
    add_poly_arguments(obstruction)
    obstruction.set_defaults(handler=run_obstruction)

    cone = subparsers.add_parser(
        "cone", parents=parents, help="defect of the cone over a smooth hypersurface (the input)"
    )
    add_poly_arguments(cone)
    cone.set_defaults(handler=run_cone)

    betti = subparsers.add_parser("betti", parents=parents, help="Betti tables")
    betti.add_argument("kind", nargs="?", choices=("smooth", "blowup", "singular"))
    betti.add_argument("--smooth", nargs=2, type=int, metavar=("N", "M"), help="same as: smooth --n N --m M")
    betti.add_argument("--blowup", nargs=2, type=int, metavar=("N", "S"), help="same as: blowup --n N --s S")
    betti.add_argument("--singular", action="store_const", const=True, help="same as: singular")
    betti.add_argument("--n", type=int, help="ambient dimension")
    betti.add_argument("--m", type=int, help="degree of the smooth hypersurface")
    betti.add_argument("--s", type=int, help="number of blown-up points")
    source = betti.add_mutually_exclusive_group()
    source.add_argument("--poly")
    source.add_argument("--expr")
    betti.add_argument("--field", default="Q")
    betti.add_argument("--nvars", type=int)
    betti.set_defaults(handler=run_betti)
