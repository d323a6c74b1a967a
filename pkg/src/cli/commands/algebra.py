# Groebner, singular-locus and Tjurina commands
import argparse

from src.algebra.groebner import GREVLEX, LEX, buchberger, quotient_dimension
from src.algebra.polyring import format_poly
from src.cli.common import CommandResult, add_poly_arguments, load_poly, load_polys
from src.models.report_models import GroebnerReport
from src.services.singular import ideal_power_quotient_dim, singular_locus

ORDERS = {"grevlex": GREVLEX, "lex": LEX}


def run_groebner(args: argparse.Namespace) -> CommandResult:
    polys, digests = load_polys(args)
    gb = buchberger(polys, ORDERS[args.order], budget=args.budget)
    quotient = quotient_dimension(gb)
    report = GroebnerReport(
        field=str(gb.field),
        order=args.order,
        nvars=gb.nvars,
        basis=[format_poly(g) for g in gb.generators],
        finite=quotient.is_finite,
        dimension=quotient.dimension,
        by_degree=quotient.by_degree,
        steps=gb.steps,
    )
    return CommandResult(report, input_digests=digests)


def run_classify(args: argparse.Namespace) -> CommandResult:
    F, digests = load_poly(args)
    return CommandResult(singular_locus(F), input_digests=digests)


def run_tjurina(args: argparse.Namespace) -> CommandResult:
    F, digests = load_poly(args)
    return CommandResult(ideal_power_quotient_dim(F, args.power), input_digests=digests)


def register(subparsers, parents) -> None:
    groebner = subparsers.add_parser(
        "groebner", parents=parents, help="reduced Groebner basis of polynomials (one per line or ';')"
    )
    add_poly_arguments(groebner)
    groebner.add_argument("--order", choices=sorted(ORDERS), default="grevlex")
    groebner.add_argument("--budget", type=int, help="reduction-step budget")
    groebner.set_defaults(handler=run_groebner)

    classify = subparsers.add_parser(
        "classify", parents=parents, help="singular points of a projective hypersurface"
    )
    add_poly_arguments(classify)
    classify.set_defaults(handler=run_classify)

    tjurina = subparsers.add_parser(
        "tjurina", parents=parents, help="global Tjurina number dim R/((f)+J(f)^power)"
    )
    add_poly_arguments(tjurina)
    tjurina.add_argument("--power", type=int, choices=(1, 2, 3), default=1)
    tjurina.set_defaults(handler=run_tjurina)
