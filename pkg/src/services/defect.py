# """Defect computation and certification for hypersurfaces with isolated
# singularities."""
import logging
from fractions import Fraction
from typing import List, Optional, Sequence

from src.algebra.exactfield import FieldSpec, Raw
from src.algebra.groebner import buchberger, is_projectively_empty, normal_form, quotient_dimension
from src.algebra.linalg import rank
from src.algebra.polyring import Poly, monomials_of_degree
from src.errors import (
    BaseNotSmooth,
    CharacteristicTwo,
    InfiniteField,
    InvalidParameter,
    NotHomogeneous,
    NotNodal,
    OddAmbientDimension,
    PositiveDimensionalLocus,
    RequiresCharacteristicZero,
    UnclassifiedSingularity,
    UnresolvedPoints,
    WrongAmbientDimension,
)
from src.models.report_models import (
    BettiEntry,
    BettiTable,
    Certificate,
    CertificateKind,
    DefectMethod,
    DefectReport,
    DefectWitness,
    InequalityCheck,
    LocusDimension,
    ObstructionProfile,
    Provenance,
    ResolutionScore,
    RestrictionMapReport,
    SingularityType,
    SingularLocusReport,
    SingularPointReport,
    TargetQuotient,
)
from src.services.singular import (
    affine_power_quotient_dim,
    choose_chart,
    geometric_points,
    jacobian_generators,
    singular_locus,
)

logger = logging.getLogger(__name__)


# Betti tables
def _projective_betti(n: int, i: int) -> int:
    return 1 if i % 2 == 0 and 0 <= i <= 2 * n else 0


def jacobian_ring_series(N: int, m: int) -> List[int]:
    """Coefficients of ((1 - t^{m-1}) / (1 - t))^{N+1}."""
    if m < 2:
        return []
    series = [1]
    for _ in range(N + 1):
        grown = [0] * (len(series) + m - 2)
        for i, c in enumerate(series):
            for j in range(m - 1):
                grown[i + j] += c
        series = grown
    return series


def betti_smooth(N: int, m: int) -> BettiTable:
    """Betti numbers of a smooth degree-m hypersurface in P^N (characteristic 0)."""
    if N < 1 or m < 1:
        raise InvalidParameter(f"need N >= 1 and m >= 1, got N={N}, m={m}")
    series = jacobian_ring_series(N, m)
    primitive = []
    for k in range(N):
        degree = (k + 1) * m - N - 1
        primitive.append(series[degree] if 0 <= degree < len(series) else 0)
    middle = N - 1
    entries = []
    for i in range(2 * N + 1):
        if i == middle:
            value = sum(primitive) + (1 if middle % 2 == 0 else 0)
            entries.append(BettiEntry(degree=i, value=value, provenance=Provenance.GRIFFITHS))
        elif i == 2 * N:
            entries.append(BettiEntry(degree=i, value=0, provenance=Provenance.ZERO_BY_DIMENSION))
        else:
            entries.append(
                BettiEntry(degree=i, value=_projective_betti(N, i), provenance=Provenance.LEFSCHETZ)
            )
    return BettiTable(n=N, entries=entries, primitive_graded=primitive)


def betti_blowup(n: int, s: int) -> BettiTable:
    """Betti numbers of P^n blown up s times in points."""
    if n < 2 or s < 0:
        raise InvalidParameter(f"need n >= 2 and s >= 0, got n={n}, s={s}")
    entries = []
    for i in range(2 * n + 1):
        if i in (0, 2 * n):
            value = 1
        elif i % 2 == 0:
            value = s + 1
        else:
            value = 0
        entries.append(BettiEntry(degree=i, value=value, provenance=Provenance.BLOWUP))
    return BettiTable(
        n=n,
        entries=entries,
        note="point blowups only add even-degree classes; odd degrees stay 0",
    )


def _singular_table(n: int, defect: int) -> BettiTable:
    entries = []
    for i in range(2 * n + 1):
        if i == n - 1:
            entries.append(BettiEntry(degree=i, value=None, provenance=Provenance.NOT_COMPUTED))
        elif i == n:
            entries.append(
                BettiEntry(
                    degree=i,
                    value=_projective_betti(n, i) + defect,
                    provenance=Provenance.DEFECT_ADJUSTED,
                )
            )
        elif i == 2 * n:
            entries.append(BettiEntry(degree=i, value=0, provenance=Provenance.ZERO_BY_DIMENSION))
        else:
            entries.append(
                BettiEntry(degree=i, value=_projective_betti(n, i), provenance=Provenance.LEFSCHETZ)
            )
    return BettiTable(n=n, entries=entries, note=f"h^{n - 1} is not computed for singular hypersurfaces")


def betti_singular(F: Poly, defect: int) -> BettiTable:
    """Betti table of {F = 0} with isolated singularities and defect ``defect``."""
    if defect < 0:
        raise InvalidParameter("the defect is never negative")
    return _singular_table(F.nvars - 1, defect)


# Cones
def cone_over(G: Poly) -> Poly:
    """F(x0, ..., xn) = G(x1, ..., xn): the cone with vertex (1:0:...:0)."""
    return Poly(G.field, G.nvars + 1, {(0,) + e: c for e, c in G.terms.items()})


def cone_defect(G: Poly) -> DefectReport:
    """Defect of the cone over the smooth hypersurface {G = 0} in P^{n-1}."""
    if G.field.is_finite:
        raise RequiresCharacteristicZero("the cone formula uses characteristic-0 Betti numbers")
    if not G.is_homogeneous() or G.is_zero():
        raise NotHomogeneous("the base of a cone is a nonzero form")
    n, m = G.nvars, G.degree()
    if n < 2:
        raise InvalidParameter("the base needs at least two variables")
    if not is_projectively_empty(buchberger(jacobian_generators(G))):
        raise BaseNotSmooth("the base hypersurface of the cone is singular")
    base = betti_smooth(n - 1, m)
    h_base = base.h(n - 2)
    h_ambient = _projective_betti(n, n)
    defect = h_base - h_ambient
    logger.info(f"cone over a degree {m} base in P^{n - 1}: defect {defect}")
    return DefectReport(
        field=str(G.field),
        n=n,
        degree=m,
        defect=defect,
        method=DefectMethod.CONE_FORMULA,
        witness=DefectWitness(base_betti=h_base, ambient_betti=h_ambient),
        betti=_singular_table(n, defect),
    )


# Graded restriction maps
def _restriction_rank(F: Poly, degree: int, chart, gb, basis) -> int:
    if degree < 0 or not basis:
        return 0
    columns = {m: i for i, m in enumerate(basis)}
    field = F.field
    rows = []
    for mono in monomials_of_degree(F.nvars, degree):
        affine = mono[: chart.index] + mono[chart.index + 1:]
        nf = normal_form(Poly(field, F.nvars - 1, {affine: field.one}, 1), gb)
        row = [field.zero] * len(basis)
        for e, c in nf.terms.items():
            row[columns[e]] = c
        rows.append(row)
    return rank(field, rows)


def graded_restriction_matrix(
    F: Poly, k: int, target: TargetQuotient = TargetQuotient.TJURINA
) -> RestrictionMapReport:
    """Rank and cokernel of S_{kd-n-1} -> target quotient of the chart ring."""
    if k < 1:
        raise InvalidParameter(f"k must be positive, got {k}")
    n, d = F.nvars - 1, F.degree()
    chart = choose_chart(F)
    power = 1 if target == TargetQuotient.TJURINA else 3
    gb = affine_power_quotient_dim(chart.f, power)
    quotient = quotient_dimension(gb)
    degree = k * d - n - 1
    r = _restriction_rank(chart.G, degree, chart, gb, quotient.monomials)
    source_dim = len(monomials_of_degree(F.nvars, degree)) if degree >= 0 else 0
    return RestrictionMapReport(
        k=k,
        source_degree=degree,
        target=target,
        source_dim=source_dim,
        target_dim=quotient.dimension,
        rank=r,
        coker=quotient.dimension - r,
    )


def restriction_image_dims(F: Poly, max_degree: int) -> List[int]:
    """dim of the image of S_i in T(f) for i = 0..max_degree."""
    chart = choose_chart(F)
    gb = affine_power_quotient_dim(chart.f, 1)
    quotient = quotient_dimension(gb)
    return [
        _restriction_rank(chart.G, i, chart, gb, quotient.monomials) for i in range(max_degree + 1)
    ]


def obstruction_profile(F: Poly) -> ObstructionProfile:
    """Cokernels of the graded restriction maps for k = 1..n."""
    n, d = F.nvars - 1, F.degree()
    maps = [graded_restriction_matrix(F, 1, TargetQuotient.JACOBIAN_CUBED)]
    maps += [graded_restriction_matrix(F, k, TargetQuotient.TJURINA) for k in range(2, n + 1)]
    tau = quotient_dimension(affine_power_quotient_dim(choose_chart(F).f, 1)).dimension
    return ObstructionProfile(
        field=str(F.field),
        n=n,
        degree=d,
        tau=tau,
        maps=maps,
        surjective=all(m.coker == 0 for m in maps),
    )


# Nodal defect
def _monomial_value(field: FieldSpec, point: Sequence[Raw], exp: Sequence[int]) -> Raw:
    acc = field.one
    for x, k in zip(point, exp):
        if k:
            acc = field.mul(acc, field.pow(x, k))
    return acc


def evaluation_rank(field: FieldSpec, points: List[List[Raw]], nvars: int, degree: int) -> int:
    """Rank of the evaluation map S_degree -> field^points."""
    if degree < 0 or not points:
        return 0
    columns = monomials_of_degree(nvars, degree)
    rows = [[_monomial_value(field, pt, m) for m in columns] for pt in points]
    return rank(field, rows)


def _require_locus(F: Poly, locus: Optional[SingularLocusReport]) -> SingularLocusReport:
    locus = locus if locus is not None else singular_locus(F)
    if locus.dimension == LocusDimension.POSITIVE_DIMENSIONAL:
        raise PositiveDimensionalLocus("the singular locus is not zero-dimensional")
    return locus


def _is_nodal(locus: SingularLocusReport) -> bool:
    return locus.unresolved_degree == 0 and all(
        p.type == SingularityType.A_K and p.k == 1 for p in locus.points
    )


def nodal_defect(F: Poly, locus: Optional[SingularLocusReport] = None) -> DefectReport:
    """Defect of a nodal hypersurface in P^n, n even.

    It is the cokernel of evaluating forms of degree (n/2)d - n - 1 at the
    geometric nodes.
    """
    n, d = F.nvars - 1, F.degree()
    if n % 2:
        raise OddAmbientDimension(
            "nodal defect is computed for even n; odd n with A_k points is certified by certify_no_defect"
        )
    if F.field.characteristic == 2:
        raise CharacteristicTwo("nodes are not classified in characteristic 2")
    locus = _require_locus(F, locus)
    if locus.unresolved_degree:
        raise UnresolvedPoints(
            f"{locus.unresolved_degree} singular points are not rational; change coordinates or reduce mod p"
        )
    if not _is_nodal(locus):
        raise NotNodal("some singular point is not an ordinary double point")
    common, points = geometric_points(locus)
    degree = (n // 2) * d - n - 1
    columns = len(monomials_of_degree(F.nvars, degree)) if degree >= 0 else 0
    r = evaluation_rank(common, points, F.nvars, degree) if points else 0
    defect = len(points) - r
    logger.info(f"{len(points)} nodes, evaluation rank {r} in degree {degree}: defect {defect}")
    return DefectReport(
        field=str(F.field),
        n=n,
        degree=d,
        defect=defect,
        method=DefectMethod.NODAL_EVALUATION,
        witness=DefectWitness(
            evaluation_degree=degree,
            evaluation_rows=len(points),
            evaluation_columns=columns,
            evaluation_rank=r,
        ),
        betti=_singular_table(n, defect),
    )


# Certificates
def resolution_score(points: List[SingularPointReport], d: int) -> ResolutionScore:
    """Blow-up count and score for points that are all A_k or ordinary.

    A closed point of residue degree r counts as r geometric points.
    """
    blowups = 0
    score = 0
    for p in points:
        if p.type == SingularityType.ORDINARY_MULTIPLE:
            blowups += p.residue_degree
            score += p.residue_degree * p.multiplicity
        elif p.type == SingularityType.A_K:
            r = (p.k + 1) // 2
            blowups += p.residue_degree * r
            score += p.residue_degree * 2 * r
        else:
            raise UnclassifiedSingularity(f"point {p.coordinates} is neither A_k nor ordinary")
    return ResolutionScore(blowups=blowups, score=score, degree=d, below_degree=score < d)


def _inequality(name: str, lhs, relation: str, rhs, holds: bool) -> InequalityCheck:
    return InequalityCheck(name=name, lhs=str(lhs), relation=relation, rhs=str(rhs), holds=holds)


def _point_tags(locus: SingularLocusReport) -> List[str]:
    tags = []
    for p in locus.points:
        tags.append(p.tag if p.residue_degree == 1 else f"{p.tag} (degree {p.residue_degree})")
    if locus.unresolved_degree:
        tags.append(f"unresolved ({locus.unresolved_degree})")
    return tags


def certify_no_defect(
    F: Poly,
    assert_weighted_homogeneous: bool = False,
    locus: Optional[SingularLocusReport] = None,
) -> Certificate:
    """Strongest applicable no-defect certificate, or Inconclusive.

    Routes in order: Tjurina bound (char 0), weighted-homogeneous bound
    (char 0), resolution score, A_k points in odd n, nodal bound (char 0, n even).
    """
    field = F.field
    if field.characteristic == 2:
        raise CharacteristicTwo("no certificate route is available in characteristic 2")
    locus = _require_locus(F, locus)
    n, d = F.nvars - 1, F.degree()
    tau = locus.tau
    char0 = not field.is_finite
    checks: List[InequalityCheck] = []
    hypotheses = ["zero-dimensional singular locus" if locus.points else "smooth"]

    def issue(kind: CertificateKind, decisive: Optional[InequalityCheck], extra: List[str]) -> Certificate:
        logger.info(f"certificate {kind.value} for a degree {d} hypersurface in P^{n}")
        return Certificate(
            kind=kind,
            field=str(field),
            characteristic=field.characteristic,
            n=n,
            degree=d,
            tau=tau,
            singularities=_point_tags(locus),
            hypotheses=hypotheses + extra,
            decisive=decisive,
            checks=checks,
        )

    if char0:
        bound = Fraction(d - n + 1, n * n + n + 1)
        check = _inequality("tjurina_bound", tau, "<", bound, tau < bound)
        checks.append(check)
        if check.holds:
            return issue(CertificateKind.NO_DEFECT_TJURINA, check, ["characteristic 0"])
        weighted = assert_weighted_homogeneous or (
            locus.unresolved_degree == 0 and all(p.weighted_homogeneous for p in locus.points)
        )
        if weighted:
            check = _inequality("weighted_homogeneous_bound", tau, "<", d - n + 1, tau < d - n + 1)
            checks.append(check)
            if check.holds:
                source = "asserted" if assert_weighted_homogeneous else "detected"
                return issue(
                    CertificateKind.NO_DEFECT_WEIGHTED_HOMOGENEOUS,
                    check,
                    ["characteristic 0", f"all singular points weighted homogeneous ({source})"],
                )

    if locus.unresolved_degree or any(p.type == SingularityType.OTHER for p in locus.points):
        raise UnclassifiedSingularity(
            "a singular point is neither A_k nor an ordinary multiple point, or is not rational"
        )

    score = resolution_score(locus.points, d)
    check = _inequality("resolution_score", score.score, "<", d, score.below_degree)
    checks.append(check)
    if check.holds:
        return issue(
            CertificateKind.NO_DEFECT_RESOLUTION,
            check,
            ["characteristic != 2", "all singular points A_k or ordinary multiple points"],
        )

    all_ak = all(p.type == SingularityType.A_K for p in locus.points)
    if n % 2 == 1 and all_ak:
        check = _inequality("odd_dimension_A_k", f"n = {n}", "odd", "all points A_k", True)
        checks.append(check)
        return issue(
            CertificateKind.NO_DEFECT_ODD_AK,
            check,
            ["characteristic != 2", "n odd", "all singular points A_k"],
        )

    nodal = _is_nodal(locus)
    if char0 and nodal and n % 2 == 0:
        bound = Fraction(d * n, 2) - n + 1
        check = _inequality("nodal_bound", tau, "<", bound, tau < bound)
        checks.append(check)
        if check.holds:
            return issue(CertificateKind.NO_DEFECT_NODAL, check, ["characteristic 0", "all singular points nodes"])
    if nodal and n == 4:
        bound = (d - 1) ** 2
        checks.append(_inequality("nodal_threefold_defect_needs", tau, ">=", bound, tau >= bound))

    return issue(CertificateKind.INCONCLUSIVE, None, [])


def factoriality_certificate(F: Poly, locus: Optional[SingularLocusReport] = None) -> Certificate:
    """Factoriality of a nodal threefold in P^4 over a finite field when the
    defect vanishes. A positive defect is reported, never turned into a
    non-factoriality claim."""
    n, d = F.nvars - 1, F.degree()
    if n != 4:
        raise WrongAmbientDimension(f"factoriality certificates need P^4, got P^{n}")
    if not F.field.is_finite:
        raise InfiniteField("the factoriality certificate works over finite fields")
    locus = _require_locus(F, locus)
    report = nodal_defect(F, locus)
    holds = report.defect == 0
    check = _inequality("middle_betti", f"h^4 = {1 + report.defect}", "=", 1, holds)
    return Certificate(
        kind=CertificateKind.FACTORIAL_NODAL if holds else CertificateKind.INCONCLUSIVE,
        field=str(F.field),
        characteristic=F.field.characteristic,
        n=n,
        degree=d,
        tau=locus.tau,
        singularities=_point_tags(locus),
        hypotheses=["n = 4", "finite base field", "all singular points nodes"],
        decisive=check if holds else None,
        checks=[check],
        defect=report.defect,
    )


def _drop_variable(F: Poly, j: int) -> Poly:
    return Poly(F.field, F.nvars - 1, {e[:j] + e[j + 1:]: c for e, c in F.terms.items()})


def compute_defect(F: Poly, assert_weighted_homogeneous: bool = False) -> DefectReport:
    """Exact defect where a formula applies, else certified zero or inconclusive."""
    locus = _require_locus(F, None)
    n, d = F.nvars - 1, F.degree()
    field = F.field
    if _is_nodal(locus) and n % 2 == 0 and locus.points:
        return nodal_defect(F, locus)
    if not field.is_finite:
        for j in range(F.nvars):
            if not F.involves(j):
                base = _drop_variable(F, j)
                try:
                    return cone_defect(base)
                except BaseNotSmooth:
                    break
    try:
        certificate = certify_no_defect(F, assert_weighted_homogeneous, locus)
    except UnclassifiedSingularity:
        certificate = None
    if certificate is not None and certificate.is_conclusive:
        return DefectReport(
            field=str(field),
            n=n,
            degree=d,
            defect=0,
            method=DefectMethod.CERTIFIED_ZERO,
            witness=DefectWitness(certificate=certificate.kind),
            betti=_singular_table(n, 0),
        )
    profile = obstruction_profile(F)
    return DefectReport(
        field=str(field),
        n=n,
        degree=d,
        defect=None,
        method=DefectMethod.INCONCLUSIVE,
        witness=DefectWitness(certificate=CertificateKind.INCONCLUSIVE, obstruction_profile=profile.maps),
    )
