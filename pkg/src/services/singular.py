# """Singular loci of projective hypersurfaces: charts, points, types and
# Tjurina numbers."""
import logging
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import lcm
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.algebra import univariate
from src.algebra.exactfield import FieldSpec, Raw, finite_field
from src.algebra.groebner import (
    GroebnerBasis,
    buchberger,
    is_projectively_empty,
    local_dimension,
    quotient_dimension,
    solve_zero_dimensional,
)
from src.algebra.linalg import mat_vec, rank
from src.algebra.polyring import (
    Poly,
    dehomogenize,
    gradient,
    quadratic_form_matrix,
)
from src.config.settings import settings
from src.errors import (
    CharacteristicTwo,
    DimensionMismatch,
    InvalidParameter,
    NoChartFound,
    NonIsolatedSingularity,
    NotHomogeneous,
    PointNotOnHypersurface,
    PositiveDimensionalLocus,
    SmoothPoint,
)
from src.models.report_models import (
    ChartRecord,
    LocusDimension,
    SingularityType,
    SingularLocusReport,
    SingularPointReport,
    TjurinaReport,
)
from src.services import metrics

logger = logging.getLogger(__name__)


@dataclass
class Chart:
    """Affine chart missing the singular locus.

    ``matrix`` maps chart-frame projective coordinates y to original ones,
    x = M y; ``G`` is F(M y) and ``f`` its dehomogenization at ``index``.
    """

    index: int
    hyperplane: List[Raw]
    matrix: Optional[List[List[Raw]]]
    G: Poly
    f: Poly
    attempts: int

    def record(self) -> ChartRecord:
        field = self.G.field
        return ChartRecord(
            index=self.index,
            hyperplane=[field.format(c) for c in self.hyperplane],
            coordinate_change=self.matrix is not None,
            attempts=self.attempts,
        )

    def to_projective(self, affine: Sequence[Raw], field: FieldSpec) -> List[Raw]:
        y = list(affine[: self.index]) + [field.one] + list(affine[self.index:])
        if self.matrix is None:
            return y
        embed = univariate.field_embedding(self.G.field, field)
        matrix = [[embed(c) for c in row] for row in self.matrix]
        return mat_vec(field, matrix, y)


def jacobian_generators(F: Poly) -> List[Poly]:
    """F together with its nonzero partials; F is always adjoined."""
    return [F] + [g for g in gradient(F) if not g.is_zero()]


def _check_form(F: Poly) -> None:
    if not F.is_homogeneous() or F.is_zero():
        raise NotHomogeneous("a hypersurface needs a nonzero homogeneous form")
    if F.degree() < 2:
        raise InvalidParameter("hypersurfaces of degree < 2 have no singularities to study")
    p = F.field.characteristic
    if p and F.degree() % p == 0:
        logger.warning(
            f"characteristic {p} divides the degree {F.degree()}; the Euler relation is unavailable"
        )


def _misses_locus(gens: List[Poly], hyperplane: Poly) -> bool:
    return is_projectively_empty(buchberger(gens + [hyperplane]))


def _linear_form(field: FieldSpec, coefficients: Sequence[Raw]) -> Poly:
    nvars = len(coefficients)
    return Poly.from_terms(
        field,
        nvars,
        [(tuple(1 if t == j else 0 for t in range(nvars)), c) for j, c in enumerate(coefficients)],
    )


def _random_coefficients(field: FieldSpec, nvars: int, rng: np.random.Generator) -> List[Raw]:
    if field.is_finite:
        return [field.from_index(int(i)) for i in rng.integers(0, field.q, size=nvars)]
    return [field.from_int(int(i)) for i in rng.integers(-3, 4, size=nvars)]


def choose_chart(F: Poly, gens: Optional[List[Poly]] = None) -> Chart:
    """Find a hyperplane missing Sing(F) and move it to a coordinate chart.

    Coordinate hyperplanes come first, then seeded random hyperplanes, with
    CHART_ATTEMPTS attempts in total.
    """
    gens = gens if gens is not None else jacobian_generators(F)
    field, nvars = F.field, F.nvars
    attempts = 0
    for i in range(nvars):
        attempts += 1
        if _misses_locus(gens, Poly.variable(field, nvars, i)):
            hyperplane = [field.one if j == i else field.zero for j in range(nvars)]
            logger.debug(f"chart x{i} = 1 misses the singular locus")
            return Chart(i, hyperplane, None, F, dehomogenize(F, i), attempts)

    for i in range(nvars):
        affine = dehomogenize(F, i)
        if not quotient_dimension(buchberger(jacobian_generators(affine))).is_finite:
            raise PositiveDimensionalLocus(f"the singular locus is positive-dimensional in chart x{i}")

    rng = np.random.default_rng(settings.CHART_SEED)
    while attempts < settings.CHART_ATTEMPTS:
        attempts += 1
        coefficients = _random_coefficients(field, nvars, rng)
        pivots = [j for j, c in enumerate(coefficients) if not field.is_zero(c)]
        if not pivots:
            continue
        if not _misses_locus(gens, _linear_form(field, coefficients)):
            continue
        j = pivots[-1]
        # x_j = (y_j - sum_{i != j} a_i y_i) / a_j, x_i = y_i otherwise
        inv = field.inv(coefficients[j])
        matrix = [[field.one if r == c else field.zero for c in range(nvars)] for r in range(nvars)]
        matrix[j] = [
            inv if c == j else field.neg(field.mul(coefficients[c], inv)) for c in range(nvars)
        ]
        G = F.substitute_linear(matrix)
        logger.debug(f"random hyperplane {coefficients} misses the locus after {attempts} attempts")
        return Chart(j, coefficients, matrix, G, dehomogenize(G, j), attempts)
    raise NoChartFound(
        f"no hyperplane over {field} missing the singular locus in {attempts} attempts; "
        "try a larger base field"
    )


def quadratic_rank(form: Poly) -> int:
    if form.field.characteristic == 2:
        raise CharacteristicTwo("quadratic-form rank is not defined in characteristic 2")
    return rank(form.field, quadratic_form_matrix(form))


def multiplicity_at(f: Poly, point: Sequence[Raw]) -> int:
    if len(point) != f.nvars:
        raise DimensionMismatch(f"point has {len(point)} coordinates, need {f.nvars}")
    moved = f.translate(point)
    if moved.is_zero():
        raise PointNotOnHypersurface("the zero polynomial has no multiplicity")
    if not f.field.is_zero(moved.constant_term()):
        raise PointNotOnHypersurface("the point does not lie on the hypersurface")
    return moved.order()


def tangent_cone_is_smooth(layer: Poly) -> bool:
    """Whether a form in n variables defines a smooth hypersurface in P^{n-1}."""
    return is_projectively_empty(buchberger(jacobian_generators(layer)))


def local_tjurina(f: Poly, point: Sequence[Raw], bound: Optional[int] = None) -> int:
    tau = local_dimension(jacobian_generators(f), point, bound=bound)
    if tau is None:
        raise NonIsolatedSingularity(
            f"the singular locus is not isolated at {list(point)}, or the local Tjurina algebra "
            f"did not stabilize below N={settings.LOCAL_POWER_MAX}"
        )
    return tau


def classify_point(
    f: Poly, point: Sequence[Raw], tjurina: Optional[int] = None
) -> SingularPointReport:
    """Type of a singular point of an affine hypersurface.

    Multiplicity 2: A_1 when the quadratic layer has full rank, A_k with
    k = tau when the corank is one, otherwise Other. Multiplicity m >= 3:
    an ordinary multiple point when the degree-m tangent cone is smooth.
    """
    if f.field.characteristic == 2:
        raise CharacteristicTwo("point classification needs odd or zero characteristic")
    m = multiplicity_at(f, point)
    if m < 2:
        raise SmoothPoint("the hypersurface is smooth at this point")
    n = f.nvars
    moved = f.translate(point)
    layer = moved.homogeneous_part(m)
    quad_rank = None

    def tau() -> int:
        return tjurina if tjurina is not None else local_tjurina(f, point)

    if m == 2:
        quad_rank = quadratic_rank(layer)
        if quad_rank == n:
            kind, k, t = SingularityType.A_K, 1, tjurina if tjurina is not None else 1
        elif quad_rank == n - 1:
            t = tau()
            kind, k = SingularityType.A_K, t
        else:
            kind, k, t = SingularityType.OTHER, None, tau()
    elif tangent_cone_is_smooth(layer):
        kind, k, t = SingularityType.ORDINARY_MULTIPLE, None, tau()
    else:
        kind, k, t = SingularityType.OTHER, None, tau()

    if kind == SingularityType.A_K:
        weighted = True
    elif kind == SingularityType.ORDINARY_MULTIPLE:
        weighted = moved == layer
    else:
        weighted = False
    report = SingularPointReport(
        coordinates=[f.field.format(c) for c in point],
        multiplicity=m,
        type=kind,
        k=k,
        tjurina=t,
        weighted_homogeneous=weighted,
        quadratic_rank=quad_rank,
    )
    report._affine = tuple(point)
    report._point_field = f.field
    metrics.SINGULAR_POINTS.labels(type=kind.value).inc()
    return report


def singular_locus(F: Poly) -> SingularLocusReport:
    """Singular points of {F = 0}, located in one affine chart and classified.

    Over F_q every closed point is listed once with its residue degree; over Q
    only rational points are listed and the rest is ``unresolved_degree``.
    """
    _check_form(F)
    field = F.field
    n, d = F.nvars - 1, F.degree()
    gens = jacobian_generators(F)
    if is_projectively_empty(buchberger(gens)):
        return SingularLocusReport(
            field=str(field), n=n, degree=d, dimension=LocusDimension.EMPTY, tau=0
        )
    try:
        chart = choose_chart(F, gens)
    except PositiveDimensionalLocus:
        logger.info(f"singular locus of a degree {d} form in P^{n} is positive-dimensional")
        return SingularLocusReport(
            field=str(field), n=n, degree=d, dimension=LocusDimension.POSITIVE_DIMENSIONAL
        )
    affine_gb = buchberger(jacobian_generators(chart.f))
    solution = solve_zero_dimensional(affine_gb)
    points = []
    for closed in solution.points:
        embed = univariate.field_embedding(field, closed.field)
        f_local = chart.f.change_field(closed.field, embed)
        report = classify_point(f_local, closed.coordinates, tjurina=closed.multiplicity)
        projective = chart.to_projective(closed.coordinates, closed.field)
        report.coordinates = [closed.field.format(c) for c in _normalize(projective, closed.field)]
        report.residue_degree = closed.degree
        report.conjugates = [
            [closed.field.format(c) for c in _normalize(chart.to_projective(conj, closed.field), closed.field)]
            for conj in closed.conjugates
        ]
        report._projective = tuple(projective)
        points.append(report)
    if solution.unresolved_degree:
        logger.warning(
            f"{solution.unresolved_degree} dimensions of the Tjurina algebra sit at non-rational points"
        )
    logger.info(f"singular locus: {len(points)} closed points, tau = {solution.dimension}")
    return SingularLocusReport(
        field=str(field),
        n=n,
        degree=d,
        dimension=LocusDimension.ZERO_DIMENSIONAL,
        points=points,
        tau=solution.dimension,
        chart=chart.record(),
        unresolved_degree=solution.unresolved_degree,
    )


def _normalize(coordinates: Sequence[Raw], field: FieldSpec) -> List[Raw]:
    """Scale projective coordinates so the last nonzero entry is 1."""
    last = next(c for c in reversed(coordinates) if not field.is_zero(c))
    inv = field.inv(last)
    return [field.mul(c, inv) for c in coordinates]


def global_tjurina(F: Poly) -> TjurinaReport:
    return ideal_power_quotient_dim(F, 1)


def affine_power_quotient_dim(f: Poly, i: int) -> GroebnerBasis:
    """Groebner basis of (f) + J(f)^i in the affine ring."""
    if i not in (1, 2, 3):
        raise InvalidParameter(f"Jacobian power must be 1, 2 or 3, got {i}")
    partials = [g for g in gradient(f) if not g.is_zero()]
    gens = [f]
    for combo in combinations_with_replacement(range(len(partials)), i):
        product = partials[combo[0]]
        for j in combo[1:]:
            product = product * partials[j]
        gens.append(product)
    return buchberger(gens)


def ideal_power_quotient_dim(F: Poly, i: int) -> TjurinaReport:
    """dim R/((f) + J(f)^i) in a chart missing the singular locus."""
    _check_form(F)
    chart = choose_chart(F)
    quotient = quotient_dimension(affine_power_quotient_dim(chart.f, i))
    logger.info(f"dim R/((f)+J(f)^{i}) = {quotient.dimension} in chart {chart.index}")
    return TjurinaReport(
        field=str(F.field),
        tau=quotient.dimension,
        chart=chart.index,
        chart_record=chart.record(),
        dimension=LocusDimension.ZERO_DIMENSIONAL if quotient.dimension else LocusDimension.EMPTY,
        power=i,
        by_degree=quotient.by_degree,
    )


def geometric_points(locus: SingularLocusReport) -> Tuple[Optional[FieldSpec], List[List[Raw]]]:
    """Every geometric singular point, in projective coordinates over one field."""
    base = None
    for point in locus.points:
        field = point._point_field
        if base is None or field.e > base.e:
            base = field
    if base is None:
        return None, []
    # common field: lcm of the residue field degrees
    e = 1
    for point in locus.points:
        e = lcm(e, point._point_field.e)
    common = base if not base.is_finite or e == base.e else finite_field(base.p, e)
    out = []
    for point in locus.points:
        embed = univariate.field_embedding(point._point_field, common)
        for conj in _conjugates(point):
            out.append([embed(c) for c in conj])
    return common, out


def _conjugates(point: SingularPointReport) -> List[List[Raw]]:
    field = point._point_field
    rep = list(point._projective)
    orbit = [rep]
    if field.is_finite:
        base_q = field.p ** (field.e // point.residue_degree)
        for _ in range(point.residue_degree - 1):
            orbit.append([field.pow(c, base_q) for c in orbit[-1]])
    return orbit
