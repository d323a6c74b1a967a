# Tests for singular loci, point classification and Tjurina numbers
import numpy as np
import pytest

from src.algebra.exactfield import finite_field
from src.algebra.linalg import inverse
from src.algebra.polyring import Poly, parse_poly, random_form
from src.errors import (
    InvalidParameter,
    NoChartFound,
    NonIsolatedSingularity,
    NotHomogeneous,
    PointNotOnHypersurface,
    PositiveDimensionalLocus,
    SmoothPoint,
)
from src.models.report_models import LocusDimension, SingularityType
from src.services.defect import restriction_image_dims
from src.services.singular import (
    choose_chart,
    classify_point,
    global_tjurina,
    ideal_power_quotient_dim,
    local_tjurina,
    multiplicity_at,
    singular_locus,
)


def _fermat_cone(n, m, field):
    return parse_poly(" + ".join(f"x{i}^{m}" for i in range(1, n + 1)), field, n + 1)


@pytest.mark.parametrize("n, m", [(2, 3), (3, 3), (3, 4), (4, 3)])
def test_fermat_cone_tjurina(QQ, n, m):
    """The cone over a Fermat hypersurface has tau = (m - 1)^n at its vertex"""
    report = global_tjurina(_fermat_cone(n, m, QQ))
    assert report.tau == (m - 1) ** n
    assert report.chart == 0


def test_cone3_tjurina(data_poly):
    report = global_tjurina(data_poly("cone3"))
    assert (report.tau, report.chart) == (8, 0)
    assert report.dimension == LocusDimension.ZERO_DIMENSIONAL


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_a_k_recognition(QQ, n, k):
    squares = " + ".join(f"x{i}^2" for i in range(2, n + 1))
    f = parse_poly(f"x1^{k + 1} + {squares}", QQ, n, var_offset=1)
    report = classify_point(f, [QQ.zero] * n)
    assert report.type == SingularityType.A_K
    assert report.k == k
    assert report.tjurina == k
    assert report.tag == f"A_{k}"
    assert report.weighted_homogeneous


def test_classify_rejects_smooth_and_absent_points(QQ):
    f = parse_poly("x1^2 + x2", QQ, 2, var_offset=1)
    with pytest.raises(SmoothPoint):
        classify_point(f, [QQ.zero, QQ.zero])
    with pytest.raises(PointNotOnHypersurface):
        classify_point(f, [QQ.one, QQ.zero])


def test_other_singularity(QQ):
    # D_4: corank 2 quadratic part
    f = parse_poly("x1^2*x2 + x2^3 + x3^2", QQ, 3, var_offset=1)
    report = classify_point(f, [QQ.zero] * 3)
    assert report.type == SingularityType.OTHER
    assert report.tag == "Other"
    assert report.tjurina == 4


def test_multiplicity(QQ):
    f = parse_poly("x1^3 + x2^4", QQ, 2, var_offset=1)
    assert multiplicity_at(f, [QQ.zero, QQ.zero]) == 3


def test_node_cubic_surface(data_poly):
    locus = singular_locus(data_poly("node_cubic"))
    assert locus.dimension == LocusDimension.ZERO_DIMENSIONAL
    assert locus.tau == 1
    (point,) = locus.points
    assert point.coordinates == ["0", "0", "0", "1"]
    assert point.tag == "A_1"
    assert point.quadratic_rank == 3


def test_cone3_vertex_is_ordinary(data_poly):
    (point,) = singular_locus(data_poly("cone3")).points
    assert point.type == SingularityType.ORDINARY_MULTIPLE
    assert point.tag == "OMP(3)"
    assert point.coordinates == ["1", "0", "0", "0"]
    assert point.tjurina == 8
    assert point.weighted_homogeneous


def test_smooth_cubic_has_empty_locus(data_poly):
    locus = singular_locus(data_poly("smooth_cubic"))
    assert locus.dimension == LocusDimension.EMPTY
    assert locus.tau == 0
    assert locus.points == []


def test_three_lines_need_a_random_chart(poly):
    locus = singular_locus(poly("x0*x1*x2"))
    assert locus.chart.coordinate_change
    assert locus.tau == 3
    assert sorted(p.coordinates for p in locus.points) == [
        ["0", "0", "1"],
        ["0", "1", "0"],
        ["1", "0", "0"],
    ]
    assert all(p.tag == "A_1" for p in locus.points)


def test_conjugate_nodes_over_f3(poly, F3):
    # a line and a conic meeting in a pair of conjugate points
    locus = singular_locus(poly("x2*x0^2 + x2*x1^2", F3))
    assert locus.tau == 3
    assert locus.geometric_count == 3
    assert sorted(p.residue_degree for p in locus.points) == [1, 2]
    pair = next(p for p in locus.points if p.residue_degree == 2)
    assert len(pair.conjugates) == 2
    assert all(p.tag == "A_1" for p in locus.points)


def test_irrational_points_are_unresolved(poly):
    locus = singular_locus(poly("x2*x0^2 - 2*x2*x1^2"))
    assert locus.tau == 3
    assert [p.coordinates for p in locus.points] == [["0", "0", "1"]]
    assert locus.unresolved_degree == 2


def test_positive_dimensional_locus(poly):
    locus = singular_locus(poly("x0^2", nvars=3))
    assert locus.dimension == LocusDimension.POSITIVE_DIMENSIONAL
    assert locus.tau is None
    with pytest.raises(PositiveDimensionalLocus):
        choose_chart(poly("x0^2", nvars=3))


def test_not_a_form(poly):
    with pytest.raises(NotHomogeneous):
        singular_locus(poly("x0^2 + x1", nvars=3))
    with pytest.raises(InvalidParameter):
        singular_locus(poly("x0 + x1"))


def test_jacobian_powers(data_poly):
    cone = data_poly("cone3")
    assert ideal_power_quotient_dim(cone, 1).tau == 8
    # J^2 and J^3 are generated in degrees 4 and 6 of x1..x3
    assert ideal_power_quotient_dim(cone, 3).tau > ideal_power_quotient_dim(cone, 2).tau > 8
    with pytest.raises(InvalidParameter):
        ideal_power_quotient_dim(cone, 4)


def _singular_curve(seed):
    """Random plane curve over F7 forced to be singular at (0:0:1)."""
    rng = np.random.default_rng(seed)
    field = finite_field(7)
    d = 3 + seed % 2
    F = random_form(field, 3, d, rng)
    terms = {e: c for e, c in F.terms.items() if e[2] < d - 1}
    return Poly(field, 3, terms), rng


@pytest.mark.parametrize("seed", range(200))
def test_local_tjurina_numbers_add_up(seed):
    """Local Tjurina numbers weighted by residue degree give the global one"""
    F, _ = _singular_curve(seed)
    if F.is_zero() or not F.is_homogeneous():
        return
    try:
        locus = singular_locus(F)
    except NoChartFound:
        pytest.skip("no chart over F7")
    if locus.dimension != LocusDimension.ZERO_DIMENSIONAL:
        assert locus.dimension == LocusDimension.POSITIVE_DIMENSIONAL
        return
    assert locus.unresolved_degree == 0
    assert sum(p.tjurina * p.residue_degree for p in locus.points) == locus.tau
    assert locus.tau == global_tjurina(F).tau
    assert any(p.coordinates == ["0", "0", "1"] for p in locus.points)


@pytest.mark.parametrize("seed", range(200))
def test_classification_survives_coordinate_change(seed):
    """A cusp stays one A_2 point under a random invertible linear change"""
    field = finite_field(7)
    F = parse_poly("x1^2*x2 - x0^3", field, 3)
    rng = np.random.default_rng(seed)
    while True:
        matrix = [[field.from_index(int(i)) for i in rng.integers(0, 7, 3)] for _ in range(3)]
        if inverse(field, matrix) is not None:
            break
    locus = singular_locus(F.substitute_linear(matrix))
    assert [p.tag for p in locus.points] == ["A_2"]
    assert locus.tau == 2


@pytest.mark.parametrize("seed", range(200))
def test_restriction_images_grow_and_saturate(seed):
    """Images of S_i in T(f) increase with i and fill it by i = tau - 1"""
    F, _ = _singular_curve(seed)
    if F.is_zero() or not F.is_homogeneous():
        return
    try:
        tau = global_tjurina(F).tau
        dims = restriction_image_dims(F, max(tau, 1))
    except PositiveDimensionalLocus:
        return
    except NoChartFound:
        pytest.skip("no chart over F7")
    # strictly increasing until the whole algebra is reached
    assert all(a < b or a == tau for a, b in zip(dims, dims[1:]))
    assert all(v <= tau for v in dims)
    if tau:
        assert dims[tau - 1] == tau


def test_local_tjurina_quasi_homogeneous(QQ):
    f = parse_poly("x1^4 + x2^5", QQ, 2, var_offset=1)
    assert local_tjurina(f, [QQ.zero, QQ.zero]) == 12


def test_non_isolated_point_is_rejected(QQ):
    """A point on a singular line has no finite local Tjurina algebra"""
    f = parse_poly("x1^2 + x2^2", QQ, 3, var_offset=1)
    with pytest.raises(NonIsolatedSingularity):
        local_tjurina(f, [QQ.zero] * 3)
