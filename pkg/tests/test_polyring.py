# Tests for sparse polynomials, parsing and calculus
import numpy as np
import pytest

from src.algebra.exactfield import finite_field
from src.algebra.polyring import (
    Poly,
    dehomogenize,
    form_from_index,
    format_poly,
    homogenize,
    jet_at,
    monomials_of_degree,
    number_of_monomials,
    parse_poly,
    partial_derivative,
    quadratic_form_matrix,
    random_form,
)
from src.errors import (
    CoefficientNotInField,
    DimensionMismatch,
    NotHomogeneous,
    PolySyntaxError,
    RationalsNotSamplable,
    UnknownVariable,
)


def test_parse_and_format(QQ):
    f = parse_poly("3 + x0^2 - 1/2*x1*x2", QQ, 3)
    assert format_poly(f) == "x0^2 - 1/2*x1*x2 + 3"
    assert f.degree() == 2
    assert not f.is_homogeneous()


def test_parse_collects_like_terms(QQ):
    f = parse_poly("x0*x1 + x1*x0 - 2*x0*x1", QQ, 2)
    assert f.is_zero()
    assert format_poly(f) == "0"


def test_parse_extension_coefficients(F9):
    f = parse_poly("[0,1]*x0 + x1", F9, 2)
    assert f.coefficient((1, 0)) == (0, 1)
    assert format_poly(f) == "[0,1]*x0 + x1"


def test_parse_affine_offset(QQ):
    f = parse_poly("x1^2 + x2", QQ, 2, var_offset=1)
    assert f.coefficient((2, 0)) == 1
    assert format_poly(f) == "x1^2 + x2"
    with pytest.raises(UnknownVariable):
        parse_poly("x0 + x1", QQ, 2, var_offset=1)


@pytest.mark.parametrize(
    "text, error",
    [
        ("x0^^2", PolySyntaxError),
        ("", PolySyntaxError),
        ("x0 x1", PolySyntaxError),
        ("x0 + *x1", PolySyntaxError),
        ("x5", UnknownVariable),
    ],
)
def test_parse_errors(QQ, text, error):
    with pytest.raises(error):
        parse_poly(text, QQ, 3)


def test_coefficient_outside_prime_field(F5):
    with pytest.raises(CoefficientNotInField):
        parse_poly("1/5*x0", F5, 1)


def test_arithmetic_checks_rings(QQ, F5):
    with pytest.raises(DimensionMismatch):
        parse_poly("x0", QQ, 1) + parse_poly("x0", F5, 1)


def test_monomial_enumeration():
    assert monomials_of_degree(3, 2)[0] == (2, 0, 0)
    assert len(monomials_of_degree(3, 2)) == 6
    assert number_of_monomials(5, 3) == 35
    assert number_of_monomials(3, -1) == 0


def test_form_from_index(F3):
    monomials = monomials_of_degree(2, 2)
    assert form_from_index(F3, 2, monomials, 0).is_zero()
    f = form_from_index(F3, 2, monomials, 1)
    assert f.terms == {(2, 0): 1}


def test_quadratic_form_matrix(QQ):
    matrix = quadratic_form_matrix(parse_poly("x0^2 + x0*x1", QQ, 2))
    assert matrix == [[2, 1], [1, 0]]
    with pytest.raises(NotHomogeneous):
        quadratic_form_matrix(parse_poly("x0^3", QQ, 2))


def test_dehomogenize_round_trip(QQ):
    F = parse_poly("x0^3 + x1^2*x2 - 2*x0*x1*x2", QQ, 3)
    f = dehomogenize(F, 0)
    assert f.nvars == 2 and f.var_offset == 1
    assert homogenize(f, 3) == F


def test_dehomogenize_needs_form(QQ):
    with pytest.raises(NotHomogeneous):
        dehomogenize(parse_poly("x0^2 + x1", QQ, 2), 0)


def test_jet_layers(QQ):
    f = parse_poly("x1^2 + x1*x2 + x2^3", QQ, 2, var_offset=1)
    point = [QQ.from_int(1), QQ.from_int(-1)]
    jet = jet_at(f, point, 3)
    assert jet.layer(0).constant_term() == f.evaluate(point)
    assert jet.as_poly() == f.translate(point)


def test_random_form_needs_finite_field(QQ):
    with pytest.raises(RationalsNotSamplable):
        random_form(QQ, 3, 2, np.random.default_rng(0))


def test_random_form_is_reproducible(F7):
    a = random_form(F7, 3, 4, np.random.default_rng(11))
    b = random_form(F7, 3, 4, np.random.default_rng(11))
    assert a == b
    assert a.is_homogeneous()


def test_substitute_linear_permutes(QQ):
    F = parse_poly("x0^2*x1 + x2^3", QQ, 3)
    one, zero = QQ.one, QQ.zero
    swap = [[zero, one, zero], [one, zero, zero], [zero, zero, one]]
    assert F.substitute_linear(swap) == parse_poly("x1^2*x0 + x2^3", QQ, 3)


def _random_poly(seed):
    rng = np.random.default_rng(seed)
    field = finite_field(7)
    nvars = 2 + seed % 3
    d = 2 + seed % 3
    return field, nvars, d, rng


@pytest.mark.parametrize("seed", range(200))
def test_euler_relation(seed):
    """sum x_i dF/dx_i = d F for forms of degree d prime to p"""
    field, nvars, d, rng = _random_poly(seed)
    F = random_form(field, nvars, d, rng)
    total = Poly.zero(field, nvars)
    for i in range(nvars):
        total = total + Poly.variable(field, nvars, i) * partial_derivative(F, i)
    assert total == F.scale(field.from_int(d))


@pytest.mark.parametrize("seed", range(200))
def test_product_rule(seed):
    field, nvars, d, rng = _random_poly(seed)
    f = random_form(field, nvars, d, rng, homogeneous=False)
    g = random_form(field, nvars, d - 1, rng, homogeneous=False)
    i = seed % nvars
    lhs = partial_derivative(f * g, i)
    rhs = partial_derivative(f, i) * g + f * partial_derivative(g, i)
    assert lhs == rhs


@pytest.mark.parametrize("seed", range(50))
def test_translation_matches_evaluation(seed):
    field, nvars, d, rng = _random_poly(seed)
    f = random_form(field, nvars, d, rng, homogeneous=False)
    a = [field.from_index(int(i)) for i in rng.integers(0, field.q, nvars)]
    b = [field.from_index(int(i)) for i in rng.integers(0, field.q, nvars)]
    moved = f.translate(a)
    assert moved.evaluate(b) == f.evaluate([field.add(x, y) for x, y in zip(a, b)])


@pytest.mark.slow
def test_random_forms_are_uniform(F3):
    """Chi-square over the 27 binary quadratic forms over F3 from 10^5 draws"""
    rng = np.random.default_rng(20240917)
    monomials = monomials_of_degree(2, 2)
    counts = np.zeros(27, dtype=np.int64)
    draws = 100_000
    for _ in range(draws):
        form = random_form(F3, 2, 2, rng)
        index = 0
        for m in monomials:
            index = index * 3 + F3.index_of(form.coefficient(m))
        counts[index] += 1
    expected = draws / 27
    statistic = float(((counts - expected) ** 2 / expected).sum())
    # 0.999 quantile of chi-square with 26 degrees of freedom
    assert statistic < 54.05
    assert counts.min() > 0
