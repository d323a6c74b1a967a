# Tests for finite-field censuses and density experiments
from fractions import Fraction

import pytest

from src.algebra.exactfield import finite_field
from src.errors import BudgetExceeded, EvenCharacteristic, FieldSpecError, InvalidParameter, NoChartFound
from src.models.report_models import CensusRoute, SamplingMode, ZetaConvention
from src.services import metrics
from src.services.census import (
    CensusTask,
    chunk_generator,
    classify_form,
    density_experiment,
    estimate,
    jet_census,
    odd_field,
    omp_local_probability,
    quad_census,
    quad_count_brute,
    quad_count_formula,
    quad_count_printed,
    rank_histogram,
    representative,
    run_census_task,
    run_tasks,
    wilson_interval,
    zeta_inverse,
    zeta_references,
)
from src.services.singular import singular_locus


# Quadratic forms
@pytest.mark.parametrize("n, q, expected", [(2, 3, 26), (3, 3, 702), (4, 3, 56628), (1, 5, 5)])
def test_quad_count_formula(n, q, expected):
    assert quad_count_formula(n, q) == expected


@pytest.mark.parametrize(
    "n, q",
    [(2, 3), (3, 3), (2, 5), (3, 5), (2, 7), (2, 9), pytest.param(4, 3, marks=pytest.mark.slow)],
)
def test_quad_brute_force_matches_formula(n, q):
    report = quad_count_brute(n, q)
    assert report.count == quad_count_formula(n, q)
    assert report.route == CensusRoute.BRUTE_FORCE
    assert report.within_bounds
    assert sum(report.histogram.values()) == q ** (n * (n + 1) // 2)


def test_rank_histogram(F3):
    assert rank_histogram(F3, 2) == {0: 1, 1: 8, 2: 18}
    # nonsingular ternary forms over F3
    assert rank_histogram(F3, 3)[3] == 468


def test_quad_census_closed_form():
    report = quad_census(3, 3)
    assert report.route == CensusRoute.CLOSED_FORM
    assert report.count == 702
    assert Fraction(report.lower_bound) <= 702 <= Fraction(report.upper_bound)


def test_printed_formula_disagrees():
    assert quad_count_printed(2, 3) == -10
    assert quad_census(2, 3).printed_formula == "-10"


def test_field_guards():
    with pytest.raises(EvenCharacteristic):
        quad_count_formula(2, 4)
    with pytest.raises(FieldSpecError):
        odd_field(6)
    with pytest.raises(InvalidParameter):
        quad_count_formula(0, 3)
    with pytest.raises(BudgetExceeded):
        quad_count_brute(3, 3, budget=100)


# Jets
def test_jet_census_plane():
    report = jet_census(2, 3)
    assert Fraction(report.probability) == Fraction(728, 729)
    assert report.matches_closed_form
    assert report.sandwich_holds
    assert sum(report.counts.values()) == report.total == 3**6


def test_jet_census_space():
    report = jet_census(3, 3)
    assert Fraction(report.probability) == Fraction(59022, 59049)
    assert report.matches_closed_form
    # at n = 3 the upper end of the sandwich is attained
    assert Fraction(report.upper_bound) == Fraction(report.probability)


def test_jet_census_budget():
    with pytest.raises(BudgetExceeded):
        jet_census(2, 3, budget=10)


# Zeta products
def test_zeta_inverse():
    assert zeta_inverse(2, 3, 3) == Fraction(416, 729)
    truncated = zeta_inverse(3, 3, 6, ZetaConvention.TRUNCATED)
    assert truncated == Fraction(26, 27) * Fraction(80, 81) * Fraction(242, 243)
    with pytest.raises(InvalidParameter):
        zeta_inverse(3, 3, 3)


def test_zeta_references():
    refs = zeta_references(2, 3)
    assert [(r.label, r.s) for r in refs] == [
        ("smooth", 3),
        ("smooth", 3),
        ("no_defect", 5),
        ("no_defect", 5),
    ]
    standard = next(r for r in refs if r.label == "smooth" and r.convention == ZetaConvention.STANDARD)
    assert standard.exact == "416/729"


# Estimates
@pytest.mark.parametrize("k, total", [(0, 10), (3, 10), (10, 10), (500, 1000), (1, 100000)])
def test_wilson_interval(k, total):
    low, high = wilson_interval(k, total)
    assert 0.0 <= low <= high <= 1.0
    assert low - 1e-12 <= k / total <= high + 1e-12


def test_exact_estimate_has_no_width():
    value = estimate(26, 27, exact=True)
    assert value.fraction == "26/27"
    assert value.ci_low == value.ci_high == value.value


# Density
def test_classify_form(poly, data_poly, F5):
    assert classify_form(data_poly("smooth_cubic", F5)) == "smooth"
    assert classify_form(data_poly("node_cubic", F5)) == "certified_resolution"
    assert classify_form(data_poly("cone3", F5)) == "mild_inconclusive"
    assert classify_form(poly("x0^2", F5, nvars=3)) == "unclassified"
    assert classify_form(poly("x0^2", F5, nvars=3).scale(0)) == "unclassified"


def test_classify_form_moves_to_an_extension(poly, F3, mocker):
    """A form with no chart over F3 is classified over F9"""

    def no_chart_over_prime_fields(F):
        if F.field.e == 1:
            raise NoChartFound("every line meets the singular locus")
        return singular_locus(F)

    search = mocker.patch("src.services.census.singular_locus", side_effect=no_chart_over_prime_fields)
    nodal_cubic = poly("x1^2*x2 - x0^2*x2 - x0^3", F3)
    assert classify_form(nodal_cubic) == "certified_resolution"
    assert [call.args[0].field.q for call in search.call_args_list] == [3, 9]


def test_classify_form_gives_up_without_a_chart(poly, F3, mocker):
    mocker.patch("src.services.census.singular_locus", side_effect=NoChartFound("none"))
    assert classify_form(poly("x1^2*x2 - x0^2*x2 - x0^3", F3)) == "unclassified"


def test_representatives_are_normalized(F3):
    first = representative(F3, 2, 1, 0)
    assert first.terms == {(1, 0): 1}
    # (3^2 - 1) / 2 representatives of linear forms in two variables
    last = representative(F3, 2, 1, 3)
    assert last.terms == {(0, 1): 1}
    with pytest.raises(InvalidParameter):
        representative(F3, 2, 1, 4)


def test_exhaustive_lines():
    report = density_experiment(2, 3, 1, SamplingMode.EXHAUSTIVE, jobs=1)
    assert report.total == 27
    assert report.smooth.fraction == "26/27"
    assert report.unclassified == 1
    assert report.smooth.ci_low == report.smooth.ci_high
    assert all(check.holds for check in report.checks if check.name == "smooth_le_certified")


def test_exhaustive_budget():
    with pytest.raises(BudgetExceeded):
        density_experiment(2, 3, 2, SamplingMode.EXHAUSTIVE, jobs=1, budget=100)


def test_sampling_needs_seed():
    with pytest.raises(InvalidParameter):
        density_experiment(1, 3, 2, samples=5, jobs=1)
    with pytest.raises(InvalidParameter):
        density_experiment(1, 3, 2, samples=0, seed=1, jobs=1)


def test_density_records_metrics(mocker):
    record = mocker.patch.object(metrics, "record_census")
    density_experiment(1, 3, 2, samples=4, seed=7, jobs=1)
    (tallies,), _ = record.call_args
    assert sum(tallies.values()) == 4


def test_density_warns_about_asymptotics(caplog):
    with caplog.at_level("WARNING", logger="src.services.census"):
        report = density_experiment(1, 3, 2, samples=3, seed=1, jobs=1)
    assert "asymptotic" in report.caveat
    assert any("zeta references" in r.message for r in caplog.records)


def test_chunk_streams_are_independent():
    a = chunk_generator(5, 0).integers(0, 1 << 30, 4).tolist()
    b = chunk_generator(5, 1).integers(0, 1 << 30, 4).tolist()
    assert a != b
    assert a == chunk_generator(5, 0).integers(0, 1 << 30, 4).tolist()


def test_tallies_do_not_depend_on_chunking():
    # 13 binary quadrics up to scalars, in uneven chunks
    bounds = [0, 2, 4, 6, 8, 10, 12, 13]
    tasks = [
        CensusTask(3, 1, 1, 2, SamplingMode.EXHAUSTIVE, start, stop, i)
        for i, (start, stop) in enumerate(zip(bounds, bounds[1:]))
    ]
    whole = [CensusTask(3, 1, 1, 2, SamplingMode.EXHAUSTIVE, 0, 13, 0)]
    assert run_tasks(tasks, 1) == run_tasks(whole, 1)


def test_worker_count_does_not_change_report():
    serial = density_experiment(1, 3, 2, samples=12, seed=3, jobs=1, chunk_size=4)
    parallel = density_experiment(1, 3, 2, samples=12, seed=3, jobs=2, chunk_size=4)
    assert serial.model_dump_json() == parallel.model_dump_json()


@pytest.mark.parametrize("seed", range(200))
def test_seeded_census_is_reproducible(seed):
    """Identical seeds give byte-identical reports"""
    first = density_experiment(1, 3, 2, samples=3, seed=seed, jobs=1)
    second = density_experiment(1, 3, 2, samples=3, seed=seed, jobs=1)
    assert first.model_dump_json() == second.model_dump_json()
    assert first.smooth.count <= first.certified_no_defect.count <= first.mild.count


def test_binary_quadrics_exhaustive():
    report = density_experiment(1, 3, 2, SamplingMode.EXHAUSTIVE, jobs=1)
    assert report.total == 27
    # 8 squares of linear forms and the zero form are not smooth
    assert report.smooth.count == 18
    assert report.unclassified == 1


def test_task_reports_timing():
    tallies, seconds = run_census_task(CensusTask(3, 1, 1, 2, SamplingMode.SAMPLE, 0, 2, 0, seed=9))
    assert sum(tallies.values()) == 2
    assert seconds >= 0


# Ordinary multiple points
def test_omp_probability():
    report = omp_local_probability(2, 3, 3)
    assert report.smooth_forms == {3: 48}
    assert Fraction(report.probability) == Fraction(48, 59049)


def test_omp_guards():
    with pytest.raises(InvalidParameter):
        omp_local_probability(1, 3, 3)
    with pytest.raises(InvalidParameter):
        omp_local_probability(2, 3, 2)


# Acceptance experiments
@pytest.mark.slow
def test_exhaustive_conics():
    report = density_experiment(2, 3, 2, SamplingMode.EXHAUSTIVE, jobs=1)
    assert report.smooth.count == rank_histogram(finite_field(3), 3)[3]


@pytest.mark.slow
def test_plane_sextic_density():
    report = density_experiment(2, 3, 6, samples=100_000, seed=20240917)
    assert abs(report.smooth.value - 416 / 729) <= 0.02
    assert report.checks[0].holds


@pytest.mark.slow
def test_exhaustive_plane_cubics():
    report = density_experiment(2, 3, 3, SamplingMode.EXHAUSTIVE)
    assert report.total == 3**10
    assert report.smooth.ci_low == report.smooth.ci_high
    assert any(r.exact == "416/729" for r in report.references)
    assert report.checks[0].holds


@pytest.mark.slow
@pytest.mark.parametrize("d", [3, 4, 5])
def test_surface_density_lower_bound(d):
    report = density_experiment(3, 3, d, samples=10_000, seed=20240917)
    bound = next(c for c in report.checks if c.name == "certified_no_defect_lower_bound")
    assert bound.holds
