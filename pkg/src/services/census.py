# """Finite-field censuses: quadratic-form ranks, 2-jets, zeta products and
# densities of smooth and certified hypersurfaces."""
import logging
import math
import os
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np
from sympy import factorint

from src.algebra.exactfield import FieldSpec, finite_field
from src.algebra.groebner import buchberger, is_projectively_empty
from src.algebra.linalg import rank
from src.algebra.polyring import (
    Poly,
    form_from_coefficients,
    form_from_index,
    monomials_of_degree,
    number_of_monomials,
    quadratic_form_matrix,
    random_form,
)
from src.algebra.univariate import field_embedding
from src.config.settings import settings
from src.errors import (
    BudgetExceeded,
    DefektError,
    EvenCharacteristic,
    FieldSpecError,
    InvalidParameter,
    NoChartFound,
    UnclassifiedSingularity,
)
from src.models.report_models import (
    CensusRoute,
    Certificate,
    CertificateKind,
    DensityReport,
    Estimate,
    InequalityCheck,
    JetCensus,
    LocusDimension,
    OmpProbability,
    QuadCensus,
    SamplingMode,
    ZetaConvention,
    ZetaReference,
)
from src.services import metrics
from src.services.defect import certify_no_defect
from src.services.singular import jacobian_generators, singular_locus

logger = logging.getLogger(__name__)

# two-sided 95% normal quantile
Z95 = 1.959963984540054

CATEGORIES = (
    "smooth",
    "certified_resolution",
    "certified_odd_ak",
    "mild_inconclusive",
    "unclassified",
)


def odd_field(q: int) -> FieldSpec:
    """F_q for an odd prime power q."""
    factors = factorint(q) if q > 1 else {}
    if len(factors) != 1:
        raise FieldSpecError(f"{q} is not a prime power")
    (p, e), = factors.items()
    if p == 2:
        raise EvenCharacteristic(f"q = {q} is even")
    return finite_field(p, e)


def _check_budget(size: int, budget: int, what: str) -> None:
    if size > budget:
        raise BudgetExceeded(f"{what}: {size} cases exceed the budget of {budget}")


# Quadratic forms
def quad_count_formula(n: int, q: int) -> int:
    """Number of quadratic forms in n variables over F_q of rank >= n - 1."""
    odd_field(q)
    if n < 1:
        raise InvalidParameter(f"n must be positive, got {n}")
    if n % 2:
        return q**n * (quad_count_formula(n - 1, q) if n > 1 else 1)
    value = Fraction(q) ** (n * (n + 1) // 2)
    for j in range(n // 2):
        value *= 1 - Fraction(q) ** (2 * j - n - 1)
    assert value.denominator == 1
    return int(value)


def quad_count_printed(n: int, q: int) -> Fraction:
    """The published closed formula for forms of rank >= n-1, read literally.

    It disagrees with the counts (it is -10 at n = 2, q = 3) and is kept so the
    discrepancy can be reproduced.
    """
    Q = Fraction(q)

    def block(top: int, span: int) -> Fraction:
        acc = Fraction(1)
        for i in range(1, top + 1):
            acc *= Q ** (2 * i) / (Q ** (2 * i) - 1)
        for i in range(span):
            acc *= Q ** (n - i) - 1
        return acc

    return block((n - 1) // 2, n - 1) - block(n // 2, n)


def _quad_bounds(n: int, q: int) -> Tuple[Fraction, Fraction]:
    total = Fraction(q) ** (n * (n + 1) // 2)
    return total * (1 - Fraction(1, q**2)), total * (1 - Fraction(1, q**3))


def _quad_census(n: int, q: int, count: int, route: CensusRoute, histogram: Dict[int, int]) -> QuadCensus:
    lower, upper = _quad_bounds(n, q)
    return QuadCensus(
        n=n,
        q=q,
        count=count,
        route=route,
        histogram=histogram,
        lower_bound=str(lower),
        upper_bound=str(upper),
        within_bounds=lower <= count <= upper,
        printed_formula=str(quad_count_printed(n, q)),
    )


def rank_histogram(field: FieldSpec, n: int, budget: Optional[int] = None) -> Dict[int, int]:
    """Rank of every quadratic form in n variables over ``field``."""
    budget = budget if budget is not None else settings.BRUTE_FORCE_BUDGET
    monomials = monomials_of_degree(n, 2)
    _check_budget(field.q ** len(monomials), budget, "quadratic-form census")
    histogram: Counter = Counter()
    for index in range(field.q ** len(monomials)):
        form = form_from_index(field, n, monomials, index)
        histogram[rank(field, quadratic_form_matrix(form)) if not form.is_zero() else 0] += 1
    return dict(sorted(histogram.items()))


def quad_count_brute(n: int, q: int, budget: Optional[int] = None) -> QuadCensus:
    field = odd_field(q)
    if n < 1:
        raise InvalidParameter(f"n must be positive, got {n}")
    histogram = rank_histogram(field, n, budget)
    count = sum(v for r, v in histogram.items() if r >= n - 1)
    logger.info(f"quadratic forms n={n}, q={q}: {count} of rank >= {n - 1}")
    return _quad_census(n, q, count, CensusRoute.BRUTE_FORCE, histogram)


def quad_census(n: int, q: int, brute: bool = False) -> QuadCensus:
    if brute:
        return quad_count_brute(n, q)
    return _quad_census(n, q, quad_count_formula(n, q), CensusRoute.CLOSED_FORM, {})


# Jets
def jet_census(n: int, r: int, budget: Optional[int] = None) -> JetCensus:
    """Classify every 2-jet f0 + linear + quadratic at a point of A^n over F_r."""
    field = odd_field(r)
    budget = budget if budget is not None else settings.BRUTE_FORCE_BUDGET
    dim_quad = n * (n + 1) // 2
    total = r ** (1 + n + dim_quad)
    _check_budget(total, budget, "jet census")
    monomials = monomials_of_degree(n, 2)
    counts = Counter({key: 0 for key in ("not_on_hypersurface", "smooth", "node", "A_k_ge_2", "worse")})
    for quad_index in range(r**dim_quad):
        form = form_from_index(field, n, monomials, quad_index)
        form_rank = rank(field, quadratic_form_matrix(form)) if not form.is_zero() else 0
        for linear_index in range(r**n):
            for constant in range(r):
                if constant:
                    counts["not_on_hypersurface"] += 1
                elif linear_index:
                    counts["smooth"] += 1
                elif form_rank == n:
                    counts["node"] += 1
                elif form_rank == n - 1:
                    counts["A_k_ge_2"] += 1
                else:
                    counts["worse"] += 1
    probability = 1 - Fraction(counts["worse"], total)
    closed_form = 1 - Fraction(r**dim_quad - quad_count_formula(n, r), total)
    upper = 1 - Fraction(1, r ** (n + 4))
    lower = 1 - Fraction(1, r ** (n + 3))
    logger.info(f"jet census n={n}, r={r}: P = {probability}")
    return JetCensus(
        n=n,
        r=r,
        counts=dict(counts),
        total=total,
        probability=str(probability),
        probability_value=float(probability),
        closed_form=str(closed_form),
        matches_closed_form=probability == closed_form,
        lower_bound=str(lower),
        upper_bound=str(upper),
        sandwich_holds=upper >= probability >= lower,
    )


# Zeta products
def zeta_inverse(n: int, q: int, s: int, convention: ZetaConvention = ZetaConvention.STANDARD) -> Fraction:
    """1 / zeta_{P^n}(s) over F_q as an exact rational."""
    if s <= n:
        raise InvalidParameter(f"need s > n, got s={s}, n={n}")
    start = 0 if convention == ZetaConvention.STANDARD else 1
    value = Fraction(1)
    for i in range(start, n + 1):
        value *= 1 - Fraction(q) ** (i - s)
    return value


def zeta_references(n: int, q: int) -> List[ZetaReference]:
    refs = []
    for label, s in (("smooth", n + 1), ("no_defect", n + 3)):
        for convention in ZetaConvention:
            exact = zeta_inverse(n, q, s, convention)
            refs.append(
                ZetaReference(label=label, convention=convention, s=s, exact=str(exact), value=float(exact))
            )
    return refs


# Density experiments
def wilson_interval(k: int, total: int, z: float = Z95) -> Tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    p = k / total
    denom = 1 + z * z / total
    centre = (p + z * z / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def estimate(count: int, total: int, exact: bool) -> Estimate:
    fraction = Fraction(count, total) if total else Fraction(0)
    low, high = (float(fraction), float(fraction)) if exact else wilson_interval(count, total)
    return Estimate(count=count, fraction=str(fraction), value=float(fraction), ci_low=low, ci_high=high)


def _certify_over_extensions(F: Poly) -> Optional[Certificate]:
    """Certificate for F, moving to F_{q^k} when every chart over F_q meets Sing(F).

    Certificate kinds count geometric points, so they do not change with k.
    Returns None for a positive-dimensional locus.
    """
    base = F.field
    for k in range(1, settings.CHART_EXTENSION_MAX + 1):
        if k == 1:
            G = F
        else:
            ext = finite_field(base.p, base.e * k)
            G = F.change_field(ext, field_embedding(base, ext))
        try:
            locus = singular_locus(G)
        except NoChartFound:
            logger.debug(f"no chart over {G.field}, extending")
            continue
        if locus.dimension == LocusDimension.POSITIVE_DIMENSIONAL:
            return None
        return certify_no_defect(G, locus=locus)
    raise NoChartFound(f"no chart found up to degree {settings.CHART_EXTENSION_MAX} extensions of {base}")


def classify_form(F: Poly) -> str:
    """Census category of one form; see CATEGORIES."""
    if F.is_zero():
        return "unclassified"
    if is_projectively_empty(buchberger(jacobian_generators(F))):
        return "smooth"
    if F.degree() < 2:
        return "unclassified"
    try:
        certificate = _certify_over_extensions(F)
    except UnclassifiedSingularity:
        return "unclassified"
    except DefektError as e:
        logger.debug(f"form left unclassified: {e.code}")
        return "unclassified"
    if certificate is None:
        return "unclassified"
    if certificate.kind == CertificateKind.NO_DEFECT_RESOLUTION:
        return "certified_resolution"
    if certificate.kind == CertificateKind.NO_DEFECT_ODD_AK:
        return "certified_odd_ak"
    return "mild_inconclusive"


@dataclass(frozen=True)
class CensusTask:
    """One work unit. Exhaustive tasks cover representatives [start, stop);
    sampled tasks draw ``stop - start`` forms from the stream of ``chunk``."""

    p: int
    e: int
    n: int
    d: int
    mode: SamplingMode
    start: int
    stop: int
    chunk: int
    seed: Optional[int] = None


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def representative(field: FieldSpec, nvars: int, d: int, index: int) -> Poly:
    """Form number ``index`` among those whose first nonzero coefficient is 1."""
    monomials = monomials_of_degree(nvars, d)
    q = field.q
    for lead in range(len(monomials)):
        block = q ** (len(monomials) - lead - 1)
        if index < block:
            coefficients = [field.zero] * lead + [field.one]
            for _ in range(len(monomials) - lead - 1):
                index, digit = divmod(index, q)
                coefficients.append(field.from_index(digit))
            return form_from_coefficients(field, nvars, monomials, coefficients)
        index -= block
    raise InvalidParameter("representative index out of range")


def run_census_task(task: CensusTask) -> Tuple[Dict[str, int], float]:
    started = time.perf_counter()
    field = finite_field(task.p, task.e)
    tallies: Counter = Counter()
    if task.mode == SamplingMode.EXHAUSTIVE:
        for index in range(task.start, task.stop):
            tallies[classify_form(representative(field, task.n + 1, task.d, index))] += field.q - 1
    else:
        rng = chunk_generator(task.seed, task.chunk)
        for _ in range(task.start, task.stop):
            tallies[classify_form(random_form(field, task.n + 1, task.d, rng))] += 1
    return dict(tallies), time.perf_counter() - started


def _tasks(
    field: FieldSpec, n: int, d: int, mode: SamplingMode, samples: Optional[int], seed: Optional[int], chunk_size: int
) -> List[CensusTask]:
    if mode == SamplingMode.EXHAUSTIVE:
        count = (field.q ** number_of_monomials(n + 1, d) - 1) // (field.q - 1)
    else:
        count = samples
    tasks = []
    for chunk, start in enumerate(range(0, count, chunk_size)):
        tasks.append(
            CensusTask(field.p, field.e, n, d, mode, start, min(start + chunk_size, count), chunk, seed)
        )
    return tasks


def run_tasks(tasks: List[CensusTask], jobs: int) -> Counter:
    """Merge chunk tallies; the sum is the same for any number of workers."""
    merged: Counter = Counter()
    if jobs == 1 or len(tasks) <= 1:
        results = map(run_census_task, tasks)
        for tallies, seconds in results:
            merged.update(tallies)
            metrics.CENSUS_CHUNK_SECONDS.observe(seconds)
        return merged
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        for tallies, seconds in executor.map(run_census_task, tasks, chunksize=1):
            merged.update(tallies)
            metrics.CENSUS_CHUNK_SECONDS.observe(seconds)
    return merged


def density_experiment(
    n: int,
    q: int,
    d: int,
    mode: SamplingMode = SamplingMode.SAMPLE,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
    chunk_size: Optional[int] = None,
    budget: Optional[int] = None,
) -> DensityReport:
    """Fractions of smooth, mildly singular and certified-no-defect forms in S_d."""
    field = odd_field(q)
    if n < 1 or d < 1:
        raise InvalidParameter(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    chunk_size = chunk_size or settings.CENSUS_CHUNK_SIZE
    jobs = jobs if jobs is not None else settings.JOBS
    jobs = jobs or os.cpu_count() or 1
    exhaustive = mode == SamplingMode.EXHAUSTIVE
    total = field.q ** number_of_monomials(n + 1, d)
    if exhaustive:
        budget = budget if budget is not None else settings.EXHAUSTIVE_BUDGET
        _check_budget(total, budget, "exhaustive density census")
        samples, seed = None, None
    else:
        if samples is None or samples < 1 or seed is None:
            raise InvalidParameter("sampling needs a positive sample count and an explicit seed")
        total = samples

    tallies = run_tasks(_tasks(field, n, d, mode, samples, seed, chunk_size), jobs)
    if exhaustive:
        tallies["unclassified"] += 1  # the zero form
    metrics.record_census({category: tallies[category] for category in CATEGORIES})

    smooth = tallies["smooth"]
    by_resolution = smooth + tallies["certified_resolution"]
    no_defect = by_resolution + tallies["certified_odd_ak"]
    mild = no_defect + tallies["mild_inconclusive"]

    def report_estimate(count: int) -> Estimate:
        return estimate(count, total, exhaustive)

    certified = report_estimate(no_defect)
    references = zeta_references(n, q)
    target = next(
        r for r in references if r.label == "no_defect" and r.convention == ZetaConvention.TRUNCATED
    )
    sigma = 0.0 if exhaustive else (certified.ci_high - certified.ci_low) / (2 * Z95)
    slack = target.value - 3 * sigma
    checks = [
        InequalityCheck(
            name="smooth_le_certified",
            lhs=str(Fraction(smooth, total)),
            relation="<=",
            rhs=certified.fraction,
            holds=smooth <= no_defect,
        ),
        InequalityCheck(
            name="certified_no_defect_lower_bound",
            lhs=certified.fraction,
            relation=">=",
            rhs=f"{target.exact} - 3 sigma = {slack:.6f}",
            holds=certified.value >= slack,
        ),
    ]
    logger.info(
        f"density n={n}, q={q}, d={d}: {smooth}/{total} smooth, {no_defect}/{total} certified"
    )
    logger.warning("zeta references are limits as d grows; finite-d fractions are reported beside them")
    return DensityReport(
        n=n,
        q=q,
        d=d,
        mode=mode,
        samples=samples,
        seed=seed,
        total=total,
        smooth=report_estimate(smooth),
        mild=report_estimate(mild),
        certified_by_resolution=report_estimate(by_resolution),
        certified_no_defect=certified,
        inconclusive=report_estimate(total - no_defect),
        unclassified=tallies["unclassified"],
        references=references,
        checks=checks,
        caveat=(
            "reference values are asymptotic in d; agreement at fixed d is not expected, "
            "only the certified lower bound is checked"
        ),
    )


# Ordinary multiple points
def smooth_form_count(field: FieldSpec, nvars: int, m: int, budget: Optional[int] = None) -> int:
    """Number of degree-m forms in ``nvars`` variables defining smooth hypersurfaces."""
    budget = budget if budget is not None else settings.EXHAUSTIVE_BUDGET
    total = field.q ** number_of_monomials(nvars, m)
    _check_budget(total, budget, "smooth-form census")
    count = 0
    for index in range((total - 1) // (field.q - 1)):
        G = representative(field, nvars, m, index)
        if is_projectively_empty(buchberger(jacobian_generators(G))):
            count += field.q - 1
    return count


def omp_local_probability(n: int, r: int, max_m: int) -> OmpProbability:
    """Probability that a random local polynomial in n variables over F_r has
    an ordinary multiple point of multiplicity 3..max_m at a fixed point."""
    field = odd_field(r)
    if n < 2 or max_m < 3:
        raise InvalidParameter(f"need n >= 2 and max_m >= 3, got n={n}, max_m={max_m}")
    counts = {}
    probability = Fraction(0)
    for m in range(3, max_m + 1):
        counts[m] = smooth_form_count(field, n, m)
        # vanishing of every coefficient below degree m, and a smooth degree-m part
        probability += Fraction(counts[m], r ** math.comb(n + m, m))
    logger.info(f"ordinary multiple points n={n}, r={r}, m<={max_m}: {probability}")
    return OmpProbability(
        n=n,
        r=r,
        max_m=max_m,
        smooth_forms=counts,
        probability=str(probability),
        probability_value=float(probability),
    )
