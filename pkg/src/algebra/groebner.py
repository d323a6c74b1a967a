# """Buchberger engine: reduced bases, normal forms, quotient algebras and
# zero-dimensional solving."""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from src.algebra import univariate
from src.algebra.exactfield import FieldSpec, Raw, finite_field
from src.algebra.linalg import SparseEliminator
from src.algebra.polyring import Exponent, Poly, monomials_up_to
from src.config.settings import settings
from src.errors import (
    BudgetExceeded,
    DimensionMismatch,
    NotHomogeneous,
    NotZeroDimensional,
    RingMismatch,
)
from src.services import metrics

logger = logging.getLogger(__name__)


class OrderKind(str, Enum):
    GREVLEX = "grevlex"
    LEX = "lex"
    ELIMINATION = "elimination"


@dataclass(frozen=True)
class MonomialOrder:
    """Monomial order on exponent tuples; variable 0 is the largest.

    ``block`` is the number of leading variables eliminated by an elimination
    order (grevlex inside each block).
    """

    kind: OrderKind = OrderKind.GREVLEX
    block: int = 0

    def key(self, exp: Exponent) -> Tuple[int, ...]:
        if self.kind == OrderKind.LEX:
            return exp
        if self.kind == OrderKind.GREVLEX:
            return (sum(exp),) + tuple(-c for c in reversed(exp))
        head, tail = exp[: self.block], exp[self.block:]
        return (
            (sum(head),)
            + tuple(-c for c in reversed(head))
            + (sum(tail),)
            + tuple(-c for c in reversed(tail))
        )

    def __str__(self) -> str:
        return self.kind.value if self.kind != OrderKind.ELIMINATION else f"elimination({self.block})"


GREVLEX = MonomialOrder(OrderKind.GREVLEX)
LEX = MonomialOrder(OrderKind.LEX)

Terms = Dict[Exponent, Raw]


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _quotient(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


def _coprime(a: Exponent, b: Exponent) -> bool:
    return all(x == 0 or y == 0 for x, y in zip(a, b))


class _Reducer:
    """Reduction against a list of monic polynomials, counting steps."""

    def __init__(self, field: FieldSpec, order: MonomialOrder, budget: int):
        self.field = field
        self.order = order
        self.budget = budget
        self.steps = 0

    def lead(self, terms: Terms) -> Exponent:
        return max(terms, key=self.order.key)

    def monic(self, terms: Terms) -> Terms:
        lead = self.lead(terms)
        inv = self.field.inv(terms[lead])
        return {e: self.field.mul(c, inv) for e, c in terms.items()}

    def _subtract(self, target: Terms, shift: Exponent, factor: Raw, g: Terms) -> None:
        field = self.field
        for e, c in g.items():
            m = tuple(a + b for a, b in zip(e, shift))
            value = field.sub(target.get(m, field.zero), field.mul(factor, c))
            if field.is_zero(value):
                target.pop(m, None)
            else:
                target[m] = value

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceeded(
                f"Groebner computation exceeded {self.budget} reduction steps",
                {"budget": self.budget},
            )

    def reduce(self, terms: Terms, basis: Sequence[Tuple[Exponent, Terms]]) -> Terms:
        """Full reduction; ``basis`` holds (leading monomial, monic terms)."""
        work = dict(terms)
        remainder: Terms = {}
        key = self.order.key
        while work:
            lead = max(work, key=key)
            c = work[lead]
            for lm, g in basis:
                if _divides(lm, lead):
                    self._tick()
                    self._subtract(work, _quotient(lead, lm), c, g)
                    break
            else:
                remainder[lead] = work.pop(lead)
        return remainder

    def spoly(self, f: Tuple[Exponent, Terms], g: Tuple[Exponent, Terms]) -> Terms:
        lcm = _lcm(f[0], g[0])
        out: Terms = {}
        self._subtract(out, _quotient(lcm, f[0]), self.field.neg(self.field.one), f[1])
        self._subtract(out, _quotient(lcm, g[0]), self.field.one, g[1])
        return out


@dataclass
class QuotientBasis:
    """Standard monomials of R/I; ``dimension`` is None when R/I is infinite."""

    monomials: Optional[List[Exponent]]
    dimension: Optional[int]
    by_degree: Dict[int, int] = field(default_factory=dict)

    @property
    def is_finite(self) -> bool:
        return self.dimension is not None


@dataclass
class GroebnerBasis:
    generators: List[Poly]
    order: MonomialOrder
    source: List[Poly]
    field: FieldSpec
    nvars: int
    var_offset: int = 0
    steps: int = 0

    @property
    def leading_monomials(self) -> List[Exponent]:
        return [max(g.terms, key=self.order.key) for g in self.generators]

    def is_unit(self) -> bool:
        return any(not any(lm) for lm in self.leading_monomials)

    def _pairs(self) -> List[Tuple[Exponent, Terms]]:
        return [(max(g.terms, key=self.order.key), g.terms) for g in self.generators]

    def normal_form(self, f: Poly) -> Poly:
        return normal_form(f, self)

    def contains(self, f: Poly) -> bool:
        return normal_form(f, self).is_zero()

    def quotient(self) -> QuotientBasis:
        return quotient_dimension(self)


def buchberger(
    generators: Sequence[Poly],
    order: MonomialOrder = GREVLEX,
    budget: Optional[int] = None,
) -> GroebnerBasis:
    """Reduced Groebner basis with Gebauer-Moeller pair criteria.

    Pairs are processed by the normal strategy: smallest lcm first, ties broken
    by degree, then the order, then the pair indices.
    """
    if not generators:
        raise DimensionMismatch("an ideal needs at least one generator")
    base = generators[0]
    for g in generators[1:]:
        if g.field != base.field or g.nvars != base.nvars:
            raise RingMismatch("generators live in different rings")
    field, nvars = base.field, base.nvars
    budget = settings.BUDGET if budget is None else budget
    red = _Reducer(field, order, budget)
    key = order.key

    polys: List[Tuple[Exponent, Terms]] = []
    for g in generators:
        if g.terms:
            terms = red.monic(g.terms)
            polys.append((red.lead(terms), terms))
    polys.sort(key=lambda t: key(t[0]))

    f: List[Tuple[Exponent, Terms]] = []
    G: List[int] = []
    B: List[Tuple[int, int]] = []

    def update(ih: int) -> None:
        nonlocal G, B
        mh = f[ih][0]
        C = list(G)
        D: List[int] = []
        while C:
            ig = C.pop(0)
            mg = f[ig][0]
            lcm_hg = _lcm(mh, mg)

            def lcm_divides(ip: int) -> bool:
                return _divides(_lcm(mh, f[ip][0]), lcm_hg)

            if _coprime(mh, mg) or (
                not any(lcm_divides(ix) for ix in C) and not any(lcm_divides(ix) for ix in D)
            ):
                D.append(ig)
        E = [(ig, ih) for ig in D if not _coprime(mh, f[ig][0])]
        B_new = []
        for i1, i2 in B:
            lcm12 = _lcm(f[i1][0], f[i2][0])
            if (
                not _divides(mh, lcm12)
                or _lcm(f[i1][0], mh) == lcm12
                or _lcm(f[i2][0], mh) == lcm12
            ):
                B_new.append((i1, i2))
        B = B_new + E
        G = [ig for ig in G if not _divides(mh, f[ig][0])] + [ih]

    for lm, terms in polys:
        current = [f[i] for i in G]
        reduced = red.reduce(terms, current) if current else terms
        if not reduced:
            continue
        reduced = red.monic(reduced)
        f.append((red.lead(reduced), reduced))
        update(len(f) - 1)

    def pair_key(pair: Tuple[int, int]) -> Tuple:
        lcm = _lcm(f[pair[0]][0], f[pair[1]][0])
        return (sum(lcm), key(lcm), pair)

    while B:
        B.sort(key=pair_key)
        i, j = B.pop(0)
        s = red.spoly(f[i], f[j])
        h = red.reduce(s, [f[g] for g in G])
        if h:
            h = red.monic(h)
            f.append((red.lead(h), h))
            update(len(f) - 1)

    # minimal basis, then interreduce
    leads = [f[i] for i in G]
    minimal = [
        p for idx, p in enumerate(leads)
        if not any(_divides(q[0], p[0]) and (q[0] != p[0] or jdx < idx) for jdx, q in enumerate(leads) if jdx != idx)
    ]
    reduced_basis: List[Tuple[Exponent, Terms]] = []
    for idx, (lm, terms) in enumerate(minimal):
        others = [q for jdx, q in enumerate(minimal) if jdx != idx]
        tail = {e: c for e, c in terms.items() if e != lm}
        tail = red.reduce(tail, others) if others else tail
        tail[lm] = terms[lm]
        reduced_basis.append((lm, tail))
    reduced_basis.sort(key=lambda t: key(t[0]), reverse=True)

    metrics.GROEBNER_BASES.labels(order=order.kind.value).inc()
    metrics.REDUCTION_STEPS.inc(red.steps)
    logger.debug(f"Groebner basis of {len(generators)} generators: {len(reduced_basis)} elements, {red.steps} steps")
    return GroebnerBasis(
        generators=[Poly(field, nvars, t, base.var_offset) for _, t in reduced_basis],
        order=order,
        source=list(generators),
        field=field,
        nvars=nvars,
        var_offset=base.var_offset,
        steps=red.steps,
    )


def normal_form(f: Poly, gb: GroebnerBasis) -> Poly:
    if f.field != gb.field or f.nvars != gb.nvars:
        raise RingMismatch(f"polynomial over {f.field}/{f.nvars} vars, basis over {gb.field}/{gb.nvars} vars")
    red = _Reducer(gb.field, gb.order, settings.BUDGET)
    return Poly(gb.field, gb.nvars, red.reduce(f.terms, gb._pairs()), f.var_offset)


def _pure_powers(gb: GroebnerBasis) -> Optional[List[int]]:
    """Smallest pure power of each variable among leading monomials."""
    bounds: List[Optional[int]] = [None] * gb.nvars
    for lm in gb.leading_monomials:
        support = [i for i, k in enumerate(lm) if k]
        if len(support) == 1:
            i = support[0]
            if bounds[i] is None or lm[i] < bounds[i]:
                bounds[i] = lm[i]
    if any(b is None for b in bounds):
        return None
    return bounds


def quotient_dimension(gb: GroebnerBasis) -> QuotientBasis:
    if gb.is_unit():
        return QuotientBasis(monomials=[], dimension=0, by_degree={})
    bounds = _pure_powers(gb)
    if bounds is None:
        return QuotientBasis(monomials=None, dimension=None, by_degree={})
    leads = gb.leading_monomials
    monomials: List[Exponent] = []

    def walk(prefix: Tuple[int, ...]) -> None:
        i = len(prefix)
        if i == gb.nvars:
            if not any(_divides(lm, prefix) for lm in leads):
                monomials.append(prefix)
            return
        for k in range(bounds[i]):
            walk(prefix + (k,))

    walk(())
    monomials.sort(key=gb.order.key)
    by_degree: Dict[int, int] = {}
    for m in monomials:
        by_degree[sum(m)] = by_degree.get(sum(m), 0) + 1
    return QuotientBasis(monomials=monomials, dimension=len(monomials), by_degree=by_degree)


def is_projectively_empty(gb: GroebnerBasis) -> bool:
    """True when the homogeneous ideal cuts out at most the cone point."""
    if not all(g.is_homogeneous() for g in gb.source):
        raise NotHomogeneous("projective emptiness needs homogeneous generators")
    return gb.is_unit() or _pure_powers(gb) is not None


# Local algebras
def truncated_quotient_dimension(generators: Sequence[Poly], power: int) -> int:
    """dim R/(I + m^N) at the origin, by elimination on the degree < N part."""
    base = generators[0]
    nvars, field = base.nvars, base.field
    columns = monomials_up_to(nvars, power - 1)
    elim = SparseEliminator(field)
    for g in generators:
        low = g.order()
        if low is None or low >= power:
            continue
        for shift in monomials_up_to(nvars, power - 1 - low):
            room = power - sum(shift)
            row = {
                tuple(a + b for a, b in zip(e, shift)): c
                for e, c in g.terms.items()
                if sum(e) < room
            }
            if row:
                elim.add(row)
    return len(columns) - elim.rank


def local_dimension(
    generators: Sequence[Poly],
    point: Sequence[Raw],
    bound: Optional[int] = None,
) -> Optional[int]:
    """Length of the local algebra of R/I at ``point`` by stabilized powers.

    The power N doubles from LOCAL_POWER_START; two equal consecutive values
    decide. The truncated dimension grows strictly until it stabilizes, so a
    bound B on the length makes the value at N = B + 1 exact, and a value
    above B means the point is not isolated. Without a caller bound, B is
    (max generator degree)^nvars, the intersection bound for n generic
    combinations of the generators.
    Returns None for a non-isolated point, or when nothing stabilizes below
    LOCAL_POWER_MAX.
    """
    moved = [g.translate(point) for g in generators if not g.is_zero()]
    if not moved:
        return None
    if bound is None:
        bound = max(g.degree() for g in moved) ** moved[0].nvars
    power = settings.LOCAL_POWER_START
    previous = None
    while power <= settings.LOCAL_POWER_MAX:
        effective = max(1, min(power, bound + 1))
        value = truncated_quotient_dimension(moved, effective)
        logger.debug(f"local dimension at N={effective}: {value}")
        if value > bound:
            logger.debug(f"local length exceeds {bound}: point is not isolated")
            return None
        if effective > bound:
            return value
        if value == previous:
            return value
        previous = value
        power *= 2
    return None


# Solving
@dataclass
class ClosedPoint:
    """Galois orbit of a solution; coordinates live in ``field``."""

    coordinates: Tuple[Raw, ...]
    field: FieldSpec
    degree: int
    multiplicity: int
    conjugates: List[Tuple[Raw, ...]]


@dataclass
class SolveResult:
    points: List[ClosedPoint]
    dimension: int
    unresolved_degree: int = 0


def _specialize(g: Poly, var: int, values: Dict[int, Raw], field: FieldSpec) -> univariate.Dense:
    """Univariate polynomial in x_var after substituting the known values."""
    coefficients: Dict[int, Raw] = {}
    for e, c in g.terms.items():
        v = c
        for i, k in enumerate(e):
            if i != var and k:
                v = field.mul(v, field.pow(values[i], k))
        coefficients[e[var]] = field.add(coefficients.get(e[var], field.zero), v)
    top = max(coefficients, default=-1)
    return univariate.trim(field, [coefficients.get(i, field.zero) for i in range(top + 1)])


def _points_over(lex_gens: List[Poly], nvars: int, field: FieldSpec) -> List[Tuple[Raw, ...]]:
    """All solutions with coordinates in ``field`` by back-substitution."""
    partial: List[Dict[int, Raw]] = [{}]
    for var in range(nvars - 1, -1, -1):
        relevant = [g for g in lex_gens if all(e[i] == 0 for e in g.terms for i in range(var))]
        extended = []
        for values in partial:
            acc: univariate.Dense = []
            consistent = True
            for g in relevant:
                u = _specialize(g, var, values, field)
                if not u:
                    continue
                if len(u) == 1:
                    consistent = False
                    break
                acc = univariate.gcd(field, acc, u) if acc else univariate.monic(field, u)
            if not consistent:
                continue
            if not acc:
                raise NotZeroDimensional(f"x{var} is free in the solution set")
            for root in univariate.roots_in_field(field, acc):
                grown = dict(values)
                grown[var] = root
                extended.append(grown)
        partial = extended
    points = [tuple(v[i] for i in range(nvars)) for v in partial]
    return sorted(points, key=lambda pt: tuple(field.sort_key(c) for c in pt))


def _point_degree(point: Tuple[Raw, ...], field: FieldSpec, q: int, e: int) -> int:
    for d in range(1, e + 1):
        if e % d == 0 and all(field.is_subfield_fixed(c, q**d) for c in point):
            return d
    return e


def solve_zero_dimensional(gb: GroebnerBasis) -> SolveResult:
    """Closed points of a zero-dimensional ideal with their multiplicities.

    Over F_q every closed point is found, in the least extension containing it.
    Over Q only rational points are listed; the rest is ``unresolved_degree``.
    """
    quotient = quotient_dimension(gb)
    if not quotient.is_finite:
        raise NotZeroDimensional("the quotient ring is infinite")
    total = quotient.dimension
    if total == 0:
        return SolveResult(points=[], dimension=0)
    lex = gb if gb.order.kind == OrderKind.LEX else buchberger(gb.generators, LEX)
    base = gb.field
    gens = gb.generators

    if not base.is_finite:
        points = _points_over(lex.generators, gb.nvars, base)
        found = []
        for pt in points:
            mult = local_dimension(gens, pt, bound=total)
            found.append(ClosedPoint(pt, base, 1, mult, [pt]))
        counted = sum(p.multiplicity for p in found)
        return SolveResult(points=found, dimension=total, unresolved_degree=total - counted)

    q = base.q
    found: List[ClosedPoint] = []
    counted = 0
    for e in range(1, total + 1):
        large = base if e == 1 else finite_field(base.p, base.e * e)
        embed = univariate.field_embedding(base, large)
        lifted = [g.change_field(large, embed) for g in lex.generators]
        candidates = _points_over(lifted, gb.nvars, large)
        seen = set()
        lifted_gens = [g.change_field(large, embed) for g in gens]
        for pt in candidates:
            if pt in seen or _point_degree(pt, large, q, e) != e:
                continue
            orbit = [pt]
            for _ in range(e - 1):
                orbit.append(tuple(large.pow(c, q) for c in orbit[-1]))
            seen.update(orbit)
            orbit.sort(key=lambda x: tuple(large.sort_key(c) for c in x))
            mult = local_dimension(lifted_gens, orbit[0], bound=total)
            found.append(ClosedPoint(orbit[0], large, e, mult, orbit))
            counted += e * mult
        if counted >= total:
            break
    if counted != total:
        logger.warning(f"closed points account for {counted} of {total} dimensions")
    return SolveResult(points=found, dimension=total, unresolved_degree=max(0, total - counted))
