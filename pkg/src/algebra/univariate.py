# """Dense univariate polynomials over an exact field: gcd, powers and roots."""
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np
from sympy import Poly as SymPoly
from sympy import Rational, Symbol

from src.algebra.exactfield import FieldSpec, Raw
from src.errors import FieldSpecError

logger = logging.getLogger(__name__)

# Coefficient lists run from the constant term upwards, with no trailing zeros.
Dense = List[Raw]


def trim(field: FieldSpec, a: Sequence[Raw]) -> Dense:
    out = list(a)
    while out and field.is_zero(out[-1]):
        out.pop()
    return out


def degree(a: Dense) -> int:
    return len(a) - 1


def add(field: FieldSpec, a: Dense, b: Dense) -> Dense:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = field.add(out[i], c)
    return trim(field, out)


def sub(field: FieldSpec, a: Dense, b: Dense) -> Dense:
    return add(field, a, [field.neg(c) for c in b])


def mul(field: FieldSpec, a: Dense, b: Dense) -> Dense:
    if not a or not b:
        return []
    out = [field.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if field.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = field.add(out[i + j], field.mul(x, y))
    return trim(field, out)


def monic(field: FieldSpec, a: Dense) -> Dense:
    if not a:
        return []
    lead = field.inv(a[-1])
    return [field.mul(c, lead) for c in a]


def divmod_(field: FieldSpec, a: Dense, b: Dense) -> Tuple[Dense, Dense]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(a)
    if len(rem) < len(b):
        return [], trim(field, rem)
    quot = [field.zero] * (len(rem) - len(b) + 1)
    lead_inv = field.inv(b[-1])
    for shift in range(len(rem) - len(b), -1, -1):
        c = rem[shift + len(b) - 1]
        if field.is_zero(c):
            continue
        c = field.mul(c, lead_inv)
        quot[shift] = c
        for j, y in enumerate(b):
            rem[shift + j] = field.sub(rem[shift + j], field.mul(c, y))
    return trim(field, quot), trim(field, rem[: len(b) - 1])


def gcd(field: FieldSpec, a: Dense, b: Dense) -> Dense:
    a, b = trim(field, a), trim(field, b)
    while b:
        a, b = b, divmod_(field, a, b)[1]
    return monic(field, a)


def powmod(field: FieldSpec, base: Dense, exponent: int, modulus: Dense) -> Dense:
    result: Dense = [field.one]
    base = divmod_(field, base, modulus)[1]
    while exponent:
        if exponent & 1:
            result = divmod_(field, mul(field, result, base), modulus)[1]
        base = divmod_(field, mul(field, base, base), modulus)[1]
        exponent >>= 1
    return divmod_(field, result, modulus)[1]


def evaluate(field: FieldSpec, a: Dense, x: Raw) -> Raw:
    acc = field.zero
    for c in reversed(a):
        acc = field.add(field.mul(acc, x), c)
    return acc


def _split(field: FieldSpec, g: Dense, rng: np.random.Generator) -> List[Raw]:
    """Roots of a monic product of distinct linear factors."""
    if len(g) <= 1:
        return []
    if len(g) == 2:
        return [field.neg(g[0])]
    q = field.q
    while True:
        a = field.from_index(int(rng.integers(0, q)))
        if field.p == 2:
            # absolute trace of a*x
            term = [field.zero, a]
            acc = list(term)
            for _ in range(field.e - 1):
                term = divmod_(field, mul(field, term, term), g)[1]
                acc = add(field, acc, term)
            h = divmod_(field, acc, g)[1]
        else:
            h = powmod(field, [a, field.one], (q - 1) // 2, g)
            h = sub(field, h, [field.one])
        d = gcd(field, g, h)
        if 0 < degree(d) < degree(g):
            rest = divmod_(field, g, d)[0]
            return _split(field, d, rng) + _split(field, monic(field, rest), rng)


def _rational_roots(coefficients: Dense) -> List[Fraction]:
    x = Symbol("x")
    poly = SymPoly(
        [Rational(c.numerator, c.denominator) for c in reversed(coefficients)],
        x,
        domain="QQ",
    )
    roots = poly.ground_roots()
    return sorted(Fraction(int(r.p), int(r.q)) for r in roots)


def roots_in_field(field: FieldSpec, a: Dense) -> List[Raw]:
    """Distinct roots of a nonzero polynomial lying in ``field``, sorted."""
    a = trim(field, a)
    if not a:
        raise ValueError("the zero polynomial has every element as a root")
    if len(a) == 1:
        return []
    if not field.is_finite:
        return _rational_roots(a)
    x = [field.zero, field.one]
    frob = powmod(field, x, field.q, a)
    g = gcd(field, a, sub(field, frob, x))
    # fixed stream; the output is sorted, so the splitting path never shows
    rng = np.random.default_rng(0)
    roots = _split(field, g, rng)
    return sorted(roots, key=field.index_of)


class FieldEmbedding:
    """Ring map F_{p^a} -> F_{p^b} for a | b, sending the generator to the
    least root of its minimal polynomial."""

    def __init__(self, small: FieldSpec, large: FieldSpec):
        if small == large:
            self.small, self.large, self.image = small, large, None
            return
        if not (small.is_finite and large.is_finite) or small.p != large.p:
            raise FieldSpecError(f"{small} does not embed into {large}")
        if large.e % small.e:
            raise FieldSpecError(f"{small} does not embed into {large}")
        self.small = small
        self.large = large
        if small.e == 1:
            self.image = None
            return
        modulus = [large.from_int(c) for c in small.modulus]
        roots = roots_in_field(large, modulus)
        self.image = roots[0]
        self._powers = [large.one]
        for _ in range(small.e - 1):
            self._powers.append(large.mul(self._powers[-1], self.image))

    def __call__(self, a: Raw) -> Raw:
        if self.small == self.large:
            return a
        if self.small.e == 1:
            return self.large.from_int(a)
        acc = self.large.zero
        for c, power in zip(a, self._powers):
            if c:
                acc = self.large.add(acc, self.large.mul(self.large.from_int(c), power))
        return acc


@lru_cache(maxsize=256)
def field_embedding(small: FieldSpec, large: FieldSpec) -> Callable[[Raw], Raw]:
    return FieldEmbedding(small, large)
