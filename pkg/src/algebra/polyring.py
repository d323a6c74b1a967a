# """Sparse multivariate polynomials with exact coefficients."""
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.algebra.exactfield import FieldSpec, Raw
from src.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NotHomogeneous,
    PolySyntaxError,
    RationalsNotSamplable,
    UnknownVariable,
)

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


def grevlex_key(exponent: Exponent) -> Tuple[int, ...]:
    """Sort key: larger key means larger monomial in grevlex (x0 > x1 > ...)."""
    return (sum(exponent),) + tuple(-c for c in reversed(exponent))


class Poly:
    """Polynomial in ``nvars`` variables named x<var_offset>, x<var_offset+1>, ...

    Homogeneous rings use offset 0 (x0..xn), affine charts use offset 1
    (x1..xn). Values are treated as immutable.
    """

    __slots__ = ("field", "nvars", "terms", "var_offset")

    def __init__(
        self,
        field: FieldSpec,
        nvars: int,
        terms: Optional[Dict[Exponent, Raw]] = None,
        var_offset: int = 0,
    ):
        self.field = field
        self.nvars = nvars
        self.terms: Dict[Exponent, Raw] = terms if terms is not None else {}
        self.var_offset = var_offset

    # Constructors
    @classmethod
    def from_terms(
        cls,
        field: FieldSpec,
        nvars: int,
        terms: Iterable[Tuple[Exponent, Raw]],
        var_offset: int = 0,
    ) -> "Poly":
        acc: Dict[Exponent, Raw] = {}
        for exp, c in terms:
            if len(exp) != nvars:
                raise DimensionMismatch(f"exponent {exp} has length != {nvars}")
            acc[exp] = field.add(acc[exp], c) if exp in acc else c
        return cls(field, nvars, {e: c for e, c in acc.items() if not field.is_zero(c)}, var_offset)

    @classmethod
    def zero(cls, field: FieldSpec, nvars: int, var_offset: int = 0) -> "Poly":
        return cls(field, nvars, {}, var_offset)

    @classmethod
    def constant(cls, field: FieldSpec, nvars: int, c: Raw, var_offset: int = 0) -> "Poly":
        if field.is_zero(c):
            return cls.zero(field, nvars, var_offset)
        return cls(field, nvars, {(0,) * nvars: c}, var_offset)

    @classmethod
    def variable(cls, field: FieldSpec, nvars: int, i: int, var_offset: int = 0) -> "Poly":
        if not 0 <= i < nvars:
            raise IndexOutOfRange(f"variable index {i} outside [0, {nvars})")
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(field, nvars, {exp: field.one}, var_offset)

    def _like(self, terms: Dict[Exponent, Raw]) -> "Poly":
        return Poly(self.field, self.nvars, terms, self.var_offset)

    # Basic queries
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def order(self) -> Optional[int]:
        """Lowest degree of a term; None for the zero polynomial."""
        return min((sum(e) for e in self.terms), default=None)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def homogeneous_part(self, k: int) -> "Poly":
        return self._like({e: c for e, c in self.terms.items() if sum(e) == k})

    def truncate(self, below: int) -> "Poly":
        return self._like({e: c for e, c in self.terms.items() if sum(e) < below})

    def involves(self, i: int) -> bool:
        return any(e[i] for e in self.terms)

    def constant_term(self) -> Raw:
        return self.terms.get((0,) * self.nvars, self.field.zero)

    def coefficient(self, exp: Exponent) -> Raw:
        return self.terms.get(tuple(exp), self.field.zero)

    def sorted_terms(self) -> List[Tuple[Exponent, Raw]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    # Arithmetic
    def _check(self, other: "Poly") -> None:
        if other.field != self.field or other.nvars != self.nvars:
            raise DimensionMismatch(
                f"cannot combine polynomials over {self.field}/{self.nvars} vars "
                f"and {other.field}/{other.nvars} vars"
            )

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        field = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            if e in out:
                s = field.add(out[e], c)
                if field.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return self._like(out)

    def __neg__(self) -> "Poly":
        return self._like({e: self.field.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c: Raw) -> "Poly":
        if self.field.is_zero(c):
            return self._like({})
        return self._like({e: self.field.mul(v, c) for e, v in self.terms.items()})

    def mul_term(self, exp: Exponent, c: Raw) -> "Poly":
        field = self.field
        return self._like(
            {
                tuple(a + b for a, b in zip(e, exp)): field.mul(v, c)
                for e, v in self.terms.items()
            }
        )

    def __mul__(self, other: "Poly") -> "Poly":
        self._check(other)
        field = self.field
        out: Dict[Exponent, Raw] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = field.mul(c1, c2)
                out[e] = field.add(out[e], v) if e in out else v
        return self._like({e: c for e, c in out.items() if not field.is_zero(c)})

    def __pow__(self, k: int) -> "Poly":
        result = Poly.constant(self.field, self.nvars, self.field.one, self.var_offset)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return (
            self.field == other.field
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.field, self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r}, {self.field}, nvars={self.nvars})"

    def __str__(self) -> str:
        return format_poly(self)

    # Evaluation and substitution
    def evaluate(self, point: Sequence[Raw]) -> Raw:
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, need {self.nvars}")
        field = self.field
        acc = field.zero
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = field.mul(v, field.pow(x, k))
            acc = field.add(acc, v)
        return acc

    def translate(self, point: Sequence[Raw]) -> "Poly":
        """f(x + a), expanded exactly with integer binomial coefficients."""
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point has {len(point)} coordinates, need {self.nvars}")
        field = self.field
        out: Dict[Exponent, Raw] = {}
        for e, c in self.terms.items():
            partial: Dict[Exponent, Raw] = {(): c}
            for a, k in zip(point, e):
                expansion = [
                    (j, field.mul(field.from_int(comb(k, j)), field.pow(a, k - j)))
                    for j in range(k + 1)
                ]
                expansion = [(j, v) for j, v in expansion if not field.is_zero(v)]
                partial = {
                    prefix + (j,): field.mul(pc, v)
                    for prefix, pc in partial.items()
                    for j, v in expansion
                }
            for exp, v in partial.items():
                out[exp] = field.add(out[exp], v) if exp in out else v
        return self._like({e: c for e, c in out.items() if not field.is_zero(c)})

    def substitute_linear(self, matrix: Sequence[Sequence[Raw]]) -> "Poly":
        """f(M y): variable i becomes sum_j M[i][j] y_j."""
        if len(matrix) != self.nvars:
            raise DimensionMismatch("substitution matrix has the wrong size")
        field = self.field
        forms = [
            Poly.from_terms(
                field,
                self.nvars,
                [(tuple(1 if t == j else 0 for t in range(self.nvars)), row[j]) for j in range(self.nvars)],
                self.var_offset,
            )
            for row in matrix
        ]
        powers: Dict[Tuple[int, int], Poly] = {}

        def power(i: int, k: int) -> Poly:
            if (i, k) not in powers:
                powers[(i, k)] = forms[i] ** k
            return powers[(i, k)]

        result = self._like({})
        for e, c in self.terms.items():
            term = Poly.constant(field, self.nvars, c, self.var_offset)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def change_field(self, field: FieldSpec, embed: Callable[[Raw], Raw]) -> "Poly":
        return Poly(field, self.nvars, {e: embed(c) for e, c in self.terms.items()}, self.var_offset)


@dataclass(frozen=True)
class Jet:
    """Taylor layers f_0..f_k of f at a point, in coordinates centred there."""

    point: Tuple[Raw, ...]
    order: int
    layers: Tuple[Poly, ...]

    def layer(self, i: int) -> Poly:
        return self.layers[i]

    def as_poly(self) -> Poly:
        total = self.layers[0]
        for layer in self.layers[1:]:
            total = total + layer
        return total


# Monomials
@lru_cache(maxsize=None)
def monomials_of_degree(nvars: int, d: int) -> Tuple[Exponent, ...]:
    """All exponents of total degree d, lexicographically descending."""
    if d < 0:
        return ()
    if nvars == 0:
        return ((),) if d == 0 else ()
    if nvars == 1:
        return ((d,),)
    out = []
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(nvars - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomials_up_to(nvars: int, d: int) -> Tuple[Exponent, ...]:
    out: List[Exponent] = []
    for k in range(d + 1):
        out.extend(monomials_of_degree(nvars, k))
    return tuple(out)


def form_from_coefficients(
    field: FieldSpec,
    nvars: int,
    monomials: Sequence[Exponent],
    coefficients: Sequence[Raw],
    var_offset: int = 0,
) -> Poly:
    return Poly(
        field,
        nvars,
        {m: c for m, c in zip(monomials, coefficients) if not field.is_zero(c)},
        var_offset,
    )


def form_from_index(
    field: FieldSpec, nvars: int, monomials: Sequence[Exponent], index: int
) -> Poly:
    """Polynomial number ``index`` when coefficient tuples are read base q."""
    q = field.q
    coefficients = []
    for _ in monomials:
        index, digit = divmod(index, q)
        coefficients.append(field.from_index(digit))
    return form_from_coefficients(field, nvars, monomials, coefficients)


# Parsing and formatting
TOKEN = re.compile(
    r"(?P<num>\d+(?:/\d+)?)|(?P<vec>\[[^\]]*\])|(?P<var>x(?P<idx>\d+)(?:\^(?P<exp>\d+))?)"
)


def _parse_vector(text: str, field: FieldSpec) -> Raw:
    body = text[1:-1].strip()
    try:
        values = [int(v) for v in body.split(",")] if body else []
    except ValueError:
        raise PolySyntaxError(f"bad coefficient vector {text!r}")
    return field.from_vector(values)


def parse_poly(text: str, field: FieldSpec, nvars: int, var_offset: int = 0) -> Poly:
    """Parse terms like ``2*x0^3 - 1/2*x1*x2 + [0,1]*x3``.

    Whitespace is insignificant; ``[c0,c1,...]`` is an element of an extension
    field written in the powers of its generator.
    """
    source = "".join(text.split())
    if not source:
        raise PolySyntaxError("empty polynomial")
    terms: List[Tuple[Exponent, Raw]] = []
    pos = 0
    first = True
    while pos < len(source):
        sign = 1
        if source[pos] in "+-":
            sign = -1 if source[pos] == "-" else 1
            pos += 1
        elif not first:
            raise PolySyntaxError(f"expected '+' or '-' at position {pos}")
        first = False
        coefficient: Raw = field.one
        exponent = [0] * nvars
        expect_factor = True
        while expect_factor:
            match = TOKEN.match(source, pos)
            if not match:
                raise PolySyntaxError(f"unexpected input at position {pos}: {source[pos:pos + 10]!r}")
            if match.group("num"):
                coefficient = field.mul(coefficient, field.from_fraction(Fraction(match.group("num"))))
            elif match.group("vec"):
                coefficient = field.mul(coefficient, _parse_vector(match.group("vec"), field))
            else:
                index = int(match.group("idx")) - var_offset
                if not 0 <= index < nvars:
                    raise UnknownVariable(
                        f"x{match.group('idx')} is not among x{var_offset}..x{var_offset + nvars - 1}"
                    )
                exponent[index] += int(match.group("exp") or 1)
            pos = match.end()
            expect_factor = pos < len(source) and source[pos] == "*"
            if expect_factor:
                pos += 1
        if sign < 0:
            coefficient = field.neg(coefficient)
        terms.append((tuple(exponent), coefficient))
    return Poly.from_terms(field, nvars, terms, var_offset)


def _format_monomial(exp: Exponent, var_offset: int) -> str:
    parts = []
    for i, k in enumerate(exp):
        if k == 1:
            parts.append(f"x{i + var_offset}")
        elif k > 1:
            parts.append(f"x{i + var_offset}^{k}")
    return "*".join(parts)


def format_poly(f: Poly) -> str:
    """Canonical text, terms in descending grevlex order."""
    if f.is_zero():
        return "0"
    field = f.field
    pieces = []
    for exp, c in f.sorted_terms():
        monomial = _format_monomial(exp, f.var_offset)
        negative = not field.is_finite and c < 0
        magnitude = -c if negative else c
        if monomial and magnitude == field.one:
            body = monomial
        elif monomial:
            body = f"{field.format(magnitude)}*{monomial}"
        else:
            body = field.format(magnitude)
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces)


# Calculus and charts
def partial_derivative(f: Poly, i: int) -> Poly:
    if not 0 <= i < f.nvars:
        raise IndexOutOfRange(f"variable index {i} outside [0, {f.nvars})")
    field = f.field
    out = {}
    for e, c in f.terms.items():
        k = e[i]
        if k == 0:
            continue
        v = field.mul(field.from_int(k), c)
        if field.is_zero(v):
            continue
        out[e[:i] + (k - 1,) + e[i + 1:]] = v
    return Poly(field, f.nvars, out, f.var_offset)


def gradient(f: Poly) -> List[Poly]:
    return [partial_derivative(f, i) for i in range(f.nvars)]


def dehomogenize(F: Poly, chart_index: int) -> Poly:
    """Set x_chart = 1; the remaining variables become x1..xn."""
    if not F.is_homogeneous():
        raise NotHomogeneous("dehomogenize needs a homogeneous polynomial")
    if not 0 <= chart_index < F.nvars:
        raise IndexOutOfRange(f"chart index {chart_index} outside [0, {F.nvars})")
    return Poly.from_terms(
        F.field,
        F.nvars - 1,
        [(e[:chart_index] + e[chart_index + 1:], c) for e, c in F.terms.items()],
        var_offset=1,
    )


def homogenize(f: Poly, d: int) -> Poly:
    """Inverse of dehomogenize at chart 0: the new variable is x0."""
    if f.degree() > d:
        raise NotHomogeneous(f"degree {f.degree()} exceeds target degree {d}")
    return Poly(
        f.field,
        f.nvars + 1,
        {(d - sum(e),) + e: c for e, c in f.terms.items()},
        var_offset=0,
    )


def jet_at(f: Poly, point: Sequence[Raw], order: int) -> Jet:
    if len(point) != f.nvars:
        raise DimensionMismatch(f"point has {len(point)} coordinates, need {f.nvars}")
    moved = f.translate(point)
    layers = tuple(moved.homogeneous_part(k) for k in range(order + 1))
    return Jet(point=tuple(point), order=order, layers=layers)


def random_form(
    field: FieldSpec,
    nvars: int,
    d: int,
    rng: np.random.Generator,
    homogeneous: bool = True,
    var_offset: int = 0,
) -> Poly:
    """Uniform element of S_d (homogeneous) or of the polynomials of degree <= d."""
    if not field.is_finite:
        raise RationalsNotSamplable("uniform sampling needs a finite field")
    monomials = monomials_of_degree(nvars, d) if homogeneous else monomials_up_to(nvars, d)
    indices = rng.integers(0, field.q, size=len(monomials)).tolist()
    return form_from_coefficients(
        field, nvars, monomials, [field.from_index(i) for i in indices], var_offset
    )


def quadratic_form_matrix(form: Poly) -> List[List[Raw]]:
    """Twice the Gram matrix of a quadratic form; same rank in odd characteristic."""
    field = form.field
    n = form.nvars
    matrix = [[field.zero] * n for _ in range(n)]
    for e, c in form.terms.items():
        support = [i for i, k in enumerate(e) for _ in range(k)]
        if len(support) != 2:
            raise NotHomogeneous("not a quadratic form")
        i, j = support
        if i == j:
            matrix[i][i] = field.add(matrix[i][i], field.add(c, c))
        else:
            matrix[i][j] = field.add(matrix[i][j], c)
            matrix[j][i] = field.add(matrix[j][i], c)
    return matrix


def number_of_monomials(nvars: int, d: int) -> int:
    return comb(nvars + d - 1, d) if d >= 0 else 0
