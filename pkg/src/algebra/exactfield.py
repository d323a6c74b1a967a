# """Exact scalar fields: the rationals, prime fields and their extensions."""
import logging
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterator, List, Tuple, Union

from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p

from src.errors import (
    CoefficientNotInField,
    FieldSpecError,
    IndexOutOfRange,
    InfiniteField,
    NonPrimeModulus,
)

logger = logging.getLogger(__name__)

# Raw values: Fraction over Q, int in [0, p) over F_p, and a tuple of e ints
# (constant coefficient first) over F_{p^e}.
Raw = Union[Fraction, int, Tuple[int, ...]]

FIELD_LITERAL = re.compile(r"^F(\d+)(?:\^(\d+))?$")


class FieldKind(str, Enum):
    RATIONALS = "rationals"
    FINITE = "finite"


@dataclass(frozen=True)
class FieldSpec:
    kind: FieldKind
    p: int = 0
    e: int = 1
    modulus: Tuple[int, ...] = ()  # monic, constant coefficient first

    # Properties
    @property
    def is_finite(self) -> bool:
        return self.kind == FieldKind.FINITE

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def q(self) -> int:
        if not self.is_finite:
            raise InfiniteField("the rationals have no finite cardinality")
        return self.p**self.e

    @property
    def zero(self) -> Raw:
        if not self.is_finite:
            return Fraction(0)
        return 0 if self.e == 1 else (0,) * self.e

    @property
    def one(self) -> Raw:
        if not self.is_finite:
            return Fraction(1)
        return 1 if self.e == 1 else (1,) + (0,) * (self.e - 1)

    @property
    def generator(self) -> Raw:
        """Class of x in F_p[x]/(modulus); equals 1 over prime fields."""
        if not self.is_finite or self.e == 1:
            return self.one
        return (0, 1) + (0,) * (self.e - 2)

    def __str__(self) -> str:
        if not self.is_finite:
            return "Q"
        return f"F{self.p}" if self.e == 1 else f"F{self.p}^{self.e}"

    # Arithmetic on raw values
    def is_zero(self, a: Raw) -> bool:
        if self.is_finite and self.e > 1:
            return not any(a)
        return a == 0

    def add(self, a: Raw, b: Raw) -> Raw:
        if not self.is_finite:
            return a + b
        if self.e == 1:
            return (a + b) % self.p
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a: Raw) -> Raw:
        if not self.is_finite:
            return -a
        if self.e == 1:
            return -a % self.p
        p = self.p
        return tuple(-x % p for x in a)

    def sub(self, a: Raw, b: Raw) -> Raw:
        if not self.is_finite:
            return a - b
        if self.e == 1:
            return (a - b) % self.p
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def mul(self, a: Raw, b: Raw) -> Raw:
        if not self.is_finite:
            return a * b
        p = self.p
        if self.e == 1:
            return a * b % p
        e = self.e
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        modulus = self.modulus
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k] % p
            if c:
                for j in range(e):
                    prod[k - e + j] -= c * modulus[j]
        return tuple(c % p for c in prod[:e])

    def pow(self, a: Raw, k: int) -> Raw:
        if k < 0:
            return self.pow(self.inv(a), -k)
        if not self.is_finite:
            return a**k
        if self.e == 1:
            return pow(a, k, self.p)
        result = self.one
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def inv(self, a: Raw) -> Raw:
        if self.is_zero(a):
            raise ZeroDivisionError(f"zero has no inverse in {self}")
        if not self.is_finite:
            return 1 / a
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a: Raw, b: Raw) -> Raw:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: Raw) -> Raw:
        """x -> x^p; the identity on F_p and on the rationals."""
        if not self.is_finite:
            return a
        return self.pow(a, self.p)

    def is_subfield_fixed(self, a: Raw, q: int) -> bool:
        """True when a lies in the subfield of order q, i.e. a^q = a."""
        return not self.is_finite or self.pow(a, q) == a

    # Conversions
    def from_int(self, n: int) -> Raw:
        if not self.is_finite:
            return Fraction(n)
        if self.e == 1:
            return n % self.p
        return (n % self.p,) + (0,) * (self.e - 1)

    def from_fraction(self, value: Fraction) -> Raw:
        value = Fraction(value)
        if not self.is_finite:
            return value
        if value.denominator % self.p == 0:
            raise CoefficientNotInField(
                f"{value} has a denominator divisible by {self.p}"
            )
        return self.div(self.from_int(value.numerator), self.from_int(value.denominator))

    def from_vector(self, coefficients: List[int]) -> Raw:
        """Element c0 + c1*a + ... for the generator a of an extension."""
        if not self.is_finite:
            raise CoefficientNotInField("coefficient vectors need a finite field")
        if len(coefficients) > self.e:
            raise CoefficientNotInField(
                f"{len(coefficients)} coefficients do not fit in {self}"
            )
        if self.e == 1:
            return coefficients[0] % self.p if coefficients else 0
        padded = list(coefficients) + [0] * (self.e - len(coefficients))
        return tuple(c % self.p for c in padded)

    def element(self, value: Any) -> Raw:
        """Coerce ints, fractions, vectors and FieldElements into a raw value."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise CoefficientNotInField(f"{value} does not live in {self}")
            return value.value
        if isinstance(value, (list, tuple)):
            return self.from_vector(list(value))
        if isinstance(value, Fraction):
            return self.from_fraction(value)
        return self.from_int(int(value))

    # Enumeration
    def from_index(self, index: int) -> Raw:
        """Element number ``index`` in enumeration order (0 -> 0, 1 -> 1)."""
        if not self.is_finite:
            raise InfiniteField("the rationals cannot be enumerated")
        if not 0 <= index < self.q:
            raise IndexOutOfRange(f"element index {index} outside [0, {self.q})")
        if self.e == 1:
            return index
        digits = []
        for _ in range(self.e):
            index, digit = divmod(index, self.p)
            digits.append(digit)
        return tuple(digits)

    def index_of(self, a: Raw) -> int:
        if not self.is_finite:
            raise InfiniteField("the rationals cannot be enumerated")
        if self.e == 1:
            return a
        index = 0
        for digit in reversed(a):
            index = index * self.p + digit
        return index

    def elements(self) -> Iterator[Raw]:
        for i in range(self.q):
            yield self.from_index(i)

    def sort_key(self, a: Raw) -> Any:
        return a if not self.is_finite else self.index_of(a)

    # Formatting
    def format(self, a: Raw) -> str:
        if self.is_finite and self.e > 1:
            return "[" + ",".join(str(c) for c in a) + "]"
        return str(a)


@dataclass(frozen=True)
class FieldElement:
    """Immutable scalar bound to its field, with the usual operators."""

    field: FieldSpec
    value: Any

    def _coerce(self, other: Any) -> Raw:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise CoefficientNotInField(
                    f"cannot combine elements of {self.field} and {other.field}"
                )
            return other.value
        return self.field.element(other)

    def __add__(self, other: Any) -> "FieldElement":
        return FieldElement(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other: Any) -> "FieldElement":
        return FieldElement(self.field, self.field.sub(self.value, self._coerce(other)))

    def __rsub__(self, other: Any) -> "FieldElement":
        return FieldElement(self.field, self.field.sub(self._coerce(other), self.value))

    def __mul__(self, other: Any) -> "FieldElement":
        return FieldElement(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "FieldElement":
        return FieldElement(self.field, self.field.div(self.value, self._coerce(other)))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, k: int) -> "FieldElement":
        return FieldElement(self.field, self.field.pow(self.value, k))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def frobenius(self) -> "FieldElement":
        return FieldElement(self.field, self.field.frobenius(self.value))

    def is_zero(self) -> bool:
        return self.field.is_zero(self.value)

    def __str__(self) -> str:
        return self.field.format(self.value)

    def __repr__(self) -> str:
        return f"FieldElement({self.field}, {self.field.format(self.value)})"


def _is_irreducible(coefficients: Tuple[int, ...], p: int) -> bool:
    # galoistools wants dense coefficient lists, leading coefficient first
    return gf_irreducible_p([ZZ(c) for c in reversed(coefficients)], p, ZZ)


def least_irreducible(p: int, e: int) -> Tuple[int, ...]:
    """Least monic irreducible of degree e over F_p.

    Candidates x^e + c_{e-1}x^{e-1} + ... + c_0 are visited in element
    enumeration order of the tail (c_0, ..., c_{e-1}), so c_0 varies fastest.
    """
    for index in range(p**e):
        tail = []
        rest = index
        for _ in range(e):
            rest, digit = divmod(rest, p)
            tail.append(digit)
        candidate = tuple(tail) + (1,)
        if _is_irreducible(candidate, p):
            return candidate
    raise FieldSpecError(f"no irreducible polynomial of degree {e} over F{p}")


@lru_cache(maxsize=None)
def make_field(kind: str, p: int = 0, e: int = 1) -> FieldSpec:
    """Build a field spec; finite extensions get a deterministic modulus."""
    kind = FieldKind(kind)
    if e < 1:
        raise FieldSpecError(f"extension degree must be at least 1, got {e}")
    if kind == FieldKind.RATIONALS:
        if p != 0 or e != 1:
            raise FieldSpecError("the rationals take p = 0 and e = 1")
        return FieldSpec(kind=kind)
    if not isprime(p):
        raise NonPrimeModulus(f"{p} is not prime")
    if e == 1:
        return FieldSpec(kind=kind, p=p, e=1, modulus=(0, 1))
    modulus = least_irreducible(p, e)
    logger.debug(f"F{p}^{e} built with modulus {modulus}")
    return FieldSpec(kind=kind, p=p, e=e, modulus=modulus)


def rationals() -> FieldSpec:
    return make_field(FieldKind.RATIONALS.value)


def finite_field(p: int, e: int = 1) -> FieldSpec:
    return make_field(FieldKind.FINITE.value, p, e)


def parse_field(literal: str) -> FieldSpec:
    """Parse "Q", "F5", "F9" (= F3^2) or "F3^2"."""
    text = literal.strip()
    if text in ("Q", "QQ"):
        return rationals()
    match = FIELD_LITERAL.match(text)
    if not match:
        raise FieldSpecError(f"unrecognized field literal {literal!r}")
    base = int(match.group(1))
    if match.group(2) is not None:
        return finite_field(base, int(match.group(2)))
    if base < 2:
        raise NonPrimeModulus(f"{base} is not a prime power")
    factors = factorint(base)
    if len(factors) != 1:
        raise NonPrimeModulus(f"{base} is not a prime power")
    (p, e), = factors.items()
    return finite_field(int(p), int(e))


def enumerate_elements(spec: FieldSpec) -> List[FieldElement]:
    if not spec.is_finite:
        raise InfiniteField("the rationals cannot be enumerated")
    return [FieldElement(spec, a) for a in spec.elements()]
