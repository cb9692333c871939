"""Sparse multivariate polynomials with exact rational coefficients.

Two kinds of indeterminates occur: covariance entries ``s_u_v`` (u < v) and
loadings ``l_v_h``.  Polynomials are immutable; equality is structural.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Union

from fct.errors import MissingAssignment

Scalar = Union[int, Fraction]

_DIGITS = re.compile(r"(\d+)")


def natural_key(label: str) -> tuple:
    """Sort key treating digit runs as integers, so ``"v2" < "v10"``."""
    parts = []
    for chunk in _DIGITS.split(label):
        if not chunk:
            continue
        parts.append((0, int(chunk), chunk) if chunk.isdigit() else (1, 0, chunk))
    return tuple(parts)


@dataclass(frozen=True)
class Variable:
    kind: str  # "s" for covariances, "l" for loadings
    first: str
    second: str
    key: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        rank = 0 if self.kind == "s" else 1
        object.__setattr__(
            self, "key", (rank, natural_key(self.first), natural_key(self.second))
        )

    @property
    def is_diagonal(self) -> bool:
        return self.kind == "s" and self.first == self.second

    def __lt__(self, other: "Variable") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return f"{self.kind}_{self.first}_{self.second}"


def sigma(u, v) -> Variable:
    """The covariance variable for the unordered pair {u, v}."""
    u, v = str(u), str(v)
    if u == v:
        raise ValueError(f"s_{u}_{v} is a diagonal entry")
    if natural_key(v) < natural_key(u):
        u, v = v, u
    return Variable("s", u, v)


def lam(v, h) -> Variable:
    """The loading variable of the edge h -> v."""
    return Variable("l", str(v), str(h))


class Monomial:
    """Power product stored as a tuple of ``(Variable, exponent)`` sorted by variable."""

    __slots__ = ("_items", "_hash")

    def __init__(self, powers: Union[Mapping[Variable, int], Iterable[tuple]] = ()):
        if isinstance(powers, Mapping):
            powers = powers.items()
        merged: dict[Variable, int] = {}
        for var, exp in powers:
            if exp < 0:
                raise ValueError("negative exponent")
            if exp:
                merged[var] = merged.get(var, 0) + exp
        self._items = tuple(sorted(merged.items(), key=lambda it: it[0].key))
        self._hash = hash(self._items)

    @classmethod
    def _raw(cls, items: tuple) -> "Monomial":
        m = cls.__new__(cls)
        m._items = items
        m._hash = hash(items)
        return m

    @classmethod
    def of(cls, *variables: Variable) -> "Monomial":
        return cls((v, 1) for v in variables)

    def items(self) -> tuple:
        return self._items

    def variables(self) -> tuple[Variable, ...]:
        return tuple(v for v, _ in self._items)

    def exponent(self, var: Variable) -> int:
        for v, e in self._items:
            if v == var:
                return e
        return 0

    @property
    def degree(self) -> int:
        return sum(e for _, e in self._items)

    def is_one(self) -> bool:
        return not self._items

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not other._items:
            return self
        if not self._items:
            return other
        merged = dict(self._items)
        for v, e in other._items:
            merged[v] = merged.get(v, 0) + e
        return Monomial._raw(tuple(sorted(merged.items(), key=lambda it: it[0].key)))

    def divides(self, other: "Monomial") -> bool:
        if len(self._items) > len(other._items):
            return False
        theirs = dict(other._items)
        return all(theirs.get(v, 0) >= e for v, e in self._items)

    def __truediv__(self, other: "Monomial") -> "Monomial":
        mine = dict(self._items)
        for v, e in other._items:
            left = mine.get(v, 0) - e
            if left < 0:
                raise ValueError(f"{other} does not divide {self}")
            if left:
                mine[v] = left
            else:
                del mine[v]
        return Monomial._raw(tuple(sorted(mine.items(), key=lambda it: it[0].key)))

    def lcm(self, other: "Monomial") -> "Monomial":
        merged = dict(self._items)
        for v, e in other._items:
            if e > merged.get(v, 0):
                merged[v] = e
        return Monomial._raw(tuple(sorted(merged.items(), key=lambda it: it[0].key)))

    def coprime(self, other: "Monomial") -> bool:
        mine = {v for v, _ in self._items}
        return not any(v in mine for v, _ in other._items)

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __iter__(self) -> Iterator[tuple]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __str__(self) -> str:
        if not self._items:
            return "1"
        return "*".join(str(v) if e == 1 else f"{v}^{e}" for v, e in self._items)

    def __repr__(self) -> str:
        return f"Monomial({self})"


ONE = Monomial()


def _as_fraction(c: Scalar) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Polynomial:
    """Immutable polynomial ``{Monomial: Fraction}`` without zero coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping[Monomial, Scalar], Iterable[tuple]] = ()):
        if isinstance(terms, Mapping):
            terms = terms.items()
        acc: dict[Monomial, Fraction] = {}
        for mono, coeff in terms:
            acc[mono] = acc.get(mono, 0) + _as_fraction(coeff)
        self._terms = {m: c for m, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c: Scalar) -> "Polynomial":
        return cls({ONE: c})

    @classmethod
    def var(cls, v: Variable) -> "Polynomial":
        return cls._wrap({Monomial.of(v): Fraction(1)})

    @classmethod
    def monomial(cls, m: Monomial, c: Scalar = 1) -> "Polynomial":
        return cls({m: c})

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self):
        return self._terms.keys()

    def coefficient(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def variables(self) -> set[Variable]:
        return {v for m in self._terms for v, _ in m}

    @property
    def total_degree(self) -> int:
        return max((m.degree for m in self._terms), default=-1)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        return isinstance(other, Polynomial) and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other)
        if isinstance(other, Variable):
            return Polynomial.var(other)
        return NotImplemented

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for m, c in other._terms.items():
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return Polynomial._wrap(acc)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._wrap({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Polynomial()
            return Polynomial._wrap({m: c * other for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                acc[m] = acc.get(m, 0) + c1 * c2
        return Polynomial._wrap({m: c for m, c in acc.items() if c})

    __rmul__ = __mul__

    def mul_term(self, m: Monomial, c: Fraction) -> "Polynomial":
        """``c * m * self`` without the general product loop."""
        if not c:
            return Polynomial()
        return Polynomial._wrap({m * k: c * v for k, v in self._terms.items()})

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def substitute(self, assignment: Mapping[Variable, "Polynomial"]) -> "Polynomial":
        return substitute(self, assignment)

    def evaluate(self, values: Mapping[Variable, Scalar]) -> Fraction:
        total = Fraction(0)
        for m, c in self._terms.items():
            term = c
            for v, e in m:
                try:
                    term *= _as_fraction(values[v]) ** e
                except KeyError:
                    raise MissingAssignment(str(v)) from None
            total += term
        return total

    def __str__(self) -> str:
        from fct.algebra.text import format_polynomial

        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({self})"


def poly_add(f: Polynomial, g: Polynomial) -> Polynomial:
    return f + g


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def substitute(f: Polynomial, assignment: Mapping[Variable, Polynomial]) -> Polynomial:
    """Image of ``f`` under the ring map sending each variable to a polynomial."""
    powers: dict[tuple[Variable, int], Polynomial] = {}

    def power(v: Variable, e: int) -> Polynomial:
        key = (v, e)
        if key not in powers:
            try:
                image = assignment[v]
            except KeyError:
                raise MissingAssignment(str(v)) from None
            if not isinstance(image, Polynomial):
                image = Polynomial.constant(image) if not isinstance(image, Variable) else Polynomial.var(image)
            powers[key] = image if e == 1 else image ** e
        return powers[key]

    acc: dict[Monomial, Fraction] = {}
    for m, c in f.items():
        term = Polynomial.constant(c)
        for v, e in m:
            term = term * power(v, e)
            if not term:
                break
        for tm, tc in term.items():
            s = acc.get(tm, 0) + tc
            if s:
                acc[tm] = s
            else:
                acc.pop(tm, None)
    return Polynomial._wrap(acc)


def s(u, v) -> Polynomial:
    """Shorthand: the polynomial ``s_u_v``."""
    return Polynomial.var(sigma(u, v))
