"""Multivariate division and the Buchberger S-pair criterion."""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from fct.algebra.order import TermOrder
from fct.algebra.polynomial import Monomial, Polynomial
from fct.errors import ZeroPolynomial


def leading_term(f: Polynomial, order: TermOrder) -> tuple[Monomial, Fraction]:
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no leading term")
    m = order.max(f.monomials())
    return m, f.coefficient(m)


def leading_monomial(f: Polynomial, order: TermOrder) -> Monomial:
    return leading_term(f, order)[0]


def reduce(f: Polynomial, basis: Sequence[Polynomial], order: TermOrder) -> Polynomial:
    """Full remainder of ``f`` on division by ``basis``.

    The current leading monomial is always treated first, and the first basis
    element (in list order) whose leading monomial divides it is used.
    """
    leads = [leading_term(b, order) for b in basis]
    work = dict(f.items())
    keys = {m: order.key(m) for m in work}
    remainder: dict[Monomial, Fraction] = {}
    while work:
        m = max(work, key=keys.__getitem__)
        c = work[m]
        for (lm, lc), b in zip(leads, basis):
            if lm.divides(m):
                q = m / lm
                factor = c / lc
                for bm, bc in b.items():
                    t = q * bm
                    v = work.get(t, 0) - factor * bc
                    if v:
                        work[t] = v
                        if t not in keys:
                            keys[t] = order.key(t)
                    else:
                        work.pop(t, None)
                break
        else:
            remainder[m] = c
            del work[m]
    return Polynomial._wrap(remainder)


def s_polynomial(f: Polynomial, g: Polynomial, order: TermOrder) -> Polynomial:
    mf, cf = leading_term(f, order)
    mg, cg = leading_term(g, order)
    lcm = mf.lcm(mg)
    return f.mul_term(lcm / mf, 1 / cf) - g.mul_term(lcm / mg, 1 / cg)


def first_failing_pair(basis: Sequence[Polynomial], order: TermOrder) -> Optional[tuple]:
    """Return ``(i, j, remainder)`` for the first S-pair not reducing to zero, else None.

    Pairs with coprime leading monomials are skipped (their S-polynomial always
    reduces to zero).
    """
    leads = [leading_monomial(b, order) for b in basis]
    for j in range(len(basis)):
        for i in range(j):
            if leads[i].coprime(leads[j]):
                continue
            r = reduce(s_polynomial(basis[i], basis[j], order), basis, order)
            if r:
                return i, j, r
    return None


def is_groebner_basis(basis: Sequence[Polynomial], order: TermOrder) -> bool:
    return first_failing_pair(basis, order) is None
