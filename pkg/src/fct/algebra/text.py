"""Canonical text form of polynomials and its parser.

Grammar: ``["-"] term (("+"|"-") term)*`` where a term is a ``*``-separated
product of rational numbers and variables ``s_i_j`` / ``l_v_h`` with optional
``^k`` exponents.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import cmp_to_key
from typing import Optional

from fct.algebra.polynomial import Monomial, Polynomial, Variable, natural_key, sigma
from fct.errors import PolynomialSyntaxError

_LABEL = r"[A-Za-z0-9.]+"
_TOKEN = re.compile(
    rf"\s*(?:(?P<var>(?P<kind>[sl])_(?P<a>{_LABEL})_(?P<b>{_LABEL}))"
    r"|(?P<num>\d+(?:/\d+)?)|(?P<op>[-+*^]))"
)


def _lex_cmp(m1: Monomial, m2: Monomial) -> int:
    a, b = m1.items(), m2.items()
    for (v1, e1), (v2, e2) in zip(a, b):
        if v1 != v2:
            # the monomial containing the smaller-keyed variable is larger
            return 1 if v1.key < v2.key else -1
        if e1 != e2:
            return 1 if e1 > e2 else -1
    return (len(a) > len(b)) - (len(a) < len(b))


# lexicographic order with s_1_2 the largest variable
lex_key = cmp_to_key(_lex_cmp)


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_polynomial(f: Polynomial, order=None) -> str:
    """Render ``f`` with terms sorted largest first under ``order`` (lex if None)."""
    if f.is_zero():
        return "0"
    if order is None:
        monos = sorted(f.monomials(), key=lex_key, reverse=True)
    else:
        monos = order.sorted(f.monomials(), descending=True)
    parts = []
    for idx, m in enumerate(monos):
        c = f.coefficient(m)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if m.is_one():
            body = format_coefficient(mag)
        elif mag == 1:
            body = str(m)
        else:
            body = f"{format_coefficient(mag)}*{m}"
        if idx == 0:
            parts.append(("-" if sign == "-" else "") + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts)


def _variable(kind: str, a: str, b: str) -> Variable:
    if kind == "l":
        return Variable("l", a, b)
    if a == b:
        return Variable("s", a, b)
    return sigma(a, b)


def parse_polynomial(text: str) -> Polynomial:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise PolynomialSyntaxError(f"unexpected input at offset {pos}: {text[pos:pos + 12]!r}")
        if match.group("var"):
            tokens.append(("var", _variable(match.group("kind"), match.group("a"), match.group("b"))))
        elif match.group("num"):
            tokens.append(("num", Fraction(match.group("num"))))
        else:
            tokens.append(("op", match.group("op")))
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    if not tokens:
        raise PolynomialSyntaxError("empty polynomial")

    terms: dict[Monomial, Fraction] = {}
    i = 0
    sign = 1
    if tokens[0] == ("op", "-"):
        sign, i = -1, 1
    elif tokens[0] == ("op", "+"):
        i = 1
    while True:
        coeff = Fraction(sign)
        powers: dict[Variable, int] = {}
        expect_factor = True
        while expect_factor:
            if i >= len(tokens):
                raise PolynomialSyntaxError("expression ends where a factor was expected")
            kind, value = tokens[i]
            i += 1
            if kind == "num":
                coeff *= value
            elif kind == "var":
                exp = 1
                if i < len(tokens) and tokens[i] == ("op", "^"):
                    if i + 1 >= len(tokens) or tokens[i + 1][0] != "num" or tokens[i + 1][1].denominator != 1:
                        raise PolynomialSyntaxError("exponent must be a nonnegative integer")
                    exp = int(tokens[i + 1][1])
                    i += 2
                powers[value] = powers.get(value, 0) + exp
            else:
                raise PolynomialSyntaxError(f"unexpected operator {value!r}")
            expect_factor = i < len(tokens) and tokens[i] == ("op", "*")
            if expect_factor:
                i += 1
        mono = Monomial(powers)
        terms[mono] = terms.get(mono, 0) + coeff
        if i >= len(tokens):
            break
        kind, value = tokens[i]
        if kind != "op" or value not in "+-":
            raise PolynomialSyntaxError(f"expected '+' or '-' but found {value!s}")
        sign = 1 if value == "+" else -1
        i += 1
    return Polynomial(terms)


def parse_variable(text: str) -> Optional[Variable]:
    match = re.fullmatch(rf"([sl])_({_LABEL})_({_LABEL})", text.strip())
    if not match:
        raise PolynomialSyntaxError(f"not a variable: {text!r}")
    return _variable(*match.groups())


__all__ = ["format_polynomial", "parse_polynomial", "parse_variable", "lex_key", "natural_key"]
