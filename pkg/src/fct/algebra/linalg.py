"""Exact matrix rank and rational linear algebra."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def _integer_rows(matrix: Sequence[Sequence]) -> list[list[int]]:
    rows = []
    for row in matrix:
        fr = [x if isinstance(x, Fraction) else Fraction(x) for x in row]
        scale = lcm(*(x.denominator for x in fr)) if fr else 1
        rows.append([int(x * scale) for x in fr])
    return rows


def exact_rank(matrix: Sequence[Sequence]) -> int:
    """Rank by fraction-free (Bareiss) elimination; rows are first scaled to integers."""
    a = _integer_rows(matrix)
    if not a or not a[0]:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if a[r][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for r in range(rank + 1, n_rows):
            rr = a[r]
            f = rr[col]
            top = a[rank]
            for c in range(col + 1, n_cols):
                rr[c] = (p * rr[c] - f * top[c]) // prev
            rr[col] = 0
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def rref(matrix: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals and its pivot columns."""
    a = [[x if isinstance(x, Fraction) else Fraction(x) for x in row] for row in matrix]
    pivots = []
    r = 0
    n_rows = len(a)
    n_cols = len(a[0]) if a else 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return a[:r], pivots


def _eliminate(echelon: list, vec: dict) -> dict:
    v = {k: Fraction(x) for k, x in vec.items() if x}
    for piv, row in echelon:
        c = v.get(piv)
        if c:
            for k, x in row.items():
                y = v.get(k, 0) - c * x
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
    return v


def _echelon(vectors: Sequence[dict]) -> list:
    # forward elimination in insertion order; each new row avoids all earlier pivots
    echelon: list[tuple[object, dict]] = []
    for vec in vectors:
        v = _eliminate(echelon, vec)
        if v:
            piv = min(v, key=repr)
            inv = 1 / v[piv]
            echelon.append((piv, {k: x * inv for k, x in v.items()}))
    return echelon


def sparse_rank(vectors: Sequence[dict]) -> int:
    """Rank of a family of sparse rational vectors (dicts coordinate -> value)."""
    return len(_echelon(vectors))


def solve_in_span(vectors: Sequence[dict], target: dict) -> bool:
    """Whether the sparse ``target`` lies in the span of sparse ``vectors``."""
    return not _eliminate(_echelon(vectors), target)
