"""Circular block term orders on covariance variables.

Vertices of a clique are placed on a circle in the order given by
``embedding``.  The variable ``s_a_b`` has class ``d + 1`` where ``d`` is the
cyclic distance between ``a`` and ``b``.  Monomials are compared by their degree
in the class-2 block, then class 3, and so on; variables touching a vertex off
the circle (and loadings) form a final block.  Remaining ties are broken by a
degree-lexicographic order on an explicit variable ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from fct.algebra.polynomial import Monomial, Variable
from fct.errors import UnknownVertex


@dataclass(frozen=True)
class TermOrder:
    embedding: tuple
    isolated: tuple = ()
    # explicit ranking of variables, largest first; unranked variables follow by key
    tie_break: Optional[tuple] = None
    reverse_tie_break: bool = False
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)
    _info: dict = field(init=False, repr=False, compare=False, hash=False)
    _rank: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        emb = tuple(str(v) for v in self.embedding)
        object.__setattr__(self, "embedding", emb)
        object.__setattr__(self, "isolated", tuple(str(v) for v in self.isolated))
        if self.tie_break is not None:
            object.__setattr__(self, "tie_break", tuple(self.tie_break))
        if len(set(emb)) != len(emb):
            raise ValueError("embedding repeats a vertex")
        object.__setattr__(self, "_pos", {v: i for i, v in enumerate(emb)})
        object.__setattr__(self, "_info", {})
        ranks = {v: i for i, v in enumerate(self.tie_break or ())}
        object.__setattr__(self, "_rank", ranks)

    @property
    def n_classes(self) -> int:
        return len(self.embedding) // 2 + 1  # classes 2 .. floor(n/2)+1, then the tail block

    def class_of(self, var: Variable) -> Optional[int]:
        """Edge class of a covariance variable, or None when it lies off the circle."""
        if var.kind != "s" or var.first not in self._pos or var.second not in self._pos:
            return None
        n = len(self.embedding)
        d = abs(self._pos[var.first] - self._pos[var.second])
        return min(d, n - d) + 1

    def _variable_info(self, var: Variable) -> tuple:
        info = self._info.get(var)
        if info is None:
            cls = self.class_of(var)
            block = (cls - 2) if cls is not None else self.n_classes - 1
            if var in self._rank:
                rank = (0, self._rank[var])
            else:
                rank = (1, var.key)
            info = (block, rank)
            self._info[var] = info
        return info

    def key(self, m: Monomial) -> tuple:
        """Sort key; ``key(m1) > key(m2)`` iff ``m1`` is larger in this order."""
        blocks = [0] * self.n_classes
        ranked = []
        for v, e in m:
            block, rank = self._variable_info(v)
            blocks[block] += e
            ranked.append((rank, e))
        ranked.sort()
        if self.reverse_tie_break:
            lex = _LexKey(ranked, reverse=True)
        else:
            lex = _LexKey(ranked)
        return (tuple(blocks), m.degree, lex)

    def greater(self, m1: Monomial, m2: Monomial) -> bool:
        return self.key(m1) > self.key(m2)

    def sorted(self, monomials: Iterable[Monomial], descending: bool = False) -> list:
        return sorted(monomials, key=self.key, reverse=descending)

    def max(self, monomials: Iterable[Monomial]) -> Monomial:
        return max(monomials, key=self.key)

    def check_embedded(self, *vertices) -> None:
        for v in vertices:
            if str(v) not in self._pos:
                raise UnknownVertex(str(v))

    def position(self, v) -> int:
        try:
            return self._pos[str(v)]
        except KeyError:
            raise UnknownVertex(str(v)) from None


class _LexKey:
    """Lexicographic comparison of sorted ``(rank, exponent)`` lists.

    The monomial holding the best-ranked differing variable wins; with
    ``reverse`` the ranking is read backwards.
    """

    __slots__ = ("items", "reverse")

    def __init__(self, items: Sequence[tuple], reverse: bool = False):
        self.items = items if not reverse else items[::-1]
        self.reverse = reverse

    def _cmp(self, other: "_LexKey") -> int:
        for (r1, e1), (r2, e2) in zip(self.items, other.items):
            if r1 != r2:
                if self.reverse:
                    return 1 if r1 > r2 else -1
                return 1 if r1 < r2 else -1
            if e1 != e2:
                return 1 if e1 > e2 else -1
        a, b = len(self.items), len(other.items)
        return (a > b) - (a < b)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __eq__(self, other):
        return self._cmp(other) == 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __ge__(self, other):
        return self._cmp(other) >= 0


def circular_order(embedding: Sequence, isolated: Sequence = (), tie_break=None, reverse_tie_break=False) -> TermOrder:
    return TermOrder(tuple(embedding), tuple(isolated), tie_break, reverse_tie_break)
