"""Factor analysis graphs: latent nodes pointing to observed nodes."""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping, Optional, Sequence

from fct.algebra.polynomial import Polynomial, Variable, lam, sigma
from fct.errors import DanglingEdge, DuplicateLabel, SchemaError, UnknownNode

_LABEL = re.compile(r"[A-Za-z0-9.]+")


class IsolatedLatentWarning(UserWarning):
    """A latent node without children was removed."""


@dataclass(frozen=True)
class FactorGraph:
    observed: tuple
    latent: tuple
    edges: frozenset  # of (latent, observed)
    dropped_latents: tuple = ()
    _pa: dict = field(init=False, repr=False, compare=False, hash=False)
    _ch: dict = field(init=False, repr=False, compare=False, hash=False)
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)
    _hpos: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "observed", tuple(self.observed))
        object.__setattr__(self, "latent", tuple(self.latent))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        pos = {v: i for i, v in enumerate(self.observed)}
        pa = {v: [] for v in self.observed}
        ch = {h: [] for h in self.latent}
        for h, v in self.edges:
            if h not in ch or v not in pa:
                raise DanglingEdge(f"edge {h}->{v} has an undeclared endpoint")
            pa[v].append(h)
            ch[h].append(v)
        hpos = {h: i for i, h in enumerate(self.latent)}
        object.__setattr__(self, "_pa", {v: frozenset(hs) for v, hs in pa.items()})
        object.__setattr__(
            self, "_ch", {h: tuple(sorted(vs, key=pos.__getitem__)) for h, vs in ch.items()}
        )
        object.__setattr__(self, "_pos", pos)
        object.__setattr__(self, "_hpos", hpos)

    @property
    def p(self) -> int:
        return len(self.observed)

    @property
    def m(self) -> int:
        return len(self.latent)

    def parents(self, v) -> frozenset:
        try:
            return self._pa[v]
        except KeyError:
            raise UnknownNode(str(v)) from None

    def children(self, h) -> tuple:
        try:
            return self._ch[h]
        except KeyError:
            raise UnknownNode(str(h)) from None

    def position(self, v) -> int:
        try:
            return self._pos[v]
        except KeyError:
            raise UnknownNode(str(v)) from None

    def pair(self, u, v) -> tuple:
        """The pair {u, v} as a tuple in canonical node order."""
        return (u, v) if self.position(u) < self.position(v) else (v, u)

    def pairs(self) -> Iterator[tuple]:
        return combinations(self.observed, 2)

    def sorted_edges(self) -> list:
        return sorted(self.edges, key=lambda e: (self._hpos[e[0]], self._pos[e[1]]))

    def to_dict(self) -> dict:
        return {
            "observed": list(self.observed),
            "latent": list(self.latent),
            "edges": [list(e) for e in self.sorted_edges()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def from_children(children: Mapping[str, Sequence], observed: Optional[Sequence] = None) -> FactorGraph:
    """Build a graph from ``{latent: children}``; observed nodes default to all children in natural order."""
    from fct.algebra.polynomial import natural_key

    latent = [str(h) for h in children]
    if observed is None:
        observed = sorted({str(v) for vs in children.values() for v in vs}, key=natural_key)
    edges = {(str(h), str(v)) for h, vs in children.items() for v in vs}
    return _validated([str(v) for v in observed], latent, edges)


def _validated(observed: list, latent: list, edges: set) -> FactorGraph:
    for label in list(observed) + list(latent):
        if not isinstance(label, str) or not _LABEL.fullmatch(label):
            raise SchemaError(f"node label {label!r} must match [A-Za-z0-9.]+")
    seen = set()
    for label in list(observed) + list(latent):
        if label in seen:
            raise DuplicateLabel(label)
        seen.add(label)
    if not observed:
        raise SchemaError("at least one observed node is required")
    obs, lat = set(observed), set(latent)
    for h, v in edges:
        if h not in lat or v not in obs:
            raise DanglingEdge(f"edge [{h!r}, {v!r}] must point from a declared latent to a declared observed node")
    used = {h for h, _ in edges}
    dropped = tuple(h for h in latent if h not in used)
    if dropped:
        warnings.warn(
            f"dropping latent nodes without children: {', '.join(dropped)}",
            IsolatedLatentWarning,
            stacklevel=3,
        )
    return FactorGraph(tuple(observed), tuple(h for h in latent if h in used), frozenset(edges), dropped)


def parse_graph(text: str) -> FactorGraph:
    """Parse the JSON graph document ``{"observed": [...], "latent": [...], "edges": [[h, v], ...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("graph document must be a JSON object")
    for key in ("observed", "latent", "edges"):
        if key not in doc:
            raise SchemaError(f"missing key {key!r}")
        if not isinstance(doc[key], list):
            raise SchemaError(f"{key!r} must be a list")
    edges = set()
    for e in doc["edges"]:
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
            raise SchemaError(f"edge {e!r} must be a [latent, observed] pair of strings")
        edges.add((e[0], e[1]))
    return _validated(doc["observed"], doc["latent"], edges)


def load_graph(path) -> FactorGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def jpa(g: FactorGraph, u, v) -> frozenset:
    """Joint parents of the observed nodes ``u`` and ``v``."""
    if u == v:
        raise ValueError("jpa needs two distinct nodes")
    return g.parents(u) & g.parents(v)


def pair_classes(g: FactorGraph, h) -> frozenset:
    """All pairs of children of ``h``, as canonical tuples."""
    return frozenset(combinations(g.children(h), 2))


@dataclass(frozen=True)
class ZutaLabeling:
    latent_order: tuple
    witnesses: tuple  # witnesses[i] is the pure-below child of latent_order[i]

    @property
    def witness(self) -> dict:
        return dict(zip(self.latent_order, self.witnesses))

    def to_dict(self) -> dict:
        return {"latent_order": list(self.latent_order), "witness": self.witness}


def is_zuta_labeling(g: FactorGraph, lab: ZutaLabeling) -> bool:
    if len(lab.latent_order) != g.m or set(lab.latent_order) != set(g.latent):
        return False
    if len(lab.witnesses) != len(lab.latent_order):
        return False
    for i, (h, v) in enumerate(zip(lab.latent_order, lab.witnesses)):
        if v not in g.children(h):
            return False
        if any(v in g.children(later) for later in lab.latent_order[i + 1:]):
            return False
    return len(set(lab.witnesses)) == len(lab.witnesses)


def _zuta_search(g: FactorGraph, with_witnesses: bool) -> Iterator[ZutaLabeling]:
    # fill positions from the last one backwards; a latent fits at the current
    # position iff it has a child outside the children of all later latents
    m = g.m
    order: list = [None] * m
    wit: list = [None] * m
    reversed_latent = g.latent[::-1]

    def rec(i: int, used: frozenset, covered: frozenset):
        if i < 0:
            yield ZutaLabeling(tuple(order), tuple(wit))
            return
        for h in reversed_latent:
            if h in used:
                continue
            free = [v for v in g.children(h) if v not in covered]
            if not free:
                continue
            order[i] = h
            for v in free if with_witnesses else free[:1]:
                wit[i] = v
                yield from rec(i - 1, used | {h}, covered | set(g.children(h)))

    yield from rec(m - 1, frozenset(), frozenset())


def enumerate_zuta_labelings(g: FactorGraph, limit: int) -> list:
    """Up to ``limit`` distinct ZUTA labelings in a fixed deterministic order."""
    if limit < 1:
        raise ValueError("limit must be at least 1")
    out = []
    for lab in _zuta_search(g, with_witnesses=True):
        out.append(lab)
        if len(out) >= limit:
            break
    return out


def zuta_labeling(g: FactorGraph) -> Optional[ZutaLabeling]:
    """Some ZUTA labeling, or None when no latent order admits one."""
    return next(_zuta_search(g, with_witnesses=False), None)


def expected_dimension(g: FactorGraph) -> int:
    return min(g.p + len(g.edges), g.p * (g.p + 1) // 2)


def parametrization(g: FactorGraph) -> dict:
    """Images of all off-diagonal covariance variables as polynomials in the loadings."""
    out = {}
    for u, v in g.pairs():
        terms = Polynomial()
        for h in g.latent:
            if h in g.parents(u) and h in g.parents(v):
                terms = terms + Polynomial.var(lam(u, h)) * Polynomial.var(lam(v, h))
        out[sigma(u, v)] = terms
    return out


def sigma_pair(g: FactorGraph, var: Variable) -> tuple:
    """The canonical node pair of a covariance variable."""
    return g.pair(var.first, var.second)
