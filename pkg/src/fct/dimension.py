"""Model dimension: combinatorial upper and lower bounds and the Jacobian rank."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from fct.algebra.linalg import exact_rank
from fct.errors import InvalidLabeling, KeyMismatch
from fct.graph import (
    FactorGraph,
    ZutaLabeling,
    enumerate_zuta_labelings,
    expected_dimension,
    is_zuta_labeling,
    jpa,
    pair_classes,
)
from fct.parallel import parallel_map

LAMBDA_MAX = 2**20
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ValidCollection:
    # (latent, pairs) in canonical latent order; pairs are canonical tuples
    assignment: tuple

    @classmethod
    def from_mapping(cls, g: FactorGraph, sets: Mapping) -> "ValidCollection":
        items = []
        for h in g.latent:
            pairs = sorted(sets.get(h, ()), key=lambda pr: (g.position(pr[0]), g.position(pr[1])))
            items.append((h, tuple(pairs)))
        return cls(tuple(items))

    def sets(self) -> dict:
        return {h: frozenset(prs) for h, prs in self.assignment}

    @property
    def total(self) -> int:
        return sum(len(prs) for _, prs in self.assignment)

    def is_valid(self, g: FactorGraph) -> bool:
        seen = set()
        for h, prs in self.assignment:
            if len(prs) > len(g.children(h)):
                return False
            allowed = pair_classes(g, h)
            for pr in prs:
                key = frozenset(pr)
                if tuple(g.pair(*pr)) not in allowed or key in seen:
                    return False
                seen.add(key)
        return True

    def to_dict(self) -> dict:
        return {h: [list(pr) for pr in prs] for h, prs in self.assignment}


def max_valid_collection(g: FactorGraph) -> tuple[ValidCollection, int]:
    """A valid collection of maximum total size, via integral max-flow."""
    net = nx.DiGraph()
    src, sink = ("src",), ("sink",)
    net.add_node(src)
    for h in g.latent:
        net.add_edge(src, ("h", h), capacity=len(g.children(h)))
        for pr in sorted(pair_classes(g, h), key=lambda pr: (g.position(pr[0]), g.position(pr[1]))):
            net.add_edge(("h", h), ("pair", pr), capacity=1)
            net.add_edge(("pair", pr), sink, capacity=1)
    if sink not in net:
        return ValidCollection.from_mapping(g, {}), 0
    value, flow = nx.maximum_flow(net, src, sink, flow_func=edmonds_karp)
    sets: dict = {h: [] for h in g.latent}
    for h in g.latent:
        for node, f in flow.get(("h", h), {}).items():
            if f >= 1:
                sets[h].append(node[1])
    coll = ValidCollection.from_mapping(g, sets)
    assert coll.total == value
    return coll, int(value)


def upper_bound(g: FactorGraph) -> int:
    return g.p + max_valid_collection(g)[1]


def zero_pattern_bound(g: FactorGraph) -> int:
    zeros = sum(1 for u, v in g.pairs() if not jpa(g, u, v))
    return g.p * (g.p + 1) // 2 - zeros


def max_zuta_collection(g: FactorGraph, lab: ZutaLabeling) -> tuple[ValidCollection, int]:
    """Best ZUTA-compliant collection for one labeling: forced pairs plus a matching of extras."""
    if not is_zuta_labeling(g, lab):
        raise InvalidLabeling(f"{lab} is not a ZUTA labeling of the graph")
    sets: dict = {}
    forced = set()
    for h, v in zip(lab.latent_order, lab.witnesses):
        prs = [g.pair(v, w) for w in g.children(h) if w != v]
        sets[h] = prs
        forced.update(prs)
    bip = nx.Graph()
    tops = [("h", h) for h in lab.latent_order]
    bip.add_nodes_from(tops)
    for h in lab.latent_order:
        for pr in sorted(pair_classes(g, h), key=lambda pr: (g.position(pr[0]), g.position(pr[1]))):
            if pr not in forced:
                bip.add_edge(("h", h), ("pair", pr))
    matching = nx.bipartite.hopcroft_karp_matching(bip, top_nodes=tops)
    for h in lab.latent_order:
        mate = matching.get(("h", h))
        if mate is not None:
            sets[h].append(mate[1])
    coll = ValidCollection.from_mapping(g, sets)
    return coll, coll.total


@dataclass(frozen=True)
class LowerBoundResult:
    value: int  # p + best sum
    collection: ValidCollection
    labeling: ZutaLabeling
    exhaustive: bool
    labelings_tried: int


def best_lower_bound(g: FactorGraph, labeling_budget: int = 10_000) -> Optional[LowerBoundResult]:
    """Maximize the ZUTA-compliant bound over up to ``labeling_budget`` labelings."""
    if labeling_budget < 1:
        raise ValueError("labeling_budget must be at least 1")
    labs = enumerate_zuta_labelings(g, labeling_budget + 1)
    exhaustive = len(labs) <= labeling_budget
    labs = labs[:labeling_budget]
    if not labs:
        return None
    best = None
    for lab in labs:
        coll, total = max_zuta_collection(g, lab)
        if best is None or total > best[1].total:
            best = (lab, coll)
    lab, coll = best
    return LowerBoundResult(g.p + coll.total, coll, lab, exhaustive, len(labs))


def lower_bound(g: FactorGraph, labeling_budget: int = 10_000) -> Optional[int]:
    res = best_lower_bound(g, labeling_budget)
    return None if res is None else res.value


@dataclass(frozen=True)
class JacobianBlock:
    rows: tuple  # canonical pairs
    cols: tuple  # (observed, latent) edges
    entries: tuple  # tuple of row tuples of Fractions

    def as_lists(self) -> list:
        return [list(r) for r in self.entries]


def jacobian_columns(g: FactorGraph) -> tuple:
    return tuple((v, h) for h, v in g.sorted_edges())


def jacobian_block(g: FactorGraph, lambda_values: Mapping) -> JacobianBlock:
    cols = jacobian_columns(g)
    if set(lambda_values) != set(cols):
        raise KeyMismatch("loading values must be keyed exactly by the edges (observed, latent)")
    col_index = {c: i for i, c in enumerate(cols)}
    rows = tuple(g.pairs())
    entries = []
    for u, v in rows:
        row = [Fraction(0)] * len(cols)
        for h in jpa(g, u, v):
            row[col_index[(u, h)]] = Fraction(lambda_values[(v, h)])
            row[col_index[(v, h)]] = Fraction(lambda_values[(u, h)])
        entries.append(tuple(row))
    return JacobianBlock(rows, cols, tuple(entries))


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(master: int, i: int) -> int:
    """Seed of trial ``i``: splitmix64 applied to ``master XOR i``."""
    return splitmix64((master & _MASK64) ^ i)


def random_loadings(g: FactorGraph, seed: int) -> dict:
    rng = random.Random(seed)
    return {c: rng.randint(1, LAMBDA_MAX) for c in jacobian_columns(g)}


def jacobian_rank(g: FactorGraph, seed: int) -> int:
    block = jacobian_block(g, random_loadings(g, seed))
    return exact_rank(block.entries) if block.cols else 0


def model_dimension(g: FactorGraph, trials: int = 3, seed: int = 0) -> int:
    """``p`` plus the largest Jacobian-block rank over random integer loadings."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    ranks = parallel_map(lambda i: jacobian_rank(g, trial_seed(seed, i)), range(trials))
    return g.p + max(ranks)


@dataclass
class DimensionReport:
    expected: int
    zero_pattern_bound: int
    upper: int
    lower: Optional[int]
    exact: Optional[int]
    exact_is_probabilistic: bool
    trials: int
    seed: int
    witness_upper: ValidCollection
    witness_lower: Optional[tuple] = None  # (ValidCollection, ZutaLabeling)
    lower_exhaustive: Optional[bool] = None
    defective: Optional[bool] = field(default=None)

    def to_dict(self) -> dict:
        lower = None
        if self.witness_lower is not None:
            coll, lab = self.witness_lower
            lower = {"collection": coll.to_dict(), "labeling": lab.to_dict()}
        return {
            "expected": self.expected,
            "zero_pattern_bound": self.zero_pattern_bound,
            "upper": self.upper,
            "lower": self.lower,
            "exact": self.exact,
            "exact_is_probabilistic": self.exact_is_probabilistic,
            "trials": self.trials,
            "seed": self.seed,
            "defective": self.defective,
            "lower_exhaustive": self.lower_exhaustive,
            "witness_upper": self.witness_upper.to_dict(),
            "witness_lower": lower,
        }


def dimension_report(
    g: FactorGraph,
    trials: int = 3,
    seed: int = 0,
    labeling_budget: int = 10_000,
    with_exact: bool = True,
) -> DimensionReport:
    coll, total = max_valid_collection(g)
    low = best_lower_bound(g, labeling_budget)
    exact = model_dimension(g, trials, seed) if with_exact else None
    expected = expected_dimension(g)
    return DimensionReport(
        expected=expected,
        zero_pattern_bound=zero_pattern_bound(g),
        upper=g.p + total,
        lower=None if low is None else low.value,
        exact=exact,
        exact_is_probabilistic=with_exact,
        trials=trials,
        seed=seed,
        witness_upper=coll,
        witness_lower=None if low is None else (low.collection, low.labeling),
        lower_exhaustive=None if low is None else low.exhaustive,
        defective=None if exact is None else exact < expected,
    )
