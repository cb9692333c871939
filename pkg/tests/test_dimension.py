import random
from fractions import Fraction
from functools import lru_cache

import pytest

from conftest import random_graph
from fct.algebra import exact_rank
from fct.errors import InvalidLabeling, KeyMismatch
from fct.fixtures import load_fixture
from fct.graph import (
    ZutaLabeling,
    expected_dimension,
    from_children,
    jpa,
    pair_classes,
    zuta_labeling,
)
from fct.dimension import (
    JacobianBlock,
    ValidCollection,
    best_lower_bound,
    dimension_report,
    jacobian_block,
    jacobian_columns,
    lower_bound,
    max_valid_collection,
    max_zuta_collection,
    model_dimension,
    random_loadings,
    splitmix64,
    trial_seed,
    upper_bound,
    zero_pattern_bound,
)


def brute_max_collection(g) -> int:
    """Exhaustive search: every pair goes to one of its joint parents or to none."""
    pairs = [pr for pr in g.pairs() if jpa(g, *pr)]
    options = [sorted(jpa(g, *pr)) for pr in pairs]
    latent = list(g.latent)
    caps = tuple(len(g.children(h)) for h in latent)

    @lru_cache(maxsize=None)
    def best(i: int, caps: tuple) -> int:
        if i == len(pairs):
            return 0
        out = best(i + 1, caps)
        for h in options[i]:
            k = latent.index(h)
            if caps[k] > 0:
                nxt = caps[:k] + (caps[k] - 1,) + caps[k + 1:]
                out = max(out, 1 + best(i + 1, nxt))
        return out

    return best(0, caps)


class TestUpperBound:
    def test_fig4b(self):
        g = load_fixture("fig4b")
        coll, total = max_valid_collection(g)
        assert total == 9 and coll.is_valid(g)
        assert upper_bound(g) == 15

    def test_fig6(self):
        assert max_valid_collection(load_fixture("fig6"))[1] == 5

    def test_single_latent(self):
        assert max_valid_collection(from_children({"h": ["1", "2", "3"]}))[1] == 3

    def test_other_fixtures(self):
        assert upper_bound(load_fixture("fig2")) == 16
        assert upper_bound(load_fixture("fig7")) == 35

    def test_against_brute_force(self):
        rng = random.Random(8)
        for _ in range(300):
            g = random_graph(rng, rng.randint(1, 5), rng.randint(1, 3), rng.choice([0.4, 0.7, 0.9]))
            coll, total = max_valid_collection(g)
            assert coll.is_valid(g) and coll.total == total
            assert total == brute_max_collection(g)

    def test_witness_invariants(self):
        g = load_fixture("fig7")
        coll, _ = max_valid_collection(g)
        seen = set()
        for h, prs in coll.assignment:
            assert len(prs) <= len(g.children(h))
            for pr in prs:
                assert pr in pair_classes(g, h)
                assert frozenset(pr) not in seen
                seen.add(frozenset(pr))

    def test_invalid_collection_detected(self):
        g = load_fixture("fig6")
        bad = ValidCollection.from_mapping(g, {"h1": [("1", "3")], "h2": [("1", "3")]})
        assert not bad.is_valid(g)


class TestZeroPatternBound:
    def test_examples(self):
        assert zero_pattern_bound(load_fixture("fig4a")) == 12
        assert zero_pattern_bound(load_fixture("fig4b")) == 16
        assert zero_pattern_bound(from_children({"h": ["1", "2", "3", "4"]})) == 10


class TestLowerBound:
    def test_fig5_labeling(self):
        g = load_fixture("fig5")
        lab = ZutaLabeling(("h1", "h2", "h3"), ("1", "2", "3"))
        coll, total = max_zuta_collection(g, lab)
        assert total == 9 and coll.is_valid(g)
        sets = coll.sets()
        assert sets["h1"] == {("1", "2"), ("1", "6")}
        assert {("2", "4"), ("2", "6")} <= sets["h2"] and len(sets["h2"]) == 3
        assert {("3", "4"), ("3", "5"), ("3", "6")} <= sets["h3"] and len(sets["h3"]) == 4

    def test_single_latent(self):
        g = from_children({"h": ["1", "2", "3"]})
        assert max_zuta_collection(g, ZutaLabeling(("h",), ("1",)))[1] == 3

    def test_invalid_labeling(self):
        g = load_fixture("fig2")
        with pytest.raises(InvalidLabeling):
            max_zuta_collection(g, ZutaLabeling(("h1", "h2"), ("4", "6")))

    def test_fig4b_and_fig5(self):
        assert lower_bound(load_fixture("fig4b")) == 15
        assert lower_bound(load_fixture("fig5")) == 15

    def test_fig7_exhaustive(self):
        res = best_lower_bound(load_fixture("fig7"))
        assert res.value == 33 and res.exhaustive
        assert res.collection.is_valid(load_fixture("fig7"))

    def test_budget_truncation_is_reported(self):
        res = best_lower_bound(load_fixture("fig7"), labeling_budget=1)
        assert not res.exhaustive and res.labelings_tried == 1
        with pytest.raises(ValueError):
            best_lower_bound(load_fixture("fig7"), 0)

    def test_non_zuta(self):
        assert lower_bound(from_children({"h1": ["1", "2"], "h2": ["1", "2"]})) is None

    def test_forced_pairs_present(self):
        rng = random.Random(4)
        for _ in range(100):
            g = random_graph(rng, rng.randint(2, 6), rng.randint(1, 3))
            lab = zuta_labeling(g)
            if lab is None:
                continue
            coll, total = max_zuta_collection(g, lab)
            assert coll.is_valid(g)
            sets = coll.sets()
            for h, v in lab.witness.items():
                assert {g.pair(v, w) for w in g.children(h) if w != v} <= sets[h]
            assert total >= len(g.edges) - g.m


class TestJacobian:
    def test_fig5_b0(self):
        g = load_fixture("fig5")
        ones = {("1", "h1"), ("2", "h2"), ("3", "h3"), ("4", "h2"), ("6", "h2"), ("5", "h3"), ("6", "h3")}
        values = {c: Fraction(1 if c in ones else 0) for c in jacobian_columns(g)}
        block = jacobian_block(g, values)
        cols = [("1", "h1"), ("2", "h2"), ("3", "h3"), ("2", "h1"), ("6", "h1"),
                ("4", "h2"), ("6", "h2"), ("4", "h3"), ("5", "h3"), ("6", "h3")]
        rows = [("1", "2"), ("1", "6"), ("2", "4"), ("2", "6"), ("3", "4"),
                ("3", "5"), ("3", "6"), ("4", "6"), ("5", "6"), ("4", "5")]
        expected = [
            [0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 1, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0, 1, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
            [0, 0, 1, 0, 0, 0, 0, 0, 1, 0],
            [0, 0, 1, 0, 0, 0, 0, 0, 0, 1],
            [0, 0, 0, 0, 0, 1, 1, 1, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
            [0, 0, 0, 0, 0, 0, 0, 1, 0, 0],
        ]
        ri = {r: i for i, r in enumerate(block.rows)}
        ci = {c: i for i, c in enumerate(block.cols)}
        got = [[block.entries[ri[r]][ci[c]] for c in cols] for r in rows]
        assert got == expected
        for r, i in ri.items():
            if r not in rows:
                assert not any(block.entries[i])
        assert exact_rank(block.entries) == 9

    def test_zero_loadings(self):
        g = load_fixture("fig2")
        block = jacobian_block(g, {c: 0 for c in jacobian_columns(g)})
        assert not any(x for row in block.entries for x in row)

    def test_two_children(self):
        g = from_children({"h": ["1", "2"]})
        block = jacobian_block(g, {("1", "h"): 3, ("2", "h"): 5})
        assert block.rows == (("1", "2"),) and block.entries == ((5, 3),)

    def test_key_mismatch(self):
        g = from_children({"h": ["1", "2"]})
        with pytest.raises(KeyMismatch):
            jacobian_block(g, {("1", "h"): 1})

    def test_finite_differences(self):
        # sigma is linear in each loading separately, so a unit step gives the exact derivative
        rng = random.Random(6)
        for name in ("fig2", "fig5", "fig7"):
            g = load_fixture(name)
            lam = {c: Fraction(rng.randint(-50, 50)) for c in jacobian_columns(g)}
            block = jacobian_block(g, lam)

            def sig(values, u, v):
                return sum(values[(u, h)] * values[(v, h)] for h in jpa(g, u, v))

            for j, col in enumerate(block.cols):
                bumped = dict(lam)
                bumped[col] += 1
                for i, (u, v) in enumerate(block.rows):
                    assert sig(bumped, u, v) - sig(lam, u, v) == block.entries[i][j]


class TestModelDimension:
    @pytest.mark.parametrize("name, dim", [
        ("la", 12), ("fig2", 16), ("fig4a", 12), ("fig4b", 15), ("fig4c", 17),
        ("fig5", 15), ("fig6", 9), ("fig7", 35), ("fig2_swapped", 16),
    ])
    def test_fixtures(self, name, dim):
        assert model_dimension(load_fixture(name), trials=3, seed=0) == dim

    def test_monotone_in_trials(self):
        g = load_fixture("fig4c")
        dims = [model_dimension(g, t, seed=5) for t in range(1, 6)]
        assert dims == sorted(dims)

    def test_seed_derivation(self):
        assert trial_seed(0, 0) == splitmix64(0)
        assert trial_seed(7, 3) == splitmix64(7 ^ 3)
        assert random_loadings(load_fixture("fig2"), 1) == random_loadings(load_fixture("fig2"), 1)

    def test_bad_trials(self):
        with pytest.raises(ValueError):
            model_dimension(load_fixture("fig2"), trials=0)

    def test_parentless_node_adds_one(self):
        g = from_children({"h": ["1", "2", "3"]}, ["1", "2", "3", "4"])
        assert model_dimension(g) == model_dimension(from_children({"h": ["1", "2", "3"]})) + 1

    def test_bounds_chain_random(self):
        rng = random.Random(9)
        for _ in range(150):
            g = random_graph(rng, rng.randint(1, 7), rng.randint(1, 3), rng.choice([0.3, 0.5, 0.8]))
            exact = model_dimension(g, trials=2, seed=rng.randrange(1 << 30))
            up = upper_bound(g)
            assert exact <= up <= min(expected_dimension(g), zero_pattern_bound(g))
            low = lower_bound(g)
            if low is not None:
                assert low <= exact

    def test_one_pure_child_formula(self):
        rng = random.Random(10)
        for _ in range(60):
            m = rng.randint(1, 3)
            children = {f"h{j}": [f"p{j}"] for j in range(1, m + 1)}
            shared = [f"s{i}" for i in range(rng.randint(1, 4))]
            for h in children:
                children[h] += [v for v in shared if rng.random() < 0.7]
            g = from_children(children)
            assert lower_bound(g) == upper_bound(g) == model_dimension(g)

    def test_two_children_corollary(self):
        g = load_fixture("fig2_swapped")
        rep = dimension_report(g)
        assert rep.exact == rep.expected == g.p + len(g.edges)


class TestReport:
    def test_fig4c(self):
        rep = dimension_report(load_fixture("fig4c"))
        assert (rep.expected, rep.exact, rep.defective) == (18, 17, True)

    def test_fig2(self):
        rep = dimension_report(load_fixture("fig2"))
        assert rep.expected == rep.upper == rep.lower == rep.exact == 16
        assert rep.defective is False

    def test_fig7(self):
        rep = dimension_report(load_fixture("fig7"))
        assert rep.lower == 33 and rep.exact == rep.upper == 35

    def test_field_names(self):
        d = dimension_report(load_fixture("fig6"), trials=1).to_dict()
        assert list(d) == ["expected", "zero_pattern_bound", "upper", "lower", "exact",
                           "exact_is_probabilistic", "trials", "seed", "defective",
                           "lower_exhaustive", "witness_upper", "witness_lower"]

    def test_without_exact(self):
        rep = dimension_report(load_fixture("fig6"), with_exact=False)
        assert rep.exact is None and rep.defective is None and not rep.exact_is_probabilistic
