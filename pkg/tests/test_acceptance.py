"""Acceptance criteria, one test per criterion; each prints a single PASS/FAIL line.

Criteria 6 and 9 cannot be met as literally stated: the printed overlap-three
quintic does not vanish on the graph it is attributed to.  The tests below
assert what is true (it vanishes on the variant overlap3_alt and not on
overlap3), report the criterion as FAIL, and keep the literal check as a strict
expected failure so that a change in either fact is noticed.
"""

import itertools
import math
import random
import time

import pytest

from conftest import random_graph, random_two_factor, record
from fct.algebra import TermOrder, is_groebner_basis, parse_polynomial, sigma
from fct.dimension import (
    best_lower_bound,
    max_valid_collection,
    max_zuta_collection,
    model_dimension,
    upper_bound,
    zero_pattern_bound,
)
from fct.fixtures import NAMES, load_fixture, printed_polynomials
from fct.graph import ZutaLabeling, from_children, jpa
from fct.invariants import (
    OneFactorSplit,
    chain_generators,
    glued_hypergraph,
    initial_ideal_check,
    monomials_and_tetrads,
    one_factor_groebner,
    reduced_form,
    two_factor_groebner,
    two_factor_split,
)
from fct.oracle import (
    VanishingBasisRequest,
    in_span,
    new_generator_counts,
    reduction_evidence,
    vanishing_basis,
    verify_vanishes,
)
from test_dimension import brute_max_collection


def nonzero_support(g):
    return tuple(sigma(u, v) for u, v in g.pairs() if jpa(g, u, v))


def test_criterion_1_dimension():
    expected = {"la": 12, "fig2": 16, "fig4a": 12, "fig4b": 15, "fig4c": 17, "fig6": 9, "fig7": 35}
    start = time.perf_counter()
    got = {name: model_dimension(load_fixture(name), trials=3, seed=0) for name in expected}
    elapsed = time.perf_counter() - start
    ok = got == expected and elapsed < 5
    record(1, ok, f"dimensions {got} in {elapsed:.2f}s")
    assert got == expected
    assert elapsed < 5


def test_criterion_2_bounds():
    fig4b = load_fixture("fig4b")
    coll, total = max_valid_collection(fig4b)
    fig7 = load_fixture("fig7")
    displayed = max_zuta_collection(fig7, ZutaLabeling(("h1", "h2", "h3", "h4", "h5"), ("1", "2", "3", "4", "5")))[1]
    # moving v5 and v6 to the end makes the old v7 the witness of h5
    moved = max_zuta_collection(fig7, ZutaLabeling(("h1", "h2", "h3", "h4", "h5"), ("1", "2", "3", "4", "7")))[1]
    low = best_lower_bound(fig7)
    exact = model_dimension(fig7)
    checks = {
        "fig4b upper": (upper_bound(fig4b), 15),
        "fig4b sum": (total, 9),
        "fig4b sizes": (sorted(len(p) for _, p in coll.assignment), [2, 3, 4]),
        "fig4a zero pattern": (zero_pattern_bound(load_fixture("fig4a")), 12),
        "fig7 displayed": (displayed, 23),
        "fig7 moved": (moved, 24),
        "fig7 lower": (low.value, 33),
        "fig7 exhaustive": (low.exhaustive, True),
        "fig7 exact": (exact, 35),
    }
    ok = all(a == b for a, b in checks.values())
    record(2, ok, "; ".join(f"{k}={a}" for k, (a, _) in checks.items()))
    for key, (a, b) in checks.items():
        assert a == b, key


def test_criterion_3_generators():
    problems = []
    la = two_factor_groebner(load_fixture("la"))
    if la.to_dict() != {"monomials": ["s_1_2", "s_2_3"], "tetrads": ["s_1_5*s_3_4 - s_1_4*s_3_5"], "hexads": []}:
        problems.append("la")

    fig2 = two_factor_groebner(load_fixture("fig2"))
    printed = set(printed_polynomials("fig2_hexads"))
    if [str(f) for f in fig2.monomials] != ["s_1_6", "s_1_7", "s_2_6", "s_2_7", "s_3_6", "s_3_7"]:
        problems.append("fig2 monomials")
    if set(fig2.hexads) != printed:
        problems.append("fig2 hexads")

    g7 = load_fixture("onefactor_7")
    (h,) = g7.latent
    one = one_factor_groebner(OneFactorSplit(g7.children(h), tuple(v for v in g7.observed if v not in g7.children(h))))
    if (len(one.monomials), len(one.tetrads)) != (11, 10):
        problems.append("one-factor counts")

    fig8 = chain_generators(load_fixture("fig8"))
    mono8 = ["s_1_5", "s_1_6", "s_1_7", "s_1_8", "s_2_5", "s_2_6", "s_2_7", "s_2_8", "s_3_8", "s_4_8", "s_5_8"]
    tet8 = {parse_polynomial(t) for t in (
        "s_4_7*s_5_6 - s_4_6*s_5_7", "s_3_7*s_5_6 - s_3_6*s_5_7", "s_3_7*s_4_6 - s_3_6*s_4_7",
        "s_3_7*s_4_5 - s_3_5*s_4_7", "s_3_6*s_4_5 - s_3_5*s_4_6", "s_1_4*s_2_3 - s_1_3*s_2_4")}
    hex8 = [parse_polynomial(t) for t in (
        "s_1_2*s_3_4*s_5_7 - s_1_2*s_3_5*s_4_7 - s_1_3*s_2_4*s_5_7",
        "s_1_2*s_3_4*s_5_6 - s_1_2*s_3_5*s_4_6 - s_1_3*s_2_4*s_5_6")]
    if [str(f) for f in fig8.monomials] != mono8:
        problems.append("fig8 monomials")
    if set(fig8.tetrads) != tet8:
        problems.append("fig8 tetrads")
    # the printed hexads are tail-reduced by the tetrads; compare reduced forms
    basis = fig8.all()
    ours = {reduced_form(f, basis, fig8.order) for f in fig8.hexads}
    theirs = {reduced_form(f, basis, fig8.order) for f in hex8}
    if ours != theirs or len(ours) != 2:
        problems.append("fig8 hexads")

    ok = not problems
    record(3, ok, "la, fig2, onefactor_7 (11+10), fig8 (11+6+2, hexads up to reduced form)"
           + ("" if ok else f"; mismatched: {problems}"))
    assert not problems


def test_criterion_4_groebner():
    start = time.perf_counter()
    failures = []
    for a in range(1, 7):
        A = tuple(str(i) for i in range(1, a + 1))
        B = tuple(str(i) for i in range(a + 1, a + 3))
        ranking = tuple(sigma(x, y) for x, y in itertools.combinations(A + B, 2))
        for rev in (False, True):
            order = TermOrder(A, B, ranking, rev)
            if not is_groebner_basis(one_factor_groebner(OneFactorSplit(A, B), order).all(), order):
                failures.append(f"one-factor |A|={a} reverse={rev}")
    for name in ("la", "fig2"):
        gens = two_factor_groebner(load_fixture(name))
        if not is_groebner_basis(gens.all(), gens.order):
            failures.append(name)
    rng = random.Random(2024)
    for i in range(50):
        g = random_two_factor(rng, rng.randint(4, 7))
        gens = two_factor_groebner(g)
        if not is_groebner_basis(gens.all(), gens.order):
            failures.append(f"random {i}: {g.to_json()}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    record(4, ok, f"one-factor |A|<=6 x 2 tie-breaks, la, fig2, 50 random graphs in {elapsed:.1f}s"
           + ("" if not failures else f"; failures: {failures[:3]}"))
    assert not failures
    assert elapsed < 60


def test_criterion_5_initial_ideal():
    checked = []
    failures = []
    for name in NAMES:
        g = load_fixture(name)
        if g.m != 2 or len(two_factor_split(g)[2]) != 2:
            continue
        checked.append(name)
        if not initial_ideal_check(two_factor_groebner(g), glued_hypergraph(g)):
            failures.append(name)
    H = glued_hypergraph(load_fixture("fig2"))
    shape = (len(H.edges3), len(H.isolated), ("4", "6") in H.vertices, ("5", "7") in H.vertices)
    ok = not failures and shape == (3, 6, False, False) and checked
    record(5, ok, f"initial ideals match on {checked}; fig2 hypergraph: {shape[0]} triples, "
                  f"{shape[1]} isolated, 46/57 absent={not shape[2] and not shape[3]}")
    assert checked and not failures
    assert shape == (3, 6, False, False)


def test_criterion_6_printed_polynomials():
    (quintic,) = printed_polynomials("overlap3_deg5")
    (quartic,) = printed_polynomials("chain3_deg4")
    (chain5,) = printed_polynomials("chain4_deg5")
    facts = {
        "chain3 degree 4": verify_vanishes(quartic, load_fixture("chain3")),
        "chain4 degree 5": verify_vanishes(chain5, load_fixture("chain4")),
        "overlap3 degree 5 on overlap3": verify_vanishes(quintic, load_fixture("overlap3")),
        "overlap3 degree 5 on overlap3_alt": verify_vanishes(quintic, load_fixture("overlap3_alt")),
    }
    literal = facts["chain3 degree 4"] and facts["chain4 degree 5"] and facts["overlap3 degree 5 on overlap3"]
    record(6, literal, "; ".join(f"{k}: {'vanishes' if v else 'does not vanish'}" for k, v in facts.items())
           + ("" if literal else " (the quintic fails on its stated graph; see the decisions ledger)"))
    assert facts["chain3 degree 4"] and facts["chain4 degree 5"]
    assert facts["overlap3 degree 5 on overlap3_alt"]
    assert not facts["overlap3 degree 5 on overlap3"]


@pytest.mark.xfail(strict=True, reason="the printed quintic does not vanish on the graph it is attributed to")
def test_criterion_6_literal_quintic_on_stated_graph():
    (quintic,) = printed_polynomials("overlap3_deg5")
    assert verify_vanishes(quintic, load_fixture("overlap3"))


def test_criterion_7_oracle_equivalence():
    start = time.perf_counter()
    graphs = {}
    for name in NAMES:
        g = load_fixture(name)
        if g.m == 2 and g.p <= 6 and len(two_factor_split(g)[2]) <= 2:
            graphs[name] = g
    rng = random.Random(77)
    for i in range(8):
        graphs[f"random{i}"] = random_two_factor(rng, rng.randint(4, 6))
    graphs["fig2"] = load_fixture("fig2")
    failures = []
    total = 0
    for name, g in graphs.items():
        rep = reduction_evidence(g, two_factor_groebner(g), 3)
        total += rep.certified
        if rep.reduced_to_zero != rep.certified or rep.found != rep.certified:
            failures.append(name)

    g3 = load_fixture("overlap3")
    support = nonzero_support(g3)
    ev = reduction_evidence(g3, monomials_and_tetrads(g3), 5, support, homogeneous_only=True)
    counts = new_generator_counts(g3, 5, support)
    new = [c.new for c in counts]
    elapsed = time.perf_counter() - start
    ok = not failures and ev.reduced_to_zero < ev.certified and new[4] > 0 and elapsed < 600
    record(7, ok, f"{total} certified elements of degree <=3 on {len(graphs)} graphs all reduce to 0; "
                  f"overlap3 degree 5: {ev.certified - ev.reduced_to_zero} of {ev.certified} irreducible by "
                  f"monomials+tetrads, new minimal generators per degree {new}; {elapsed:.0f}s")
    assert not failures
    assert ev.reduced_to_zero < ev.certified
    assert new[4] > 0 and new[3] == 0
    assert elapsed < 600


def test_criterion_8_flow_vs_brute_force():
    mismatches = []
    exhaustive = 0
    # every graph on up to 4 observed and 2 latent nodes
    for p in range(1, 5):
        obs = [str(i) for i in range(1, p + 1)]
        for m in (1, 2):
            for mask in range(1, 2 ** (p * m)):
                children = {f"h{j + 1}": [obs[i] for i in range(p) if mask >> (j * p + i) & 1] for j in range(m)}
                if any(not ch for ch in children.values()):
                    continue
                g = from_children(children, obs)
                exhaustive += 1
                if max_valid_collection(g)[1] != brute_max_collection(g):
                    mismatches.append(g.to_json())
    rng = random.Random(8)
    for _ in range(500):
        g = random_graph(rng, rng.randint(1, 5), rng.randint(1, 3), rng.choice([0.3, 0.5, 0.7, 0.9]))
        if max_valid_collection(g)[1] != brute_max_collection(g):
            mismatches.append(g.to_json())
    ok = not mismatches
    record(8, ok, f"{exhaustive} exhaustive graphs (p<=4, m<=2) and 500 random graphs (p<=5, m<=3) agree")
    assert not mismatches


def test_criterion_9_pentads():
    g5 = load_fixture("full2_5")
    pentads = vanishing_basis(VanishingBasisRequest(g5, 5, homogeneous_only=True))
    (quintic,) = printed_polynomials("overlap3_deg5")
    spaces = {}
    for name in ("overlap3", "overlap3_alt"):
        g = load_fixture(name)
        support = tuple(sorted(quintic.variables(), key=lambda v: v.key))
        basis = vanishing_basis(VanishingBasisRequest(g, 5, support, homogeneous_only=True))
        spaces[name] = in_span(basis, quintic)
    literal = len(pentads) > 0 and spaces["overlap3"]
    record(9, literal, f"full2_5 degree 5 space has dimension {len(pentads)}; printed quintic in span on "
                       f"overlap3: {spaces['overlap3']}, on overlap3_alt: {spaces['overlap3_alt']}"
                       + ("" if literal else " (see the decisions ledger)"))
    assert len(pentads) > 0
    assert all(verify_vanishes(f, g5) for f in pentads)
    assert spaces["overlap3_alt"] and not spaces["overlap3"]


@pytest.mark.xfail(strict=True, reason="the printed quintic does not vanish on the graph it is attributed to")
def test_criterion_9_literal_quintic_in_span_on_stated_graph():
    g = load_fixture("overlap3")
    (quintic,) = printed_polynomials("overlap3_deg5")
    support = tuple(sorted(quintic.variables(), key=lambda v: v.key))
    assert in_span(vanishing_basis(VanishingBasisRequest(g, 5, support, homogeneous_only=True)), quintic)
