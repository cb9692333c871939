import random

import pytest

from fct.graph import FactorGraph, from_children

ACCEPTANCE_RESULTS: dict = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_RESULTS[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(ACCEPTANCE_RESULTS[k])


def random_graph(rng: random.Random, p: int, m: int, density: float = 0.5) -> FactorGraph:
    """A random factor graph on nodes 1..p with latent h1..hm; every latent keeps at least one child."""
    observed = [str(i) for i in range(1, p + 1)]
    children = {}
    for j in range(1, m + 1):
        ch = [v for v in observed if rng.random() < density]
        if not ch:
            ch = [rng.choice(observed)]
        children[f"h{j}"] = ch
    return from_children(children, observed)


def random_two_factor(rng: random.Random, p: int, max_overlap: int = 2) -> FactorGraph:
    """Two latent nodes with contiguous-free random children sets sharing at most ``max_overlap`` nodes."""
    observed = [str(i) for i in range(1, p + 1)]
    while True:
        a = {v for v in observed if rng.random() < 0.6}
        b = {v for v in observed if rng.random() < 0.6}
        if len(a) >= 2 and len(b) >= 2 and len(a & b) <= max_overlap:
            return from_children({"h1": sorted(a, key=int), "h2": sorted(b, key=int)}, observed)


@pytest.fixture
def rng():
    return random.Random(20240917)
