"""Graphs from the worked examples, shipped as JSON documents."""

from __future__ import annotations

from importlib import resources

from fct.graph import FactorGraph, parse_graph

NAMES = (
    "la", "fig2", "fig2_swapped", "fig3a", "full2_5", "onefactor_7", "fig4a", "fig4b",
    "fig4c", "fig5", "fig6", "fig7", "overlap3", "overlap3_alt", "fig8", "chain3", "chain4",
)


def fixture_path(name: str):
    return resources.files("fct") / "data" / f"{name}.json"


def load_fixture(name: str) -> FactorGraph:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(NAMES)}")
    return parse_graph(fixture_path(name).read_text(encoding="utf-8"))


def printed_polynomials(name: str) -> list:
    """Polynomials shipped in ``data/polys/<name>.txt``, one per line."""
    from fct.algebra.text import parse_polynomial

    text = (resources.files("fct") / "data" / "polys" / f"{name}.txt").read_text(encoding="utf-8")
    return [parse_polynomial(ln) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
