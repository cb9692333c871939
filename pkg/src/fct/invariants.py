"""Generators of the ideal of invariants: monomials, tetrads and hexads."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Optional, Sequence

from fct.algebra.groebner import leading_monomial
from fct.algebra.order import TermOrder
from fct.algebra.polynomial import Monomial, Polynomial, s, sigma
from fct.algebra.text import format_polynomial
from fct.errors import (
    BadSize,
    GraphMismatch,
    NotTwoFactor,
    OverlapNotTwo,
    OverlapTooLarge,
    UnknownVertex,
)
from fct.graph import FactorGraph, jpa

TAG_MONOMIAL = "thm-two-factor-type-1"
TAG_TETRAD = "thm-two-factor-type-2"
TAG_HEXAD = "thm-two-factor-type-3"
TAG_ONE_MONOMIAL = "prop-one-factor-monomial"
TAG_ONE_TETRAD = "prop-one-factor-tetrad"
TAG_SMALL = "prop-small-intersection"
TAG_CHAIN = "chain-overlap-two"


@dataclass(frozen=True)
class OneFactorSplit:
    A: tuple  # children, embedded on a circle in this order
    B: tuple = ()  # the remaining, isolated vertices

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(str(v) for v in self.A))
        object.__setattr__(self, "B", tuple(str(v) for v in self.B))
        if not self.A:
            raise ValueError("A must contain at least one vertex")
        if set(self.A) & set(self.B):
            raise ValueError("A and B must be disjoint")


@dataclass
class GeneratorSet:
    monomials: list
    tetrads: list
    hexads: list
    order: TermOrder
    provenance: dict = field(default_factory=dict)  # Polynomial -> tag
    graph: Optional[FactorGraph] = None

    def all(self) -> list:
        return list(self.monomials) + list(self.tetrads) + list(self.hexads)

    def to_dict(self, with_provenance: bool = False) -> dict:
        out = {
            key: [format_polynomial(f, self.order) for f in getattr(self, key)]
            for key in ("monomials", "tetrads", "hexads")
        }
        if with_provenance:
            out["provenance"] = {
                key: [self.provenance.get(f, "") for f in getattr(self, key)]
                for key in ("monomials", "tetrads", "hexads")
            }
        return out


def _sorted_generators(polys, order: TermOrder) -> list:
    unique = list(dict.fromkeys(polys))
    return sorted(unique, key=lambda f: order.key(leading_monomial(f, order)), reverse=True)


def degree_one_monomials(g: FactorGraph) -> list:
    """The covariance variables forced to zero: pairs without a joint parent."""
    return [s(u, v) for u, v in g.pairs() if not jpa(g, u, v)]


def crossing(embedding: Sequence, e1: Sequence, e2: Sequence) -> bool:
    """Whether two chords of the circular embedding cross; sharing an endpoint counts."""
    pos = {str(v): i for i, v in enumerate(embedding)}
    try:
        a, b = sorted(pos[str(x)] for x in e1)
        c, d = (pos[str(x)] for x in e2)
    except KeyError as exc:
        raise UnknownVertex(exc.args[0]) from None
    if len({a, b, c, d}) < 4:
        return True
    return (a < c < b) != (a < d < b)


def glued_embedding(g: FactorGraph) -> tuple[tuple, tuple]:
    """Circle through the children of consecutive latent nodes, overlaps kept adjacent.

    Returns ``(circle, rest)``: the circle lists the children of the first latent
    node outside the next overlap, then that overlap, then the remaining children
    of the next latent node, and so on; ``rest`` holds parentless nodes.
    """
    placed: list = []
    kids = [g.children(h) for h in g.latent]
    for a, A in enumerate(kids):
        nxt = set(kids[a + 1]) if a + 1 < len(kids) else set()
        own = [v for v in A if v not in placed and v not in nxt]
        shared = [v for v in A if v not in placed and v in nxt]
        placed.extend(own + shared)
    rest = tuple(v for v in g.observed if v not in placed)
    return tuple(placed), rest


def two_factor_order(g: FactorGraph) -> TermOrder:
    circle, rest = glued_embedding(g)
    return TermOrder(circle, rest)


def restricted(order: TermOrder, A: Sequence) -> tuple:
    """The vertices of ``A`` in the circular order of ``order``."""
    members = set(A)
    return tuple(v for v in order.embedding if v in members)


def tetrads(A: Sequence) -> list:
    """The two tetrads of each 4-subset of ``A`` (taken in the given circular order)."""
    out = []
    for i, j, k, l in combinations(A, 4):
        cross = s(i, k) * s(j, l)
        out.append(s(i, j) * s(k, l) - cross)
        out.append(s(i, l) * s(j, k) - cross)
    return out


def one_factor_groebner(split: OneFactorSplit, order: Optional[TermOrder] = None) -> GeneratorSet:
    """Reduced Groebner basis of the one-factor model with children A and isolated B."""
    if order is None:
        order = TermOrder(split.A, split.B)
    monos = []
    for b in split.B:
        monos.extend(s(a, b) for a in split.A)
    monos.extend(s(b1, b2) for b1, b2 in combinations(split.B, 2))
    tets = tetrads(split.A)
    prov = {f: TAG_ONE_MONOMIAL for f in monos}
    prov.update({f: TAG_ONE_TETRAD for f in tets})
    monos = sorted(monos, key=lambda f: leading_monomial(f, order).items()[0][0].key)
    return GeneratorSet(monos, _sorted_generators(tets, order), [], order, prov)


def sigma_minor(rows: Sequence, cols: Sequence, zero: frozenset = frozenset()) -> Optional[Polynomial]:
    """det of the covariance submatrix; ``None`` if it needs a diagonal entry.

    Entries whose unordered index pair is in ``zero`` are replaced by 0.
    """
    n = len(rows)
    total = Polynomial()
    for perm in permutations(range(n)):
        sign = 1
        for x in range(n):
            for y in range(x + 1, n):
                if perm[x] > perm[y]:
                    sign = -sign
        term = Polynomial.constant(sign)
        for r, c in enumerate(perm):
            a, b = rows[r], cols[c]
            if a == b:
                return None
            if frozenset((a, b)) in zero:
                term = Polynomial()
                break
            term = term * s(a, b)
        total = total + term
    return total


def _pa(g: FactorGraph, nodes) -> frozenset:
    out = frozenset()
    for v in nodes:
        out |= g.parents(v)
    return out


def m_leq1(g: FactorGraph) -> list:
    """Degree-one monomials and the 2x2 minors whose row and column sets share at most one parent."""
    out = list(degree_one_monomials(g))
    seen = set(out)
    for A in combinations(g.observed, 2):
        for B in combinations(g.observed, 2):
            if A >= B and A != B:
                continue
            if len(_pa(g, A) & _pa(g, B)) > 1:
                continue
            f = sigma_minor(A, B)
            if f is None or f.is_zero():
                continue
            if f in seen or -f in seen:
                continue
            seen.add(f)
            out.append(f)
    return out


def off_diagonal_minors(p: int, size: int) -> list:
    """All minors det(Sigma_{A,B}) with |A| = |B| = size and A, B disjoint subsets of 1..p."""
    if size not in (2, 3):
        raise BadSize(f"size must be 2 or 3, got {size}")
    nodes = [str(i) for i in range(1, p + 1)]
    out = []
    for A in combinations(nodes, size):
        rest = [v for v in nodes if v not in A]
        for B in combinations(rest, size):
            if B < A:
                continue  # each unordered split once
            out.append(sigma_minor(A, B))
    return out


def two_factor_split(g: FactorGraph) -> tuple:
    if g.m != 2:
        raise NotTwoFactor(f"expected 2 latent nodes, found {g.m}")
    h1, h2 = g.latent
    splits = []
    for h in (h1, h2):
        A = g.children(h)
        splits.append(OneFactorSplit(A, tuple(v for v in g.observed if v not in A)))
    overlap = tuple(v for v in g.observed if v in g.children(h1) and v in g.children(h2))
    return splits[0], splits[1], overlap


def hexad(i_pair, j_pair, k_pair) -> Polynomial:
    (i1, i2), (j1, j2), (k1, k2) = i_pair, j_pair, k_pair
    return (
        s(k1, k2) * s(i1, i2) * s(j1, j2)
        - s(k1, k2) * s(j1, i2) * s(j2, i1)
        - s(i1, i2) * s(j1, k2) * s(j2, k1)
    )


def _hexads(A1: Sequence, A2: Sequence, J: tuple, excluded: frozenset = frozenset()) -> list:
    """Hexads for cliques A1, A2 glued along the overlap pair J."""
    out = []
    rest1 = [v for v in A1 if v not in J]
    rest2 = [v for v in A2 if v not in J]
    for ip in combinations(rest1, 2):
        if crossing(A1, ip, J):
            continue
        for kp in combinations(rest2, 2):
            if crossing(A2, kp, J):
                continue
            f = hexad(ip, J, kp)
            if excluded and any(v in excluded for v in f.variables()):
                continue
            out.append(f)
    return out


def _mentions(f: Polynomial, var) -> bool:
    return var in f.variables()


def two_factor_groebner(g: FactorGraph) -> GeneratorSet:
    """Groebner basis of a two-factor model whose children sets share at most two nodes."""
    split1, split2, overlap = two_factor_split(g)
    if len(overlap) >= 3:
        raise OverlapTooLarge(
            f"children sets share {len(overlap)} nodes; no closed form is available, "
            "use the oracle verb to interpolate invariants"
        )
    order = two_factor_order(g)
    A1, A2 = restricted(order, split1.A), restricted(order, split2.A)
    monos = degree_one_monomials(g)
    prov = {f: TAG_MONOMIAL for f in monos}
    if len(overlap) <= 1:
        tets = tetrads(A1) + tetrads(A2)
        prov.update({f: TAG_SMALL for f in tets})
        return GeneratorSet(monos, _sorted_generators(tets, order), [], order, prov, g)
    j_var = sigma(*overlap)
    tets = [f for f in tetrads(A1) + tetrads(A2) if not _mentions(f, j_var)]
    hexes = _hexads(A1, A2, overlap)
    prov.update({f: TAG_TETRAD for f in tets})
    prov.update({f: TAG_HEXAD for f in hexes})
    return GeneratorSet(
        monos, _sorted_generators(tets, order), _sorted_generators(hexes, order), order, prov, g
    )


def chain_generators(g: FactorGraph) -> GeneratorSet:
    """Generators for a chain of latent nodes where consecutive children sets share exactly two nodes.

    Monomials, the tetrads of every latent avoiding all overlap variables, and the
    hexads of every consecutive pair avoiding the other overlap variables.
    """
    if g.m < 2:
        raise NotTwoFactor("a chain needs at least two latent nodes")
    kids = [g.children(h) for h in g.latent]
    overlaps = []
    for a in range(g.m):
        for b in range(a + 1, g.m):
            common = tuple(v for v in kids[a] if v in kids[b])
            if b == a + 1 and len(common) != 2:
                raise OverlapNotTwo(f"{g.latent[a]} and {g.latent[b]} share {len(common)} nodes")
            if b > a + 1 and common:
                raise OverlapNotTwo(f"{g.latent[a]} and {g.latent[b]} are not consecutive but share nodes")
            if b == a + 1:
                overlaps.append(common)
    order = two_factor_order(g)
    kids = [restricted(order, A) for A in kids]
    overlap_vars = {sigma(*J) for J in overlaps}
    monos = degree_one_monomials(g)
    tets = [f for A in kids for f in tetrads(A) if not (f.variables() & overlap_vars)]
    hexes = []
    for a, J in enumerate(overlaps):
        others = frozenset(overlap_vars - {sigma(*J)})
        hexes.extend(_hexads(kids[a], kids[a + 1], J, others))
    prov = {f: TAG_MONOMIAL for f in monos}
    prov.update({f: TAG_CHAIN for f in tets + hexes})
    return GeneratorSet(
        monos, _sorted_generators(tets, order), _sorted_generators(hexes, order), order, prov, g
    )


@dataclass(frozen=True)
class GluedHypergraph:
    vertices: frozenset  # of canonical pairs
    edges2: frozenset  # of frozensets of two pairs
    edges3: frozenset  # of frozensets of three pairs
    isolated: frozenset  # of canonical pairs
    graph: Optional[FactorGraph] = field(default=None, compare=False)


def _noncrossing_partners(A: Sequence, skip: tuple) -> set:
    out = set()
    for e, f in combinations(combinations(A, 2), 2):
        if skip in (e, f) or set(e) & set(f):
            continue
        if not crossing(A, e, f):
            out.add(frozenset((e, f)))
    return out


def glued_hypergraph(g: FactorGraph) -> GluedHypergraph:
    split1, split2, overlap = two_factor_split(g)
    if len(overlap) != 2:
        raise OverlapNotTwo(f"the children sets share {len(overlap)} nodes, not 2")
    order = two_factor_order(g)
    A1, A2 = restricted(order, split1.A), restricted(order, split2.A)
    J = overlap
    edges2 = _noncrossing_partners(A1, J) | _noncrossing_partners(A2, J)
    edges3 = set()
    rest1 = [v for v in A1 if v not in J]
    rest2 = [v for v in A2 if v not in J]
    for ip in combinations(rest1, 2):
        if crossing(A1, ip, J):
            continue
        for kp in combinations(rest2, 2):
            if not crossing(A2, kp, J):
                edges3.add(frozenset((ip, J, kp)))
    isolated = frozenset(pr for pr in g.pairs() if not jpa(g, *pr))
    vertices = set(isolated)
    for e in edges2 | edges3:
        vertices |= e
    return GluedHypergraph(frozenset(vertices), frozenset(edges2), frozenset(edges3), isolated, g)


def _minimal(monos) -> set:
    monos = set(monos)
    return {m for m in monos if not any(o != m and o.divides(m) for o in monos)}


def hypergraph_monomials(H: GluedHypergraph) -> set:
    out = {Monomial.of(sigma(*pr)) for pr in H.isolated}
    for e in H.edges2 | H.edges3:
        out.add(Monomial.of(*(sigma(*pr) for pr in e)))
    return out


def initial_ideal_check(gens: GeneratorSet, H: GluedHypergraph, order: Optional[TermOrder] = None) -> bool:
    """Whether the leading monomials of ``gens`` generate the edge ideal of ``H``."""
    if gens.graph is not None and H.graph is not None and gens.graph != H.graph:
        raise GraphMismatch("generator set and hypergraph come from different graphs")
    order = order or gens.order
    leads = {leading_monomial(f, order) for f in gens.all()}
    return _minimal(leads) == _minimal(hypergraph_monomials(H))


def hexad_as_minor(f: Polynomial, g: FactorGraph) -> bool:
    """Whether ``f`` is a 3x3 covariance minor with its two structurally zero entries removed."""
    if len(f) != 3 or f.total_degree != 3 or any(m.degree != 3 for m in f.monomials()):
        return False
    try:
        _, _, J = two_factor_split(g)
    except NotTwoFactor:
        return False
    if len(J) != 2:
        return False
    j_var = sigma(*J)
    head = [m for m in f.monomials() if m.exponent(j_var) == 1]
    if len(head) != 1:
        return False
    others = [v for v in head[0].variables() if v != j_var]
    if len(others) != 2:
        return False
    (a, b), (c, d) = ((v.first, v.second) for v in others)
    j1, j2 = J
    for ip in ((a, b), (b, a)):
        for kp in ((c, d), (d, c)):
            for jp in ((j1, j2), (j2, j1)):
                rows = (ip[0], jp[0], kp[0])
                cols = (ip[1], jp[1], kp[1])
                zero = frozenset({frozenset((ip[0], kp[1])), frozenset((kp[0], ip[1]))})
                det = sigma_minor(rows, cols, zero)
                if det is not None and (det == f or det == -f):
                    return True
    return False


def normal_form(f: Polynomial, basis: Sequence[Polynomial], order: TermOrder) -> Polynomial:
    """Remainder of ``f`` modulo ``basis`` scaled to leading coefficient 1."""
    from fct.algebra.groebner import leading_term, reduce

    r = reduce(f, basis, order)
    if r.is_zero():
        return r
    return r * (1 / leading_term(r, order)[1])


def reduced_form(f: Polynomial, basis: Sequence[Polynomial], order: TermOrder) -> Polynomial:
    """The element of a reduced Groebner basis with the same leading monomial as ``f``.

    ``basis`` must be a Groebner basis of an ideal containing ``f`` in which the
    leading monomial of ``f`` is minimal; two such polynomials with equal
    leading monomials then have equal reduced forms.
    """
    from fct.algebra.groebner import leading_term, reduce

    m, c = leading_term(f, order)
    tail = f - Polynomial.monomial(m, c)
    return (Polynomial.monomial(m, c) + reduce(tail, basis, order)) * (1 / c)


def monomials_and_tetrads(g: FactorGraph) -> GeneratorSet:
    """Degree-one monomials and every one-factor tetrad avoiding pairs with two or more joint parents."""
    order = two_factor_order(g)
    shared = {sigma(u, v) for u, v in g.pairs() if len(jpa(g, u, v)) >= 2}
    monos = degree_one_monomials(g)
    tets = []
    for h in g.latent:
        tets.extend(f for f in tetrads(restricted(order, g.children(h))) if not (f.variables() & shared))
    prov = {f: TAG_MONOMIAL for f in monos}
    prov.update({f: TAG_ONE_TETRAD for f in tets})
    return GeneratorSet(monos, _sorted_generators(tets, order), [], order, prov, g)
