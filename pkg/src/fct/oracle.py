"""Ground truth by sampling, substitution and exact interpolation.

``vanishing_basis`` finds polynomials vanishing on the model by computing the
kernel of an evaluation matrix modulo a large prime, lifting kernel vectors to
small rationals and certifying every lift symbolically.

The ideal of the model is homogeneous for the grading that gives ``s_u_v`` the
degree ``e_u + e_v`` in Z^p (rescaling all loadings of node ``v`` by ``t_v``
rescales ``s_u_v`` by ``t_u t_v``).  The evaluation matrix is therefore block
diagonal by node multidegree and each block is handled on its own.
"""

from __future__ import annotations

import logging
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Optional, Sequence

import flint

from fct.algebra.groebner import reduce
from fct.algebra.linalg import sparse_rank
from fct.algebra.polynomial import Monomial, Polynomial, Variable, sigma, substitute
from fct.algebra.text import format_polynomial
from fct.errors import CapExceeded, DiagonalVariable, LiftFailed, UnknownVariable
from fct.graph import FactorGraph, jpa, parametrization
from fct.invariants import GeneratorSet, two_factor_order
from fct.parallel import parallel_map

log = logging.getLogger(__name__)

SAMPLE_MAX = 2**20
DEFAULT_CAP = 50_000


@dataclass(frozen=True)
class ModelSample:
    lam: dict  # (observed, latent) -> int
    omega: dict  # observed -> int
    sigma: dict  # canonical pair -> Fraction
    diag: dict  # observed -> Fraction


def sample_model_point(g: FactorGraph, seed: int) -> ModelSample:
    """A point of the model with integer loadings and error variances in [1, 2^20]."""
    rng = random.Random(seed)
    lam = {(v, h): rng.randint(1, SAMPLE_MAX) for h, v in g.sorted_edges()}
    omega = {v: rng.randint(1, SAMPLE_MAX) for v in g.observed}
    sig = {}
    for u, v in g.pairs():
        sig[(u, v)] = Fraction(sum(lam[(u, h)] * lam[(v, h)] for h in jpa(g, u, v)))
    diag = {v: Fraction(omega[v] + sum(lam[(v, h)] ** 2 for h in g.parents(v))) for v in g.observed}
    return ModelSample(lam, omega, sig, diag)


def sample_values(g: FactorGraph, sample: ModelSample) -> dict:
    """The sample as an assignment of the covariance variables."""
    return {sigma(u, v): x for (u, v), x in sample.sigma.items()}


def _check_variables(f: Polynomial, g: FactorGraph) -> None:
    known = set(g.observed)
    for v in f.variables():
        if v.kind != "s" or v.first not in known or v.second not in known:
            raise UnknownVariable(f"{v} is not a covariance variable of the graph")
        if v.is_diagonal:
            raise DiagonalVariable(f"{v} is a diagonal entry")


def verify_vanishes(f: Polynomial, g: FactorGraph) -> bool:
    """Exact check that ``f`` is zero on the whole model (symbolic in the loadings)."""
    _check_variables(f, g)
    return substitute(f, parametrization(g)).is_zero()


@dataclass(frozen=True)
class VanishingBasisRequest:
    graph: FactorGraph
    degree: int
    support: Optional[tuple] = None  # covariance variables; all off-diagonal ones if None
    homogeneous_only: bool = False

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        if self.support is not None:
            for v in self.support:
                if v.kind != "s":
                    raise UnknownVariable(f"{v} is not a covariance variable")
                if v.is_diagonal:
                    raise DiagonalVariable(f"{v} is a diagonal entry")

    def variables(self) -> tuple:
        if self.support is not None:
            return tuple(sorted(set(self.support), key=lambda v: v.key))
        return tuple(sigma(u, v) for u, v in self.graph.pairs())


def _degrees(req: VanishingBasisRequest) -> range:
    return range(req.degree, req.degree + 1) if req.homogeneous_only else range(1, req.degree + 1)


def monomial_count(req: VanishingBasisRequest) -> int:
    n = len(req.variables())
    return sum(math.comb(n + d - 1, d) for d in _degrees(req))


def _random_prime(rng: random.Random) -> int:
    while True:
        cand = rng.randrange(2**61, 2**62) | 1
        if flint.fmpz(cand).is_prime():
            return cand


def rational_reconstruction(a: int, p: int) -> Optional[Fraction]:
    """The fraction r/s with |r|, s <= sqrt(p/2) and r = a*s mod p, if it exists."""
    bound = math.isqrt(p // 2)
    r0, r1 = p, a % p
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


@dataclass
class _Block:
    multidegree: tuple
    monomials: list = field(default_factory=list)


def _blocks(req: VanishingBasisRequest, order) -> list:
    variables = req.variables()
    nodes = {v: i for i, v in enumerate(req.graph.observed)}
    blocks: dict = defaultdict(list)
    for d in _degrees(req):
        for combo in combinations_with_replacement(variables, d):
            md = [0] * len(nodes)
            for v in combo:
                md[nodes[v.first]] += 1
                md[nodes[v.second]] += 1
            blocks[tuple(md)].append(Monomial((v, 1) for v in combo))
    out = []
    for md in sorted(blocks):
        # ascending in the circular order, so each kernel vector is led by its free column
        out.append(_Block(md, order.sorted(blocks[md])))
    return out


def _block_kernel(block: _Block, samples: list, prime: int) -> tuple[list, list]:
    """Kernel vectors of one block, lifted to rationals; also the failed free columns."""
    cols = block.monomials
    n = len(cols)
    rows_needed = math.ceil(1.2 * n)
    entries = []
    for values in samples[:rows_needed]:
        for m in cols:
            x = 1
            for v, e in m:
                x = x * pow(values[v], e, prime) % prime
            entries.append(x)
    mat = flint.nmod_mat(rows_needed, n, entries, prime)
    rref, rank = mat.rref()
    flat = [int(x) for x in rref.entries()]
    pivots = []
    r = 0
    for c in range(n):
        if r < rank and flat[r * n + c] != 0:
            pivots.append(c)
            r += 1
    pivot_set = set(pivots)
    found, failed = [], []
    for f in range(n):
        if f in pivot_set:
            continue
        terms = {cols[f]: Fraction(1)}
        ok = True
        for row, pc in enumerate(pivots):
            a = flat[row * n + f]
            if a == 0:
                continue
            q = rational_reconstruction((-a) % prime, prime)
            if q is None:
                ok = False
                break
            terms[cols[pc]] = q
        if ok:
            found.append(Polynomial(terms))
        else:
            failed.append(cols[f])
    return found, failed


@dataclass
class BasisResult:
    basis: list  # certified polynomials
    found: int  # kernel vectors discovered
    dropped: list  # lifted but not certified
    prime: int


def vanishing_basis_detailed(
    req: VanishingBasisRequest, seed: int = 0, cap: int = DEFAULT_CAP
) -> BasisResult:
    count = monomial_count(req)
    if count > cap:
        raise CapExceeded(f"{count} monomials exceed the cap of {cap}")
    g = req.graph
    for v in req.variables():
        if v.first not in g.observed or v.second not in g.observed:
            raise UnknownVariable(f"{v} is not a covariance variable of the graph")
    rng = random.Random(seed)
    prime = _random_prime(rng)
    order = two_factor_order(g)
    blocks = _blocks(req, order)
    n_samples = max((math.ceil(1.2 * len(b.monomials)) for b in blocks), default=0)
    sample_seeds = [rng.getrandbits(64) for _ in range(n_samples)]
    variables = req.variables()

    def row_values(s: int) -> dict:
        pt = sample_model_point(g, s)
        vals = sample_values(g, pt)
        return {v: int(vals[v]) % prime for v in variables}

    samples = parallel_map(row_values, sample_seeds)
    found, failures = [], []
    for block in blocks:
        polys, failed = _block_kernel(block, samples, prime)
        found.extend(polys)
        failures.extend(failed)
    par = parametrization(g)
    certified, dropped = [], []
    for f in found:
        if substitute(f, par).is_zero():
            certified.append(f)
        else:
            log.warning("dropping uncertified kernel vector %s", format_polynomial(f, order))
            dropped.append(f)
    if failures:
        raise LiftFailed(
            f"{len(failures)} kernel vectors had no small rational lift",
            failures=[str(m) for m in failures],
        )
    return BasisResult(certified, len(found), dropped, prime)


def vanishing_basis(req: VanishingBasisRequest, seed: int = 0, cap: int = DEFAULT_CAP) -> list:
    """Certified basis of the vanishing polynomials of bounded degree in the support."""
    return vanishing_basis_detailed(req, seed, cap).basis


def in_span(basis: Sequence[Polynomial], f: Polynomial) -> bool:
    """Exact test that ``f`` is a rational combination of ``basis``."""
    return _solve(basis, f)


def _solve(basis, f) -> bool:
    from fct.algebra.linalg import solve_in_span

    return solve_in_span([dict(b.items()) for b in basis], dict(f.items()))


def independent(basis: Sequence[Polynomial]) -> bool:
    return sparse_rank([dict(b.items()) for b in basis]) == len(basis)


@dataclass
class EvidenceReport:
    found: int
    certified: int
    reduced_to_zero: int
    irreducible_examples: list  # canonical text, at most ``max_examples``

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "certified": self.certified,
            "reduced_to_zero": self.reduced_to_zero,
            "irreducible_examples": list(self.irreducible_examples),
        }


def reduction_evidence(
    g: FactorGraph,
    candidate: GeneratorSet,
    degree: int,
    support: Optional[Sequence[Variable]] = None,
    homogeneous_only: bool = False,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
    max_examples: int = 5,
) -> EvidenceReport:
    """Reduce every certified vanishing polynomial up to ``degree`` against ``candidate``."""
    req = VanishingBasisRequest(g, degree, None if support is None else tuple(support), homogeneous_only)
    res = vanishing_basis_detailed(req, seed, cap)
    gens = candidate.all()
    zero = 0
    bad = []
    for f in res.basis:
        r = reduce(f, gens, candidate.order)
        if r.is_zero():
            zero += 1
        else:
            bad.append(f)
    examples = [format_polynomial(f, candidate.order) for f in bad[:max_examples]]
    return EvidenceReport(res.found, len(res.basis), zero, examples)


def _multidegree(m: Monomial, nodes: dict) -> tuple:
    md = [0] * len(nodes)
    for v, e in m:
        md[nodes[v.first]] += e
        md[nodes[v.second]] += e
    return tuple(md)


@dataclass
class GeneratorCount:
    degree: int
    vanishing: int  # dimension of the vanishing space in this degree
    generated: int  # dimension of the part generated by lower degrees
    examples: list  # vanishing polynomials outside the generated part

    @property
    def new(self) -> int:
        return self.vanishing - self.generated


def new_generator_counts(
    g: FactorGraph,
    degree: int,
    support: Optional[Sequence[Variable]] = None,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
    max_examples: int = 3,
) -> list:
    """Per degree, how many minimal generators the vanishing ideal needs (restricted to ``support``).

    Compares each homogeneous piece with the span of all monomial multiples of
    lower-degree vanishing polynomials, block by block in the node grading.
    """
    from fct.algebra.linalg import _echelon, _eliminate

    req = VanishingBasisRequest(g, degree, None if support is None else tuple(support), False)
    basis = vanishing_basis(req, seed, cap)
    variables = req.variables()
    nodes = {v: i for i, v in enumerate(g.observed)}
    by_degree: dict = defaultdict(list)
    for f in basis:
        by_degree[f.total_degree].append(f)
    order = two_factor_order(g)
    out = []
    for d in range(1, degree + 1):
        target = defaultdict(list)
        for f in by_degree[d]:
            target[_multidegree(next(iter(f.monomials())), nodes)].append(f)
        products = defaultdict(list)
        for k in range(1, d):
            cofactors = defaultdict(list)
            for combo in combinations_with_replacement(variables, d - k):
                m = Monomial((v, 1) for v in combo)
                cofactors[_multidegree(m, nodes)].append(m)
            for f in by_degree[k]:
                fmd = _multidegree(next(iter(f.monomials())), nodes)
                for md in target:
                    need = tuple(a - b for a, b in zip(md, fmd))
                    if min(need) < 0:
                        continue
                    for m in cofactors.get(need, ()):
                        products[md].append(f.mul_term(m, Fraction(1)))
        generated = 0
        examples = []
        vanishing = 0
        for md, polys in target.items():
            vanishing += len(polys)
            ech = _echelon([dict(p.items()) for p in products.get(md, ())])
            generated += len(ech)
            if len(ech) < len(polys) and len(examples) < max_examples:
                for f in polys:
                    if _eliminate(ech, dict(f.items())):
                        examples.append(format_polynomial(f, order))
                        break
        out.append(GeneratorCount(d, vanishing, generated, examples))
    return out
