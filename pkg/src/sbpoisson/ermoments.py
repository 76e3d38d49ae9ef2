"""Exact joint moments of subgraph counts in G(n, p) and the explicit bounds.

First and second joint moments come in closed form from overlap tables, which
makes them exact for every n once the desk-scale pattern enumeration is done.
On top of the moments sit the coupling bound for joint counts, the anchored
variance upper bound, the asymptotic bracket, covariance-ratio exponents, and
the critical/subcritical/supercritical classification along p = c n^(-1/alpha).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import ParameterError, ResourceError
from .patterns import (
    GammaEta,
    OverlapTable,
    PatternGraph,
    SharedEdgeStats,
    _incident,
    _norm_edges,
    _relabel,
    are_isomorphic,
    automorphism_count,
    copy_count,
    gamma_eta,
    is_strictly_balanced,
    labeled_copies,
    overlap_table,
    shared_edge_stats,
)


@dataclass(frozen=True)
class GraphEnsembleSpec:
    """A G(n, p) ensemble together with the patterns being counted."""

    n: int
    p: float
    patterns: tuple[PatternGraph, ...]

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ParameterError("edge probability must lie strictly in (0, 1)")
        if not self.patterns:
            raise ParameterError("at least one pattern is required")
        for H in self.patterns:
            if H.v > self.n:
                raise ParameterError(f"pattern with v={H.v} does not fit in n={self.n}")
        for a, b in itertools.combinations(self.patterns, 2):
            if are_isomorphic(a, b):
                raise ParameterError("patterns must be pairwise non-isomorphic")

    @property
    def d(self) -> int:
        return len(self.patterns)


@dataclass(frozen=True)
class MomentSet:
    """Means, variances, and the covariance matrix of the count vector."""

    lam: np.ndarray
    var: np.ndarray
    cov: np.ndarray  # full symmetric matrix, variances on the diagonal


def expected_count(H: PatternGraph, n: int, p: float) -> float:
    """E(W_H) = C(n, v) * (v!/a) * p^e."""
    if H.v > n:
        raise ParameterError(f"pattern with v={H.v} does not fit in n={n}")
    return copy_count(H, n) * p**H.e


@lru_cache(maxsize=None)
def _cached_table(H_i: PatternGraph, H_j: PatternGraph) -> OverlapTable:
    return overlap_table(H_i, H_j)


def exact_cov(
    H_i: PatternGraph,
    H_j: PatternGraph,
    n: int,
    p: float,
    table: OverlapTable | None = None,
) -> float:
    """Exact Cov(W_i, W_j) = sum over (k>=1, s<=n) of C(n,s) N_{k,s} p^{e_i+e_j-k} (1-p^k).

    The variance is the self-pair case: the identical pair sits in the table
    and contributes its term automatically.
    """
    if table is None:
        table = _cached_table(H_i, H_j)
    if table.pattern_i != H_i or table.pattern_j != H_j:
        raise ParameterError("overlap table does not match the pattern pair")
    e_sum = H_i.e + H_j.e
    return math.fsum(
        comb(n, s) * cnt * p ** (e_sum - k) * (1.0 - p**k)
        for (k, s), cnt in table.entries.items()
        if k >= 1 and s <= n
    )


def moments(spec: GraphEnsembleSpec) -> MomentSet:
    """Exact first and second joint moments of the count vector."""
    d = spec.d
    lam = np.array([expected_count(H, spec.n, spec.p) for H in spec.patterns])
    cov = np.zeros((d, d))
    for i in range(d):
        cov[i, i] = exact_cov(spec.patterns[i], spec.patterns[i], spec.n, spec.p)
        for j in range(i):
            c = exact_cov(spec.patterns[i], spec.patterns[j], spec.n, spec.p)
            cov[i, j] = cov[j, i] = c
    return MomentSet(lam, cov.diagonal().copy(), cov)


@dataclass(frozen=True)
class T4Bound:
    """Joint-count coupling bound with its per-term breakdown."""

    total: float
    diag_terms: tuple[float, ...]  # min{1, 1/lam_i}(Var_i - lam_i + 2 lam_i p^{e_i})
    cross_total: float
    cross_terms: dict[tuple[int, int], float]


def bound_t4(spec: GraphEnsembleSpec, mom: MomentSet | None = None) -> T4Bound:
    """Evaluate the increasing-coupling bound for joint subgraph counts."""
    if mom is None:
        mom = moments(spec)
    if np.any(mom.lam <= 0.0):
        raise ParameterError("all pattern means must be positive")
    diag = tuple(
        min(1.0, 1.0 / mom.lam[i])
        * (mom.var[i] - mom.lam[i] + 2.0 * mom.lam[i] * spec.p ** spec.patterns[i].e)
        for i in range(spec.d)
    )
    cross = {
        (i, j): 2.0 * mom.cov[i, j] / mom.lam[i]
        for i in range(1, spec.d)
        for j in range(i)
    }
    cross_total = math.fsum(cross.values())
    return T4Bound(math.fsum(diag) + cross_total, diag, cross_total, cross)


def _canonical_class(edges: frozenset) -> tuple:
    """Canonical form of a small edge set up to isomorphism (incident vertices only)."""
    verts = sorted(_incident(edges))
    relabel = {old: new for new, old in enumerate(verts)}
    base = _norm_edges((relabel[a], relabel[b]) for a, b in edges)
    best = min(
        tuple(sorted(_norm_edges((perm[a], perm[b]) for a, b in base)))
        for perm in itertools.permutations(range(len(verts)))
    )
    return (len(verts), best)


def variance_upper_c4a(H: PatternGraph, n: int, p: float) -> float:
    """Anchored upper bound for Var - lambda + 2 lambda p^e.

    Copies overlapping a fixed anchor placement are enumerated exactly,
    classified by the isomorphism class of the shared subgraph; outside
    vertices are exchangeable so each placement carries a binomial weight.
    """
    v, e = H.v, H.e
    if v > n:
        raise ParameterError("anchor does not fit")
    alpha = labeled_copies(H)[0]  # anchor on vertices 0..v-1
    class_counts: dict[tuple, int] = {}
    for t in range(2, v + 1):
        placeholders = tuple(range(v, v + (v - t)))
        weight = comb(n - v, v - t)
        if weight == 0:
            continue
        for inside in itertools.combinations(range(v), t):
            vset = inside + placeholders
            for copy in labeled_copies(H):
                beta = _relabel(copy, vset)
                shared = beta & alpha
                if not shared or beta == alpha:
                    continue
                key = _canonical_class(shared)
                class_counts[key] = class_counts.get(key, 0) + weight
    lam = expected_count(H, n, p)
    overlap_sum = math.fsum(
        cnt * p ** (e - len(best)) for (nv, best), cnt in class_counts.items()
    )
    return lam * (p**e + overlap_sum)


def corollary_t5_bracket(
    spec: GraphEnsembleSpec,
    pair_stats: dict[tuple[int, int], SharedEdgeStats] | None = None,
    gammas: tuple[float, ...] | None = None,
) -> float:
    """The bracketed expression of the asymptotic bound (no fitted constant).

    Diagonal part: min{1, lam_i}(p^{e_i} + n^{v_i - gamma_i} p^{e_i}) with
    gamma_i the proper-subgraph exponent at the pattern's own density.  Cross
    part: lam_j * sum over feasible shared-edge counts of p^{-k} n^{-ell_k}.
    """
    n, p = spec.n, spec.p
    if gammas is None:
        gammas = tuple(
            gamma_eta(H, H.density).gamma_subgraph for H in spec.patterns
        )
    if pair_stats is None:
        pair_stats = {
            (i, j): shared_edge_stats(spec.patterns[i], spec.patterns[j])
            for i in range(1, spec.d)
            for j in range(i)
        }
    total = 0.0
    for i, H in enumerate(spec.patterns):
        lam = expected_count(H, n, p)
        total += min(1.0, lam) * (p**H.e + n ** (H.v - gammas[i]) * p**H.e)
    for i in range(1, spec.d):
        for j in range(i):
            lam_j = expected_count(spec.patterns[j], n, p)
            stats = pair_stats[(i, j)]
            total += lam_j * math.fsum(
                p ** (-k) * n ** (-stats.ell[k]) for k in stats.K
            )
    return total


@dataclass(frozen=True)
class LrExponents:
    """Exponents of n in the covariance ratio after substituting p = n^(-1/alpha)."""

    exponents: dict[int, float]  # k -> k/alpha - ell_k
    dominant: float


def lr_exponents(
    H_i: PatternGraph, H_j: PatternGraph, alpha: float, stats: SharedEdgeStats | None = None
) -> LrExponents:
    if alpha <= 0:
        raise ParameterError("alpha must be positive")
    if stats is None:
        stats = shared_edge_stats(H_i, H_j)
    exps = {k: k / alpha - stats.ell[k] for k in sorted(stats.K)}
    if not exps:
        return LrExponents({}, float("-inf"))
    return LrExponents(exps, max(exps.values()))


@dataclass(frozen=True)
class PatternRegime:
    """Classification of one pattern along the scaling p = c n^(-1/alpha)."""

    pattern: PatternGraph
    density: float
    strictly_balanced: bool
    regime: str  # "subcritical" | "critical" | "supercritical"
    gamma_overlap_full: float | None  # concentration rate exponent (subcritical)
    eta: float | None  # vanishing rate exponent (supercritical)
    lam_n: float
    lam_limit: float | None  # c^{alpha v}/a for critical patterns


@dataclass(frozen=True)
class T5bReport:
    c: float
    alpha: float
    n: int
    entries: tuple[PatternRegime, ...]
    gamma: float | None  # predicted joint rate over the critical subsequence
    warnings: tuple[str, ...]


def scaling_probability(c: float, alpha: float, n: int) -> float:
    """The edge-probability path p = c * n^(-1/alpha)."""
    p = c * n ** (-1.0 / alpha)
    if not 0.0 < p < 1.0:
        raise ParameterError(f"scaling gives p={p} outside (0,1) at n={n}")
    return p


def t5b_report(patterns, c: float, alpha: float, n: int) -> T5bReport:
    """Classify each pattern and predict the joint rate at p = c n^(-1/alpha)."""
    if c <= 0 or alpha <= 0:
        raise ParameterError("c and alpha must be positive")
    patterns = tuple(patterns)
    p = scaling_probability(c, alpha, n)
    entries = []
    warnings = []
    critical_gammas = []
    for H in patterns:
        balanced = is_strictly_balanced(H)
        if not balanced:
            warnings.append(
                f"pattern v={H.v},e={H.e} is not strictly balanced; "
                "classification outside the theorem's hypotheses"
            )
        ge = gamma_eta(H, alpha)
        lam_n = expected_count(H, n, p)
        dens = H.density
        if abs(dens - alpha) < 1e-12:
            regime = "critical"
            lam_limit = c ** (alpha * H.v) / automorphism_count(H)
            critical_gammas.append(ge.gamma_subgraph)
            entry = PatternRegime(H, dens, balanced, regime, None, None, lam_n, lam_limit)
        elif dens < alpha:
            entry = PatternRegime(
                H, dens, balanced, "subcritical", ge.gamma_overlap_full, None, lam_n, None
            )
        else:
            entry = PatternRegime(
                H, dens, balanced, "supercritical", None, ge.eta, lam_n, None
            )
        entries.append(entry)
    gamma = min(critical_gammas) if critical_gammas else None
    return T5bReport(c, alpha, n, tuple(entries), gamma, tuple(warnings))
