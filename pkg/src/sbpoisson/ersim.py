"""Monte Carlo engine for subgraph counts in G(n, p).

Seeded sampling, exact joint copy counting by backtracking, the edge-addition
coupling that forces a uniformly chosen copy, coupling-term estimation,
empirical distance measurement against a truncated Poisson product, and
convergence-rate sweeps along a scaling path.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvariantError, ParameterError, ResourceError
from .lattice import (
    LatticeDistribution,
    empirical_distribution,
    poisson_product_truncated,
    transport_plan,
    tv_distance,
)
from .ermoments import (
    GraphEnsembleSpec,
    MomentSet,
    bound_t4,
    corollary_t5_bracket,
    expected_count,
    moments,
    scaling_probability,
)
from .patterns import PatternGraph, _relabel, automorphism_count, enumerate_copies, labeled_copies
from .sizebias import BoundReport, CouplingRun, h2_violation

EXHAUSTIVE_EDGE_CAP = 21  # at most 2^21 graphs in exhaustive enumerations


class SampledGraph:
    """A simple graph on vertices 0..n-1, stored as a set of sorted edge pairs."""

    __slots__ = ("n", "edges", "_adj")

    def __init__(self, n: int, edges):
        self.n = n
        self.edges = frozenset((min(a, b), max(a, b)) for a, b in edges)
        for a, b in self.edges:
            if not (0 <= a < b < n):
                raise ParameterError(f"edge ({a},{b}) outside vertex range")
        self._adj = None

    @property
    def adjacency(self) -> dict[int, set[int]]:
        if self._adj is None:
            adj: dict[int, set[int]] = {}
            for a, b in self.edges:
                adj.setdefault(a, set()).add(b)
                adj.setdefault(b, set()).add(a)
            self._adj = adj
        return self._adj

    def with_edges(self, extra) -> "SampledGraph":
        return SampledGraph(self.n, self.edges | frozenset(extra))

    def edge_list_text(self) -> str:
        return "\n".join(f"{a + 1}-{b + 1}" for a, b in sorted(self.edges))


@lru_cache(maxsize=None)
def _pair_index(n: int):
    iu = np.triu_indices(n, 1)
    return iu[0].astype(np.int32), iu[1].astype(np.int32)


def sample_gnp(n: int, p: float, seed) -> SampledGraph:
    """One draw of G(n, p); each edge present independently with probability p."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    if not 0.0 < p < 1.0:
        raise ParameterError("edge probability must lie strictly in (0, 1)")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if n == 1:
        return SampledGraph(1, [])
    rows, cols = _pair_index(n)
    mask = rng.random(len(rows)) < p
    return SampledGraph(n, zip(rows[mask].tolist(), cols[mask].tolist()))


@lru_cache(maxsize=None)
def _match_plan(H: PatternGraph):
    """Vertex order for backtracking: BFS from a max-degree vertex, with the
    earlier-neighbor list and pattern degree recorded per position."""
    deg = {u: 0 for u in range(H.v)}
    nbrs: dict[int, set[int]] = {u: set() for u in range(H.v)}
    for a, b in H.edges:
        deg[a] += 1
        deg[b] += 1
        nbrs[a].add(b)
        nbrs[b].add(a)
    order: list[int] = []
    placed = set()
    while len(order) < H.v:
        frontier = [u for u in range(H.v) if u not in placed and nbrs[u] & placed]
        if frontier:
            nxt = max(frontier, key=lambda u: (len(nbrs[u] & placed), deg[u]))
        else:
            nxt = max((u for u in range(H.v) if u not in placed), key=lambda u: deg[u])
        order.append(nxt)
        placed.add(nxt)
    pos_of = {u: i for i, u in enumerate(order)}
    plan = []
    for i, u in enumerate(order):
        priors = [pos_of[w] for w in nbrs[u] if pos_of[w] < i]
        plan.append((priors, deg[u]))
    return tuple(plan)


def count_copies(G: SampledGraph, H: PatternGraph) -> int:
    """Exact number of copies of H in G: injective edge-preserving maps / a_H."""
    adj = G.adjacency
    plan = _match_plan(H)
    if not adj:
        return 0
    images: list[int] = []
    used: set[int] = set()

    def extend(pos: int) -> int:
        if pos == len(plan):
            return 1
        priors, pdeg = plan[pos]
        if priors:
            cands = adj[images[priors[0]]]
            for q in priors[1:]:
                cands = cands & adj[images[q]]
        else:
            cands = adj.keys()
        total = 0
        for u in cands:
            if u in used or len(adj[u]) < pdeg:
                continue
            images.append(u)
            used.add(u)
            total += extend(pos + 1)
            images.pop()
            used.remove(u)
        return total

    injections = extend(0)
    a = automorphism_count(H)
    if injections % a:
        raise InvariantError("injection count not divisible by the automorphism count")
    return injections // a


def count_copies_joint(G: SampledGraph, patterns) -> tuple[int, ...]:
    """Joint copy counts of several patterns in one sampled graph."""
    for H in patterns:
        if H.v > G.n:
            raise ParameterError(f"pattern with v={H.v} does not fit in n={G.n}")
    return tuple(count_copies(G, H) for H in patterns)


def _uniform_copy(H: PatternGraph, n: int, rng: np.random.Generator):
    """A uniformly random copy of H in K_n, without materializing all copies.

    A uniform v-subset plus a uniform labeled copy on it is uniform over all
    C(n,v) * v!/a copies by the product structure.
    """
    subset = np.sort(rng.choice(n, size=H.v, replace=False))
    base = labeled_copies(H)
    copy = base[int(rng.integers(len(base)))]
    return _relabel(copy, subset.tolist())


@dataclass(frozen=True)
class GraphCoupling:
    """One coupled row for a single pattern index."""

    w: tuple[int, ...]
    row: tuple[int, ...]  # coupled counts for patterns 0..i
    forced_copy: frozenset


def graph_coupling(G: SampledGraph, patterns, i: int, rng, w=None) -> GraphCoupling:
    """Force a uniformly chosen copy of pattern i by adding its missing edges.

    The coupled row holds the counts on the augmented graph; the forced copy
    is present there, so the i-th coordinate carries its own "+1" and the
    construction is increasing in every coordinate.
    """
    patterns = tuple(patterns)
    if not 0 <= i < len(patterns):
        raise ParameterError("pattern index out of range")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    alpha = _uniform_copy(patterns[i], G.n, rng)
    if w is None:
        w = count_copies_joint(G, patterns)
    g_plus = G.with_edges(alpha)
    row = tuple(count_copies(g_plus, patterns[j]) for j in range(i + 1))
    for j in range(i + 1):
        if row[j] < w[j]:
            raise InvariantError("edge addition decreased a copy count")
    if row[i] < 1:
        raise InvariantError("forced copy missing from the augmented graph")
    return GraphCoupling(tuple(w), row, alpha)


def coupling_run(spec: GraphEnsembleSpec, rng) -> CouplingRun:
    """Sample one graph and assemble the full coupled triangular array."""
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    G = sample_gnp(spec.n, spec.p, rng)
    w = count_copies_joint(G, spec.patterns)
    rows = []
    for i in range(spec.d):
        rows.append(graph_coupling(G, spec.patterns, i, rng, w=w).row)
    return CouplingRun(w, tuple(rows), tuple(-1 for _ in range(spec.d)))


def mc_coupling_terms(spec: GraphEnsembleSpec, trials: int, seed: int) -> BoundReport:
    """Monte Carlo coupling-term estimates from the edge-addition coupling."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    d = spec.d
    lam = moments(spec).lam
    diag = np.zeros((trials, d))
    cross = {(i, j): np.zeros(trials) for i in range(1, d) for j in range(i)}
    for t in range(trials):
        rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(t))
        G = sample_gnp(spec.n, spec.p, rng)
        w = count_copies_joint(G, spec.patterns)
        for i in range(d):
            gc = graph_coupling(G, spec.patterns, i, rng, w=w)
            diag[t, i] = abs(gc.row[i] - 1 - w[i])
            for j in range(i):
                cross[(i, j)][t] = abs(gc.row[j] - w[j])
    diag_mean = tuple(diag.mean(axis=0))
    diag_se = tuple(
        diag.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(d)
    )
    cross_mean = {k: float(v.mean()) for k, v in cross.items()}
    cross_se = {
        k: float(v.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        for k, v in cross.items()
    }
    return BoundReport(
        "monte-carlo", tuple(lam), diag_mean, cross_mean,
        diag_stderr=diag_se, cross_stderr=cross_se,
    )


def _all_graphs(n: int):
    """Yield every graph on n labeled vertices with its edge count."""
    pairs = list(itertools.combinations(range(n), 2))
    if len(pairs) > EXHAUSTIVE_EDGE_CAP:
        raise ResourceError(f"exhaustive graph enumeration capped at {EXHAUSTIVE_EDGE_CAP} edges")
    for present in itertools.product((0, 1), repeat=len(pairs)):
        edges = [pq for pq, keep in zip(pairs, present) if keep]
        yield SampledGraph(n, edges), len(edges)


def exhaustive_h2_graph(n: int, patterns, i: int, p: float) -> float:
    """Max violation of the size-biasing identity for the edge-addition coupling,
    by exact summation over all graphs and all forced copies."""
    patterns = tuple(patterns)
    m = n * (n - 1) // 2
    gamma_i = enumerate_copies(patterns[i], n)
    w_law: dict[tuple[int, ...], float] = {}
    wt_law: dict[tuple[int, ...], float] = {}
    for G, ecount in _all_graphs(n):
        prob = p**ecount * (1.0 - p) ** (m - ecount)
        w = count_copies_joint(G, patterns[: i + 1])
        w_law[w] = w_law.get(w, 0.0) + prob
        for alpha in gamma_i:
            g_plus = G.with_edges(alpha)
            row = count_copies_joint(g_plus, patterns[: i + 1])
            wt_law[row] = wt_law.get(row, 0.0) + prob / len(gamma_i)
    lam = expected_count(patterns[i], n, p)
    return h2_violation(w_law, wt_law, lam)


def exhaustive_coupling_terms(n: int, patterns, p: float) -> BoundReport:
    """Exact coupling-term expectations by enumeration over graphs and copies."""
    patterns = tuple(patterns)
    d = len(patterns)
    m = n * (n - 1) // 2
    lam = tuple(expected_count(H, n, p) for H in patterns)
    copies = [enumerate_copies(H, n) for H in patterns]
    diag = [0.0] * d
    cross = {(i, j): 0.0 for i in range(1, d) for j in range(i)}
    for G, ecount in _all_graphs(n):
        prob = p**ecount * (1.0 - p) ** (m - ecount)
        w = count_copies_joint(G, patterns)
        for i in range(d):
            for alpha in copies[i]:
                g_plus = G.with_edges(alpha)
                weight = prob / len(copies[i])
                row = tuple(count_copies(g_plus, patterns[j]) for j in range(i + 1))
                diag[i] += weight * abs(row[i] - 1 - w[i])
                for j in range(i):
                    cross[(i, j)] += weight * abs(row[j] - w[j])
    return BoundReport("exact", lam, tuple(diag), cross)


@dataclass(frozen=True)
class EmpiricalDistance:
    """Plug-in distances from sampled count vectors to a truncated Poisson product."""

    dw: float
    dtv: float
    truncation_budget: float
    dw_se: float
    dtv_se: float
    trials: int
    lam: tuple[float, ...]


def mc_empirical_distance(
    spec: GraphEnsembleSpec,
    trials: int,
    seed: int,
    eps_trunc: float = 1e-9,
    bootstrap: int = 200,
) -> EmpiricalDistance:
    """Sample count vectors and measure exact transport distance to the
    truncated Poisson product with the ensemble's exact means.

    The distance compares the empirical law (not per-sample pairings) to the
    body-with-collapsed-tail; the truncation budget rides along.  Uncertainty
    comes from bootstrap resampling of the trials.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    lam = moments(spec).lam
    samples = []
    for t in range(trials):
        rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(t))
        G = sample_gnp(spec.n, spec.p, rng)
        samples.append(count_copies_joint(G, spec.patterns))
    trunc = poisson_product_truncated(lam, eps_trunc)
    target = trunc.collapsed()
    emp = empirical_distribution(samples)
    dw = transport_plan(emp, target).cost
    dtv = tv_distance(emp, target)
    boot_rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(0xB007_5EED))
    dws, dtvs = [], []
    for _ in range(bootstrap):
        idx = boot_rng.integers(trials, size=trials)
        boot = empirical_distribution([samples[k] for k in idx])
        dws.append(transport_plan(boot, target).cost)
        dtvs.append(tv_distance(boot, target))
    dw_se = float(np.std(dws, ddof=1)) if bootstrap > 1 else 0.0
    dtv_se = float(np.std(dtvs, ddof=1)) if bootstrap > 1 else 0.0
    return EmpiricalDistance(dw, dtv, trunc.dw_error_budget, dw_se, dtv_se, trials, tuple(lam))


@dataclass(frozen=True)
class RateSweepRow:
    n: int
    p: float
    trials: int
    dw: float
    truncation_budget: float
    dw_se: float
    bracket: float
    bound_t4: float


@dataclass(frozen=True)
class RateSweepResult:
    rows: tuple[RateSweepRow, ...]
    slope: float
    slope_se: float

    @staticmethod
    def fit_slope(ns, values):
        """Least-squares slope of log(value) against log(n), with its standard error."""
        x = np.log(np.asarray(ns, dtype=float))
        y = np.log(np.asarray(values, dtype=float))
        coeffs, cov = np.polyfit(x, y, 1, cov=True)
        return float(coeffs[0]), float(math.sqrt(cov[0, 0]))


def rate_sweep(
    patterns,
    c: float,
    alpha: float,
    n_list,
    trials: int,
    seed: int,
    eps_trunc: float = 1e-9,
) -> RateSweepResult:
    """Empirical distances and deterministic brackets along p = c n^(-1/alpha)."""
    n_list = sorted(int(n) for n in n_list)
    if len(n_list) < 3:
        raise ParameterError("rate sweep needs at least 3 values of n")
    patterns = tuple(patterns)
    rows = []
    for n in n_list:
        p = scaling_probability(c, alpha, n)
        spec = GraphEnsembleSpec(n, p, patterns)
        dist = mc_empirical_distance(spec, trials, seed, eps_trunc)
        rows.append(
            RateSweepRow(
                n, p, trials, dist.dw, dist.truncation_budget, dist.dw_se,
                corollary_t5_bracket(spec), bound_t4(spec).total,
            )
        )
    slope, slope_se = RateSweepResult.fit_slope(
        [r.n for r in rows], [r.dw for r in rows]
    )
    return RateSweepResult(tuple(rows), slope, slope_se)


def tail_probability(
    H: PatternGraph, n: int, p: float, trials: int, seed: int, eps: float = 0.1
):
    """MC frequency of |W/E(W) - 1| > eps, with the Chebyshev ceiling Var/(eps^2 E^2)."""
    spec = GraphEnsembleSpec(n, p, (H,))
    mom = moments(spec)
    lam = float(mom.lam[0])
    hits = 0
    for t in range(trials):
        rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(t))
        G = sample_gnp(n, p, rng)
        w = count_copies(G, H)
        if abs(w / lam - 1.0) > eps:
            hits += 1
    chebyshev = float(mom.var[0] / (eps**2 * lam**2))
    return hits / trials, chebyshev


def positive_frequency(H: PatternGraph, n: int, p: float, trials: int, seed: int) -> float:
    """MC frequency of the event that at least one copy appears."""
    hits = 0
    for t in range(trials):
        rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(t))
        G = sample_gnp(n, p, rng)
        if count_copies(G, H) > 0:
            hits += 1
    return hits / trials
