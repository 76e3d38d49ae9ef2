"""Multivariate hypergeometric urn: exact law, moments, bound, and coupling.

Drawing m balls without replacement from an urn with fixed color counts gives
a negatively associated count vector; the decreasing coupling replaces a
uniformly chosen ball of the forced color, yielding an explicit Poisson
approximation bound that is cross-validated against the moment-route bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from math import comb, lgamma

import numpy as np

from .errors import ParameterError, ResourceError
from .ermoments import MomentSet
from .lattice import LatticeDistribution, poisson_product_truncated, transport_plan
from .sizebias import CouplingRun, bound_dd, h2_violation

EXACT_BINOMIAL_N_CAP = 60  # integer arithmetic below, log-space above
EXHAUSTIVE_STATE_CAP = 10_000_000


@dataclass(frozen=True)
class UrnSpec:
    """An urn with N balls in d colors and a draw of size m without replacement."""

    N: int
    n: tuple[int, ...]
    m: int

    def __post_init__(self):
        if any(x < 1 for x in self.n):
            raise ParameterError("every color needs at least one ball")
        if sum(self.n) != self.N:
            raise ParameterError("color counts must sum to the total ball count")
        if not 1 <= self.m <= self.N:
            raise ParameterError("draw size must lie in 1..N")

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for x in self.n[:-1]:
            out.append(out[-1] + x)
        return tuple(out)

    def color_of(self, ball: int) -> int:
        off = self.offsets
        for c in range(self.d - 1, -1, -1):
            if ball >= off[c]:
                return c
        raise ParameterError(f"ball id {ball} out of range")


def _log_comb(n: int, k: int) -> float:
    return lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1)


def _count_vectors(urn: UrnSpec):
    """All achievable count vectors: componentwise 0..n_i, summing to m."""

    def rec(i: int, remaining: int, prefix):
        if i == urn.d - 1:
            if 0 <= remaining <= urn.n[i]:
                yield prefix + (remaining,)
            return
        tail_cap = sum(urn.n[i + 1 :])
        lo = max(0, remaining - tail_cap)
        hi = min(urn.n[i], remaining)
        for k in range(lo, hi + 1):
            yield from rec(i + 1, remaining - k, prefix + (k,))

    yield from rec(0, urn.m, ())


def exact_pmf(urn: UrnSpec) -> LatticeDistribution:
    """P(W = k) = prod C(n_i, k_i) / C(N, m) over the achievable count vectors."""
    atoms: dict[tuple[int, ...], float] = {}
    if urn.N <= EXACT_BINOMIAL_N_CAP:
        denom = comb(urn.N, urn.m)
        for k in _count_vectors(urn):
            num = 1
            for ni, ki in zip(urn.n, k):
                num *= comb(ni, ki)
            atoms[k] = num / denom
    else:
        log_denom = _log_comb(urn.N, urn.m)
        for k in _count_vectors(urn):
            log_num = math.fsum(_log_comb(ni, ki) for ni, ki in zip(urn.n, k))
            atoms[k] = math.exp(log_num - log_denom)
    return LatticeDistribution(urn.d, atoms)


def moments(urn: UrnSpec) -> MomentSet:
    """Closed-form means, variances, and covariances of the color counts."""
    N, m = urn.N, urn.m
    n = np.asarray(urn.n, dtype=float)
    lam = m * n / N
    if N == 1:
        var = np.zeros(urn.d)
        cov = np.zeros((urn.d, urn.d))
        return MomentSet(lam, var, cov)
    var = m * n * (N - n) * (N - m) / (N**2 * (N - 1))
    cov = -m * np.outer(n, n) * (N - m) / (N**2 * (N - 1))
    np.fill_diagonal(cov, var)
    return MomentSet(lam, var, cov)


@dataclass(frozen=True)
class UrnBound:
    """The urn bound with per-color terms and both cross-term forms."""

    total: float
    diag_terms: tuple[float, ...]
    cross_statement: float  # 2(N-m)/(N(N-1)) * sum of earlier color counts
    cross_proof: float  # 2(N-m)/(m(N-1)) * sum of earlier lambdas
    vacuous: bool  # full draw: the first group degenerates and the bound is >= 1 typically


def theorem_bound_urn(urn: UrnSpec) -> UrnBound:
    """Evaluate the decreasing-coupling bound for the urn in closed form."""
    N, m = urn.N, urn.m
    lam = [m * ni / N for ni in urn.n]
    if N == 1:
        diag = (min(1.0, lam[0]),)
        return UrnBound(diag[0], diag, 0.0, 0.0, True)
    diag = tuple(
        min(1.0, lam[i]) * (1.0 - (N - urn.n[i]) * (N - m) / (N * (N - 1)))
        for i in range(urn.d)
    )
    pair_n_sum = sum(urn.n[j] for i in range(1, urn.d) for j in range(i))
    cross_statement = 2.0 * (N - m) / (N * (N - 1)) * pair_n_sum
    pair_lam_sum = math.fsum(lam[j] for i in range(1, urn.d) for j in range(i))
    cross_proof = 2.0 * (N - m) / (m * (N - 1)) * pair_lam_sum
    return UrnBound(math.fsum(diag) + cross_statement, diag, cross_statement, cross_proof, m == N)


def bound_dd_from_moments(urn: UrnSpec):
    """The moment-route bound fed with the urn's exact moments; equals the
    closed-form bound up to roundoff."""
    mom = moments(urn)
    return bound_dd(mom.lam, mom.var, mom.cov)


def sample_urn(urn: UrnSpec, seed) -> tuple[int, ...]:
    """Color counts of m sequential without-replacement draws; seeded."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    remaining = list(urn.n)
    total = urn.N
    counts = [0] * urn.d
    for _ in range(urn.m):
        u = rng.integers(total)
        acc = 0
        for c in range(urn.d):
            acc += remaining[c]
            if u < acc:
                counts[c] += 1
                remaining[c] -= 1
                break
        total -= 1
    return tuple(counts)


def _sample_ball_ids(urn: UrnSpec, rng: np.random.Generator) -> list[int]:
    """m distinct ball ids, drawn sequentially without replacement."""
    pool = list(range(urn.N))
    picked = []
    for step in range(urn.m):
        j = int(rng.integers(len(pool)))
        picked.append(pool[j])
        pool[j] = pool[-1]
        pool.pop()
    return picked


@dataclass(frozen=True)
class UrnCoupling:
    """One coupled row for a single color."""

    w: tuple[int, ...]
    row: tuple[int, ...]  # coupled counts for colors 0..i
    forced_ball: int


def _couple_row(urn: UrnSpec, i: int, sample, w, rng) -> UrnCoupling:
    forced = urn.offsets[i] + int(rng.integers(urn.n[i]))
    if forced in sample:
        coupled = list(w)
    else:
        removed = sample[int(rng.integers(urn.m))]
        coupled = list(w)
        coupled[urn.color_of(removed)] -= 1
        coupled[i] += 1
    return UrnCoupling(tuple(w), tuple(coupled[: i + 1]), forced)


def urn_coupling(urn: UrnSpec, i: int, seed) -> UrnCoupling:
    """Force a uniformly chosen ball of color i into the sample.

    If the ball is already drawn nothing changes; otherwise it replaces a
    uniformly chosen ball of the pre-addition sample, so no coordinate other
    than i ever increases (a decreasing coupling).
    """
    if not 0 <= i < urn.d:
        raise ParameterError("color index out of range")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    sample = _sample_ball_ids(urn, rng)
    w = [0] * urn.d
    for ball in sample:
        w[urn.color_of(ball)] += 1
    return _couple_row(urn, i, sample, w, rng)


def urn_coupling_run(urn: UrnSpec, seed) -> CouplingRun:
    """Full triangular array: one draw, one independent forced ball per color."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    sample = _sample_ball_ids(urn, rng)
    w = [0] * urn.d
    for ball in sample:
        w[urn.color_of(ball)] += 1
    rows = []
    forced = []
    for i in range(urn.d):
        uc = _couple_row(urn, i, sample, w, rng)
        rows.append(uc.row)
        forced.append(uc.forced_ball)
    return CouplingRun(tuple(w), tuple(rows), tuple(forced))


def exhaustive_h2_urn(urn: UrnSpec, i: int) -> float:
    """Max violation of the size-biasing identity for the urn coupling, by exact
    enumeration over samples, forced balls, and removal choices."""
    if not 0 <= i < urn.d:
        raise ParameterError("color index out of range")
    n_samples = comb(urn.N, urn.m)
    if n_samples * urn.n[i] * urn.m > EXHAUSTIVE_STATE_CAP:
        raise ResourceError("exhaustive urn verification exceeds the state cap")
    color = [urn.color_of(b) for b in range(urn.N)]
    sample_prob = 1.0 / n_samples
    w_law: dict[tuple[int, ...], float] = {}
    wt_law: dict[tuple[int, ...], float] = {}
    balls_i = range(urn.offsets[i], urn.offsets[i] + urn.n[i])
    for sample in itertools.combinations(range(urn.N), urn.m):
        w = [0] * urn.d
        for ball in sample:
            w[color[ball]] += 1
        key = tuple(w[: i + 1])
        w_law[key] = w_law.get(key, 0.0) + sample_prob
        for forced in balls_i:
            fp = sample_prob / urn.n[i]
            if forced in sample:
                wt_law[key] = wt_law.get(key, 0.0) + fp
            else:
                for removed in sample:
                    coupled = list(w)
                    coupled[color[removed]] -= 1
                    coupled[i] += 1
                    rkey = tuple(coupled[: i + 1])
                    wt_law[rkey] = wt_law.get(rkey, 0.0) + fp / urn.m
    lam_i = urn.m * urn.n[i] / urn.N
    return h2_violation(w_law, wt_law, lam_i)


@dataclass(frozen=True)
class UrnDistance:
    """Exact transport distance to the truncated Poisson product, with budget."""

    dw: float
    truncation_budget: float


def exact_dw_urn(urn: UrnSpec, eps_trunc: float = 1e-9) -> UrnDistance:
    """Exact Wasserstein distance from the urn law to the truncated Poisson
    product with the urn's means."""
    lam = moments(urn).lam
    trunc = poisson_product_truncated(lam, eps_trunc)
    dw = transport_plan(exact_pmf(urn), trunc.collapsed()).cost
    return UrnDistance(dw, trunc.dw_error_budget)
