"""Generic multivariate size-biased coupling for sums of indicator variables.

An indicator-sum model carries blocks of indicators X^i_j with block sums
W_i.  The coupled triangular array is assembled by picking an index I_i with
probability proportional to the marginal success probability and redrawing the
remaining indicators from their conditional law given X^i_{I_i} = 1.  For
exhaustively enumerable models the reweighting identity defining the coupling
is verified exactly; the module also evaluates the abstract distance bounds
taking either coupling-term expectations or variances and covariances.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantError, ModelError, ParameterError, ResourceError

Config = tuple[tuple[int, ...], ...]

EXHAUSTIVE_INDICATOR_CAP = 24


class ExhaustiveIndicatorModel:
    """Indicator-sum model specified by the full joint pmf of all indicators.

    ``joint`` maps configurations (one 0/1 tuple per block) to probabilities.
    Marginal success probabilities must be strictly inside (0, 1).
    """

    def __init__(self, block_sizes, joint: dict[Config, float]):
        self.block_sizes = tuple(int(n) for n in block_sizes)
        if any(n < 1 for n in self.block_sizes):
            raise ParameterError("block sizes must be positive")
        self.d = len(self.block_sizes)
        total = math.fsum(joint.values())
        if abs(total - 1.0) > 1e-12:
            raise ParameterError(f"joint pmf sums to {total!r}, expected 1")
        for config, prob in joint.items():
            if prob < 0:
                raise ParameterError("negative probability in joint pmf")
            if len(config) != self.d or any(
                len(block) != n for block, n in zip(config, self.block_sizes)
            ):
                raise ParameterError(f"configuration {config} has wrong shape")
        self.joint = {c: p for c, p in joint.items() if p > 0.0}
        self.p = [
            np.array(
                [
                    math.fsum(p for c, p in self.joint.items() if c[i][j] == 1)
                    for j in range(self.block_sizes[i])
                ]
            )
            for i in range(self.d)
        ]
        for probs in self.p:
            if np.any(probs <= 0.0) or np.any(probs >= 1.0):
                raise ParameterError("marginal success probabilities must lie in (0,1)")
        self.lam = np.array([float(probs.sum()) for probs in self.p])
        self._configs = sorted(self.joint)
        self._probs = np.array([self.joint[c] for c in self._configs])
        self._conditional_cache: dict[tuple[int, int], tuple[list, np.ndarray]] = {}

    @property
    def total_indicators(self) -> int:
        return sum(self.block_sizes)

    def sample(self, rng: np.random.Generator) -> Config:
        idx = rng.choice(len(self._configs), p=self._probs / self._probs.sum())
        return self._configs[idx]

    def conditional(self, i: int, ell: int):
        """Configs and probabilities of the joint law given X^i_ell = 1."""
        key = (i, ell)
        if key not in self._conditional_cache:
            configs = [c for c in self._configs if c[i][ell] == 1]
            mass = math.fsum(self.joint[c] for c in configs)
            if mass <= 0.0:
                raise ModelError(f"conditioning event X^{i}_{ell}=1 has probability 0")
            probs = np.array([self.joint[c] / mass for c in configs])
            self._conditional_cache[key] = (configs, probs)
        return self._conditional_cache[key]

    def sample_conditional(self, i: int, ell: int, rng: np.random.Generator) -> Config:
        configs, probs = self.conditional(i, ell)
        return configs[rng.choice(len(configs), p=probs)]


def independent_bernoulli_model(block_probs) -> ExhaustiveIndicatorModel:
    """Model with all indicators independent; block_probs is a list per block."""
    block_probs = [list(map(float, blk)) for blk in block_probs]
    sizes = [len(blk) for blk in block_probs]
    joint: dict[Config, float] = {}
    spaces = [list(itertools.product((0, 1), repeat=n)) for n in sizes]
    for config in itertools.product(*spaces):
        prob = 1.0
        for blk, probs in zip(config, block_probs):
            for x, p in zip(blk, probs):
                prob *= p if x else 1.0 - p
        joint[tuple(config)] = prob
    return ExhaustiveIndicatorModel(sizes, joint)


def model_from_weights(block_sizes, weights: dict[Config, float]) -> ExhaustiveIndicatorModel:
    """Normalize nonnegative configuration weights into a model."""
    total = math.fsum(weights.values())
    return ExhaustiveIndicatorModel(block_sizes, {c: w / total for c, w in weights.items()})


def _block_sums(config: Config) -> tuple[int, ...]:
    return tuple(sum(block) for block in config)


@dataclass(frozen=True)
class CouplingRun:
    """One realization of the sum vector and its coupled triangular array."""

    w: tuple[int, ...]
    w_tilde: tuple[tuple[int, ...], ...]  # row i has i+1 entries
    indices: tuple[int, ...]

    def __post_init__(self):
        for i, row in enumerate(self.w_tilde):
            if len(row) != i + 1:
                raise InvariantError(f"row {i} has {len(row)} entries, expected {i + 1}")
            if row[i] < 1:
                raise InvariantError("forced coordinate of the coupled row must be >= 1")


def index_distribution(model, i: int) -> np.ndarray:
    """Law of the chosen index within block i: masses p_{i,j} / lambda_i."""
    return model.p[i] / model.lam[i]


def construct_coupling(model, seed) -> CouplingRun:
    """Draw one realization of the sum vector and coupled rows.

    The base configuration and, for each block, the conditional redraw are
    independent; the coupled row law is exact regardless of this joint choice.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    config = model.sample(rng)
    w = _block_sums(config)
    rows = []
    indices = []
    for i in range(model.d):
        probs = index_distribution(model, i)
        ell = int(rng.choice(model.block_sizes[i], p=probs))
        indices.append(ell)
        redraw = model.sample_conditional(i, ell, rng)
        sums = _block_sums(redraw)
        row = list(sums[:i])
        row.append(sums[i] - redraw[i][ell] + 1)  # X^i_ell == 1 in the redraw
        rows.append(tuple(row))
    return CouplingRun(w, tuple(rows), tuple(indices))


def exact_w_law(model, i: int) -> dict[tuple[int, ...], float]:
    """Exact law of (W_1, ..., W_{i+1}) by summation over the joint pmf."""
    law: dict[tuple[int, ...], float] = {}
    for config, prob in model.joint.items():
        key = _block_sums(config)[: i + 1]
        law[key] = law.get(key, 0.0) + prob
    return law


def exact_wtilde_law(model, i: int) -> dict[tuple[int, ...], float]:
    """Exact law of the coupled row i, marginalizing the index choice."""
    law: dict[tuple[int, ...], float] = {}
    idx = index_distribution(model, i)
    for ell in range(model.block_sizes[i]):
        configs, probs = model.conditional(i, ell)
        for config, prob in zip(configs, probs):
            sums = _block_sums(config)
            key = sums[:i] + (sums[i] - config[i][ell] + 1,)
            law[key] = law.get(key, 0.0) + idx[ell] * prob
    return law


def h2_violation(w_law: dict, wtilde_law: dict, lam_i: float) -> float:
    """Max |P(Wtilde = k) - (k_i / lambda_i) P(W = k)| over the joint support."""
    worst = 0.0
    for key in set(w_law) | set(wtilde_law):
        lhs = wtilde_law.get(key, 0.0)
        rhs = key[-1] / lam_i * w_law.get(key, 0.0)
        worst = max(worst, abs(lhs - rhs))
    return worst


def verify_size_biased_exact(model, cap: int = EXHAUSTIVE_INDICATOR_CAP) -> float:
    """Max violation of the size-biasing identity over all blocks and count vectors."""
    if model.total_indicators > cap:
        raise ResourceError(f"exhaustive verification capped at {cap} indicators")
    worst = 0.0
    for i in range(model.d):
        worst = max(
            worst,
            h2_violation(exact_w_law(model, i), exact_wtilde_law(model, i), model.lam[i]),
        )
    return worst


# ---------------------------------------------------------------------------
# Bound evaluators


def bound_univariate_tv(lam: float, diag_term: float) -> float:
    """min{1, lambda} * E|Wtilde - 1 - W|, the one-dimensional TV bound."""
    if lam <= 0:
        raise ParameterError("lambda must be positive")
    return min(1.0, lam) * diag_term


def bound_t1(diag_terms, cross_terms: dict, lam) -> float:
    """Combine coupling-term expectations into the Wasserstein bound.

    ``diag_terms[i]`` holds E|Wtilde^i_i - 1 - W_i| and ``cross_terms[(i, j)]``
    holds E|Wtilde^i_j - W_j| for j < i.
    """
    lam = np.asarray(lam, dtype=float)
    total = math.fsum(
        min(1.0, lam[i]) * diag_terms[i] for i in range(len(lam))
    )
    total += 2.0 * math.fsum(
        lam[i] * term for (i, j), term in cross_terms.items()
    )
    return total


@dataclass(frozen=True)
class MomentBound:
    """Value of a variance/covariance-route bound, with a sanity flag."""

    value: float
    negative_warning: bool  # a negative value signals a coupling-assumption violation


def bound_i1(lam, variances, covariances, p_table, certified_increasing: bool = True) -> MomentBound:
    """Bound for increasing couplings, from variances, covariances, and p_{i,j}."""
    lam = np.asarray(lam, dtype=float)
    variances = np.asarray(variances, dtype=float)
    d = len(lam)
    total = 0.0
    for i in range(d):
        psq = math.fsum(p * p for p in p_table[i])
        total += min(1.0, 1.0 / lam[i]) * (variances[i] - lam[i] + 2.0 * psq)
    total += 2.0 * math.fsum(
        covariances[i][j] / lam[i] for i in range(1, d) for j in range(i)
    )
    return MomentBound(total, total < 0.0)


def bound_dd(lam, variances, covariances) -> MomentBound:
    """Bound for decreasing couplings, from variances and covariances."""
    lam = np.asarray(lam, dtype=float)
    variances = np.asarray(variances, dtype=float)
    d = len(lam)
    total = math.fsum(
        min(1.0, 1.0 / lam[i]) * (lam[i] - variances[i]) for i in range(d)
    )
    total -= 2.0 * math.fsum(
        covariances[i][j] / lam[i] for i in range(1, d) for j in range(i)
    )
    return MomentBound(total, total < 0.0)


@dataclass
class BoundReport:
    """Coupling-term estimates and the bound they assemble into."""

    mode: str  # "exact" | "monte-carlo"
    lam: tuple[float, ...]
    diag_terms: tuple[float, ...]
    cross_terms: dict[tuple[int, int], float]
    total: float = field(init=False)
    diag_stderr: tuple[float, ...] | None = None
    cross_stderr: dict[tuple[int, int], float] | None = None

    def __post_init__(self):
        self.total = bound_t1(self.diag_terms, self.cross_terms, self.lam)

    def to_json(self) -> str:
        return json.dumps(
            {
                "mode": self.mode,
                "lambda": list(self.lam),
                "diag_terms": list(self.diag_terms),
                "cross_terms": {f"{i},{j}": v for (i, j), v in self.cross_terms.items()},
                "total": self.total,
                "stderr": {
                    "diag": list(self.diag_stderr) if self.diag_stderr else None,
                    "cross": {f"{i},{j}": v for (i, j), v in self.cross_stderr.items()}
                    if self.cross_stderr
                    else None,
                },
            }
        )


def exact_bound_terms(model, cap: int = EXHAUSTIVE_INDICATOR_CAP) -> BoundReport:
    """Exact coupling-term expectations under the independent-redraw coupling.

    The base vector and each coupled row are independent, so the expectations
    factor through the two exact laws.
    """
    if model.total_indicators > cap:
        raise ResourceError(f"exhaustive computation capped at {cap} indicators")
    diag = []
    cross: dict[tuple[int, int], float] = {}
    for i in range(model.d):
        w_law = exact_w_law(model, i)
        wt_law = exact_wtilde_law(model, i)
        diag.append(
            math.fsum(
                pw * pt * abs(kt[i] - 1 - kw[i])
                for kw, pw in w_law.items()
                for kt, pt in wt_law.items()
            )
        )
        for j in range(i):
            cross[(i, j)] = math.fsum(
                pw * pt * abs(kt[j] - kw[j])
                for kw, pw in w_law.items()
                for kt, pt in wt_law.items()
            )
    return BoundReport("exact", tuple(model.lam), tuple(diag), cross)


def mc_bound_terms(model, trials: int, seed: int) -> BoundReport:
    """Monte Carlo coupling-term estimates with per-term standard errors.

    Trial t runs on the substream seed XOR t, so results are independent of
    execution order.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    d = model.d
    diag_samples = np.zeros((trials, d))
    cross_samples = {(i, j): np.zeros(trials) for i in range(1, d) for j in range(i)}
    for t in range(trials):
        rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(t))
        run = construct_coupling(model, rng)
        for i in range(d):
            diag_samples[t, i] = abs(run.w_tilde[i][i] - 1 - run.w[i])
            for j in range(i):
                cross_samples[(i, j)][t] = abs(run.w_tilde[i][j] - run.w[j])
    diag = tuple(diag_samples.mean(axis=0))
    diag_se = tuple(diag_samples.std(axis=0, ddof=1) / math.sqrt(trials) if trials > 1 else np.zeros(d))
    cross = {key: float(v.mean()) for key, v in cross_samples.items()}
    cross_se = {
        key: float(v.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        for key, v in cross_samples.items()
    }
    return BoundReport(
        "monte-carlo",
        tuple(model.lam),
        diag,
        cross,
        diag_stderr=diag_se,
        cross_stderr=cross_se,
    )
