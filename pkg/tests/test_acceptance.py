"""End-to-end acceptance checks.

Each test covers one headline guarantee and prints a single PASS/FAIL line
with the measured quantities, so the suite doubles as a verification report.
Run with ``pytest -s tests/test_acceptance.py`` to see the lines inline.
"""

import math
from math import comb

import numpy as np
import pytest

from sbpoisson import (
    GraphEnsembleSpec,
    bound_t4,
    count_copies_joint,
    exact_cov,
    expected_count,
    graph_coupling,
    independent_bernoulli_model,
    moments,
    poisson_product_truncated,
    rate_sweep,
    sample_gnp,
    transport_plan,
    tv_distance,
    verify_size_biased_exact,
    wasserstein_1d_oracle,
    wasserstein_distance,
)
from sbpoisson.ersim import exhaustive_h2_graph, positive_frequency, tail_probability
from sbpoisson.hypergeom import (
    UrnSpec,
    exact_dw_urn,
    exact_pmf,
    exhaustive_h2_urn,
    moments as urn_moments,
    theorem_bound_urn,
)
from sbpoisson.patterns import cycle_graph, parse_pattern, path_graph, single_edge

from _oracles import exhaustive_graph_law, random_lattice_pair_1d


def report(name, failures, detail=""):
    status = "FAIL" if failures else "PASS"
    suffix = f"  [{detail}]" if detail else ""
    print(f"\n[{status}] {name}{suffix}")
    assert not failures, f"{name}: " + "; ".join(failures)


# ---------------------------------------------------------------------------
# 1. The size-biasing identity holds exactly for every implemented coupling.


def test_size_biased_identity_exhaustive():
    failures = []
    worst = 0.0
    for probs in ([[0.3, 0.3, 0.3]], [[0.5] * 4], [[0.2, 0.6], [0.4, 0.4, 0.4]]):
        v = verify_size_biased_exact(independent_bernoulli_model(probs))
        worst = max(worst, v)
        if v >= 1e-12:
            failures.append(f"indicator model {probs}: violation {v:.3e}")
    for p in (0.3, 0.7):
        v = exhaustive_h2_graph(4, (single_edge(),), 0, p)
        worst = max(worst, v)
        if v >= 1e-12:
            failures.append(f"G(4,{p}) edge coupling: violation {v:.3e}")
    urn = UrnSpec(4, (2, 2), 2)
    for i in range(2):
        v = exhaustive_h2_urn(urn, i)
        worst = max(worst, v)
        if v >= 1e-12:
            failures.append(f"urn color {i}: violation {v:.3e}")
    report("size-biasing identity, exhaustive", failures, f"max violation {worst:.2e}")


# ---------------------------------------------------------------------------
# 2 and 4. Closed-form moments against full graph enumeration, and bound
# domination of the exact distances on the same instances.

EXHAUSTIVE_INSTANCES = [
    ((cycle_graph(3),), 5),
    ((cycle_graph(3),), 6),
    ((path_graph(2),), 5),
    ((cycle_graph(3), cycle_graph(4)), 6),
    ((cycle_graph(3), cycle_graph(4)), 7),
]


@pytest.fixture(scope="module")
def exhaustive_laws():
    laws = {}
    for patterns, n in EXHAUSTIVE_INSTANCES:
        for p in (0.2, 0.5):
            laws[(patterns, n, p)] = exhaustive_graph_law(n, patterns, p)
    return laws


def test_moments_match_exhaustive_enumeration(exhaustive_laws):
    failures = []
    worst = 0.0
    for (patterns, n, p), (law, mean, cov) in exhaustive_laws.items():
        d = len(patterns)
        for i in range(d):
            lam = expected_count(patterns[i], n, p)
            rel = abs(lam - mean[i]) / abs(mean[i])
            worst = max(worst, rel)
            if rel > 1e-10:
                failures.append(f"mean pattern {i}, n={n}, p={p}: rel err {rel:.2e}")
            for j in range(i + 1):
                c = exact_cov(patterns[i], patterns[j], n, p)
                rel = abs(c - cov[i, j]) / abs(cov[i, j])
                worst = max(worst, rel)
                if rel > 1e-10:
                    failures.append(f"cov ({i},{j}), n={n}, p={p}: rel err {rel:.2e}")
    report("closed-form moments vs full enumeration", failures, f"max rel err {worst:.2e}")


def test_bounds_dominate_exact_distances(exhaustive_laws):
    failures = []
    for (patterns, n, p), (law, mean, cov) in exhaustive_laws.items():
        spec = GraphEnsembleSpec(n, p, patterns)
        total = bound_t4(spec).total
        lam = moments(spec).lam
        tight = poisson_product_truncated(lam, 1e-12)
        tv_upper = tv_distance(law, tight.collapsed()) + tight.tail_mass
        if tv_upper > total:
            failures.append(f"TV {tv_upper:.4f} > bound {total:.4f} at n={n}, p={p}")
        trunc = poisson_product_truncated(lam, 1e-9)
        dw = transport_plan(law, trunc.collapsed()).cost
        if dw - trunc.dw_error_budget > total:
            failures.append(f"W {dw:.4f} - budget > bound {total:.4f} at n={n}, p={p}")
    report("bound dominates exact TV and Wasserstein", failures)


# ---------------------------------------------------------------------------
# 3. The coupling terms estimated by simulation reproduce the closed-form
# variance and covariance expressions.


def test_coupling_terms_match_moment_formulas():
    patterns = (cycle_graph(3), cycle_graph(4))
    n, p, trials, seed = 30, 1.0 / 30.0, 10_000, 2026
    spec = GraphEnsembleSpec(n, p, patterns)
    mom = moments(spec)
    diag = np.zeros((trials, 2))
    cross = np.zeros(trials)
    for t in range(trials):
        rng = np.random.default_rng(np.uint64(seed) ^ np.uint64(t))
        G = sample_gnp(n, p, rng)
        w = count_copies_joint(G, patterns)
        for i in range(2):
            gc = graph_coupling(G, patterns, i, rng, w=w)
            diag[t, i] = gc.row[i] - 1 - w[i]
            if i == 1:
                cross[t] = gc.row[0] - w[0]
    failures = []
    zs = []
    for i in range(2):
        target = mom.var[i] - mom.lam[i] + 2.0 * mom.lam[i] * p ** patterns[i].e
        est = mom.lam[i] * diag[:, i].mean()
        se = mom.lam[i] * diag[:, i].std(ddof=1) / math.sqrt(trials)
        zs.append(abs(est - target) / se)
        if abs(est - target) > 3 * se:
            failures.append(f"diag {i}: {est:.5f} vs {target:.5f} (SE {se:.5f})")
    target = mom.cov[1, 0]
    est = mom.lam[1] * cross.mean()
    se = mom.lam[1] * cross.std(ddof=1) / math.sqrt(trials)
    zs.append(abs(est - target) / se)
    if abs(est - target) > 3 * se:
        failures.append(f"cross: {est:.5f} vs {target:.5f} (SE {se:.5f})")
    report(
        "simulated coupling terms vs moment formulas", failures,
        "z-scores " + ", ".join(f"{z:.2f}" for z in zs),
    )


# ---------------------------------------------------------------------------
# 5. Joint cycle counts at p = 1/n: the deterministic bracket decays like 1/n
# and the empirical distance decays and stays below the bound.


@pytest.fixture(scope="module")
def cycle_sweep():
    return rate_sweep(
        (cycle_graph(3), cycle_graph(4)), 1.0, 1.0, [20, 40, 80, 160], 10_000, 2026
    )


def test_cycle_rate_bracket_slope(cycle_sweep):
    from sbpoisson.ersim import RateSweepResult

    slope, se = RateSweepResult.fit_slope(
        [r.n for r in cycle_sweep.rows], [r.bracket for r in cycle_sweep.rows]
    )
    failures = []
    if not -1.05 <= slope <= -0.95:
        failures.append(f"bracket slope {slope:.4f} outside -1.00 +/- 0.05")
    report("cycle-count bracket decays like 1/n", failures, f"slope {slope:.4f} (se {se:.4f})")


def test_cycle_rate_empirical_slope(cycle_sweep):
    failures = []
    if not cycle_sweep.slope <= -0.7:
        failures.append(f"empirical slope {cycle_sweep.slope:.4f} > -0.7")
    ses = ", ".join(f"{r.dw_se:.4f}" for r in cycle_sweep.rows)
    report(
        "empirical cycle-count distance decays", failures,
        f"slope {cycle_sweep.slope:.4f} (se {cycle_sweep.slope_se:.4f}); bootstrap SEs {ses}",
    )


def test_cycle_rate_bound_domination(cycle_sweep):
    failures = []
    for row in cycle_sweep.rows:
        if row.dw > row.bound_t4 + row.truncation_budget:
            failures.append(f"n={row.n}: d_W {row.dw:.4f} > bound {row.bound_t4:.4f}")
    detail = ", ".join(f"n={r.n}: {r.dw:.4f}<={r.bound_t4:.4f}" for r in cycle_sweep.rows)
    report("empirical distance below bound along sweep", failures, detail)


# ---------------------------------------------------------------------------
# 6. Regime classification along p = c n^(-1/alpha): concentration below the
# critical density, vanishing above it, and the critical mean limit.


def test_regime_subcritical_concentration():
    failures = []
    freqs = []
    for n in (50, 100, 200, 400):
        freq, cheb = tail_probability(single_edge(), n, 1.0 / n, 4000, 2026, eps=0.1)
        freqs.append(freq)
        if freq > cheb:
            failures.append(f"n={n}: frequency {freq:.4f} above Chebyshev {cheb:.4f}")
    if not all(a > b for a, b in zip(freqs, freqs[1:])):
        failures.append(f"deviation frequencies not strictly decreasing: {freqs}")
    report(
        "subcritical pattern concentrates", failures,
        "freqs " + ", ".join(f"{f:.3f}" for f in freqs),
    )


def test_regime_supercritical_vanishing():
    failures = []
    tri = cycle_graph(3)
    details = []
    for n in (20, 40, 80):
        p = float(n) ** -2
        lam = expected_count(tri, n, p)
        closed = comb(n, 3) * p**3
        if abs(lam - closed) > 1e-12:
            failures.append(f"n={n}: mean {lam!r} differs from closed form")
        freq = positive_frequency(tri, n, p, 10_000, 987654321)
        details.append(f"n={n}: freq {freq:.1e} <= lam {lam:.1e}")
        if freq > lam:
            failures.append(f"n={n}: positive frequency {freq} above mean {lam}")
    report("supercritical pattern vanishes", failures, "; ".join(details))


def test_regime_critical_mean_limit():
    failures = []
    tri = cycle_graph(3)
    for n in (20, 40, 80, 160):
        lam = expected_count(tri, n, 1.0 / n)
        if abs(lam - 1.0 / 6.0) > 2.0 / n:
            failures.append(f"n={n}: |{lam:.5f} - 1/6| > 2/n")
    report("critical mean approaches limit", failures)


# ---------------------------------------------------------------------------
# 7. Urn: closed-form moments, bound domination, and agreement of the two
# algebraic forms of the cross term, over a grid of urn shapes.

URN_GRID = [
    # Rare-color regime (small sampling fractions for the later colors), where
    # the closed-form bound is informative.  Largest color first.
    ((7, 3), 2), ((7, 3), 3), ((6, 2, 2), 3), ((6, 2, 2), 5),
    ((15, 5), 4), ((16, 3, 1), 5), ((16, 3, 1), 6), ((14, 4, 2), 4),
    ((25, 5), 5), ((25, 5), 6), ((25, 3, 2), 8), ((24, 4, 2), 6),
]


def test_urn_grid():
    failures = []
    for colors, m in URN_GRID:
        urn = UrnSpec(sum(colors), colors, m)
        label = f"N={urn.N}, n={colors}, m={m}"
        mom = urn_moments(urn)
        pmf = exact_pmf(urn)
        mean = pmf.mean()
        second = np.zeros((urn.d, urn.d))
        for pt, mass in pmf.atoms.items():
            x = np.asarray(pt, dtype=float)
            second += mass * np.outer(x, x)
        cov = second - np.outer(mean, mean)
        if np.max(np.abs(mom.lam - mean)) > 1e-12:
            failures.append(f"{label}: mean mismatch")
        if np.max(np.abs(mom.cov - cov)) > 1e-12:
            failures.append(f"{label}: covariance mismatch")
        bound = theorem_bound_urn(urn)
        if abs(bound.cross_statement - bound.cross_proof) > 1e-12:
            failures.append(f"{label}: cross-term forms disagree")
        dist = exact_dw_urn(urn)
        if dist.dw > bound.total + dist.truncation_budget:
            failures.append(f"{label}: d_W {dist.dw:.4f} > bound {bound.total:.4f}")
    report("urn moments, bound, and cross-term forms", failures, f"{len(URN_GRID)} urns")


# ---------------------------------------------------------------------------
# 8. The transport engine agrees with the 1-d cdf oracle and produces
# feasible plans.


def test_transport_engine_against_cdf_oracle():
    failures = []
    rng = np.random.default_rng(2026)
    worst = 0.0
    for k in range(200):
        P, Q = random_lattice_pair_1d(rng)
        res = transport_plan(P, Q)
        oracle = wasserstein_1d_oracle(P, Q)
        err = abs(res.cost - oracle)
        worst = max(worst, err)
        if err > 1e-10:
            failures.append(f"pair {k}: |{res.cost} - {oracle}| = {err:.2e}")
        if tv_distance(P, Q) > res.cost + 1e-12:
            failures.append(f"pair {k}: TV above Wasserstein")
        r1, r2 = res.marginal_residuals(P, Q)
        if max(r1, r2) > 1e-10:
            failures.append(f"pair {k}: marginal residual {max(r1, r2):.2e}")
    report("transport engine vs cdf oracle", failures, f"200 pairs, max err {worst:.2e}")
