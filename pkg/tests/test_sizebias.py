import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import poisson

from sbpoisson import (
    InvariantError,
    ParameterError,
    bound_t1,
    bound_univariate_tv,
    construct_coupling,
    independent_bernoulli_model,
    index_distribution,
    mc_bound_terms,
    verify_size_biased_exact,
)
from sbpoisson.sizebias import (
    CouplingRun,
    bound_dd,
    bound_i1,
    exact_bound_terms,
    exact_w_law,
    model_from_weights,
)


def test_independent_model_marginals_and_lambda():
    model = independent_bernoulli_model([[0.3, 0.5], [0.2]])
    assert model.lam == pytest.approx([0.8, 0.2])
    np.testing.assert_allclose(index_distribution(model, 0), [0.375, 0.625])


def test_model_validation():
    with pytest.raises(ParameterError):
        independent_bernoulli_model([[0.0, 0.5]])
    with pytest.raises(ParameterError):
        model_from_weights([1], {((0,),): 1.0, ((2,),): 1.0})


def test_identity_exact_independent():
    model = independent_bernoulli_model([[0.3, 0.5, 0.2], [0.4, 0.6]])
    assert verify_size_biased_exact(model) < 1e-12


def test_identity_exact_dependent():
    # A strongly dependent two-block model built from explicit weights.
    weights = {}
    rng = np.random.default_rng(7)
    for c0 in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        for c1 in [(0,), (1,)]:
            weights[(c0, c1)] = float(rng.random()) + 0.05
    model = model_from_weights([2, 1], weights)
    assert verify_size_biased_exact(model) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.05, 0.95), min_size=1, max_size=3))
def test_identity_exact_property(probs):
    model = independent_bernoulli_model([probs])
    assert verify_size_biased_exact(model) < 1e-12


def test_coupling_run_invariants():
    model = independent_bernoulli_model([[0.4, 0.4], [0.3]])
    for seed in range(20):
        run = construct_coupling(model, seed)
        assert len(run.w) == 2
        for i, row in enumerate(run.w_tilde):
            assert len(row) == i + 1
            assert row[i] >= 1


def test_coupling_run_rejects_bad_rows():
    with pytest.raises(InvariantError):
        CouplingRun((0, 0), ((0,), (0, 1)), (0, 0))
    with pytest.raises(InvariantError):
        CouplingRun((0, 0), ((1, 0),), (0,))


def test_mc_terms_match_exact_within_error():
    model = independent_bernoulli_model([[0.3, 0.5], [0.2, 0.4]])
    exact = exact_bound_terms(model)
    mc = mc_bound_terms(model, 4000, 11)
    for i in range(2):
        assert abs(mc.diag_terms[i] - exact.diag_terms[i]) <= 4 * mc.diag_stderr[i] + 1e-9
    key = (1, 0)
    assert abs(mc.cross_terms[key] - exact.cross_terms[key]) <= 4 * mc.cross_stderr[key] + 1e-9


def test_bound_t1_arithmetic():
    total = bound_t1((0.5, 0.25), {(1, 0): 0.1}, (2.0, 0.5))
    assert total == pytest.approx(min(1, 2.0) * 0.5 + min(1, 0.5) * 0.25 + 2 * 0.5 * 0.1)


def test_bound_i1_and_dd_arithmetic():
    lam = [2.0, 0.5]
    var = [1.5, 0.4]
    cov = [[1.5, 0.2], [0.2, 0.4]]
    p_table = [[0.5, 0.5], [0.25, 0.25]]
    i1 = bound_i1(lam, var, cov, p_table)
    expected = 0.5 * (1.5 - 2.0 + 2 * 0.5) + 1.0 * (0.4 - 0.5 + 2 * 0.125) + 2 * 0.2 / 0.5
    assert i1.value == pytest.approx(expected)
    dd = bound_dd(lam, var, cov)
    expected_dd = 0.5 * (2.0 - 1.5) + 1.0 * (0.5 - 0.4) - 2 * 0.2 / 0.5
    assert dd.value == pytest.approx(expected_dd)
    # The positive covariance makes this toy input incompatible with a
    # decreasing coupling, and the evaluator flags it.
    assert dd.negative_warning


def test_univariate_bound_dominates_actual_tv():
    # Sum of independent Bernoullis versus the Poisson law with the same mean.
    probs = [0.15, 0.2, 0.1, 0.25]
    model = independent_bernoulli_model([probs])
    lam = sum(probs)
    w_law = exact_w_law(model, 0)
    hi = 40
    tv = 0.5 * sum(
        abs(w_law.get((k,), 0.0) - poisson.pmf(k, lam)) for k in range(hi)
    ) + 0.5 * poisson.sf(hi - 1, lam)
    report = exact_bound_terms(model)
    bound = bound_univariate_tv(lam, report.diag_terms[0])
    assert tv <= bound + 1e-12


def test_bound_report_json_schema():
    model = independent_bernoulli_model([[0.3], [0.4]])
    report = exact_bound_terms(model)
    payload = json.loads(report.to_json())
    assert set(payload) == {"mode", "lambda", "diag_terms", "cross_terms", "total", "stderr"}
    assert payload["mode"] == "exact"
    assert payload["total"] == pytest.approx(report.total)
    assert "1,0" in payload["cross_terms"]
