import math
from dataclasses import replace

import numpy as np
import pytest
import statsmodels.api as sm

from evonash.errors import StatisticalTestError
from evonash.models.settings import SelectionWeights
from evonash.stats import (bootstrap_mean_test, compute_metrics, cvar, downside_deviation,
                           fdr_adjust, hit_ratio, max_drawdown, newey_west_lag, newey_west_test,
                           robust_score, selection_score, sharpe, spa_lite_test,
                           stationary_bootstrap, wrc_test)


def test_metrics_of_identical_series():
    b = np.random.default_rng(0).normal(0, 0.01, 50)
    m = compute_metrics(b, b)
    assert m.excess_sharpe == 0.0
    assert m.excess_cum_return == pytest.approx(0.0, abs=1e-15)
    assert m.beta == pytest.approx(1.0)


def test_constant_excess_mean():
    b = np.random.default_rng(1).normal(0, 0.01, 40)
    m = compute_metrics(b + 1e-4, b)
    assert m.mean_excess_1d == pytest.approx(1e-4, abs=1e-15)


def test_metrics_match_direct_computation():
    g = np.random.default_rng(2)
    p, b = g.normal(0.0005, 0.01, 30), g.normal(0.0002, 0.008, 30)
    m = compute_metrics(p, b, alpha_cvar=0.1)
    e = p - b
    assert m.excess_sharpe == pytest.approx(e.mean() / e.std(ddof=1) * math.sqrt(252), abs=1e-12)
    assert m.excess_cum_return == pytest.approx(np.prod(1 + p) / np.prod(1 + b) - 1, abs=1e-12)
    assert m.excess_cvar == pytest.approx(np.sort(e)[:3].mean(), abs=1e-12)
    assert m.excess_worst_day == e.min()
    assert m.beta == pytest.approx(np.cov(p, b)[0, 1] / b.var(ddof=1), abs=1e-12)
    assert m.n_days == 30


def test_sharpe_zero_variance():
    assert sharpe(np.full(10, 0.001)) == 0.0
    assert sharpe([0.01]) == 0.0


def test_tail_and_drawdown_helpers():
    assert cvar([0.05, -0.02, 0.01, -0.04], 0.5) == pytest.approx(-0.03)
    assert cvar([0.01, 0.02], 0.01) == 0.01
    assert downside_deviation([-0.02, 0.02], annualize=False) == pytest.approx(math.sqrt(0.0002))
    assert max_drawdown([0.1, -0.5, 0.2]) == pytest.approx(-0.5)
    assert max_drawdown([0.01, 0.02]) == 0.0


def test_hit_ratio():
    assert hit_ratio([1.0, 0.5, 0.0], [0.01, -0.01, 0.0], [0.0, 0.0, 0.0]) == pytest.approx(2 / 3)


def test_selection_score_example():
    base = compute_metrics(np.full(5, 0.01), np.zeros(5))
    metrics = replace(base, excess_sharpe=1.0, excess_cvar=-0.02, excess_worst_day=0.0)
    w = SelectionWeights(lambda1=1.0, lambda2=0.0, lambda3=0.0)
    assert selection_score(metrics, 0.0, w) == pytest.approx(0.98)


def test_selection_score_feasible_first():
    g = np.random.default_rng(4)
    base = compute_metrics(np.full(5, 0.01), np.zeros(5))
    w = SelectionWeights(lambda3=1e6)
    for _ in range(200):
        a = replace(base, excess_sharpe=g.normal(), excess_cvar=-abs(g.normal(0, 0.02)),
                    excess_worst_day=-abs(g.normal(0, 0.03)))
        b = replace(base, excess_sharpe=g.normal(), excess_cvar=-abs(g.normal(0, 0.02)),
                    excess_worst_day=-abs(g.normal(0, 0.03)))
        va, vb = abs(g.normal(0, 0.01)), abs(g.normal(0, 0.01))
        if abs(va - vb) < 1e-4:
            continue
        assert (selection_score(a, va, w) > selection_score(b, vb, w)) == (va < vb)


def test_robust_score_example():
    w = SelectionWeights(lambda_std=0.5, lambda_min=1.0)
    assert robust_score([1.0, -1.0], w) == pytest.approx(-0.5 * math.sqrt(2) - 1, abs=1e-12)
    assert robust_score([0.7, 0.7, 0.7], w) == pytest.approx(0.7)


def test_robust_score_prefers_stable_windows():
    g = np.random.default_rng(5)
    w = SelectionWeights()
    for _ in range(100):
        b = g.normal(0.5, 1.0, 8)
        a = b.mean() + 0.5 * (b - b.mean())
        gap = robust_score(a, w) - robust_score(b, w)
        bound = (w.lambda_std * (b.std(ddof=1) - a.std(ddof=1))
                 + w.lambda_min * (abs(min(0.0, b.min())) - abs(min(0.0, a.min()))))
        assert gap >= bound - 1e-12


def test_newey_west_lag_zero_is_plain_t():
    d = np.random.default_rng(6).normal(0.001, 0.01, 120)
    result = newey_west_test(d, lag=0)
    assert result.statistic == pytest.approx(d.mean() / (d.std(ddof=0) / math.sqrt(len(d))))
    assert result.method == 'NeweyWest'


def test_newey_west_matches_statsmodels_hac():
    d = np.random.default_rng(7).normal(0.0005, 0.01, 250)
    lag = newey_west_lag(len(d))
    fit = sm.OLS(d, np.ones((len(d), 1))).fit(cov_type='HAC',
                                               cov_kwds={'maxlags': lag, 'use_correction': False})
    assert newey_west_test(d).statistic == pytest.approx(float(fit.tvalues[0]), rel=1e-8)


def test_newey_west_flat_series():
    result = newey_west_test(np.zeros(50))
    assert result.statistic == 0.0
    assert result.p_value == pytest.approx(0.5)


def test_newey_west_too_short():
    with pytest.raises(StatisticalTestError):
        newey_west_test([0.1, 0.2], lag=1)


def test_bootstrap_streams_are_deterministic_and_full_length():
    a = stationary_bootstrap(200, 10.0, 5, seed=3)
    b = stationary_bootstrap(np.zeros(200), 10.0, 5, seed=3)
    assert a.shape == (5, 200)
    np.testing.assert_array_equal(a, b)
    assert ((a >= 0) & (a < 200)).all()


def test_bootstrap_mean_block_length():
    n = 10000
    idx = stationary_bootstrap(n, 5.0, 10, seed=1)
    restarts = (idx[:, 1:] != (idx[:, :-1] + 1) % n).sum() + idx.shape[0]
    assert idx.size / restarts == pytest.approx(5.0, rel=0.02)


def test_bootstrap_mean_test_on_positive_mean():
    d = np.random.default_rng(8).normal(0.01, 0.01, 200)
    result, (low, high) = bootstrap_mean_test(d, n_boot=500, seed=2)
    assert result.p_value < 0.01
    assert low < d.mean() < high
    again, _ = bootstrap_mean_test(d, n_boot=500, seed=2)
    assert again.p_value == result.p_value


def test_wrc_constant_difference():
    result = wrc_test(np.full(100, 0.01), n_boot=100)
    assert result.statistic == pytest.approx(0.1)
    assert result.n_models == 1


def test_wrc_zero_differences():
    assert wrc_test(np.zeros((60, 3)), n_boot=100).p_value >= 0.5


def test_spa_lite_statistic():
    z = np.random.default_rng(9).standard_normal(400)
    d = 0.001 + 0.01 * (z - z.mean()) / z.std(ddof=1)
    assert spa_lite_test(d, n_boot=100).statistic == pytest.approx(2.0)
    assert spa_lite_test(-d, n_boot=100).statistic == 0.0


def test_spa_lite_is_scale_invariant():
    g = np.random.default_rng(10)
    d = g.normal(0.001, 0.01, (200, 2))
    scaled = d * np.array([1.0, 7.0])
    assert spa_lite_test(scaled, n_boot=100).statistic == pytest.approx(
        spa_lite_test(d, n_boot=100).statistic)


def test_spa_lite_excludes_flat_models():
    d = np.column_stack([np.zeros(50), np.random.default_rng(11).normal(0, 0.01, 50)])
    result = spa_lite_test(d, n_boot=50)
    assert result.excluded == [0]
    with pytest.raises(StatisticalTestError):
        spa_lite_test(np.zeros((50, 2)), n_boot=50)


def test_fdr_adjust():
    assert fdr_adjust([0.01, 0.02, 0.03]).tolist() == pytest.approx([0.03, 0.03, 0.03])
    assert fdr_adjust([0.2]).tolist() == pytest.approx([0.2])
    assert fdr_adjust([1.0, 1.0]).tolist() == [1.0, 1.0]


@pytest.mark.slow
def test_newey_west_size_under_null():
    g = np.random.default_rng(100)
    rejections = sum(newey_west_test(g.standard_normal(500)).p_value < 0.05 for _ in range(10000))
    assert 0.035 <= rejections / 10000 <= 0.065


@pytest.mark.slow
@pytest.mark.parametrize('test', [wrc_test, spa_lite_test])
def test_reality_checks_size_under_null(test):
    g = np.random.default_rng(200)
    reps = 1000
    rejections = sum(test(g.standard_normal((250, 5)), mean_block=1.0, n_boot=200,
                          seed=k).p_value < 0.05 for k in range(reps))
    assert 0.03 <= rejections / reps <= 0.07
