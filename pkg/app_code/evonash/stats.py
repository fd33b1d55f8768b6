"""Performance metrics, selection scores and data-snooping-aware tests.

Conventions: sample standard deviations use n-1, Sharpe ratios are
annualized with sqrt(252), CVaR is the mean of the worst ceil(alpha*n)
observations.
"""
import logging
import math

import numpy as np
from scipy.stats import norm
from statsmodels.stats.multitest import multipletests

from evonash.errors import ContractError, StatisticalTestError
from evonash.models.results import MetricSet, TestResult

# Set up logging
logger = logging.getLogger(__name__)

ANNUALIZATION = 252
ZERO_VARIANCE = 1e-12


def _array(x):
    return np.asarray(x, dtype=float)


def sharpe(x):
    """Annualized Sharpe; 0 for fewer than 2 points or zero variance"""
    x = _array(x)
    if len(x) < 2:
        return 0.0
    sd = x.std(ddof=1)
    if sd < ZERO_VARIANCE:
        logger.debug("Zero-variance series, Sharpe set to 0")
        return 0.0
    return float(x.mean() / sd * math.sqrt(ANNUALIZATION))


def excess_sharpe(pnl, bench):
    return sharpe(_array(pnl) - _array(bench))


def excess_cum_return(pnl, bench):
    return float(np.prod(1.0 + _array(pnl)) / np.prod(1.0 + _array(bench)) - 1.0)


def cvar(x, alpha):
    """Mean of the worst ceil(alpha * n) observations"""
    x = np.sort(_array(x))
    if len(x) == 0:
        return 0.0
    k = max(1, math.ceil(alpha * len(x) - 1e-9))
    return float(x[:k].mean())


def downside_deviation(x, annualize=True):
    """Root mean square of the negative part"""
    x = _array(x)
    if len(x) == 0:
        return 0.0
    dd = float(np.sqrt(np.mean(np.minimum(x, 0.0) ** 2)))
    return dd * math.sqrt(ANNUALIZATION) if annualize else dd


def max_drawdown(x):
    """Largest peak-to-trough loss of compounded returns, as a non-positive fraction"""
    x = _array(x)
    if len(x) == 0:
        return 0.0
    equity = np.cumprod(1.0 + x)
    peak = np.maximum.accumulate(np.maximum(equity, 1.0))
    return float(min(0.0, (equity / peak - 1.0).min()))


def beta(pnl, bench):
    """Cov(pnl, bench) / Var(bench); 0 when the benchmark is flat"""
    p, b = _array(pnl), _array(bench)
    if len(b) < 2:
        return 0.0
    var = b.var(ddof=1)
    if var < ZERO_VARIANCE ** 2:
        logger.debug("Flat benchmark, beta set to 0")
        return 0.0
    return float(np.cov(p, b, ddof=1)[0, 1] / var)


def annualized_return(x):
    x = _array(x)
    if len(x) == 0:
        return 0.0
    growth = np.prod(1.0 + x)
    if growth <= 0:
        return -1.0
    return float(growth ** (ANNUALIZATION / len(x)) - 1.0)


def hit_ratio(prev_positions, market_returns, bench):
    """Share of days where sign(p_{t-1}) equals sign(r_t - b_t)"""
    p = np.sign(_array(prev_positions))
    e = np.sign(_array(market_returns) - _array(bench))
    if len(p) == 0:
        return 0.0
    return float(np.mean(p == e))


def compute_metrics(pnl, bench, alpha_cvar=0.05):
    """
    Compute the excess-performance metric set.

    Args:
        pnl (array-like): Daily strategy returns
        bench (array-like): Daily benchmark returns
        alpha_cvar (float): Tail fraction for CVaR

    Returns:
        MetricSet
    """
    p, b = _array(pnl), _array(bench)
    if len(p) == 0 or len(p) != len(b):
        raise ContractError("metrics need aligned, non-empty series")
    excess = p - b
    return MetricSet(
        excess_sharpe=sharpe(excess),
        excess_cum_return=excess_cum_return(p, b),
        mean_excess_1d=float(excess.mean()),
        excess_cvar=cvar(excess, alpha_cvar),
        excess_worst_day=float(excess.min()),
        beta=beta(p, b),
        max_drawdown=max_drawdown(p),
        down_dev=downside_deviation(p),
        annualized_return=annualized_return(p),
        sharpe=sharpe(p),
        cum_return=float(np.prod(1.0 + p) - 1.0),
        benchmark_cum_return=float(np.prod(1.0 + b) - 1.0),
        n_days=int(len(p)),
    )


def selection_score(metrics, violation, w):
    """S = ExSharpe - l1|min(0, ExCVaR)| - l2|min(0, ExWorst)| - l3 * violation"""
    return (metrics.excess_sharpe
            - w.lambda1 * abs(min(0.0, metrics.excess_cvar))
            - w.lambda2 * abs(min(0.0, metrics.excess_worst_day))
            - w.lambda3 * violation)


def robust_score(window_sharpes, w):
    """Mean window excess Sharpe penalized by its dispersion and worst window"""
    s = _array(window_sharpes)
    if len(s) == 0:
        raise ContractError("robust score needs at least one window")
    sd = s.std(ddof=1) if len(s) > 1 else 0.0
    return float(s.mean() - w.lambda_std * sd - w.lambda_min * abs(min(0.0, s.min())))


# --- tests -----------------------------------------------------------------

def newey_west_lag(n):
    return int(math.floor(4.0 * (n / 100.0) ** (2.0 / 9.0)))


def hac_variance(d, lag):
    """Bartlett-weighted long-run variance of ``d``"""
    d = _array(d)
    u = d - d.mean()
    n = len(u)
    var = float(u @ u) / n
    for ell in range(1, lag + 1):
        weight = 1.0 - ell / (lag + 1.0)
        var += 2.0 * weight * float(u[ell:] @ u[:-ell]) / n
    return var


def newey_west_test(d, lag=None):
    """One-sided HAC t-test that the mean of ``d`` is positive"""
    d = _array(d)
    n = len(d)
    lag = newey_west_lag(n) if lag is None else lag
    if n <= lag + 2:
        raise StatisticalTestError(f"Newey-West needs more than {lag + 2} points, got {n}")
    var = hac_variance(d, lag)
    if var <= 0:
        stat = 0.0
    else:
        stat = float(d.mean() / math.sqrt(var / n))
    return TestResult(method='NeweyWest', statistic=stat, p_value=float(norm.sf(stat)), lag=lag)


def bootstrap_indices(n, mean_block, seed, replicate):
    """One stationary-bootstrap index stream with wrap-around"""
    if mean_block < 1:
        raise ContractError("mean block length must be >= 1")
    rng = np.random.default_rng([seed, replicate])
    starts = rng.integers(0, n, size=n)
    restart = rng.random(n) < 1.0 / mean_block
    restart[0] = True
    first = np.flatnonzero(restart)
    block = np.cumsum(restart) - 1
    offset = np.arange(n) - first[block]
    return (starts[first][block] + offset) % n


def stationary_bootstrap(series, mean_block, n_boot, seed):
    """
    Draw stationary-bootstrap resample indices.

    Each replicate b uses its own generator seeded by (seed, b), so results
    do not depend on how replicates are scheduled.

    Returns:
        np.ndarray: Integer indices with shape (n_boot, len(series))
    """
    n = series if isinstance(series, (int, np.integer)) else len(series)
    return np.stack([bootstrap_indices(n, mean_block, seed, b) for b in range(n_boot)])


def _replicate_means(d, mean_block, n_boot, seed):
    d = _array(d)
    n = len(d)
    return np.array([d[bootstrap_indices(n, mean_block, seed, b)].mean(axis=0)
                     for b in range(n_boot)])


def bootstrap_mean_test(d, mean_block=10.0, n_boot=2000, seed=0, ci_level=0.95):
    """
    Stationary-bootstrap test of a positive mean, with a percentile interval.

    Returns:
        tuple: (TestResult, (ci_low, ci_high))
    """
    d = _array(d)
    if len(d) < 2:
        raise StatisticalTestError("bootstrap needs at least 2 points")
    means = _replicate_means(d, mean_block, n_boot, seed)
    observed = d.mean()
    p = float(np.mean(means - observed >= observed))
    tail = (1.0 - ci_level) / 2.0
    ci = (float(np.quantile(means, tail)), float(np.quantile(means, 1.0 - tail)))
    result = TestResult(method='StationaryBootstrap', statistic=float(observed), p_value=p,
                        n_bootstrap=n_boot, mean_block_length=mean_block)
    return result, ci


def _as_matrix(diffs):
    d = _array(diffs)
    if d.ndim == 1:
        d = d[:, None]
    if d.ndim != 2 or d.shape[1] < 1 or d.shape[0] < 2:
        raise StatisticalTestError("diffs must be a T x J matrix with J >= 1 and T >= 2")
    return d


def wrc_test(diffs, mean_block=10.0, n_boot=2000, seed=0):
    """White Reality Check for the best of J models against a benchmark"""
    d = _as_matrix(diffs)
    n = d.shape[0]
    dbar = d.mean(axis=0)
    stat = math.sqrt(n) * float(dbar.max())
    boot = math.sqrt(n) * (_replicate_means(d, mean_block, n_boot, seed) - dbar).max(axis=1)
    p = float(np.mean(boot >= stat))
    return TestResult(method='WRC', statistic=stat, p_value=p, n_bootstrap=n_boot,
                      mean_block_length=mean_block, n_models=d.shape[1])


def spa_lite_test(diffs, mean_block=10.0, n_boot=2000, seed=0):
    """Studentized-max variant of the Reality Check; flat models are excluded"""
    d = _as_matrix(diffs)
    sd = d.std(axis=0, ddof=1)
    live = sd >= ZERO_VARIANCE
    excluded = [int(j) for j in np.flatnonzero(~live)]
    if excluded:
        logger.warning(f"SPA-lite excluding zero-variance models {excluded}")
    if not live.any():
        raise StatisticalTestError("SPA-lite: every model has zero variance")
    d, sd = d[:, live], sd[live]
    n = d.shape[0]
    dbar = d.mean(axis=0)
    stat = float(np.maximum(0.0, math.sqrt(n) * dbar / sd).max())
    centered = _replicate_means(d, mean_block, n_boot, seed) - dbar
    boot = np.maximum(0.0, math.sqrt(n) * centered / sd).max(axis=1)
    p = float(np.mean(boot >= stat))
    return TestResult(method='SPA-lite', statistic=stat, p_value=p, n_bootstrap=n_boot,
                      mean_block_length=mean_block, n_models=int(live.sum()), excluded=excluded)


def fdr_adjust(pvals):
    """Benjamini-Hochberg q-values"""
    p = _array(pvals)
    if len(p) == 0:
        return p
    if ((p < 0) | (p > 1)).any():
        raise ContractError("p-values must lie in [0, 1]")
    return multipletests(p, method='fdr_bh')[1]
