"""Meta-game layer: payoff matrix, multiplicative weights, Nash gap, ensemble."""
import logging
import math

import numpy as np
import pandas as pd

from evonash.errors import ContractError
from evonash.models.game import MetaStrategy, PayoffMatrix, PsroResult

# Set up logging
logger = logging.getLogger(__name__)

EXP_CLAMP = 50.0


def build_payoff(mean_pnls):
    """A_ij = pnl_i - pnl_j"""
    v = np.asarray(mean_pnls, dtype=float)
    if v.ndim != 1 or len(v) < 2:
        raise ContractError("payoff matrix needs at least 2 agents")
    return PayoffMatrix(v[:, None] - v[None, :])


def _mw_update(m, payoff, eta):
    logits = np.clip(eta * payoff, -EXP_CLAMP, EXP_CLAMP)
    w = m * np.exp(logits)
    return w / w.sum()


def mw_step(A, m):
    """One multiplicative-weights update against v = A m"""
    payoff = A.A @ m.m
    return MetaStrategy(_mw_update(m.m, payoff, m.eta), eta=m.eta, iterations=m.iterations + 1)


def nash_gap(A, m):
    """max_i (A m)_i - m'A m, floored at 0"""
    v = A.A @ np.asarray(getattr(m, 'm', m), dtype=float)
    value = float(np.asarray(getattr(m, 'm', m)) @ v)
    return max(0.0, float(v.max()) - value)


def regret_bound(G, K, T):
    """G * sqrt(2 log K / T)"""
    if K < 2 or T < 1:
        return 0.0
    return G * math.sqrt(2.0 * math.log(K) / T)


def theoretical_eta(G, K, T):
    """Learning rate at which the regret bound is attained"""
    if G <= 0 or K < 2:
        return 1.0
    return math.sqrt(2.0 * math.log(K) / (T * G * G))


def psro_solve(A, eta, iterations):
    """
    Run multiplicative weights from the uniform strategy.

    Args:
        A (PayoffMatrix): Antisymmetric payoffs
        eta (float): Learning rate
        iterations (int): Number of updates T

    Returns:
        PsroResult: final iterate, average of the T evaluated iterates,
            per-iterate gaps and the regret bound for T
    """
    if iterations < 1:
        raise ContractError("psro_solve needs at least one iteration")
    K = A.K
    if K == 1:
        one = np.ones(1)
        return PsroResult(final=one, average=one, gap_trace=[0.0] * iterations)

    m = np.full(K, 1.0 / K)
    total = np.zeros(K)
    gaps = []
    for _ in range(iterations):
        total += m
        payoff = A.A @ m
        gaps.append(max(0.0, float(payoff.max()) - float(m @ payoff)))
        m = _mw_update(m, payoff, eta)
    average = total / iterations
    result = PsroResult(final=m, average=average, gap_trace=gaps,
                        final_gap=nash_gap(A, m), average_gap=nash_gap(A, average),
                        bound=regret_bound(A.G, K, iterations))
    logger.debug(f"PSRO solve K={K} T={iterations}: avg gap {result.average_gap:.3e}")
    return result


def solve_zero_sum(A, eta, iterations, row_init=None, col_init=None):
    """
    Two-player multiplicative weights for a general zero-sum matrix game.

    The row player maximizes x'Ay, the column player minimizes it. Both
    update simultaneously against the other's current strategy.

    Returns:
        tuple: (average row strategy, average column strategy, value x'Ay)
    """
    A = np.asarray(A, dtype=float)
    n_rows, n_cols = A.shape
    x = np.full(n_rows, 1.0 / n_rows) if row_init is None else np.asarray(row_init, float)
    y = np.full(n_cols, 1.0 / n_cols) if col_init is None else np.asarray(col_init, float)
    x_sum, y_sum = np.zeros(n_rows), np.zeros(n_cols)
    for _ in range(iterations):
        x_sum += x
        y_sum += y
        row_payoff, col_payoff = A @ y, x @ A
        x = _mw_update(x, row_payoff, eta)
        y = _mw_update(y, -col_payoff, eta)
    x_bar, y_bar = x_sum / iterations, y_sum / iterations
    return x_bar, y_bar, float(x_bar @ A @ y_bar)


def ensemble_signal(m, signals):
    """
    Mix agent signals with meta-strategy weights.

    Args:
        m (array-like or MetaStrategy): Simplex weights
        signals (list): K aligned pd.Series

    Returns:
        pd.Series: sum_k m_k s_k
    """
    weights = np.asarray(getattr(m, 'm', m), dtype=float)
    if len(signals) != len(weights):
        raise ContractError(f"{len(weights)} weights for {len(signals)} signals")
    index = signals[0].index
    if any(not s.index.equals(index) for s in signals[1:]):
        raise ContractError("ensemble signals must share dates")
    stacked = np.column_stack([s.to_numpy(dtype=float) for s in signals])
    return pd.Series(stacked @ weights, index=index, name='ensemble')
