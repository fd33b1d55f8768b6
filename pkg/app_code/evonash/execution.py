"""Execution layer: positions, overlays, daily PnL, scale search and stress reruns.

Timing: the position p_t is set at the close of date t from the signal s_t
and earns the return of date t+1. Costs of trading at t are booked on t.
"""
import logging

import numpy as np
import pandas as pd

from evonash.errors import ConfigurationError, ContractError
from evonash.models.results import PnLSeries, StressResult
from evonash.stats import cvar, downside_deviation, excess_sharpe, excess_cum_return

# Set up logging
logger = logging.getLogger(__name__)

ANNUALIZATION = 252


def schedule_positions(signal, cfg, initial=None):
    """Hold positions between rebalance dates; smooth toward the signal on them"""
    s = np.asarray(signal, dtype=float)
    alpha = cfg.smoothing_alpha
    prev = cfg.initial_position if initial is None else float(initial)
    out = np.empty(len(s))
    for i in range(len(s)):
        if i % cfg.rebalance_days == 0:
            prev = (1.0 - alpha) * prev + alpha * s[i]
        out[i] = prev
    return pd.Series(out, index=getattr(signal, 'index', None), name='position')


def _step_pnl(prev, pos, r, sigma, cfg):
    u = abs(pos - prev)
    return (prev * r - cfg.c_tc * u - cfg.lambda_risk * abs(prev) * sigma
            - cfg.lambda_imp * u * u - cfg.lambda_cap * prev * prev * (1.0 + sigma))


def _vol_target_factor(sigma, cfg):
    realized = np.asarray(sigma, dtype=float) * np.sqrt(ANNUALIZATION)
    factor = np.ones(len(realized))
    live = realized > 0
    factor[live] = np.minimum(1.0, cfg.vol_target / realized[live])
    return factor


def apply_overlays(positions, market, cfg, initial=None):
    """
    Apply vol-targeting then tail deleveraging to scheduled positions.

    The vol-target factor uses trailing universe volatility and is reset only
    on rebalance dates. The delever multiplier applies on every date whose
    running strategy drawdown (through the previous date) is below the trigger.

    Args:
        positions (pd.Series): Scheduled positions
        market (pd.DataFrame): Columns market and sigma on the same dates
        cfg (ExecutionConfig): Overlay settings
        initial (float): Position held before the first date

    Returns:
        pd.Series: Executed positions
    """
    p = positions.to_numpy(dtype=float).copy()
    n = len(p)
    if cfg.vol_target is not None and n:
        factor = _vol_target_factor(market['sigma'], cfg)
        idx = np.arange(n)
        p = p * factor[idx - idx % cfg.rebalance_days]
    if cfg.tail_delever is not None and n:
        trigger = cfg.tail_delever.drawdown_trigger
        scale = cfg.tail_delever.scale_factor
        r = market['market'].to_numpy(dtype=float)
        sig = market['sigma'].to_numpy(dtype=float)
        prev = cfg.initial_position if initial is None else float(initial)
        equity = peak = 1.0
        for i in range(n):
            if equity / peak - 1.0 < trigger:
                p[i] *= scale
            equity *= 1.0 + _step_pnl(prev, p[i], r[i], sig[i], cfg)
            peak = max(peak, equity)
            prev = p[i]
    return pd.Series(p, index=positions.index, name='position')


def daily_pnl(positions, market_returns, sigma, cfg, prev_positions=None, initial=None):
    """
    Daily strategy return with cost, risk, impact and capacity penalties.

    Args:
        positions (pd.Series): Executed p_t
        market_returns (pd.Series): Universe return r_t
        sigma (pd.Series): Trailing universe volatility
        cfg (ExecutionConfig): Friction weights
        prev_positions (array-like): Explicit p_{t-1}; defaults to shifting
            ``positions`` with ``initial`` before the first date
        initial (float): Position before the first date

    Returns:
        PnLSeries
    """
    p = np.asarray(positions, dtype=float)
    r = np.asarray(market_returns, dtype=float)
    sig = np.asarray(sigma, dtype=float)
    if not (len(p) == len(r) == len(sig)):
        raise ContractError(f"length mismatch: positions {len(p)}, returns {len(r)}, sigma {len(sig)}")
    if (sig < 0).any():
        raise ContractError("sigma must be non-negative")
    if prev_positions is None:
        start = cfg.initial_position if initial is None else float(initial)
        prev = np.concatenate([[start], p[:-1]]) if len(p) else p
    else:
        prev = np.asarray(prev_positions, dtype=float)
        if len(prev) != len(p):
            raise ContractError("prev_positions must match positions")
    u = np.abs(p - prev)
    pnl = (prev * r - cfg.c_tc * u - cfg.lambda_risk * np.abs(prev) * sig
           - cfg.lambda_imp * u * u - cfg.lambda_cap * prev * prev * (1.0 + sig))
    index = getattr(positions, 'index', None)
    frame = pd.DataFrame({'pnl': pnl, 'position': p, 'prev_position': prev, 'turnover': u},
                         index=index)
    return PnLSeries(frame)


def simulate(signal, market, cfg, scale=1.0, initial=None):
    """Schedule, overlay and book PnL for ``scale * signal`` over ``market``'s dates"""
    if not signal.index.equals(market.index):
        raise ContractError("signal and market dates differ")
    scheduled = schedule_positions(signal * scale, cfg, initial=initial)
    executed = apply_overlays(scheduled, market, cfg, initial=initial)
    return daily_pnl(executed, market['market'], market['sigma'], cfg, initial=initial)


def scale_grid(grid):
    if grid.n_steps < 1:
        raise ConfigurationError("execution-scale grid is empty")
    return np.linspace(grid.s_min_scale, grid.s_max_scale, grid.n_steps)


def scale_objective(pnl, bench, turnover, grid):
    """J(s) in daily units"""
    excess = np.asarray(pnl) - np.asarray(bench)
    return (excess.mean()
            - grid.lambda_cvar * abs(min(0.0, cvar(excess, grid.alpha_cvar)))
            - grid.lambda_down * downside_deviation(excess, annualize=False)
            - grid.lambda_to * float(np.mean(turnover)))


def optimize_scale(signal, market, cfg, grid):
    """
    Grid-search the execution scale.

    Args:
        signal (pd.Series): Final signal on the fit dates
        market (pd.DataFrame): Columns market, benchmark, sigma
        cfg (ExecutionConfig): Execution settings
        grid (ScaleGrid): Grid and objective weights

    Returns:
        tuple: (best scale, list of (scale, J) pairs); ties go to the smaller scale
    """
    points = scale_grid(grid)
    bench = market['benchmark'].to_numpy()
    table = []
    best_s, best_j = None, -np.inf
    for s in points:
        sim = simulate(signal, market, cfg, scale=float(s))
        j = scale_objective(sim.pnl.to_numpy(), bench, sim.turnover.to_numpy(), grid)
        table.append((float(s), float(j)))
        if best_s is None or j > best_j:
            best_s, best_j = float(s), j
    return best_s, table


def stressed_config(cfg, scenario):
    return cfg.model_copy(update={
        'tc_bps': cfg.tc_bps * scenario.tc_mult,
        'lambda_imp': cfg.lambda_imp * scenario.impact_mult,
        'lambda_cap': cfg.lambda_cap * scenario.capacity_mult,
    })


def rerun_daily(daily, cfg):
    """Recompute strategy returns for stored positions under ``cfg``"""
    return daily_pnl(daily['position'], daily['market_return'], daily['sigma'], cfg,
                     prev_positions=daily['prev_position'])


def run_stress(daily, scenarios, cfg):
    """
    Rerun stored out-of-sample positions under friction multipliers.

    Args:
        daily (pd.DataFrame): Stitched OOS rows with position, prev_position,
            market_return, sigma and benchmark_return
        scenarios (list): StressScenario objects
        cfg (ExecutionConfig): Base execution settings

    Returns:
        tuple: (list of StressResult, dict scenario name -> PnLSeries)
    """
    bench = daily['benchmark_return'].to_numpy()
    base = rerun_daily(daily, cfg).pnl.to_numpy()
    base_sharpe = excess_sharpe(base, bench)
    base_cum = excess_cum_return(base, bench)

    results, series = [], {}
    for scenario in scenarios:
        sim = rerun_daily(daily, stressed_config(cfg, scenario))
        pnl = sim.pnl.to_numpy()
        sharpe, cum = excess_sharpe(pnl, bench), excess_cum_return(pnl, bench)
        results.append(StressResult(scenario=scenario.name, excess_sharpe=sharpe,
                                    delta_excess_sharpe=sharpe - base_sharpe,
                                    excess_cum_return=cum,
                                    delta_excess_cum_return=cum - base_cum))
        series[scenario.name] = sim
        logger.debug(f"Stress {scenario.name}: ExSharpe {sharpe:.4f} ({sharpe - base_sharpe:+.4f})")
    return results, series


def stress_table(results):
    return pd.DataFrame([{
        'scenario': r.scenario,
        'ExcessSharpe': r.excess_sharpe,
        'DeltaExSharpe': r.delta_excess_sharpe,
        'ExcessCumRet': r.excess_cum_return,
        'DeltaExCumRet': r.delta_excess_cum_return,
    } for r in results])
