import numpy as np
import pandas as pd
import pytest

from evonash.errors import ConfigurationError, ContractError
from evonash.execution import (apply_overlays, daily_pnl, optimize_scale, run_stress,
                               schedule_positions, simulate, stress_table)
from evonash.models.settings import (DEFAULT_STRESS_SCENARIOS, ExecutionConfig, ScaleGrid,
                                     StressScenario, TailDelever)

FRICTIONLESS = ExecutionConfig(tc_bps=0, lambda_risk=0, lambda_imp=0, lambda_cap=0,
                               rebalance_days=1, smoothing_alpha=1.0, tail_delever=None)


def naive_simulation(signal, r, sigma, cfg, scale=1.0):
    """Straight-line re-implementation of scheduling, overlays and PnL"""
    n = len(signal)
    sched, prev = [], cfg.initial_position
    for i in range(n):
        if i % cfg.rebalance_days == 0:
            prev = (1 - cfg.smoothing_alpha) * prev + cfg.smoothing_alpha * scale * signal[i]
        sched.append(prev)
    pos = list(sched)
    if cfg.vol_target is not None:
        factor = None
        for i in range(n):
            if i % cfg.rebalance_days == 0:
                realized = sigma[i] * np.sqrt(252)
                factor = min(1.0, cfg.vol_target / realized) if realized > 0 else 1.0
            pos[i] *= factor
    pnl = []
    prev, equity, peak = cfg.initial_position, 1.0, 1.0
    for i in range(n):
        if cfg.tail_delever is not None and equity / peak - 1 < cfg.tail_delever.drawdown_trigger:
            pos[i] *= cfg.tail_delever.scale_factor
        u = abs(pos[i] - prev)
        step = (prev * r[i] - cfg.tc_bps / 1e4 * u - cfg.lambda_risk * abs(prev) * sigma[i]
                - cfg.lambda_imp * u ** 2 - cfg.lambda_cap * prev ** 2 * (1 + sigma[i]))
        pnl.append(step)
        equity *= 1 + step
        peak = max(peak, equity)
        prev = pos[i]
    return np.array(pnl), np.array(pos)


def test_single_full_position_earns_next_return(make_market):
    market = make_market(n=2)
    market['market'] = [0.0, 0.01]
    signal = pd.Series([1.0, 1.0], index=market.index)
    sim = simulate(signal, market, FRICTIONLESS)
    assert sim.pnl.iloc[1] == pytest.approx(0.01, abs=1e-15)
    assert sim.pnl.iloc[0] == 0.0


def test_transaction_cost_on_entry(make_market):
    market = make_market(n=1)
    market['market'] = 0.0
    cfg = FRICTIONLESS.model_copy(update={'tc_bps': 3.0})
    sim = simulate(pd.Series([1.0], index=market.index), market, cfg)
    assert sim.pnl.iloc[0] == pytest.approx(-0.0003, abs=1e-15)


def test_rebalance_schedule_holds_between_dates():
    cfg = ExecutionConfig(rebalance_days=3, smoothing_alpha=0.5)
    positions = schedule_positions(np.ones(7), cfg)
    assert positions.tolist() == [0.5, 0.5, 0.5, 0.75, 0.75, 0.75, 0.875]


def test_flat_position_has_zero_pnl(make_market):
    market = make_market(n=30, seed=4)
    sim = simulate(pd.Series(0.0, index=market.index), market, ExecutionConfig())
    assert (sim.pnl == 0).all()


@pytest.mark.parametrize('seed', range(200))
def test_engine_matches_naive_resimulation(seed):
    g = np.random.default_rng(seed)
    n = int(g.integers(1, 51))
    cfg = ExecutionConfig(
        tc_bps=float(g.uniform(0, 10)), lambda_risk=float(g.uniform(0, 0.05)),
        lambda_imp=float(g.uniform(0, 0.01)), lambda_cap=float(g.uniform(0, 0.01)),
        rebalance_days=int(g.integers(1, 6)), smoothing_alpha=float(g.uniform(0.1, 1.0)),
        vol_target=float(g.uniform(0.05, 0.3)) if g.random() < 0.5 else None,
        tail_delever=TailDelever(drawdown_trigger=-float(g.uniform(0.001, 0.05)),
                                 scale_factor=float(g.uniform(0, 1))) if g.random() < 0.7 else None,
        initial_position=float(g.uniform(0, 1)))
    index = pd.bdate_range('2022-01-03', periods=n, name='date')
    market = pd.DataFrame({'market': g.normal(0, 0.03, n), 'benchmark': g.normal(0, 0.01, n),
                           'sigma': g.uniform(0, 0.03, n)}, index=index)
    signal = pd.Series(g.uniform(0, 1, n), index=index)
    scale = float(g.uniform(0.5, 1.5))

    sim = simulate(signal, market, cfg, scale=scale)
    pnl, pos = naive_simulation(signal.to_numpy(), market['market'].to_numpy(),
                                market['sigma'].to_numpy(), cfg, scale=scale)
    np.testing.assert_allclose(sim.pnl.to_numpy(), pnl, rtol=0, atol=1e-12)
    np.testing.assert_allclose(sim.positions.to_numpy(), pos, rtol=0, atol=1e-12)


def test_tail_delever_scales_after_drawdown(make_market):
    market = make_market(n=4)
    market['market'] = [0.0, -0.2, 0.0, 0.0]
    market['sigma'] = 0.0
    cfg = FRICTIONLESS.model_copy(update={'tail_delever': TailDelever(drawdown_trigger=-0.1,
                                                                      scale_factor=0.5)})
    scheduled = pd.Series(1.0, index=market.index)
    executed = apply_overlays(scheduled, market, cfg)
    assert executed.tolist() == [1.0, 1.0, 0.5, 0.5]


def test_daily_pnl_rejects_bad_inputs():
    cfg = ExecutionConfig()
    with pytest.raises(ContractError):
        daily_pnl([1.0, 1.0], [0.0], [0.0, 0.0], cfg)
    with pytest.raises(ContractError):
        daily_pnl([1.0], [0.0], [-0.1], cfg)


def test_optimize_scale_prefers_full_size_in_rising_market(make_market):
    market = make_market(n=60, seed=2, drift=0.003, vol=0.0001)
    market['benchmark'] = 0.0
    grid = ScaleGrid(s_min_scale=0.5, s_max_scale=1.5, n_steps=3, lambda_to=0.0)
    cfg = FRICTIONLESS
    best, table = optimize_scale(pd.Series(1.0, index=market.index), market, cfg, grid)
    assert best == pytest.approx(1.5)
    assert [s for s, _ in table] == pytest.approx([0.5, 1.0, 1.5])


def test_optimize_scale_ties_pick_smallest(make_market):
    market = make_market(n=20)
    best, _ = optimize_scale(pd.Series(0.0, index=market.index), market, ExecutionConfig(),
                             ScaleGrid(n_steps=5))
    assert best == pytest.approx(0.5)


def test_empty_scale_grid_is_configuration_error(make_market):
    market = make_market(n=5)
    with pytest.raises(ConfigurationError):
        optimize_scale(pd.Series(1.0, index=market.index), market, ExecutionConfig(),
                       ScaleGrid(n_steps=0))


def stored_daily(n=80, seed=3):
    g = np.random.default_rng(seed)
    index = pd.bdate_range('2022-01-03', periods=n, name='date')
    market = pd.DataFrame({'market': g.normal(0.0005, 0.01, n), 'benchmark': g.normal(0, 0.01, n),
                           'sigma': g.uniform(0.005, 0.02, n)}, index=index)
    signal = pd.Series(g.uniform(0, 1, n), index=index)
    sim = simulate(signal, market, ExecutionConfig(rebalance_days=2))
    return pd.DataFrame({'strategy_return': sim.pnl, 'benchmark_return': market['benchmark'],
                         'position': sim.positions, 'prev_position': sim.frame['prev_position'],
                         'market_return': market['market'], 'sigma': market['sigma']})


def test_stress_base_has_zero_deltas():
    results, _ = run_stress(stored_daily(), [StressScenario(name='base')], ExecutionConfig())
    assert results[0].delta_excess_sharpe == 0.0
    assert results[0].delta_excess_cum_return == 0.0


def test_stress_costs_only_hurt():
    results, _ = run_stress(stored_daily(), list(DEFAULT_STRESS_SCENARIOS), ExecutionConfig())
    table = stress_table(results).set_index('scenario')
    assert table.loc['tc_x3', 'DeltaExCumRet'] < 0
    assert table.loc['all_x3', 'ExcessCumRet'] <= table.loc['all_x2', 'ExcessCumRet']
    assert table.loc['all_x2', 'ExcessCumRet'] <= table.loc['base', 'ExcessCumRet']
    assert list(table.columns) == ['ExcessSharpe', 'DeltaExSharpe', 'ExcessCumRet', 'DeltaExCumRet']


def test_held_position_pays_capacity_only():
    cfg = ExecutionConfig(tc_bps=3.0, lambda_cap=0.0001)
    sim = daily_pnl([1.0], [0.01], [0.0], cfg, prev_positions=[1.0])
    assert sim.turnover.iloc[0] == 0.0
    assert sim.pnl.iloc[0] == pytest.approx(0.0099, abs=1e-15)


def test_impact_is_quadratic_in_turnover():
    cfg = FRICTIONLESS.model_copy(update={'lambda_imp': 0.0002})
    sim = daily_pnl([1.0], [0.0], [0.0], cfg, prev_positions=[0.5])
    assert sim.pnl.iloc[0] == pytest.approx(-5e-5, abs=1e-15)


@pytest.mark.parametrize('name, values', [
    ('tc_bps', [0.0, 1.0, 3.0, 10.0]),
    ('lambda_risk', [0.0, 0.01, 0.05, 0.2]),
    ('lambda_imp', [0.0, 0.0002, 0.001, 0.01]),
    ('lambda_cap', [0.0, 0.0001, 0.001, 0.01]),
])
def test_pnl_falls_as_frictions_rise(name, values):
    g = np.random.default_rng(21)
    n = 60
    positions = g.uniform(-1, 1.5, n)
    prev = g.uniform(-1, 1.5, n)
    r = g.normal(0, 0.02, n)
    sigma = g.uniform(0, 0.03, n)
    base = ExecutionConfig(tc_bps=2.0, lambda_risk=0.01, lambda_imp=0.0002, lambda_cap=0.0001)
    pnls = [daily_pnl(positions, r, sigma, base.model_copy(update={name: v}),
                      prev_positions=prev).pnl.to_numpy() for v in values]
    for cheaper, dearer in zip(pnls, pnls[1:]):
        assert (dearer <= cheaper).all()


def test_vol_target_halves_position_at_twice_target(make_market):
    market = make_market(n=6)
    market['sigma'] = 0.2 / np.sqrt(252)
    cfg = FRICTIONLESS.model_copy(update={'vol_target': 0.1})
    executed = apply_overlays(pd.Series(1.0, index=market.index), market, cfg)
    np.testing.assert_allclose(executed, 0.5, rtol=1e-12)

    market['sigma'] = 0.05 / np.sqrt(252)
    executed = apply_overlays(pd.Series(1.0, index=market.index), market, cfg)
    np.testing.assert_allclose(executed, 1.0, rtol=1e-12)


def test_capacity_penalty_gives_interior_scale(make_market):
    # mean daily excess ~ s * r - lambda_cap * s^2, peaking at s = r / (2 * lambda_cap) = 1.13
    market = make_market(n=50)
    market['market'] = 0.00113
    market['benchmark'] = 0.0
    market['sigma'] = 0.0
    cfg = FRICTIONLESS.model_copy(update={'lambda_cap': 0.0005})
    signal = pd.Series(1.0, index=market.index)
    coarse = ScaleGrid(s_min_scale=0.5, s_max_scale=1.6, n_steps=12,
                       lambda_to=0.0, lambda_cvar=0.0, lambda_down=0.0)
    fine = coarse.model_copy(update={'n_steps': 111})

    best, table = optimize_scale(signal, market, cfg, coarse)
    fine_best, fine_table = optimize_scale(signal, market, cfg, fine)
    step = (coarse.s_max_scale - coarse.s_min_scale) / (coarse.n_steps - 1)
    assert coarse.s_min_scale < best < coarse.s_max_scale
    assert fine_best == pytest.approx(1.13, abs=1e-9)
    assert abs(best - fine_best) <= step
    assert max(j for _, j in table) <= max(j for _, j in fine_table)
