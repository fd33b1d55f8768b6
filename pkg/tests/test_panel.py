import numpy as np
import pandas as pd
import pytest

from evonash.errors import ConfigurationError, DataError, ParseError
from evonash.models.settings import SyntheticSpec, UniverseFilter
from evonash.panel import (compute_returns, filter_universe, generate_synthetic, load_panel,
                           read_price_csv, save_panel)
from evonash.run_config import resolve_config


def write_csv(tmp_path, rows, header='date,symbol,close,volume'):
    path = tmp_path / 'prices.csv'
    path.write_text('\n'.join([header] + rows) + '\n', encoding='utf-8')
    return str(path)


def test_load_panel_two_symbols_three_dates(tmp_path):
    rows = []
    for i, d in enumerate(['2021-01-04', '2021-01-05', '2021-01-06']):
        rows.append(f"{d},AAA,{10 + i},100")
        rows.append(f"{d},SPY,{300 + i},1000")
    panel = load_panel(write_csv(tmp_path, rows), 'SPY')
    assert panel.close.shape == (3, 2)
    assert panel.universe == ['AAA']
    assert panel.close.index.is_monotonic_increasing


def test_load_panel_drops_symbol_missing_dates(tmp_path):
    rows = ["2021-01-04,AAA,10,1", "2021-01-04,SPY,300,1",
            "2021-01-05,SPY,301,1", "2021-01-05,BBB,5,1", "2021-01-04,BBB,5,1",
            "2021-01-06,SPY,302,1", "2021-01-06,BBB,6,1"]
    panel = load_panel(write_csv(tmp_path, rows), 'SPY')
    assert panel.symbols == ['BBB', 'SPY']
    assert len(panel.dates) == 3


def test_load_panel_partial_coverage_aligns_intersection(tmp_path):
    rows = ["2021-01-04,AAA,10,1", "2021-01-04,SPY,300,1",
            "2021-01-05,SPY,301,1",
            "2021-01-06,AAA,11,1", "2021-01-06,SPY,302,1"]
    panel = load_panel(write_csv(tmp_path, rows), 'SPY', min_coverage=0.5)
    assert list(panel.dates.strftime('%Y-%m-%d')) == ['2021-01-04', '2021-01-06']


def test_negative_close_reports_line(tmp_path):
    rows = ["2021-01-04,AAA,10,1", "2021-01-04,SPY,-3,1"]
    with pytest.raises(ParseError) as exc:
        read_price_csv(write_csv(tmp_path, rows))
    assert exc.value.line == 3
    assert 'line 3' in str(exc.value)


def test_duplicate_row_is_parse_error(tmp_path):
    rows = ["2021-01-04,AAA,10,1", "2021-01-04,AAA,11,1"]
    with pytest.raises(ParseError) as exc:
        read_price_csv(write_csv(tmp_path, rows))
    assert exc.value.line == 3
    assert 'AAA' in str(exc.value)


def test_bad_header_is_line_one(tmp_path):
    with pytest.raises(ParseError) as exc:
        read_price_csv(write_csv(tmp_path, ["2021-01-04,AAA,10,1"], header='d,s,c,v'))
    assert exc.value.line == 1


def test_missing_benchmark_is_configuration_error(tmp_path):
    rows = ["2021-01-04,AAA,10,1", "2021-01-05,AAA,11,1"]
    with pytest.raises(ConfigurationError):
        load_panel(write_csv(tmp_path, rows), 'SPY')


def test_missing_file_is_data_error(tmp_path):
    with pytest.raises(DataError):
        load_panel(str(tmp_path / 'nope.csv'), 'SPY')


def test_returns_are_clipped():
    spec = SyntheticSpec(n_symbols=2, horizon=5, segments='4:0.5:0')
    panel = generate_synthetic(spec.model_copy(update={'symbol_vol': 0.0}), seed=1)
    returns = compute_returns(panel)
    universe = returns.universe_returns.to_numpy()
    assert np.allclose(universe, 0.20)
    assert len(returns.dates) == 4


def test_zero_vol_spec_gives_constant_prices():
    spec = SyntheticSpec(n_symbols=3, horizon=30, symbol_vol=0.0, benchmark_vol=0.0,
                         segments='30:0:0')
    panel = generate_synthetic(spec, seed=3)
    assert np.allclose(panel.close.to_numpy(), 100.0)


def test_synthetic_is_seed_deterministic():
    spec = SyntheticSpec(n_symbols=4, horizon=60)
    a = generate_synthetic(spec, seed=5)
    b = generate_synthetic(spec, seed=5)
    c = generate_synthetic(spec, seed=6)
    pd.testing.assert_frame_equal(a.close, b.close)
    assert not np.allclose(a.close.to_numpy(), c.close.to_numpy())


def test_synthetic_planted_trend_shows_in_mean():
    spec = SyntheticSpec(n_symbols=6, horizon=2001, segments='2000:0.002:0.01', symbol_vol=0.005)
    market = compute_returns(generate_synthetic(spec, seed=9)).market_returns
    assert market.mean() == pytest.approx(0.002, abs=0.0008)


def test_synthetic_rejects_empty_horizon():
    with pytest.raises(ConfigurationError):
        generate_synthetic(SyntheticSpec(horizon=0), seed=1)


def test_filter_universe_caps_by_dollar_volume():
    spec = SyntheticSpec(n_symbols=5, horizon=40)
    panel = generate_synthetic(spec, seed=2)
    ranked = (panel.close * panel.volume).median()[panel.universe].sort_values(ascending=False)
    out = filter_universe(panel, UniverseFilter(min_history_days=10, max_symbols=2))
    assert set(out.universe) == set(ranked.index[:2])
    assert out.benchmark_symbol in out.symbols


def test_filter_universe_all_removed_is_data_error():
    panel = generate_synthetic(SyntheticSpec(n_symbols=2, horizon=20), seed=2)
    with pytest.raises(DataError):
        filter_universe(panel, UniverseFilter(min_history_days=252))


def test_save_then_load_matches(tmp_path):
    panel = generate_synthetic(SyntheticSpec(n_symbols=3, horizon=25), seed=4)
    path = save_panel(panel, str(tmp_path / 'synth.csv'))
    loaded = load_panel(path, panel.benchmark_symbol)
    pd.testing.assert_frame_equal(loaded.close, panel.close, check_freq=False)
    pd.testing.assert_frame_equal(loaded.volume, panel.volume, check_freq=False)


def test_synthetic_per_symbol_drift_list_and_mapping():
    flat = dict(n_symbols=3, horizon=20, symbol_vol=0.0, segments='20:0:0')
    listed = compute_returns(generate_synthetic(
        SyntheticSpec(symbol_drift=[0.0, 0.01, -0.01], **flat), seed=2)).returns
    np.testing.assert_allclose(listed['S00'], 0.0, atol=1e-15)
    np.testing.assert_allclose(listed['S01'], 0.01, atol=1e-12)
    np.testing.assert_allclose(listed['S02'], -0.01, atol=1e-12)

    mapped = compute_returns(generate_synthetic(
        SyntheticSpec(symbol_drift={'S02': 0.02}, **flat), seed=2)).returns
    np.testing.assert_allclose(mapped['S00'], 0.0, atol=1e-15)
    np.testing.assert_allclose(mapped['S02'], 0.02, atol=1e-12)


def test_synthetic_per_symbol_vol():
    spec = SyntheticSpec(n_symbols=3, horizon=50, symbol_vol=[0.0, 0.02, 0.0], segments='50:0:0')
    returns = compute_returns(generate_synthetic(spec, seed=4)).returns
    assert (returns['S00'] == 0).all() and (returns['S02'] == 0).all()
    assert returns['S01'].std() > 0.01


def test_synthetic_per_symbol_ini_forms():
    cfg = resolve_config("[synthetic]\nn_symbols = 3\nsymbol_drift = S01:0.001\n"
                         "symbol_vol = 0.0, 0.01, 0.0\n")
    assert cfg.synthetic.symbol_drift == {'S01': 0.001}
    assert cfg.synthetic.symbol_vol == [0.0, 0.01, 0.0]
    assert resolve_config("[synthetic]\nsymbol_vol = 0.02\n").synthetic.symbol_vol == 0.02


@pytest.mark.parametrize('line', ['symbol_vol = 0.01, 0.02', 'symbol_drift = S09:0.001',
                                  'symbol_vol = S00:0.01, S01:-0.02'])
def test_synthetic_per_symbol_errors(line):
    with pytest.raises(ConfigurationError):
        spec = resolve_config(f"[synthetic]\nn_symbols = 3\n{line}\n").synthetic
        generate_synthetic(spec, seed=1)
