"""Price panel ingestion, screening, synthesis and return computation."""
import logging

import numpy as np
import pandas as pd

from evonash.errors import ConfigurationError, DataError, ParseError
from evonash.models.market import RETURN_CLIP, PricePanel, ReturnPanel
from evonash.models.settings import DEFAULT_SYMBOL_DRIFT, DEFAULT_SYMBOL_VOL, synthetic_symbols

# Set up logging
logger = logging.getLogger(__name__)

CSV_COLUMNS = ['date', 'symbol', 'close', 'volume']


def _parse_number(text, line, column):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ParseError(f"column '{column}' is not a number: {text!r}", line=line)
    if not np.isfinite(value):
        raise ParseError(f"column '{column}' is not finite: {text!r}", line=line)
    return value


def read_price_csv(path):
    """Read and validate the long ``date,symbol,close,volume`` file.

    Returns:
        pd.DataFrame: one row per (date, symbol), sorted by date then symbol
    """
    try:
        raw = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    except FileNotFoundError:
        raise DataError(f"price file not found: {path}")
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty", line=1)
    except pd.errors.ParserError as e:
        raise ParseError(f"malformed row ({e})")

    if list(raw.columns) != CSV_COLUMNS:
        raise ParseError(f"header must be {','.join(CSV_COLUMNS)}", line=1)

    records = []
    for offset, (d, sym, close, vol) in enumerate(raw.itertuples(index=False, name=None)):
        line = offset + 2
        if not d or not sym:
            raise ParseError("missing date or symbol", line=line)
        try:
            stamp = pd.Timestamp(d)
        except (TypeError, ValueError):
            raise ParseError(f"bad date {d!r}", line=line)
        close = _parse_number(close, line, 'close')
        vol = _parse_number(vol, line, 'volume')
        if close <= 0:
            raise ParseError(f"close must be positive, got {close}", line=line)
        if vol < 0:
            raise ParseError(f"volume must be non-negative, got {vol}", line=line)
        records.append((stamp, sym.strip(), close, vol, line))

    frame = pd.DataFrame(records, columns=CSV_COLUMNS + ['line'])
    dupes = frame.duplicated(['date', 'symbol'], keep='first')
    if dupes.any():
        row = frame[dupes].iloc[0]
        raise ParseError(f"duplicate row for ({row['date'].date()}, {row['symbol']})",
                         line=int(row['line']))
    return frame.drop(columns='line').sort_values(['date', 'symbol']).reset_index(drop=True)


def load_panel(path, benchmark, min_coverage=1.0):
    """
    Load a price panel and align it complete-case.

    Symbols covering fewer than ``min_coverage`` of the benchmark's dates
    are dropped, then the panel keeps the dates on which every surviving
    symbol has a row.

    Args:
        path (str): CSV file with header date,symbol,close,volume
        benchmark (str): Benchmark symbol, must be present in the file
        min_coverage (float): Required fraction of benchmark dates

    Returns:
        PricePanel: Aligned panel sorted by date
    """
    frame = read_price_csv(path)
    if benchmark not in set(frame['symbol']):
        raise ConfigurationError(f"benchmark '{benchmark}' not found in {path}")

    close = frame.pivot(index='date', columns='symbol', values='close')
    volume = frame.pivot(index='date', columns='symbol', values='volume')

    counts = close.notna().sum()
    short = counts[counts < 2].index.tolist()
    if benchmark in short:
        raise DataError(f"benchmark '{benchmark}' has fewer than 2 dates")
    if short:
        logger.warning(f"Dropping symbols with fewer than 2 dates: {short}")

    bench_dates = close[benchmark].notna()
    coverage = close[bench_dates].notna().mean()
    keep = [s for s in close.columns
            if s not in short and (s == benchmark or coverage[s] >= min_coverage)]
    dropped = sorted(set(close.columns) - set(keep) - set(short))
    if dropped:
        logger.warning(f"Dropping symbols below {min_coverage:.0%} benchmark coverage: {dropped}")

    close, volume = close[keep], volume[keep]
    complete = close.notna().all(axis=1) & volume.notna().all(axis=1)
    close, volume = close[complete], volume[complete]
    if len(close) == 0:
        raise DataError("no dates on which all symbols have data")
    if len(close) < 2:
        raise DataError("aligned panel has fewer than 2 dates")

    close.index.name = volume.index.name = 'date'
    close.columns.name = volume.columns.name = None
    logger.info(f"Loaded panel {path}: {close.shape[1]} symbols x {close.shape[0]} dates")
    return PricePanel(close.astype(float), volume.astype(float), benchmark)


def save_panel(panel, path):
    """Write a panel in the long CSV schema read by ``load_panel``"""
    close = panel.close.stack().rename('close')
    volume = panel.volume.stack().rename('volume')
    frame = pd.concat([close, volume], axis=1).reset_index()
    frame.columns = CSV_COLUMNS
    frame['date'] = frame['date'].dt.strftime('%Y-%m-%d')
    frame = frame.sort_values(['date', 'symbol'])
    frame.to_csv(path, index=False, lineterminator='\n')
    return path


def compute_returns(panel):
    """Simple returns clipped to +/-20%"""
    returns = panel.close.pct_change().iloc[1:]
    return ReturnPanel(returns.clip(-RETURN_CLIP, RETURN_CLIP), panel.benchmark_symbol)


def filter_universe(panel, f):
    """
    Apply history, price and liquidity screens.

    Args:
        panel (PricePanel): Aligned panel
        f (UniverseFilter): Thresholds; max_symbols caps the tradable
            (non-benchmark) symbols by descending median dollar volume

    Returns:
        PricePanel: Screened panel; the benchmark is always retained
    """
    bench = panel.benchmark_symbol
    history = panel.close.notna().sum()
    median_price = panel.close.median()
    dollar_volume = (panel.close * panel.volume).median()

    survivors = [s for s in panel.universe
                 if history[s] >= f.min_history_days and median_price[s] >= f.min_median_price]
    if panel.universe and not survivors:
        raise DataError("no symbol survives the universe filter")

    if len(survivors) > f.max_symbols:
        ranked = sorted(survivors, key=lambda s: (-dollar_volume[s], s))
        survivors = ranked[:f.max_symbols]

    removed = sorted(set(panel.universe) - set(survivors))
    if removed:
        logger.info(f"Universe filter removed {len(removed)} symbols")
    keep = [s for s in panel.symbols if s in survivors or s == bench]
    return panel.select(keep)


def _segment_schedule(spec, n):
    """Per-day (drift, vol) of the market factor"""
    drift = np.zeros(n)
    vol = np.full(n, 0.01)
    if not spec.segments:
        return drift, vol
    pos, k = 0, 0
    while pos < n:
        if k >= len(spec.segments):
            if not spec.cycle_segments:
                last = spec.segments[-1]
                drift[pos:], vol[pos:] = last.drift, last.vol
                break
            k = 0
        seg = spec.segments[k]
        drift[pos:pos + seg.length] = seg.drift
        vol[pos:pos + seg.length] = seg.vol
        pos += seg.length
        k += 1
    return drift, vol


def _per_symbol(value, symbols, default):
    """Expand a scalar, list or {symbol: value} setting to one value per symbol"""
    if isinstance(value, dict):
        return np.array([value.get(s, default) for s in symbols], dtype=float)
    if isinstance(value, (list, tuple)):
        if len(value) != len(symbols):
            raise ConfigurationError(f"expected {len(symbols)} per-symbol values, got {len(value)}")
        return np.asarray(value, dtype=float)
    return np.full(len(symbols), float(value))


def generate_synthetic(spec, seed):
    """
    Generate a deterministic synthetic panel.

    Tradable symbols load on a market factor whose drift and volatility
    follow the segment schedule; the benchmark shares the factor's shocks
    but not its drift.

    Args:
        spec (SyntheticSpec): Panel description; ``symbol_drift`` and ``symbol_vol``
            may be scalars, lists in symbol order or {symbol: value} mappings
        seed (int): Random seed

    Returns:
        PricePanel: Panel with ``spec.horizon`` dates
    """
    if spec.horizon <= 0:
        raise ConfigurationError("synthetic horizon must be positive")
    tradable = synthetic_symbols(spec.n_symbols)
    sym_drift = _per_symbol(spec.symbol_drift, tradable, DEFAULT_SYMBOL_DRIFT)
    sym_vol = _per_symbol(spec.symbol_vol, tradable, DEFAULT_SYMBOL_VOL)
    vols = [*sym_vol, spec.benchmark_vol] + [s.vol for s in spec.segments]
    if min(vols) < 0:
        raise ConfigurationError("synthetic volatilities must be non-negative")

    rng = np.random.default_rng(seed)
    n_days, n_sym = spec.horizon - 1, spec.n_symbols
    drift, vol = _segment_schedule(spec, n_days)

    z = rng.standard_normal(n_days)
    eps = rng.standard_normal((n_days, n_sym))
    eta = rng.standard_normal(n_days)
    vol_noise = rng.standard_normal((spec.horizon, n_sym + 1))

    market = drift + vol * z
    sym_ret = sym_drift + spec.market_beta * market[:, None] + sym_vol * eps
    rho = spec.benchmark_market_corr
    bench_ret = spec.benchmark_drift + spec.benchmark_vol * (rho * z + np.sqrt(1 - rho ** 2) * eta)

    rets = np.column_stack([sym_ret, bench_ret]).clip(-0.99, None)
    growth = np.vstack([np.ones((1, n_sym + 1)), 1.0 + rets])
    prices = spec.initial_price * np.cumprod(growth, axis=0)
    volumes = np.round(spec.base_volume * np.exp(0.25 * vol_noise))

    symbols = tradable + [spec.benchmark_symbol]
    dates = pd.bdate_range(spec.start_date, periods=spec.horizon, name='date')
    close = pd.DataFrame(prices, index=dates, columns=symbols)
    volume = pd.DataFrame(volumes, index=dates, columns=symbols)
    order = sorted(symbols)
    return PricePanel(close[order], volume[order], spec.benchmark_symbol)
