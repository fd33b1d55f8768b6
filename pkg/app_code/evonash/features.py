"""Trailing-only market features and the four-state regime classifier."""
import logging

import numpy as np
import pandas as pd

from evonash.errors import DataError
from evonash.models.market import FeatureMatrix, Regime, RegimeSeries

# Set up logging
logger = logging.getLogger(__name__)


def _safe_divide(num, den):
    out = num / den.where(den.abs() > 0)
    return out.replace([np.inf, -np.inf], np.nan)


def _long_short_spread(universe, score, cfg):
    """Daily top-minus-bottom tercile return, ranked on yesterday's score"""
    if universe.shape[1] < 2:
        return pd.Series(0.0, index=universe.index)
    ranks = score.shift(1).rank(axis=1, pct=True)
    top = universe.where(ranks > 2 / 3).mean(axis=1)
    bottom = universe.where(ranks <= 1 / 3).mean(axis=1)
    spread = (top - bottom).where(ranks.notna().any(axis=1))
    return spread.rolling(cfg.ls_smooth_window, min_periods=cfg.ls_smooth_window).mean()


def raw_features(returns, panel, cfg):
    """Unstandardized feature frame on the return dates"""
    universe = returns.universe_returns
    market = returns.market_returns
    bench = returns.benchmark_returns
    out = {}

    for w in cfg.windows:
        out[f'mkt_mean_{w}'] = market.rolling(w, min_periods=w).mean()
    for w in cfg.windows[1:]:
        out[f'mkt_vol_{w}'] = market.rolling(w, min_periods=w).std()

    cw = cfg.cross_section_window
    trailing = (1.0 + universe).rolling(cw, min_periods=cw).apply(np.prod, raw=True) - 1.0
    out[f'breadth_{cw}'] = (trailing > 0).mean(axis=1).where(trailing.notna().all(axis=1))
    if universe.shape[1] > 1:
        out[f'dispersion_{cw}'] = trailing.std(axis=1)
    else:
        out[f'dispersion_{cw}'] = trailing.iloc[:, 0] * 0.0

    mw = cfg.moment_window
    out[f'skew_{mw}'] = market.rolling(mw, min_periods=mw).skew()
    out[f'kurt_{mw}'] = market.rolling(mw, min_periods=mw).kurt()

    ew = cfg.excess_window
    out[f'excess_{ew}'] = (market - bench).rolling(ew, min_periods=ew).mean()
    bw = cfg.beta_window
    cov = market.rolling(bw, min_periods=bw).cov(bench)
    var = bench.rolling(bw, min_periods=bw).var()
    out[f'beta_{bw}'] = _safe_divide(cov, var).where(var.notna())

    vw = cfg.volume_window
    vol_names = [c for c in panel.volume.columns if c != panel.benchmark_symbol] \
        or [panel.benchmark_symbol]
    log_volume = np.log1p(panel.volume[vol_names].sum(axis=1)).reindex(returns.dates)
    vmean = log_volume.rolling(vw, min_periods=vw).mean()
    vstd = log_volume.rolling(vw, min_periods=vw).std()
    out[f'volume_z_{vw}'] = _safe_divide(log_volume - vmean, vstd).where(vstd.notna())

    if cfg.ls_factors:
        rw = cfg.ls_rank_window
        momentum = (1.0 + universe).rolling(rw, min_periods=rw).apply(np.prod, raw=True) - 1.0
        realized = universe.rolling(rw, min_periods=rw).std()
        out['ls_momentum'] = _long_short_spread(universe, momentum, cfg)
        out['ls_lowvol'] = _long_short_spread(universe, -realized, cfg)

    return pd.DataFrame(out, index=returns.dates)


def warmup_length(cfg):
    """Return dates consumed before every standardized feature is defined"""
    raw = max(max(cfg.windows), cfg.cross_section_window, cfg.moment_window,
              cfg.excess_window, cfg.beta_window, cfg.volume_window)
    if cfg.ls_factors:
        raw = max(raw, cfg.ls_rank_window + cfg.ls_smooth_window)
    return raw + cfg.zscore_window - 1


def standardize(frame, window, floor):
    """Trailing z-score; flat windows map to 0"""
    mean = frame.rolling(window, min_periods=window).mean()
    std = frame.rolling(window, min_periods=window).std()
    z = (frame - mean) / std.where(std > floor, np.inf)
    return z.where(std.notna())


def build_features(returns, panel, cfg):
    """
    Build the standardized, trailing-only feature matrix.

    Args:
        returns (ReturnPanel): Clipped returns
        panel (PricePanel): Source panel (volume statistics)
        cfg (FeatureConfig): Windows and standardization settings

    Returns:
        FeatureMatrix: Values on the dates after the warm-up
    """
    warmup = warmup_length(cfg)
    if len(returns.dates) <= warmup:
        raise DataError(f"need more than {warmup} return dates for features, "
                        f"got {len(returns.dates)}")

    raw = raw_features(returns, panel, cfg)
    z = standardize(raw, cfg.zscore_window, cfg.std_floor)
    z = z.iloc[warmup:].fillna(0.0)
    z.index.name = 'date'
    logger.debug(f"Built {z.shape[1]} features on {z.shape[0]} dates (warm-up {warmup})")
    return FeatureMatrix(z)


def export_features(features, path):
    """Write the feature matrix as CSV for audit"""
    out = features.values.copy()
    out.index = out.index.strftime('%Y-%m-%d')
    out.to_csv(path, index_label='date', lineterminator='\n')
    return path


def label_regime(bar_r, sigma, sigma_bar, th):
    """Directional labels take precedence over SHOCK"""
    if bar_r >= th.theta_bull:
        return Regime.BULL
    if bar_r <= th.theta_bear:
        return Regime.BEAR
    if sigma > th.kappa_shock * sigma_bar:
        return Regime.SHOCK
    return Regime.SIDEWAYS


def classify_regime(returns, th, window=20):
    """
    Label each date BULL, BEAR, SHOCK or SIDEWAYS.

    Args:
        returns (ReturnPanel): Clipped returns
        th (RegimeThresholds): Thresholds
        window (int): Trailing window for bar_r and sigma

    Returns:
        RegimeSeries: Labels from the first date with a full window
    """
    market = returns.market_returns
    bar_r = market.rolling(window, min_periods=window).mean()
    sigma = market.rolling(window, min_periods=window).std()
    frame = pd.DataFrame({'bar_r': bar_r, 'sigma': sigma}).dropna()
    frame['sigma_bar'] = frame['sigma'].expanding().mean()

    bull = frame['bar_r'] >= th.theta_bull
    bear = frame['bar_r'] <= th.theta_bear
    shock = frame['sigma'] > th.kappa_shock * frame['sigma_bar']
    frame['label'] = np.select([bull, bear, shock],
                               [Regime.BULL.value, Regime.BEAR.value, Regime.SHOCK.value],
                               default=Regime.SIDEWAYS.value)
    frame.index.name = 'date'
    return RegimeSeries(frame[['label', 'bar_r', 'sigma', 'sigma_bar']])
