"""Market data value types: prices, returns, features and regimes."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd

from evonash.errors import ContractError

RETURN_CLIP = 0.20


class Regime(str, Enum):
    BULL = 'BULL'
    BEAR = 'BEAR'
    SIDEWAYS = 'SIDEWAYS'
    SHOCK = 'SHOCK'


REGIMES = tuple(Regime)


@dataclass(frozen=True)
class PricePanel:
    """Aligned daily close/volume matrices, one column per symbol.

    ``close`` and ``volume`` share the same DatetimeIndex and columns.
    """
    close: pd.DataFrame
    volume: pd.DataFrame
    benchmark_symbol: str

    def __post_init__(self):
        if not self.close.index.equals(self.volume.index) or \
                list(self.close.columns) != list(self.volume.columns):
            raise ContractError("close and volume must share dates and symbols")
        if not self.close.index.is_monotonic_increasing or not self.close.index.is_unique:
            raise ContractError("panel dates must be strictly increasing")
        if self.benchmark_symbol not in self.close.columns:
            raise ContractError(f"benchmark '{self.benchmark_symbol}' not in panel symbols")
        if self.close.isna().any().any() or self.volume.isna().any().any():
            raise ContractError("panel must be complete-case after alignment")
        if (self.close.values <= 0).any():
            raise ContractError("close prices must be positive")

    @property
    def dates(self):
        return self.close.index

    @property
    def symbols(self):
        return list(self.close.columns)

    @property
    def universe(self):
        """Tradable symbols, i.e. everything except the benchmark"""
        return [s for s in self.close.columns if s != self.benchmark_symbol]

    def select(self, symbols):
        symbols = list(symbols)
        return PricePanel(self.close[symbols], self.volume[symbols], self.benchmark_symbol)


@dataclass(frozen=True)
class ReturnPanel:
    """Clipped simple returns; one row fewer than the source panel"""
    returns: pd.DataFrame
    benchmark_symbol: str

    @property
    def dates(self):
        return self.returns.index

    @property
    def benchmark_returns(self):
        return self.returns[self.benchmark_symbol]

    @property
    def universe_returns(self):
        cols = [c for c in self.returns.columns if c != self.benchmark_symbol]
        return self.returns[cols] if cols else self.returns[[self.benchmark_symbol]]

    @property
    def market_returns(self):
        """Equal-weight universe return r_t"""
        return self.universe_returns.mean(axis=1).rename('market')


@dataclass(frozen=True)
class FeatureMatrix:
    values: pd.DataFrame

    def __post_init__(self):
        if not self.values.columns.is_unique:
            raise ContractError("feature names must be unique")
        if not np.isfinite(self.values.to_numpy()).all():
            raise ContractError("feature values must be finite")

    @property
    def dates(self):
        return self.values.index

    @property
    def feature_names(self):
        return list(self.values.columns)

    @property
    def dim(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class RegimeSeries:
    """Regime labels plus the statistics that produced them.

    ``frame`` has columns label, bar_r, sigma, sigma_bar.
    """
    frame: pd.DataFrame

    @property
    def dates(self):
        return self.frame.index

    @property
    def labels(self):
        return self.frame['label']


@dataclass
class MarketDataset:
    """Everything a walk-forward run reads, aligned on the feature dates.

    ``market`` holds the columns market (r_t), benchmark (b_t) and sigma.
    """
    features: FeatureMatrix
    regimes: pd.Series
    market: pd.DataFrame
    panel: PricePanel = field(repr=False, default=None)

    def __post_init__(self):
        idx = self.features.dates
        if not (self.regimes.index.equals(idx) and self.market.index.equals(idx)):
            raise ContractError("dataset components must share the feature dates")

    @property
    def dates(self):
        return self.features.dates

    def __len__(self):
        return len(self.features.dates)
