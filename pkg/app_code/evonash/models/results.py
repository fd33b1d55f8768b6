"""Result types produced by execution, statistics and the walk-forward loop."""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from evonash.models.base import BaseModel, to_builtin

DAILY_COLUMNS = ['strategy_return', 'benchmark_return', 'position', 'prev_position',
                 'market_return', 'sigma']


@dataclass(eq=False)
class PnLSeries:
    """Daily strategy returns with the executed positions.

    ``frame`` columns: pnl, position, prev_position, turnover.
    """
    frame: pd.DataFrame

    @property
    def dates(self):
        return self.frame.index

    @property
    def pnl(self):
        return self.frame['pnl']

    @property
    def positions(self):
        return self.frame['position']

    @property
    def turnover(self):
        return self.frame['turnover']

    def slice(self, start, stop=None):
        return PnLSeries(self.frame.iloc[start:stop])


@dataclass
class MetricSet(BaseModel):
    excess_sharpe: float = 0.0
    excess_cum_return: float = 0.0
    mean_excess_1d: float = 0.0
    excess_cvar: float = 0.0
    excess_worst_day: float = 0.0
    beta: float = 0.0
    max_drawdown: float = 0.0
    down_dev: float = 0.0
    annualized_return: float = 0.0
    sharpe: float = 0.0
    cum_return: float = 0.0
    benchmark_cum_return: float = 0.0
    n_days: int = 0


@dataclass
class TestResult(BaseModel):
    __test__ = False

    method: str
    statistic: float
    p_value: float
    n_bootstrap: Optional[int] = None
    lag: Optional[int] = None
    mean_block_length: Optional[float] = None
    n_models: int = 1
    excluded: List[int] = field(default_factory=list)


@dataclass
class StressResult(BaseModel):
    scenario: str
    excess_sharpe: float
    delta_excess_sharpe: float
    excess_cum_return: float
    delta_excess_cum_return: float


@dataclass(eq=False)
class WindowResult:
    """One walk-forward window after its checkpoint was frozen and tested"""
    index: int
    fit_range: List[str]
    val_range: List[str]
    test_range: List[str]
    checkpoint_id: str
    validation_score: float
    metrics: MetricSet
    hit_ratio: float
    daily: pd.DataFrame
    gap_trace: List[float] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def excess_sharpe(self):
        return self.metrics.excess_sharpe

    def summary_row(self):
        row = {
            'window': self.index,
            'fit_start': self.fit_range[0], 'fit_end': self.fit_range[1],
            'val_start': self.val_range[0], 'val_end': self.val_range[1],
            'test_start': self.test_range[0], 'test_end': self.test_range[1],
            'checkpoint': self.checkpoint_id,
            'validation_score': self.validation_score,
            'hit_ratio': self.hit_ratio,
        }
        row.update(self.metrics.to_dict())
        return row

    def to_dict(self):
        """Convert result to a JSON-safe dictionary (used by the task queue)"""
        daily = self.daily.reset_index()
        daily['date'] = daily['date'].dt.strftime('%Y-%m-%d')
        return to_builtin({
            'index': self.index,
            'fit_range': self.fit_range,
            'val_range': self.val_range,
            'test_range': self.test_range,
            'checkpoint_id': self.checkpoint_id,
            'validation_score': self.validation_score,
            'metrics': self.metrics.to_dict(),
            'hit_ratio': self.hit_ratio,
            'daily': daily.to_dict(orient='list'),
            'gap_trace': self.gap_trace,
            'diagnostics': self.diagnostics,
        })

    @classmethod
    def from_dict(cls, data):
        daily = pd.DataFrame(data['daily'])
        daily['date'] = pd.to_datetime(daily['date'])
        daily = daily.set_index('date')[DAILY_COLUMNS].astype(float)
        return cls(
            index=int(data['index']),
            fit_range=list(data['fit_range']),
            val_range=list(data['val_range']),
            test_range=list(data['test_range']),
            checkpoint_id=data['checkpoint_id'],
            validation_score=float(data['validation_score']),
            metrics=MetricSet.from_dict(data['metrics']),
            hit_ratio=float(data['hit_ratio']),
            daily=daily,
            gap_trace=list(data.get('gap_trace', [])),
            diagnostics=dict(data.get('diagnostics', {})),
        )


@dataclass(eq=False)
class WalkForwardReport:
    """Aggregates over windows plus the stitched out-of-sample series"""
    windows: List[WindowResult]
    mean_ex_sharpe: float
    std_ex_sharpe: float
    median_ex_sharpe: float
    robust_score: float
    mean_beta: float
    pos_ratio: float
    mean_hit_ratio: float
    stitched_ex_sharpe: float
    cum_return: float
    benchmark_cum_return: float
    annualized_return: float
    benchmark_annualized_return: float
    daily: pd.DataFrame
    label: str = 'evonash'

    @property
    def n_windows(self):
        return len(self.windows)

    @property
    def window_sharpes(self):
        return np.array([w.excess_sharpe for w in self.windows])

    def summary(self):
        return to_builtin({
            'label': self.label,
            'n_windows': self.n_windows,
            'n_oos_days': len(self.daily),
            'MeanExSharpe': self.mean_ex_sharpe,
            'StdExSharpe': self.std_ex_sharpe,
            'MedianExSharpe': self.median_ex_sharpe,
            'RobustScore': self.robust_score,
            'MeanBeta': self.mean_beta,
            'PosRatio': self.pos_ratio,
            'MeanHitRatio': self.mean_hit_ratio,
            'StitchedExSharpe': self.stitched_ex_sharpe,
            'CumReturn': self.cum_return,
            'BenchmarkCumReturn': self.benchmark_cum_return,
            'AnnualizedReturn': self.annualized_return,
            'BenchmarkAnnualizedReturn': self.benchmark_annualized_return,
        })
