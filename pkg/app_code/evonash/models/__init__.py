from evonash.models.market import (Regime, REGIMES, RETURN_CLIP, PricePanel, ReturnPanel,
                                   FeatureMatrix, RegimeSeries, MarketDataset)
from evonash.models.policy import AgentPolicy, RiskHead
from evonash.models.game import PayoffMatrix, MetaStrategy, PsroResult
from evonash.models.results import (PnLSeries, MetricSet, TestResult, StressResult,
                                    WindowResult, WalkForwardReport, DAILY_COLUMNS)
from evonash.models.settings import RunConfig
