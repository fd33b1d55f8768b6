"""Pydantic configuration models for a run.

Every model has complete defaults so an empty run file resolves. Values come
from the resolved configuration table where one exists; the rest are
documented engine defaults.
"""
from datetime import date
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _split_list(value):
    """Accept comma-separated strings from INI files as lists"""
    if isinstance(value, str):
        return [item.strip() for item in value.split(',') if item.strip()]
    return value


class ConfigModel(BaseModel):
    """Base class for immutable, strictly keyed configuration sections"""
    model_config = ConfigDict(frozen=True, extra='forbid')


# --- panel -----------------------------------------------------------------

class UniverseFilter(ConfigModel):
    min_history_days: int = Field(252, gt=0)
    min_median_price: float = Field(5.0, gt=0)
    max_symbols: int = Field(39, gt=0)


class Segment(ConfigModel):
    """One piece of a piecewise market-drift schedule"""
    length: int = Field(gt=0)
    drift: float = 0.0
    vol: float = Field(0.01, ge=0)


DEFAULT_SYMBOL_DRIFT = 0.0
DEFAULT_SYMBOL_VOL = 0.01

# One value for every symbol, a list in symbol order, or {symbol: value}
PerSymbol = Union[float, List[float], Dict[str, float]]


def synthetic_symbols(n_symbols):
    return [f"S{i:02d}" for i in range(n_symbols)]


def _per_symbol_value(value):
    # INI forms: "0.01", "0.01, 0.02, ..." or "S00:0.01, S03:0.02"
    if not isinstance(value, str):
        return value
    items = _split_list(value)
    if any(':' in item for item in items):
        pairs = [item.split(':', 1) for item in items]
        return {key.strip(): val.strip() for key, val in pairs}
    if len(items) > 1 or ',' in value:
        return items
    return value


class SyntheticSpec(ConfigModel):
    n_symbols: int = Field(8, ge=1)
    horizon: int = 800
    start_date: date = date(2012, 1, 3)
    initial_price: float = Field(100.0, gt=0)
    symbol_drift: PerSymbol = DEFAULT_SYMBOL_DRIFT
    symbol_vol: PerSymbol = DEFAULT_SYMBOL_VOL
    market_beta: float = 1.0
    segments: List[Segment] = Field(default_factory=list)
    cycle_segments: bool = True
    benchmark_symbol: str = 'BENCH'
    benchmark_drift: float = 0.0
    benchmark_vol: float = 0.008
    benchmark_market_corr: float = Field(0.8, ge=-1, le=1)
    base_volume: float = Field(1.0e6, gt=0)

    _per_symbol = field_validator('symbol_drift', 'symbol_vol', mode='before')(_per_symbol_value)

    @model_validator(mode='after')
    def _per_symbol_shapes(self):
        names = set(synthetic_symbols(self.n_symbols))
        for field_name in ('symbol_drift', 'symbol_vol'):
            value = getattr(self, field_name)
            if isinstance(value, list) and len(value) != self.n_symbols:
                raise ValueError(f"{field_name} lists {len(value)} values for {self.n_symbols} symbols")
            if isinstance(value, dict) and set(value) - names:
                unknown = ', '.join(sorted(set(value) - names))
                raise ValueError(f"{field_name} names unknown symbols: {unknown}")
        return self

    @field_validator('segments', mode='before')
    @classmethod
    def _parse_segments(cls, value):
        # INI form: "length:drift:vol, length:drift:vol"
        if isinstance(value, str):
            parsed = []
            for chunk in _split_list(value):
                parts = chunk.split(':')
                if len(parts) != 3:
                    raise ValueError(f"segment '{chunk}' must be length:drift:vol")
                parsed.append({'length': int(parts[0]), 'drift': float(parts[1]),
                               'vol': float(parts[2])})
            return parsed
        return value


class DataConfig(ConfigModel):
    source: Literal['synthetic', 'csv'] = 'synthetic'
    csv_path: Optional[str] = None
    benchmark: str = 'BENCH'
    min_coverage: float = Field(1.0, gt=0, le=1)
    apply_universe_filter: bool = True

    @model_validator(mode='after')
    def _csv_needs_path(self):
        if self.source == 'csv' and not self.csv_path:
            raise ValueError("data.csv_path is required when data.source = csv")
        return self


# --- features ----------------------------------------------------------------

class FeatureConfig(ConfigModel):
    windows: List[int] = Field(default_factory=lambda: [5, 20, 60])
    zscore_window: int = Field(60, ge=2)
    std_floor: float = Field(1e-8, gt=0)
    ls_factors: bool = True
    ls_rank_window: int = Field(60, ge=2)
    ls_smooth_window: int = Field(20, ge=1)
    cross_section_window: int = Field(20, ge=2)
    moment_window: int = Field(60, ge=4)
    beta_window: int = Field(60, ge=2)
    excess_window: int = Field(20, ge=1)
    volume_window: int = Field(20, ge=2)
    regime_window: int = Field(20, ge=2)

    _split = field_validator('windows', mode='before')(_split_list)

    @field_validator('windows')
    @classmethod
    def _positive_windows(cls, value):
        if not value or any(w < 2 for w in value):
            raise ValueError("feature windows must be >= 2")
        return sorted(set(value))


class RegimeThresholds(ConfigModel):
    theta_bull: float = 0.0008
    theta_bear: float = -0.0008
    kappa_shock: float = 1.75

    @model_validator(mode='after')
    def _ordered(self):
        if not self.theta_bear < self.theta_bull:
            raise ValueError("theta_bear must be below theta_bull")
        if not self.kappa_shock > 1:
            raise ValueError("kappa_shock must exceed 1")
        return self


# --- policy ------------------------------------------------------------------

class SignalBounds(ConfigModel):
    s_min: float = 0.0
    s_max: float = 1.0
    long_only: bool = True

    @model_validator(mode='after')
    def _ordered(self):
        if self.s_max <= 0:
            raise ValueError("s_max must be positive")
        if self.long_only and not 0 <= self.s_min <= self.s_max:
            raise ValueError("long-only bounds need 0 <= s_min <= s_max")
        return self


class PolicyInit(ConfigModel):
    weight_range: float = Field(0.1, ge=0)
    tau: float = Field(0.5, gt=0)
    risk_head: bool = True
    ell_min: float = Field(0.5, ge=0)
    ell_max: float = Field(1.5, ge=0)

    @model_validator(mode='after')
    def _ordered(self):
        if self.ell_max < self.ell_min:
            raise ValueError("ell_max must be >= ell_min")
        return self


# --- execution -----------------------------------------------------------------

class TailDelever(ConfigModel):
    drawdown_trigger: float = Field(-0.10, lt=0)
    scale_factor: float = Field(0.5, ge=0, le=1)


class ExecutionConfig(ConfigModel):
    tc_bps: float = Field(3.0, ge=0)
    lambda_risk: float = Field(0.01, ge=0)
    lambda_imp: float = Field(0.0002, ge=0)
    lambda_cap: float = Field(0.0001, ge=0)
    rebalance_days: int = Field(14, ge=1)
    smoothing_alpha: float = Field(0.5, ge=0, le=1)
    vol_target: Optional[float] = Field(None, gt=0)
    tail_delever: Optional[TailDelever] = Field(default_factory=TailDelever)
    sigma_window: int = Field(20, ge=2)
    initial_position: float = 0.0

    @property
    def c_tc(self):
        return self.tc_bps / 10000.0


class StressScenario(ConfigModel):
    name: str
    tc_mult: float = Field(1.0, ge=0, allow_inf_nan=False)
    impact_mult: float = Field(1.0, ge=0, allow_inf_nan=False)
    capacity_mult: float = Field(1.0, ge=0, allow_inf_nan=False)


DEFAULT_STRESS_SCENARIOS = (
    StressScenario(name='base'),
    StressScenario(name='tc_x3', tc_mult=3.0),
    StressScenario(name='impact_x3', impact_mult=3.0),
    StressScenario(name='capacity_x3', capacity_mult=3.0),
    StressScenario(name='all_x2', tc_mult=2.0, impact_mult=2.0, capacity_mult=2.0),
    StressScenario(name='all_x3', tc_mult=3.0, impact_mult=3.0, capacity_mult=3.0),
)


class ScaleGrid(ConfigModel):
    enabled: bool = True
    s_min_scale: float = Field(0.5, gt=0)
    s_max_scale: float = Field(1.6, gt=0)
    n_steps: int = Field(12, ge=0)
    # Objective weights inside J(s)
    lambda_cvar: float = Field(1.0, ge=0)
    lambda_down: float = Field(0.5, ge=0)
    lambda_to: float = Field(0.1, ge=0)
    alpha_cvar: float = Field(0.05, gt=0, lt=1)

    @model_validator(mode='after')
    def _ordered(self):
        if self.s_max_scale < self.s_min_scale:
            raise ValueError("s_max_scale must be >= s_min_scale")
        return self


# --- game / population -----------------------------------------------------------

class PsroConfig(ConfigModel):
    iterations: int = Field(50, ge=1)
    eta: float = Field(0.25, gt=0)


class UtilityWeights(ConfigModel):
    lambda_ex: float = Field(1.0, ge=0)
    lambda_down: float = Field(0.5, ge=0)
    lambda_dd: float = Field(0.5, ge=0)
    lambda_cvar: float = Field(1.0, ge=0)
    lambda_worst: float = Field(1.0, ge=0)
    lambda_con: float = Field(2.0, ge=0)
    alpha_cvar: float = Field(0.05, gt=0, lt=1)
    cvar_floor: float = -0.03
    worst_floor: float = -0.05


class FitnessWeights(ConfigModel):
    lambda_div: float = Field(0.1, ge=0)
    lambda_league: float = Field(1.0, ge=0)
    lambda_beta: float = Field(0.25, ge=0)
    beta_target: float = 0.55


class EvolutionConfig(ConfigModel):
    population_size: int = Field(16, ge=2)
    elite_fraction: float = Field(0.25, gt=0, le=1)
    mutation_scale: float = Field(0.05, ge=0)
    generations_per_round: int = Field(4, ge=1)
    tournament_rounds: int = Field(5, ge=1)
    tau_floor: float = Field(1e-3, gt=0)


# --- league ----------------------------------------------------------------------

class RLConfig(ConfigModel):
    episodes: int = Field(24, ge=1)
    gamma_discount: float = Field(0.9, ge=0, lt=1)
    learn_rate: float = Field(0.1, gt=0, le=1)
    epsilon_explore: float = Field(0.1, ge=0, le=1)
    omega_h: float = Field(0.5, ge=0)
    lambda_pos: float = Field(0.0005, ge=0)
    position_actions: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    leverage_actions: List[float] = Field(default_factory=lambda: [0.5, 1.0, 1.5])
    state_bins: int = Field(3, ge=1)
    opponent_bins: int = Field(3, ge=1)

    _split = field_validator('position_actions', 'leverage_actions', mode='before')(_split_list)


class BRConfig(ConfigModel):
    enabled: bool = True
    method: Literal['ridge', 'rl_hybrid'] = 'rl_hybrid'
    horizon_h: int = Field(21, ge=1)
    ridge_lambda: float = Field(1.0, ge=0)
    blend_weight: float = Field(0.5, ge=0, le=1)
    clip_bound: float = Field(1.0, gt=0)
    rl: RLConfig = Field(default_factory=RLConfig)


# --- signal processing -------------------------------------------------------------

class NeutralizeConfig(ConfigModel):
    enabled: bool = True
    omega: float = Field(0.3, ge=0, le=1)
    lambda_neu: float = Field(1e-4, ge=0)
    factors: List[str] = Field(default_factory=lambda: ['beta_60', 'mkt_mean_20'])

    _split = field_validator('factors', mode='before')(_split_list)


class AmplifyConfig(ConfigModel):
    enabled: bool = True
    tau: float = Field(0.1, ge=0)
    gamma_amp: float = Field(1.6, gt=0)
    gain: float = Field(1.5, ge=1)


class GateConfig(ConfigModel):
    enabled: bool = True
    q_min: float = Field(0.5, gt=0, le=1)
    nu: float = Field(1.0, gt=0)
    confidence_window: int = Field(60, ge=1)


class FeatureQualityConfig(ConfigModel):
    enabled: bool = True
    alpha_fq: float = Field(0.5, ge=0, le=1)
    omega_r: float = Field(0.3, ge=0, le=1)
    epsilon: float = Field(1e-8, gt=0)
    horizon_h: int = Field(21, ge=1)
    min_samples: int = Field(30, ge=3)


class SignalProcessingConfig(ConfigModel):
    neutralize: NeutralizeConfig = Field(default_factory=NeutralizeConfig)
    amplify: AmplifyConfig = Field(default_factory=AmplifyConfig)
    gate: GateConfig = Field(default_factory=GateConfig)
    feature_quality: FeatureQualityConfig = Field(default_factory=FeatureQualityConfig)


# --- stats / selection ---------------------------------------------------------------

class SelectionWeights(ConfigModel):
    lambda1: float = Field(1.0, ge=0)
    lambda2: float = Field(1.0, ge=0)
    lambda3: float = Field(2.0, ge=0)
    lambda_std: float = Field(0.2, ge=0)
    lambda_min: float = Field(0.2, ge=0)


class StatsConfig(ConfigModel):
    n_boot: int = Field(2000, ge=1)
    mean_block: float = Field(10.0, ge=1)
    nw_lag: Optional[int] = Field(None, ge=0)
    ci_level: float = Field(0.95, gt=0, lt=1)


# --- walk-forward ---------------------------------------------------------------------

class PatienceConfig(ConfigModel):
    generation_patience: int = Field(2, ge=0)
    round_patience: int = Field(2, ge=0)


class WalkForwardConfig(ConfigModel):
    train_days: int = Field(252, ge=2)
    test_days: int = Field(21, ge=1)
    step_days: int = Field(21, ge=1)
    max_windows: Optional[int] = Field(120, ge=1)
    val_fraction: float = Field(0.2, gt=0, lt=1)
    patience: PatienceConfig = Field(default_factory=PatienceConfig)

    @model_validator(mode='after')
    def _consistent(self):
        if not self.train_days > self.test_days:
            raise ValueError("train_days must exceed test_days")
        if self.step_days < self.test_days:
            raise ValueError("step_days below test_days would overlap test slices")
        n_fit = int(self.train_days * (1 - self.val_fraction))
        if n_fit < 2 or n_fit >= self.train_days:
            raise ValueError("val_fraction leaves an empty fit or validation split")
        return self


class TrainingConfig(ConfigModel):
    evolution: EvolutionConfig = Field(default_factory=EvolutionConfig)
    psro: PsroConfig = Field(default_factory=PsroConfig)
    utility: UtilityWeights = Field(default_factory=UtilityWeights)
    fitness: FitnessWeights = Field(default_factory=FitnessWeights)
    br: BRConfig = Field(default_factory=BRConfig)
    policy: PolicyInit = Field(default_factory=PolicyInit)
    signal: SignalProcessingConfig = Field(default_factory=SignalProcessingConfig)
    scale: ScaleGrid = Field(default_factory=ScaleGrid)
    selection: SelectionWeights = Field(default_factory=SelectionWeights)
    ensemble_selection: bool = False
    ensemble_top: int = Field(3, ge=1)


class BaselineSpec(ConfigModel):
    kind: Literal['buy_and_hold', 'panel_ridge', 'dqn_lite', 'random_signal', 'zero_signal']
    params: Dict[str, float] = Field(default_factory=dict)


class RunConfig(ConfigModel):
    seed: int = 7
    output_dir: Optional[str] = None
    data: DataConfig = Field(default_factory=DataConfig)
    synthetic: SyntheticSpec = Field(default_factory=SyntheticSpec)
    universe: UniverseFilter = Field(default_factory=UniverseFilter)
    features: FeatureConfig = Field(default_factory=FeatureConfig)
    regimes: RegimeThresholds = Field(default_factory=RegimeThresholds)
    bounds: SignalBounds = Field(default_factory=SignalBounds)
    execution: ExecutionConfig = Field(default_factory=ExecutionConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    walkforward: WalkForwardConfig = Field(default_factory=WalkForwardConfig)
    stats: StatsConfig = Field(default_factory=StatsConfig)
    stress: List[StressScenario] = Field(default_factory=lambda: list(DEFAULT_STRESS_SCENARIOS))
    benchmarks: List[str] = Field(default_factory=list)

    _split = field_validator('benchmarks', mode='before')(_split_list)
