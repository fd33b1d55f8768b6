"""Walk-forward protocol: dataset preparation, windowing, per-window tournament
training with constrained checkpoint selection, and aggregation."""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional

import numpy as np
import pandas as pd

from evonash.agents.policy import clip_to_bounds, emit_signal, init_population
from evonash.errors import ConfigurationError, ContractError, DataError, LookaheadError
from evonash.execution import optimize_scale, simulate
from evonash.features import build_features, classify_regime
from evonash.game import build_payoff, ensemble_signal, psro_solve
from evonash.models.market import MarketDataset
from evonash.models.results import DAILY_COLUMNS, WalkForwardReport, WindowResult
from evonash.models.settings import BaselineSpec, RunConfig
from evonash.panel import compute_returns, filter_universe, generate_synthetic, load_panel
from evonash.population import (agent_betas, constraint_violation, diversity_scores, evolve_step,
                                fitness, inject_br, league_advantage, rank_by_fitness,
                                strategy_utility)
from evonash.signalproc import amplify_signal, feature_quality_weights, fit_neutralizer, quality_gate
from evonash.stats import (annualized_return, compute_metrics, excess_cum_return, excess_sharpe,
                           hit_ratio, robust_score, selection_score)

# Set up logging
logger = logging.getLogger(__name__)


# --- data ------------------------------------------------------------------

def load_source_panel(cfg):
    """Synthetic or CSV panel, before universe filtering"""
    if cfg.data.source == 'synthetic':
        return generate_synthetic(cfg.synthetic, cfg.seed)
    if not cfg.data.csv_path:
        raise ConfigurationError("data.source is csv but data.csv_path is empty")
    return load_panel(cfg.data.csv_path, cfg.data.benchmark, cfg.data.min_coverage)


def prepare_dataset(cfg, panel=None):
    """
    Build the aligned dataset every window reads from.

    Args:
        cfg (RunConfig): Resolved run configuration
        panel (PricePanel): Optional pre-loaded panel

    Returns:
        MarketDataset: Features, regime labels and the market frame
            (market, benchmark, sigma) on the feature dates
    """
    panel = panel if panel is not None else load_source_panel(cfg)
    if cfg.data.apply_universe_filter:
        panel = filter_universe(panel, cfg.universe)

    returns = compute_returns(panel)
    features = build_features(returns, panel, cfg.features)
    regimes = classify_regime(returns, cfg.regimes, cfg.features.regime_window).labels
    market = returns.market_returns
    sigma = market.rolling(cfg.execution.sigma_window, min_periods=2).std().fillna(0.0)

    dates = features.dates
    labels = regimes.reindex(dates)
    if labels.isna().any():
        raise DataError("regime labels are undefined on some feature dates")
    frame = pd.DataFrame({
        'market': market.reindex(dates),
        'benchmark': returns.benchmark_returns.reindex(dates),
        'sigma': sigma.reindex(dates),
    }, index=dates)
    logger.info(f"Prepared dataset: {len(dates)} dates, {features.dim} features, "
                f"{len(panel.universe)} tradable symbols")
    return MarketDataset(features=features, regimes=labels.rename('regime'), market=frame,
                         panel=panel)


# --- windows ---------------------------------------------------------------

@dataclass(frozen=True)
class WindowSpec:
    """Row ranges of one window; each range is [start, stop)"""
    index: int
    fit: tuple
    val: tuple
    test: tuple

    @property
    def n_fit(self):
        return self.fit[1] - self.fit[0]

    @property
    def n_train(self):
        return self.val[1] - self.fit[0]


def split_train(train_days, val_fraction):
    """(fit, val) lengths with the fit side rounded down"""
    n_fit = int(math.floor((1.0 - val_fraction) * train_days + 1e-9))
    if n_fit < 2 or train_days - n_fit < 2:
        raise ConfigurationError(f"train_days={train_days} with val_fraction={val_fraction} "
                                 f"leaves too few fit or validation days")
    return n_fit, train_days - n_fit


def window_count(n_dates, cfg):
    span = cfg.train_days + cfg.test_days
    if n_dates < span:
        return 0
    count = (n_dates - span) // cfg.step_days + 1
    return count if cfg.max_windows is None else min(count, cfg.max_windows)


def make_windows(dates, cfg):
    """
    Rolling windows starting every ``step_days`` rows.

    Args:
        dates (sequence or int): Dataset dates, or their count
        cfg (WalkForwardConfig): Window lengths

    Returns:
        list: WindowSpec per window
    """
    n = dates if isinstance(dates, (int, np.integer)) else len(dates)
    count = window_count(n, cfg)
    if count == 0:
        raise DataError(f"{n} dates cannot hold one window of "
                        f"{cfg.train_days} + {cfg.test_days} days")
    n_fit, _ = split_train(cfg.train_days, cfg.val_fraction)
    windows = []
    for w in range(count):
        start = w * cfg.step_days
        train_end = start + cfg.train_days
        windows.append(WindowSpec(index=w, fit=(start, start + n_fit), val=(start + n_fit, train_end),
                                  test=(train_end, train_end + cfg.test_days)))
    return windows


@dataclass(frozen=True)
class WindowData:
    features: pd.DataFrame
    regimes: pd.Series
    market: pd.DataFrame

    def head(self, n):
        return WindowData(self.features.iloc[:n], self.regimes.iloc[:n], self.market.iloc[:n])

    def tail(self, n):
        return WindowData(self.features.iloc[n:], self.regimes.iloc[n:], self.market.iloc[n:])


class SealedView:
    """Read access to one window; the test rows stay sealed until ``unseal``"""

    def __init__(self, dataset, window):
        self.dataset = dataset
        self.window = window
        self._sealed = True

    @property
    def sealed(self):
        return self._sealed

    def _rows(self, start, stop):
        return WindowData(self.dataset.features.values.iloc[start:stop],
                          self.dataset.regimes.iloc[start:stop],
                          self.dataset.market.iloc[start:stop])

    def fit(self):
        return self._rows(*self.window.fit)

    def validation(self):
        return self._rows(*self.window.val)

    def train(self):
        return self._rows(self.window.fit[0], self.window.val[1])

    def _check(self, what):
        if self._sealed:
            raise LookaheadError(f"window {self.window.index}: {what} read before the checkpoint was frozen")

    def test(self):
        self._check("test rows")
        return self._rows(*self.window.test)

    def span(self):
        """Fit through test rows, contiguous"""
        self._check("test rows")
        return self._rows(self.window.fit[0], self.window.test[1])

    def unseal(self):
        self._sealed = False

    def date_range(self, rows):
        dates = self.dataset.dates
        return [dates[rows[0]].strftime('%Y-%m-%d'), dates[rows[1] - 1].strftime('%Y-%m-%d')]


# --- signal pipeline -------------------------------------------------------

def postprocess_signal(ensemble, factors, n_fit, scfg, bounds):
    """
    Neutralize, amplify, gate and clip an ensemble signal.

    The neutralizer is estimated on the first ``n_fit`` rows; the gate uses a
    trailing rank. Rows after ``n_fit`` therefore never influence earlier ones.

    Returns:
        tuple: (signal, Neutralizer or None)
    """
    signal = ensemble
    neutralizer = None
    if scfg.neutralize.enabled:
        neutralizer = fit_neutralizer(signal.iloc[:n_fit], factors.iloc[:n_fit], scfg.neutralize)
        signal = neutralizer.apply(signal, factors)
    if scfg.amplify.enabled:
        signal = amplify_signal(signal, scfg.amplify)
    if scfg.gate.enabled:
        signal = quality_gate(signal, scfg.gate)
    return clip_to_bounds(signal, bounds).rename('signal'), neutralizer


@dataclass(eq=False)
class Checkpoint:
    id: str
    score: float
    population: tuple
    m: np.ndarray
    scale: float
    val_excess_sharpe: float = 0.0


@dataclass(eq=False)
class Evaluation:
    """Fit-split evaluation of one population"""
    population: list
    signals: list
    pnls: list
    payoff: object
    psro: object
    fitness: np.ndarray
    ensemble: pd.Series = None


@dataclass
class WindowTrainer:
    """Tournament training for one window; reads only through ``view``"""
    view: SealedView
    cfg: RunConfig
    rng: np.random.Generator
    registry: object = None
    feature_weights: pd.Series = None
    checkpoints: List[Checkpoint] = field(default_factory=list)
    generations: list = field(default_factory=list)
    br_traces: list = field(default_factory=list)
    gap_trace: list = field(default_factory=list)

    @property
    def training(self):
        return self.cfg.training

    def weighted(self, data):
        return data.features * self.feature_weights

    def fit_weights(self):
        fit = self.view.fit()
        fq = self.training.signal.feature_quality
        if fq.enabled:
            self.feature_weights = feature_quality_weights(fit.features, fit.market['market'],
                                                           fit.regimes, fq)
        else:
            self.feature_weights = pd.Series(1.0, index=fit.features.columns, name='feature_weight')

    def evaluate(self, population):
        fit = self.view.fit()
        X = self.weighted(fit)
        bench = fit.market['benchmark'].to_numpy()
        execution = self.cfg.execution
        signals = [emit_signal(a, X, fit.regimes, self.cfg.bounds) for a in population]
        pnls = [simulate(s, fit.market, execution) for s in signals]
        payoff = build_payoff([p.pnl.mean() for p in pnls])
        psro = psro_solve(payoff, self.training.psro.eta, self.training.psro.iterations)

        ensemble = ensemble_signal(psro.average, signals)
        ensemble_pnl = simulate(ensemble, fit.market, execution)
        U = [strategy_utility(p, bench, self.training.utility) for p in pnls]
        F = fitness(payoff, psro.average, U, diversity_scores(signals),
                    league_advantage(pnls, ensemble_pnl), agent_betas(pnls, bench),
                    self.training.fitness)
        return Evaluation(population=population, signals=signals, pnls=pnls, payoff=payoff,
                          psro=psro, fitness=F, ensemble=ensemble)

    def candidate_signal(self, population, m, data, n_fit):
        X = self.weighted(data)
        signals = [emit_signal(a, X, data.regimes, self.cfg.bounds) for a in population]
        return postprocess_signal(ensemble_signal(m, signals), data.features, n_fit,
                                  self.training.signal, self.cfg.bounds)

    def validate(self, evaluation, checkpoint_id):
        """Build the post-processed ensemble, pick a scale on fit, score on validation"""
        train = self.view.train()
        n_fit = self.view.window.n_fit
        m = evaluation.psro.average
        signal, neutralizer = self.candidate_signal(evaluation.population, m, train, n_fit)

        scale = 1.0
        if self.training.scale.enabled:
            fit = train.head(n_fit)
            scale, _ = optimize_scale(signal.iloc[:n_fit], fit.market, self.cfg.execution,
                                      self.training.scale)
        sim = simulate(signal, train.market, self.cfg.execution, scale=scale)
        val_pnl = sim.pnl.iloc[n_fit:].to_numpy()
        val_bench = train.market['benchmark'].iloc[n_fit:].to_numpy()
        metrics = compute_metrics(val_pnl, val_bench, self.training.utility.alpha_cvar)
        violation = constraint_violation(val_pnl, val_bench, self.training.utility)
        score = selection_score(metrics, violation, self.training.selection)
        checkpoint = Checkpoint(id=checkpoint_id, score=float(score),
                                population=tuple(evaluation.population), m=np.array(m),
                                scale=float(scale), val_excess_sharpe=metrics.excess_sharpe)
        return checkpoint, metrics, violation, neutralizer

    def best_response(self, evaluation, round_index):
        br_cfg = self.training.br
        fit = self.view.fit()
        template = evaluation.population[int(rank_by_fitness(evaluation.fitness)[0])]
        registry = self.registry
        if registry is None:
            from evonash.agents import agent_registry as registry
        trainer = registry.get_agent(br_cfg.method, role='best_response',
                                     window=self.view.window.index)
        result = trainer.process({
            'features': self.weighted(fit),
            'regimes': fit.regimes,
            'returns': fit.market['market'],
            'meta': evaluation.psro.average,
            'signals': evaluation.signals,
            'config': br_cfg,
            'template': template,
            'rng': self.rng,
            'cost': self.cfg.execution.c_tc,
            'bounds': self.cfg.bounds,
            'agent_id': f"br-r{round_index}",
        })
        self.br_traces.append({'round': round_index, 'method': br_cfg.method,
                               'template': template.id, **result['trace']})
        return result['agent']

    def run(self):
        """
        Run the tournament and return the frozen checkpoint.

        Returns:
            Checkpoint: Best validation score; ties keep the earlier one
        """
        self.fit_weights()
        evo = self.training.evolution
        patience = self.cfg.walkforward.patience
        population = init_population(evo.population_size, self.view.dataset.features.dim,
                                     self.rng, self.training.policy)
        best = None
        round_stall = 0
        for round_index in range(evo.tournament_rounds):
            improved_round = False
            gen_stall = 0
            evaluation = None
            for gen in range(evo.generations_per_round):
                evaluation = self.evaluate(population)
                checkpoint, metrics, violation, neutralizer = self.validate(
                    evaluation, f"r{round_index}g{gen}")
                self.checkpoints.append(checkpoint)
                self.gap_trace.append(evaluation.psro.average_gap)
                self.generations.append({
                    'round': round_index, 'generation': gen, 'checkpoint': checkpoint.id,
                    'validation_score': checkpoint.score,
                    'val_excess_sharpe': metrics.excess_sharpe, 'val_beta': metrics.beta,
                    'violation': violation, 'scale': checkpoint.scale,
                    'nash_gap': evaluation.psro.average_gap, 'gap_bound': evaluation.psro.bound,
                    'neutralizer': neutralizer.to_dict() if neutralizer is not None else None,
                })
                logger.debug(f"Window {self.view.window.index} {checkpoint.id}: "
                             f"S={checkpoint.score:.4f} gap={evaluation.psro.average_gap:.2e}")

                if best is None or checkpoint.score > best.score:
                    best = checkpoint
                    improved_round = True
                    gen_stall = 0
                else:
                    gen_stall += 1
                if gen_stall >= patience.generation_patience:
                    break
                population = evolve_step(population, evaluation.fitness, evo, self.rng,
                                         tag=f"r{round_index}g{gen}")

            round_stall = 0 if improved_round else round_stall + 1
            if round_stall >= patience.round_patience:
                break
            if self.training.br.enabled:
                if evaluation.population is not population:
                    evaluation = self.evaluate(population)
                br_agent = self.best_response(evaluation, round_index)
                population = inject_br(population, br_agent, evaluation.fitness, evo.elite_fraction)
        return best

    def frozen_signal(self, best):
        """Signal of the frozen selection over fit through test rows"""
        span = self.view.span()
        n_fit = self.view.window.n_fit
        if not self.training.ensemble_selection:
            signal, _ = self.candidate_signal(best.population, best.m, span, n_fit)
            return signal * best.scale, [best.id]
        order = sorted(range(len(self.checkpoints)), key=lambda i: -self.checkpoints[i].score)
        chosen = [self.checkpoints[i] for i in order[:self.training.ensemble_top]]
        parts = [self.candidate_signal(c.population, c.m, span, n_fit)[0] * c.scale for c in chosen]
        return sum(parts) / len(parts), [c.id for c in chosen]


def _daily_frame(sim, market):
    daily = pd.DataFrame({
        'strategy_return': sim.pnl.to_numpy(),
        'benchmark_return': market['benchmark'].to_numpy(),
        'position': sim.positions.to_numpy(),
        'prev_position': sim.frame['prev_position'].to_numpy(),
        'market_return': market['market'].to_numpy(),
        'sigma': market['sigma'].to_numpy(),
    }, index=market.index)[DAILY_COLUMNS]
    daily.index.name = 'date'
    return daily


def _test_result(view, signal, cfg, checkpoint_id, score, gap_trace, diagnostics):
    """Simulate fit..test contiguously and keep the test rows"""
    span = view.span()
    n_train = view.window.n_train
    sim = simulate(signal, span.market, cfg.execution)
    daily = _daily_frame(sim, span.market).iloc[n_train:]
    metrics = compute_metrics(daily['strategy_return'], daily['benchmark_return'],
                              cfg.training.utility.alpha_cvar)
    hits = hit_ratio(daily['prev_position'], daily['market_return'], daily['benchmark_return'])
    w = view.window
    return WindowResult(index=w.index, fit_range=view.date_range(w.fit),
                        val_range=view.date_range(w.val), test_range=view.date_range(w.test),
                        checkpoint_id=checkpoint_id, validation_score=float(score),
                        metrics=metrics, hit_ratio=hits, daily=daily, gap_trace=list(gap_trace),
                        diagnostics=diagnostics)


def window_rng(seed, index):
    return np.random.default_rng([seed, index])


def run_window(dataset, window, cfg, registry=None):
    """
    Train, select and test one walk-forward window.

    Args:
        dataset (MarketDataset): Prepared data
        window (WindowSpec): Row ranges
        cfg (RunConfig): Resolved configuration
        registry (AgentRegistry): Best-response trainers; defaults to the
            package registry

    Returns:
        WindowResult
    """
    view = SealedView(dataset, window)
    trainer = WindowTrainer(view=view, cfg=cfg, rng=window_rng(cfg.seed, window.index),
                            registry=registry)
    best = trainer.run()

    view.unseal()
    signal, members = trainer.frozen_signal(best)
    diagnostics = {
        'generations': trainer.generations,
        'feature_weights': trainer.feature_weights.to_dict(),
        'best_response': trainer.br_traces,
        'selected': members,
        'scale': best.scale,
    }
    checkpoint_id = best.id if len(members) == 1 else '+'.join(members)
    result = _test_result(view, signal, cfg, checkpoint_id, best.score, trainer.gap_trace,
                          diagnostics)
    logger.info(f"Window {window.index}: checkpoint {checkpoint_id}, val S {best.score:.4f}, "
                f"test ExSharpe {result.metrics.excess_sharpe:.4f}")
    return result


def run_baseline_window(dataset, window, cfg, spec, registry=None):
    """Run one BaselineSpec through a window with the engine's execution and metrics"""
    if registry is None:
        from evonash.agents import agent_registry as registry
    agent = registry.get_agent(spec.kind, role='baseline', window=window.index)
    view = SealedView(dataset, window)
    view.unseal()
    span = view.span()
    data = {
        'features': span.features,
        'regimes': span.regimes,
        'market': span.market,
        'train_rows': window.n_train,
        'bounds': cfg.bounds,
        'execution': cfg.execution,
        'br': cfg.training.br,
        'rng': window_rng(cfg.seed, window.index),
        'params': dict(spec.params),
    }
    signal = agent.process(data)['signal']

    sim = simulate(signal, span.market, cfg.execution)
    n_fit, n_train = window.n_fit, window.n_train
    val_pnl = sim.pnl.iloc[n_fit:n_train].to_numpy()
    val_bench = span.market['benchmark'].iloc[n_fit:n_train].to_numpy()
    utility = cfg.training.utility
    score = selection_score(compute_metrics(val_pnl, val_bench, utility.alpha_cvar),
                            constraint_violation(val_pnl, val_bench, utility),
                            cfg.training.selection)
    return _test_result(view, signal, cfg, spec.kind, score, [], {'baseline': spec.kind,
                                                                  'params': dict(spec.params)})


# --- aggregation -----------------------------------------------------------

def aggregate(results, w, label='evonash'):
    """
    Combine window results into the walk-forward report.

    Args:
        results (list): WindowResult objects
        w (SelectionWeights): Robust-score weights
        label (str): Report label

    Returns:
        WalkForwardReport
    """
    if not results:
        raise ContractError("aggregate needs at least one window")
    results = sorted(results, key=lambda r: r.index)
    sharpes = np.array([r.excess_sharpe for r in results])
    daily = pd.concat([r.daily for r in results])
    pnl = daily['strategy_return'].to_numpy()
    bench = daily['benchmark_return'].to_numpy()
    return WalkForwardReport(
        windows=results,
        mean_ex_sharpe=float(sharpes.mean()),
        std_ex_sharpe=float(sharpes.std(ddof=1)) if len(sharpes) > 1 else 0.0,
        median_ex_sharpe=float(np.median(sharpes)),
        robust_score=robust_score(sharpes, w),
        mean_beta=float(np.mean([r.metrics.beta for r in results])),
        pos_ratio=float(np.mean(sharpes > 0)),
        mean_hit_ratio=float(np.mean([r.hit_ratio for r in results])),
        stitched_ex_sharpe=excess_sharpe(pnl, bench),
        cum_return=float(np.prod(1.0 + pnl) - 1.0),
        benchmark_cum_return=float(np.prod(1.0 + bench) - 1.0),
        annualized_return=annualized_return(pnl),
        benchmark_annualized_return=annualized_return(bench),
        daily=daily,
        label=label,
    )


def cross_benchmark_eval(pnl, benchmarks):
    """
    Compare a fixed OOS return series against several benchmarks.

    Args:
        pnl (pd.Series): Stitched strategy returns indexed by date
        benchmarks (dict): Name -> pd.Series of benchmark returns

    Returns:
        pd.DataFrame: Benchmark, ExcessSharpe, ExcessCumReturn, MeanExcess(1d)
    """
    rows = []
    for name, series in benchmarks.items():
        missing = pnl.index.difference(series.index)
        if len(missing):
            raise DataError(f"benchmark '{name}' is missing {len(missing)} OOS dates "
                            f"(first {missing[0].strftime('%Y-%m-%d')})")
        b = series.reindex(pnl.index).to_numpy(dtype=float)
        p = pnl.to_numpy(dtype=float)
        rows.append({'Benchmark': name, 'ExcessSharpe': excess_sharpe(p, b),
                     'ExcessCumReturn': excess_cum_return(p, b),
                     'MeanExcess(1d)': float(np.mean(p - b))})
    return pd.DataFrame(rows, columns=['Benchmark', 'ExcessSharpe', 'ExcessCumReturn',
                                       'MeanExcess(1d)'])


def annual_returns(daily):
    """Calendar-year compounded strategy and benchmark returns; inner years are full"""
    years = daily.index.year
    grouped = daily.groupby(years)
    table = pd.DataFrame({
        'strategy_return': grouped['strategy_return'].apply(lambda x: float(np.prod(1.0 + x) - 1.0)),
        'benchmark_return': grouped['benchmark_return'].apply(lambda x: float(np.prod(1.0 + x) - 1.0)),
        'n_days': grouped.size(),
    })
    table['excess_return'] = table['strategy_return'] - table['benchmark_return']
    table['full_year'] = [y not in (years.min(), years.max()) for y in table.index]
    table.index.name = 'year'
    return table.reset_index()[['year', 'strategy_return', 'benchmark_return', 'excess_return',
                                'n_days', 'full_year']]


# --- dispatch --------------------------------------------------------------

@lru_cache(maxsize=4)
def cached_dataset(config_json):
    return prepare_dataset(RunConfig.model_validate_json(config_json))


def window_job(config_json, window_index, baseline_json=None):
    """Rebuild the dataset from a serialized config and run one window"""
    cfg = RunConfig.model_validate_json(config_json)
    dataset = cached_dataset(config_json)
    window = make_windows(len(dataset), cfg.walkforward)[window_index]
    if baseline_json:
        return run_baseline_window(dataset, window, cfg, BaselineSpec.model_validate_json(baseline_json))
    return run_window(dataset, window, cfg)


def _run_celery(config_json, windows, baseline_json, timeout):
    from evonash.tasks.window_tasks import run_window_task
    pending = [run_window_task.delay(config_json, w.index, baseline_json) for w in windows]
    return [WindowResult.from_dict(p.get(timeout=timeout)) for p in pending]


def run_walkforward(cfg, dataset=None, jobs=1, backend='local', baseline: Optional[BaselineSpec] = None,
                    timeout=3600):
    """
    Run every window and aggregate in window order.

    Args:
        cfg (RunConfig): Resolved configuration
        dataset (MarketDataset): Prepared data; built from ``cfg`` if omitted
        jobs (int): Worker processes for the local backend
        backend (str): 'local' or 'celery'
        baseline (BaselineSpec): Run this baseline instead of the engine
        timeout (int): Seconds to wait per Celery result

    Returns:
        WalkForwardReport
    """
    dataset = dataset if dataset is not None else prepare_dataset(cfg)
    windows = make_windows(len(dataset), cfg.walkforward)
    label = baseline.kind if baseline is not None else 'evonash'
    logger.info(f"Running {label} over {len(windows)} windows (backend={backend}, jobs={jobs})")

    config_json = cfg.model_dump_json()
    baseline_json = baseline.model_dump_json() if baseline is not None else None
    if backend == 'celery':
        results = _run_celery(config_json, windows, baseline_json, timeout)
    elif jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(window_job, config_json, w.index, baseline_json) for w in windows]
            results = [f.result() for f in futures]
    elif baseline is not None:
        results = [run_baseline_window(dataset, w, cfg, baseline) for w in windows]
    else:
        results = [run_window(dataset, w, cfg) for w in windows]
    return aggregate(results, cfg.training.selection, label=label)


def run_baseline(spec, cfg, dataset=None, jobs=1, backend='local'):
    """Baseline report over the engine's windows"""
    return run_walkforward(cfg, dataset=dataset, jobs=jobs, backend=backend, baseline=spec)
