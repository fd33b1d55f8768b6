import os
import logging

import pandas as pd

from evonash.config import config
from evonash.errors import ConfigurationError, DataError, StatisticalTestError
from evonash.execution import run_stress, stress_table
from evonash.models.settings import BaselineSpec
from evonash.panel import compute_returns, generate_synthetic, save_panel
from evonash.run_config import load_run_config
from evonash.stats import (bootstrap_mean_test, fdr_adjust, newey_west_test, spa_lite_test,
                           wrc_test)
from evonash.utils.bundle import prepare_bundle_dir, read_bundle, write_bundle, write_derived

# Set up logging
logger = logging.getLogger(__name__)


class RunOrchestrator:
    """
    Runs the command-line workflows: walk-forward runs and baselines that
    write evidence bundles, and the post-hoc analyses that read them.
    """

    def __init__(self, agent_registry, settings=None):
        """
        Initialize the orchestrator.

        Args:
            agent_registry: Registry of best-response and baseline agents
            settings: Environment configuration class (defaults to ``config['default']``)
        """
        self.agent_registry = agent_registry
        self.settings = settings or config['default']
        self.workflows = {
            'run': self._workflow_run,
            'baseline': self._workflow_baseline,
            'stress': self._workflow_stress,
            'crossmarket': self._workflow_crossmarket,
            'stats': self._workflow_stats,
            'synth': self._workflow_synth,
        }

    def execute_workflow(self, workflow_name, data, **kwargs):
        """
        Execute a predefined workflow by name.

        Args:
            workflow_name (str): Name of the workflow to execute
            data (dict): Data required for the workflow
            **kwargs: Additional parameters for the workflow

        Returns:
            dict: The workflow results
        """
        if workflow_name not in self.workflows:
            raise ValueError(f"Workflow '{workflow_name}' not found")

        workflow_func = self.workflows[workflow_name]
        try:
            return workflow_func(data, **kwargs)
        except Exception as e:
            logger.error(f"Workflow '{workflow_name}' failed: {str(e)}")
            raise

    # --- helpers -----------------------------------------------------------

    def _load_config(self, data):
        overrides = {'seed': data.get('seed')}
        return load_run_config(data['config_path'], overrides)

    def _bundle_dir(self, data, cfg, label):
        return (data.get('output') or cfg.output_dir
                or os.path.join(self.settings.OUTPUT_DIR, f"{label}-seed{cfg.seed}"))

    def _execute(self, data, cfg, text, baseline=None):
        from evonash.walkforward import (cross_benchmark_eval, load_source_panel, prepare_dataset,
                                         run_walkforward)

        label = baseline.kind if baseline is not None else 'evonash'
        jobs = data.get('jobs') or self.settings.DEFAULT_JOBS
        root = prepare_bundle_dir(self._bundle_dir(data, cfg, label))
        panel = load_source_panel(cfg)
        dataset = prepare_dataset(cfg, panel=panel)
        report = run_walkforward(cfg, dataset=dataset, jobs=jobs,
                                 backend=data.get('backend') or self.settings.TASK_BACKEND,
                                 baseline=baseline, timeout=self.settings.CELERY_RESULT_TIMEOUT)
        manifest = write_bundle(root, report, cfg, text)

        if cfg.benchmarks:
            returns = compute_returns(panel).returns
            unknown = [s for s in cfg.benchmarks if s not in returns.columns]
            if unknown:
                raise ConfigurationError(f"benchmarks not in the panel: {unknown}")
            table = cross_benchmark_eval(report.daily['strategy_return'],
                                         {s: returns[s] for s in cfg.benchmarks})
            write_derived(root, 'cross_market.csv', table)

        summary = report.summary()
        logger.info(f"{label}: {summary['n_windows']} windows, MeanExSharpe "
                    f"{summary['MeanExSharpe']:.4f}, RobustScore {summary['RobustScore']:.4f}")
        return {'bundle': root, 'bundle_hash': manifest['bundle_hash'], 'summary': summary}

    # --- workflows ---------------------------------------------------------

    def _workflow_run(self, data, **kwargs):
        """
        Full walk-forward run.

        Args:
            data: Must contain 'config_path'; optional 'seed', 'jobs',
                'backend' and 'output'

        Returns:
            dict: Bundle path, bundle hash and report summary
        """
        logger.info("Starting run workflow")
        cfg, text = self._load_config(data)
        result = self._execute(data, cfg, text)
        logger.info("Run workflow completed")
        return result

    def _workflow_baseline(self, data, **kwargs):
        """Baseline run through the same windows; 'kind' and 'params' name the baseline"""
        logger.info("Starting baseline workflow")
        cfg, text = self._load_config(data)
        if data['kind'] not in self.agent_registry.list_agent_types(role='baseline'):
            raise ConfigurationError(f"unknown baseline '{data['kind']}'")
        spec = BaselineSpec(kind=data['kind'], params=data.get('params') or {})
        result = self._execute(data, cfg, text, baseline=spec)
        logger.info("Baseline workflow completed")
        return result

    def _workflow_stress(self, data, **kwargs):
        """Rerun a bundle's OOS positions under friction scenarios"""
        logger.info("Starting stress workflow")
        bundle = read_bundle(data['bundle'])
        scenarios = list(bundle.config.stress)
        names = data.get('scenarios')
        if names:
            known = {s.name: s for s in scenarios}
            unknown = [n for n in names if n not in known]
            if unknown:
                raise ConfigurationError(f"unknown stress scenarios: {unknown}")
            scenarios = [known[n] for n in names]

        results, _ = run_stress(bundle.daily, scenarios, bundle.config.execution)
        table = stress_table(results)
        path = write_derived(bundle.root, 'stress.csv', table)
        logger.info("Stress workflow completed")
        return {'path': path, 'table': table}

    def _workflow_crossmarket(self, data, **kwargs):
        """Compare a bundle's OOS returns with the columns of a benchmark-returns CSV"""
        from evonash.walkforward import cross_benchmark_eval

        logger.info("Starting cross-market workflow")
        bundle = read_bundle(data['bundle'])
        benchmarks = read_benchmark_returns(data['benchmarks'])
        table = cross_benchmark_eval(bundle.strategy_returns,
                                     {name: benchmarks[name] for name in benchmarks.columns})
        path = write_derived(bundle.root, 'cross_market.csv', table)
        logger.info("Cross-market workflow completed")
        return {'path': path, 'table': table}

    def _workflow_stats(self, data, **kwargs):
        """Pairwise and global tests of bundles against a reference bundle"""
        logger.info("Starting stats workflow")
        reference = read_bundle(data['reference'])
        bundles = [read_bundle(path) for path in data['bundles']]
        stats_cfg = reference.config.stats
        seed = reference.config.seed

        pairwise = pairwise_tests(bundles, reference, stats_cfg, seed)
        global_tests = global_significance(bundles, reference, stats_cfg, seed)
        output = data.get('output') or reference.root
        pair_path = write_derived(output, 'pairwise_tests.csv', pairwise)
        global_path = write_derived(output, 'global_tests.json', global_tests)
        logger.info("Stats workflow completed")
        return {'pairwise': pair_path, 'global': global_path, 'table': pairwise,
                'global_tests': global_tests}

    def _workflow_synth(self, data, **kwargs):
        """Write the configured synthetic panel as CSV"""
        logger.info("Starting synth workflow")
        cfg, _ = self._load_config(data)
        panel = generate_synthetic(cfg.synthetic, cfg.seed)
        path = save_panel(panel, data['output'])
        logger.info(f"Synth workflow completed: {len(panel.dates)} dates, {len(panel.symbols)} symbols")
        return {'path': path}


def read_benchmark_returns(path):
    """Wide CSV: a date column plus one daily-return column per benchmark"""
    if not os.path.isfile(path):
        raise DataError(f"benchmark file not found: {path}")
    frame = pd.read_csv(path, float_precision='round_trip')
    if 'date' not in frame.columns or frame.shape[1] < 2:
        raise DataError(f"{path}: expected a 'date' column and at least one benchmark column")
    frame['date'] = pd.to_datetime(frame['date'])
    return frame.set_index('date').astype(float)


def _aligned_diffs(bundles, reference):
    ref = reference.strategy_returns
    series = {}
    for b in bundles:
        joined = pd.concat([b.strategy_returns.rename('model'), ref.rename('ref')],
                           axis=1, join='inner')
        if joined.empty:
            raise DataError(f"{b.name} and {reference.name} share no OOS dates")
        series[b.name] = joined['model'] - joined['ref']
    return series


def pairwise_tests(bundles, reference, stats_cfg, seed):
    """
    Newey-West and stationary-bootstrap tests of each bundle against the reference.

    Returns:
        pd.DataFrame: One row per bundle with BH q-values across rows
    """
    rows = []
    for name, d in _aligned_diffs(bundles, reference).items():
        values = d.to_numpy()
        nw = newey_west_test(values, lag=stats_cfg.nw_lag)
        boot, ci = bootstrap_mean_test(values, mean_block=stats_cfg.mean_block,
                                       n_boot=stats_cfg.n_boot, seed=seed,
                                       ci_level=stats_cfg.ci_level)
        rows.append({'Model': name, 'Reference': reference.name, 'Days': len(values),
                     'MeanDiff': float(values.mean()), 'NW_t': nw.statistic, 'NW_lag': nw.lag,
                     'NW_p': nw.p_value, 'Boot_p': boot.p_value, 'CI_low': ci[0], 'CI_high': ci[1]})
    table = pd.DataFrame(rows)
    table['FDR_q'] = fdr_adjust(table['NW_p'].to_numpy())
    table['Boot_FDR_q'] = fdr_adjust(table['Boot_p'].to_numpy())
    return table


def global_significance(bundles, reference, stats_cfg, seed):
    """White Reality Check and SPA-lite across all bundles on their common dates"""
    diffs = pd.concat(_aligned_diffs(bundles, reference), axis=1, join='inner')
    if diffs.empty:
        raise DataError("bundles share no common OOS dates")
    matrix = diffs.to_numpy()
    out = {'reference': reference.name, 'models': list(diffs.columns), 'n_days': len(diffs)}
    out['WRC'] = wrc_test(matrix, stats_cfg.mean_block, stats_cfg.n_boot, seed).to_dict()
    try:
        out['SPA-lite'] = spa_lite_test(matrix, stats_cfg.mean_block, stats_cfg.n_boot, seed).to_dict()
    except StatisticalTestError as e:
        logger.warning(f"SPA-lite skipped: {str(e)}")
        out['SPA-lite'] = {'error': str(e)}
    return out
