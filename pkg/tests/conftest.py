import os
import sys

import numpy as np
import pandas as pd
import pytest

# Add the app_code directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(__file__)), 'app_code'))

from evonash.models.settings import RunConfig  # noqa: E402

SMALL_RUN = {
    'seed': 11,
    'synthetic': {'n_symbols': 5, 'horizon': 200, 'segments': '40:0.001:0.008, 40:-0.0008:0.012'},
    'universe': {'min_history_days': 20},
    'features': {'windows': '5,10,20', 'zscore_window': 20, 'ls_rank_window': 20,
                 'ls_smooth_window': 5, 'cross_section_window': 10, 'moment_window': 20,
                 'beta_window': 20, 'excess_window': 10, 'volume_window': 10,
                 'regime_window': 10},
    'execution': {'sigma_window': 10},
    'training': {
        'evolution': {'population_size': 4, 'generations_per_round': 2, 'tournament_rounds': 2},
        'psro': {'iterations': 20},
        'br': {'horizon_h': 5, 'rl': {'episodes': 2, 'state_bins': 2, 'opponent_bins': 2}},
        'signal': {'neutralize': {'factors': 'beta_20,mkt_mean_20'},
                   'gate': {'confidence_window': 20},
                   'feature_quality': {'horizon_h': 5, 'min_samples': 10}},
        'scale': {'n_steps': 4},
    },
    'walkforward': {'train_days': 60, 'test_days': 10, 'step_days': 10, 'max_windows': 3,
                    'patience': {'generation_patience': 1, 'round_patience': 1}},
    'stats': {'n_boot': 200},
}


def _merge(base, updates):
    out = dict(base)
    for key, value in updates.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


@pytest.fixture
def make_config():
    """Build a small, fast RunConfig; keyword sections are merged into the defaults"""
    def _make(**updates):
        return RunConfig.model_validate(_merge(SMALL_RUN, updates))
    return _make


@pytest.fixture
def small_config(make_config):
    return make_config()


@pytest.fixture(scope='session')
def small_dataset():
    from evonash.walkforward import prepare_dataset
    return prepare_dataset(RunConfig.model_validate(SMALL_RUN))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_market():
    """Market frame (market, benchmark, sigma) on business days"""
    def _make(n=40, seed=0, drift=0.0, vol=0.01):
        g = np.random.default_rng(seed)
        index = pd.bdate_range('2020-01-01', periods=n, name='date')
        return pd.DataFrame({
            'market': drift + vol * g.standard_normal(n),
            'benchmark': 0.8 * vol * g.standard_normal(n),
            'sigma': np.abs(vol + 0.002 * g.standard_normal(n)),
        }, index=index)
    return _make


SMALL_RUN_CFG = """\
# Small, fast run used across the tests
[run]
seed = 11

[synthetic]
n_symbols = 5
horizon = 200
segments = 40:0.001:0.008, 40:-0.0008:0.012

[universe]
min_history_days = 20

[features]
windows = 5,10,20
zscore_window = 20
ls_rank_window = 20
ls_smooth_window = 5
cross_section_window = 10
moment_window = 20
beta_window = 20
excess_window = 10
volume_window = 10
regime_window = 10

[execution]
sigma_window = 10

[training.evolution]
population_size = 4
generations_per_round = 2
tournament_rounds = 2

[training.psro]
iterations = 20

[training.br]
horizon_h = 5

[training.br.rl]
episodes = 2
state_bins = 2
opponent_bins = 2

[training.signal.neutralize]
factors = beta_20, mkt_mean_20

[training.signal.gate]
confidence_window = 20

[training.signal.feature_quality]
horizon_h = 5
min_samples = 10

[training.scale]
n_steps = 4

[walkforward]
train_days = 60
test_days = 10
step_days = 10
max_windows = 3

[walkforward.patience]
generation_patience = 1
round_patience = 1

[stats]
n_boot = 200
"""


@pytest.fixture
def small_cfg_file(tmp_path):
    """The SMALL_RUN settings as a run configuration file"""
    path = tmp_path / 'small.cfg'
    path.write_text(SMALL_RUN_CFG, encoding='utf-8')
    return str(path)
