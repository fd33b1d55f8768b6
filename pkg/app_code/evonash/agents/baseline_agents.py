"""Reference strategies run through the same windows and execution stack."""
import logging

import numpy as np
import pandas as pd

from evonash.agents.agent_base import AgentBase
from evonash.agents.league_agent import ridge_fit, train_q_policy
from evonash.agents.policy import clip_to_bounds

# Set up logging
logger = logging.getLogger(__name__)


class BaselineAgent(AgentBase):
    """
    A baseline turns one window's data into a signal over every row.

    ``data`` carries features, regimes, market (market, benchmark, sigma),
    train_rows (fit plus validation length), bounds, execution, br, rng and
    params. Only the first ``train_rows`` returns may be used for fitting.
    """

    required_keys = ('features', 'market', 'train_rows', 'bounds')

    def process(self, data, task="signal", **kwargs):
        """Process a baseline request based on the specified task"""
        method_map = {
            "signal": self._signal,
        }
        return self._dispatch(method_map, task, data, **kwargs)

    def _signal(self, data, **kwargs):
        raw = self.generate(data)
        signal = clip_to_bounds(raw, data['bounds']).rename('signal')
        return {'signal': signal}

    def generate(self, data):
        raise NotImplementedError


class BuyAndHoldAgent(BaselineAgent):
    def generate(self, data):
        return pd.Series(1.0, index=data['features'].index)


class ZeroSignalAgent(BaselineAgent):
    def generate(self, data):
        return pd.Series(0.0, index=data['features'].index)


class RandomSignalAgent(BaselineAgent):
    """Seeded uniform draws inside the signal bounds"""

    def generate(self, data):
        bounds = data['bounds']
        low = bounds.s_min if bounds.long_only else -bounds.s_max
        index = data['features'].index
        return pd.Series(data['rng'].uniform(low, bounds.s_max, len(index)), index=index)


class PanelRidgeAgent(BaselineAgent):
    """Ridge forecast of the next-day universe return, standardized and scaled"""

    def generate(self, data):
        params = data.get('params', {})
        lam = float(params.get('ridge_lambda', 1.0))
        scale = float(params.get('scale', 0.5))
        X = data['features'].to_numpy(dtype=float)
        r = data['market']['market'].to_numpy(dtype=float)
        n_train = data['train_rows']

        w, b = ridge_fit(X[:n_train - 1], r[1:n_train], lam)
        pred = X @ w + b
        spread = pred[:n_train].std(ddof=1)
        if not spread > 0:
            logger.warning("panel_ridge forecast is flat on the training rows")
            return pd.Series(0.0, index=data['features'].index)
        self.update_state('coefficients', w)
        return pd.Series(scale * pred / spread, index=data['features'].index)


class DqnLiteAgent(BaselineAgent):
    """Tabular Q-learner trained against a flat opponent"""

    def generate(self, data):
        params = data.get('params', {})
        br = data['br']
        if 'episodes' in params:
            br = br.model_copy(update={'rl': br.rl.model_copy(update={'episodes': int(params['episodes'])})})
        bounds = data['bounds']
        features = data['features']
        n_train = data['train_rows']
        train = features.iloc[:n_train]
        flat = pd.Series(0.0, index=features.index)
        opp_range = (bounds.s_min if bounds.long_only else -bounds.s_max, bounds.s_max)

        policy = train_q_policy(train, data['market']['market'].iloc[:n_train], flat.iloc[:n_train],
                                br, data['rng'], cost=data['execution'].c_tc, opp_range=opp_range)
        self.update_state('episode_rewards', policy.episode_rewards)
        return policy.greedy_positions(features, flat)


BASELINE_AGENTS = {
    'buy_and_hold': BuyAndHoldAgent,
    'panel_ridge': PanelRidgeAgent,
    'dqn_lite': DqnLiteAgent,
    'random_signal': RandomSignalAgent,
    'zero_signal': ZeroSignalAgent,
}
