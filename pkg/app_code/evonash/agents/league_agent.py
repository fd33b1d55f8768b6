"""League best responses against the current meta-mixture.

Two trainers are provided: a ridge best response fit on forward-return
targets, and an RL-hybrid that runs tabular Q-learning over discrete
position/leverage actions and distills the greedy policy back into a linear
AgentPolicy so it can join the population.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from evonash.agents.agent_base import AgentBase
from evonash.agents.policy import TAU_FLOOR
from evonash.errors import ContractError
from evonash.game import ensemble_signal
from evonash.signalproc import forward_returns, ridge_solve

# Set up logging
logger = logging.getLogger(__name__)

DISTILL_CLIP = 0.99


def opponent_signal(m, signals):
    """Aggregate opponent s_opp; same contract as the ensemble signal"""
    return ensemble_signal(m, signals).rename('opponent')


def forward_return(returns, t, h):
    """Compounded return over the h days after t"""
    r = np.asarray(returns, dtype=float)
    if t + h >= len(r):
        raise ContractError(f"forward return at {t} needs {h} future days")
    return float(np.prod(1.0 + r[t + 1:t + h + 1]) - 1.0)


def ridge_fit(X, y, lam):
    """Ridge regression with an unpenalized intercept; returns (w, b)"""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    x_mean, y_mean = X.mean(axis=0), y.mean()
    w = ridge_solve(X - x_mean, y - y_mean, lam)
    return w, float(y_mean - x_mean @ w)


def br_targets(returns, opponent, cfg):
    """y_t = clip(sign(R_t^(h)) - s_opp_t); NaN where R^(h) is unavailable"""
    R = forward_returns(returns, cfg.horizon_h)
    y = np.clip(np.sign(R) - opponent.to_numpy(dtype=float), -cfg.clip_bound, cfg.clip_bound)
    return y.where(R.notna())


def _blend(fitted, base, weight):
    return weight * fitted + (1.0 - weight) * base


def ridge_br(features, regimes, returns, opponent, cfg, template, agent_id='br'):
    """
    Ridge best response to the opponent signal.

    Args:
        features (pd.DataFrame): Training-split features
        regimes (pd.Series): Unused by the ridge fit, accepted for a uniform interface
        returns (pd.Series): Universe returns on the same dates
        opponent (pd.Series): Opponent aggregate signal
        cfg (BRConfig): Horizon, ridge penalty, blend and clip settings
        template (AgentPolicy): Parameters blended with the fit; regime
            biases and risk head are copied from it

    Returns:
        AgentPolicy
    """
    y = br_targets(returns, opponent, cfg)
    mask = y.notna().to_numpy()
    if mask.sum() <= features.shape[1] + 1:
        raise ContractError(f"training split too short for the ridge best response "
                            f"({mask.sum()} usable rows, {features.shape[1]} features)")
    w_fit, b_fit = ridge_fit(features.to_numpy()[mask], y.to_numpy()[mask], cfg.ridge_lambda)
    return template.with_params(id=agent_id,
                                w=_blend(w_fit, template.w, cfg.blend_weight),
                                b=float(_blend(b_fit, template.b, cfg.blend_weight)))


def rl_br_reward(p_t, pi_t, R_fwd, opp_pnl_window, opp_pnl_next, cfg):
    """pi_t + omega_h (p_t R - Pi_opp) - pi_opp_{t+1} - lambda_pos |p_t|"""
    return (pi_t + cfg.omega_h * (p_t * R_fwd - opp_pnl_window)
            - opp_pnl_next - cfg.lambda_pos * abs(p_t))


class QTable:
    """Sparse action-value table; unseen states read as zeros"""

    def __init__(self, n_actions):
        self.n_actions = n_actions
        self.table = {}

    def values(self, state):
        return self.table.get(state, np.zeros(self.n_actions))

    def get(self, state, action):
        return float(self.values(state)[action])

    def set(self, state, action, value):
        row = self.table.setdefault(state, np.zeros(self.n_actions))
        row[action] = value

    def greedy(self, state):
        return int(np.argmax(self.values(state)))

    def max_abs(self):
        return max((float(np.abs(v).max()) for v in self.table.values()), default=0.0)

    def __len__(self):
        return len(self.table)


def q_update(q, s, a, r, s_next, cfg):
    """Q(s,a) += eta [r + gamma max_a' Q(s', a') - Q(s,a)]"""
    current = q.get(s, a)
    target = r + cfg.gamma_discount * float(q.values(s_next).max())
    q.set(s, a, current + cfg.learn_rate * (target - current))
    return q


@dataclass
class StateEncoder:
    """Bins the first principal components of the features and the opponent signal"""
    mean: np.ndarray
    components: np.ndarray
    edges: list
    opp_edges: np.ndarray

    @classmethod
    def fit(cls, X, cfg, opp_range):
        X = np.asarray(X, dtype=float)
        mean = X.mean(axis=0)
        centered = X - mean
        n_comp = min(2, X.shape[1])
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        components = vt[:n_comp]
        proj = centered @ components.T
        qs = [i / cfg.state_bins for i in range(1, cfg.state_bins)]
        edges = [np.quantile(proj[:, k], qs) if qs else np.array([]) for k in range(n_comp)]
        lo, hi = opp_range
        opp_edges = np.linspace(lo, hi, cfg.opponent_bins + 1)[1:-1]
        return cls(mean=mean, components=components, edges=edges, opp_edges=opp_edges)

    def encode(self, X, opponent):
        proj = (np.asarray(X, dtype=float) - self.mean) @ self.components.T
        cols = [np.searchsorted(self.edges[k], proj[:, k], side='right')
                for k in range(proj.shape[1])]
        opp = np.searchsorted(self.opp_edges, np.asarray(opponent, dtype=float), side='right')
        return np.column_stack(cols + [opp]).astype(int)


@dataclass
class QPolicy:
    """Trained Q-table plus everything needed to roll its greedy policy forward"""
    q: QTable
    encoder: StateEncoder
    positions: np.ndarray
    leverages: np.ndarray
    initial_bin: int = 0
    episode_rewards: list = field(default_factory=list)
    max_abs_reward: float = 0.0

    @property
    def executed(self):
        return np.repeat(self.positions, len(self.leverages)) * np.tile(self.leverages, len(self.positions))

    def position_bin(self, action):
        return action // len(self.leverages)

    def state(self, codes, position_bin):
        return (*codes[:-1], position_bin, codes[-1])

    def greedy_positions(self, features, opponent):
        """Executed positions along the greedy path"""
        codes = self.encoder.encode(features, opponent)
        executed = self.executed
        out = np.empty(len(codes))
        pos_bin = self.initial_bin
        for t in range(len(codes)):
            a = self.q.greedy(self.state(codes[t], pos_bin))
            out[t] = executed[a]
            pos_bin = self.position_bin(a)
        return pd.Series(out, index=getattr(features, 'index', None), name='rl_position')


def train_q_policy(features, returns, opponent, cfg, rng, cost=0.0, opp_range=(0.0, 1.0)):
    """
    Tabular Q-learning over the training split.

    The reward for acting on date t uses returns through t + h, so only dates
    with a full forward window inside ``returns`` are trained on.

    Args:
        features (pd.DataFrame): Training-split features
        returns (pd.Series): Universe returns on the same dates
        opponent (pd.Series): Opponent aggregate signal
        cfg (BRConfig): Horizon plus the ``rl`` settings
        rng (np.random.Generator): Exploration randomness
        cost (float): Linear trading cost per unit turnover
        opp_range (tuple): Range of the opponent signal for binning

    Returns:
        QPolicy
    """
    rl = cfg.rl
    h = cfg.horizon_h
    X = features.to_numpy(dtype=float)
    r = returns.to_numpy(dtype=float)
    opp = opponent.to_numpy(dtype=float)
    n = len(r)
    if n <= h + 1:
        raise ContractError(f"training split of {n} days is too short for horizon {h}")

    encoder = StateEncoder.fit(X, rl, opp_range)
    codes = encoder.encode(X, opp)
    positions = np.asarray(rl.position_actions, dtype=float)
    leverages = np.asarray(rl.leverage_actions, dtype=float)
    initial_bin = int(np.argmin(np.abs(positions)))
    policy = QPolicy(q=QTable(len(positions) * len(leverages)), encoder=encoder,
                     positions=positions, leverages=leverages, initial_bin=initial_bin)
    executed = policy.executed

    R = forward_returns(returns, h).to_numpy()
    opp_next = np.zeros(n)
    opp_next[:-1] = opp[:-1] * r[1:]
    opp_window = np.zeros(n)
    for t in range(n - h):
        opp_window[t] = float(opp[t:t + h] @ r[t + 1:t + h + 1])
    train_idx = np.flatnonzero(np.isfinite(R[:n - 1]))

    for _ in range(rl.episodes):
        pos_bin, prev_p, total = initial_bin, 0.0, 0.0
        for t in train_idx:
            state = policy.state(codes[t], pos_bin)
            explore = rng.random() < rl.epsilon_explore
            a = int(rng.integers(policy.q.n_actions)) if explore else policy.q.greedy(state)
            p = executed[a]
            pi = p * r[t + 1] - cost * abs(p - prev_p)
            reward = rl_br_reward(p, pi, R[t], opp_window[t], opp_next[t], rl)
            next_bin = policy.position_bin(a)
            q_update(policy.q, state, a, reward, policy.state(codes[t + 1], next_bin), rl)
            policy.max_abs_reward = max(policy.max_abs_reward, abs(reward))
            total += reward
            pos_bin, prev_p = next_bin, p
        policy.episode_rewards.append(total)
    return policy


def distill_policy(features, regimes, target_positions, template, cfg, s_max=1.0, agent_id='br'):
    """
    Fit a linear AgentPolicy whose base signal tracks ``target_positions``.

    Targets are mapped through the inverse of the tanh head, ridge-fit on the
    features, then per-regime mean residuals become the regime biases.
    """
    tau = max(TAU_FLOOR, template.tau)
    scaled = np.clip(np.asarray(target_positions, dtype=float) / s_max, -DISTILL_CLIP, DISTILL_CLIP)
    y = tau * np.arctanh(scaled)
    X = features.to_numpy(dtype=float)
    w_fit, b_fit = ridge_fit(X, y, cfg.ridge_lambda)
    residual = y - (X @ w_fit + b_fit)
    labels = regimes.to_numpy()
    c = {}
    for key, base in template.c.items():
        mask = labels == key
        fitted = float(residual[mask].mean()) if mask.any() else 0.0
        c[key] = float(_blend(fitted, base, cfg.blend_weight))
    return template.with_params(id=agent_id,
                                w=_blend(w_fit, template.w, cfg.blend_weight),
                                b=float(_blend(b_fit, template.b, cfg.blend_weight)),
                                c=c)


def train_rl_br(features, regimes, returns, opponent, cfg, template, rng, cost=0.0,
                bounds=None, agent_id='br'):
    """
    RL-hybrid best response: Q-learning followed by linear distillation.

    Returns:
        tuple: (AgentPolicy, QPolicy)
    """
    s_max = bounds.s_max if bounds is not None else 1.0
    opp_range = (bounds.s_min if bounds is not None and bounds.long_only else -s_max, s_max)
    policy = train_q_policy(features, returns, opponent, cfg, rng, cost=cost, opp_range=opp_range)
    greedy = policy.greedy_positions(features, opponent)
    agent = distill_policy(features, regimes, greedy, template, cfg, s_max=s_max, agent_id=agent_id)
    return agent, policy


class BestResponseAgent(AgentBase):
    """
    Shared task dispatch for league best-response trainers.

    The opponent is the meta-mixture of the population: requests carry the
    mixture weights ``meta`` and the agents' ``signals``, or an already
    aggregated ``opponent`` series.
    """

    required_keys = ('returns', 'config')

    def process(self, data, task="best_response", **kwargs):
        """Process a best-response request based on the specified task"""
        method_map = {
            "best_response": self._best_response,
            "targets": self._targets,
        }
        return self._dispatch(method_map, task, data, **kwargs)

    def _opponent(self, data):
        if 'meta' in data and 'signals' in data:
            return opponent_signal(data['meta'], data['signals'])
        if 'opponent' in data:
            return data['opponent']
        raise ContractError(f"{self.name}: request needs meta and signals, or an opponent")

    def _targets(self, data, **kwargs):
        return {'targets': br_targets(data['returns'], self._opponent(data), data['config'])}

    def _best_response(self, data, **kwargs):
        raise NotImplementedError


class RidgeBestResponseAgent(BestResponseAgent):
    """Ridge regression on clipped forward-return targets"""

    def _best_response(self, data, **kwargs):
        agent = ridge_br(data['features'], data['regimes'], data['returns'], self._opponent(data),
                         data['config'], data['template'], agent_id=data.get('agent_id', 'br'))
        self.add_to_history({'agent': agent.id})
        return {'agent': agent, 'trace': {}}


class RLHybridBestResponseAgent(BestResponseAgent):
    """Q-learning over position x leverage actions, distilled into a linear policy"""

    def _best_response(self, data, **kwargs):
        agent, policy = train_rl_br(data['features'], data['regimes'], data['returns'],
                                    self._opponent(data), data['config'], data['template'],
                                    data['rng'], cost=data.get('cost', 0.0),
                                    bounds=data.get('bounds'),
                                    agent_id=data.get('agent_id', 'br'))
        self.update_state('q_policy', policy)
        self.add_to_history({'agent': agent.id, 'states': len(policy.q)})
        trace = {'episode_rewards': policy.episode_rewards, 'states_visited': len(policy.q)}
        return {'agent': agent, 'trace': trace}
