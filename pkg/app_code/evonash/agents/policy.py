"""Agent policy math: scores, base signals, risk head and signal emission."""
import numpy as np
import pandas as pd
from scipy.special import expit

from evonash.errors import ContractError
from evonash.models.policy import AgentPolicy, RiskHead

TAU_FLOOR = 0.15


def base_score(agent, x, z):
    """a = w.x + b + c[z]"""
    x = np.asarray(x, dtype=float)
    if x.shape != agent.w.shape:
        raise ContractError(f"feature vector has dimension {x.shape}, agent expects {agent.w.shape}")
    return float(agent.w @ x + agent.b + agent.c[_regime_key(z)])


def base_signal(a, tau):
    return np.tanh(np.asarray(a) / max(TAU_FLOOR, tau))


def apply_risk_head(agent, s_tilde, x, z):
    if agent.risk_head is None:
        raise ContractError(f"agent {agent.id} has no risk head")
    head = agent.risk_head
    u = expit(head.w_r @ np.asarray(x, dtype=float) + head.b_r + head.c_r[_regime_key(z)])
    ell = head.ell_min + (head.ell_max - head.ell_min) * u
    return float(s_tilde * ell)


def clip_to_bounds(signal, bounds):
    if bounds.long_only:
        return signal.clip(bounds.s_min, bounds.s_max)
    return signal.clip(-bounds.s_max, bounds.s_max)


def _regime_key(z):
    return getattr(z, 'value', z)


def _check_aligned(features, regimes):
    if not features.index.equals(regimes.index):
        raise ContractError("features and regimes must share dates")


def raw_signal(agent, features, regimes):
    """Unclipped s_t for every date of ``features`` (a DataFrame)"""
    _check_aligned(features, regimes)
    X = features.to_numpy()
    if X.shape[1] != agent.dim:
        raise ContractError(f"features have {X.shape[1]} columns, agent expects {agent.dim}")
    labels = regimes.map(_regime_key)
    bias = labels.map(agent.c).to_numpy(dtype=float)
    s = base_signal(X @ agent.w + agent.b + bias, agent.tau)
    if agent.risk_head is not None:
        head = agent.risk_head
        u = expit(X @ head.w_r + head.b_r + labels.map(head.c_r).to_numpy(dtype=float))
        s = s * (head.ell_min + (head.ell_max - head.ell_min) * u)
    return pd.Series(s, index=features.index, name=agent.id)


def emit_signal(agent, features, regimes, bounds):
    """
    Compose score, base signal, risk head and bound clipping.

    Args:
        agent (AgentPolicy): Policy
        features (pd.DataFrame): Feature rows (already quality-weighted)
        regimes (pd.Series): Regime label per row
        bounds (SignalBounds): Output interval

    Returns:
        pd.Series: Position signal s_t
    """
    return clip_to_bounds(raw_signal(agent, features, regimes), bounds)


def init_policy(agent_id, dim, rng, cfg):
    """Uniform direction weights, zero biases and a neutral risk head (ell = midpoint)"""
    w = rng.uniform(-cfg.weight_range, cfg.weight_range, size=dim)
    head = None
    if cfg.risk_head:
        head = RiskHead(w_r=np.zeros(dim), ell_min=cfg.ell_min, ell_max=cfg.ell_max)
    return AgentPolicy(id=agent_id, w=w, tau=cfg.tau, risk_head=head)


def init_population(size, dim, rng, cfg):
    return [init_policy(f"init-{k}", dim, rng, cfg) for k in range(size)]


def zero_policy(agent_id, dim, tau=0.5, risk_head=None):
    return AgentPolicy(id=agent_id, w=np.zeros(dim), tau=tau, risk_head=risk_head)
