"""Ensemble post-processing: factor neutralization, amplification, quality gate,
and feature-quality reweighting."""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from evonash.errors import ConfigurationError, SolverError

# Set up logging
logger = logging.getLogger(__name__)

UPPER_CLIP = 2.5
LOWER_CLIP = 0.4


@dataclass(frozen=True, eq=False)
class Neutralizer:
    """Ridge exposure of a signal to centered factors, fit once and applied causally"""
    beta: np.ndarray
    factor_means: np.ndarray
    omega: float
    factors: tuple

    def apply(self, signal, factor_frame):
        F = factor_frame[list(self.factors)].to_numpy(dtype=float) - self.factor_means
        return signal - self.omega * pd.Series(F @ self.beta, index=signal.index)

    def to_dict(self):
        return {'factors': list(self.factors), 'beta': self.beta.tolist(),
                'factor_means': self.factor_means.tolist(), 'omega': self.omega}


def ridge_solve(X, y, lam):
    """Solve (X'X + lam I) beta = X'y"""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    gram = X.T @ X + lam * np.eye(X.shape[1])
    try:
        return np.linalg.solve(gram, X.T @ y)
    except np.linalg.LinAlgError as e:
        raise SolverError(f"singular ridge system (lambda={lam}): {e}")


def _factor_matrix(features, cfg):
    missing = [f for f in cfg.factors if f not in features.columns]
    if missing:
        raise ConfigurationError(f"neutralization factors not among features: {missing}")
    return features[list(cfg.factors)]


def fit_neutralizer(signal, features, cfg):
    """Estimate beta on the given (training) rows"""
    frame = _factor_matrix(features, cfg)
    F = frame.to_numpy(dtype=float)
    means = F.mean(axis=0)
    s = signal.to_numpy(dtype=float)
    beta = ridge_solve(F - means, s - s.mean(), cfg.lambda_neu)
    return Neutralizer(beta=beta, factor_means=means, omega=cfg.omega, factors=tuple(cfg.factors))


def factor_neutralize(signal, features, cfg):
    """s_neu = s - omega * F beta, with beta fit on the same rows"""
    return fit_neutralizer(signal, features, cfg).apply(signal, features)


def amplify_signal(signal, cfg):
    """s + (g - 1) sign(s) max(|s| - tau, 0)^gamma"""
    magnitude = np.maximum(signal.abs() - cfg.tau, 0.0)
    return signal + (cfg.gain - 1.0) * np.sign(signal) * magnitude ** cfg.gamma_amp


def signal_confidence(signal, window):
    """Trailing percentile rank of |s_t| within the last ``window`` days"""
    return signal.abs().rolling(window, min_periods=1).rank(pct=True)


def quality_gate(signal, cfg, confidence=None):
    """Shrink toward zero by q_t = q_min + (1 - q_min) c_t^nu"""
    if confidence is None:
        confidence = signal_confidence(signal, cfg.confidence_window)
    q = cfg.q_min + (1.0 - cfg.q_min) * np.clip(confidence, 0.0, 1.0) ** cfg.nu
    return signal * q


def _abs_corr(x, y, min_samples):
    mask = np.isfinite(x) & np.isfinite(y)
    x, y = x[mask], y[mask]
    if len(x) < min_samples:
        return 0.0
    xc, yc = x - x.mean(), y - y.mean()
    den = np.sqrt((xc @ xc) * (yc @ yc))
    if den <= 1e-15:
        return 0.0
    return float(abs(xc @ yc) / den)


def forward_returns(returns, h):
    """R_t^(h) = prod_{u=1..h}(1 + r_{t+u}) - 1; NaN where the window runs out"""
    r = returns.to_numpy(dtype=float)
    n = len(r)
    out = np.full(n, np.nan)
    if n > h:
        growth = np.ones(n - h)
        for u in range(1, h + 1):
            growth *= 1.0 + r[u:n - h + u]
        out[:n - h] = growth - 1.0
    return pd.Series(out, index=returns.index, name=f'fwd_{h}')


def quality_scores(features, returns, regimes, cfg):
    """Q_j blending next-day, h-day and within-regime predictive correlation"""
    X = features.to_numpy(dtype=float)
    r = returns.to_numpy(dtype=float)
    next_day = np.append(r[1:], np.nan)
    horizon = forward_returns(returns, cfg.horizon_h).to_numpy()
    labels = regimes.to_numpy()

    scores = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        c1 = _abs_corr(X[:, j], next_day, cfg.min_samples)
        ch = _abs_corr(X[:, j], horizon, cfg.min_samples)
        per_regime = [_abs_corr(X[labels == z, j], next_day[labels == z], cfg.min_samples)
                      for z in np.unique(labels)
                      if (labels == z).sum() >= cfg.min_samples]
        creg = float(np.mean(per_regime)) if per_regime else 0.0
        scores[j] = (1.0 - cfg.omega_r) * (0.7 * c1 + 0.3 * ch) + cfg.omega_r * creg
    return scores


def weights_from_scores(Q, cfg):
    """w_j = (1 - alpha) + alpha * clip(Q_j / (median(Q > 0) + eps), 0.4, 2.5)"""
    Q = np.asarray(Q, dtype=float)
    positive = Q[Q > 0]
    if len(positive) == 0:
        return np.ones(len(Q))
    ratio = np.clip(Q / (np.median(positive) + cfg.epsilon), LOWER_CLIP, UPPER_CLIP)
    return (1.0 - cfg.alpha_fq) + cfg.alpha_fq * ratio


def feature_quality_weights(features, returns, regimes, cfg):
    """
    Per-feature multipliers from training-split predictive quality.

    Args:
        features (pd.DataFrame): Training-split features
        returns (pd.Series): Universe returns on the same dates
        regimes (pd.Series): Regime labels on the same dates
        cfg (FeatureQualityConfig): Blend and clip settings

    Returns:
        pd.Series: Weight per feature name
    """
    Q = quality_scores(features, returns, regimes, cfg)
    weights = weights_from_scores(Q, cfg)
    return pd.Series(weights, index=features.columns, name='feature_weight')
