from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np

from evonash.errors import ContractError
from evonash.models.base import BaseModel
from evonash.models.market import REGIMES


def _regime_map(values=None):
    values = values or {}
    return {r.value: float(values.get(r.value, 0.0)) for r in REGIMES}


@dataclass(frozen=True, eq=False)
class RiskHead(BaseModel):
    """Leverage head: ell = ell_min + (ell_max - ell_min) * sigmoid(w_r.x + b_r + c_r[z])"""
    w_r: np.ndarray
    b_r: float = 0.0
    c_r: Dict[str, float] = field(default_factory=_regime_map)
    ell_min: float = 0.5
    ell_max: float = 1.5

    def __post_init__(self):
        object.__setattr__(self, 'w_r', np.asarray(self.w_r, dtype=float))
        object.__setattr__(self, 'c_r', _regime_map(self.c_r))
        if not 0 <= self.ell_min <= self.ell_max:
            raise ContractError("risk head needs 0 <= ell_min <= ell_max")


@dataclass(frozen=True, eq=False)
class AgentPolicy(BaseModel):
    """Direction head with regime biases and an optional risk head.

    Instances are immutable; evolution and best responses build new ones
    with ``replace``.
    """
    id: str
    w: np.ndarray
    b: float = 0.0
    c: Dict[str, float] = field(default_factory=_regime_map)
    tau: float = 0.5
    risk_head: Optional[RiskHead] = None

    def __post_init__(self):
        object.__setattr__(self, 'w', np.asarray(self.w, dtype=float))
        object.__setattr__(self, 'c', _regime_map(self.c))
        if isinstance(self.risk_head, dict):
            object.__setattr__(self, 'risk_head', RiskHead.from_dict(self.risk_head))
        if not self.tau > 0:
            raise ContractError(f"agent {self.id}: tau must be positive")
        params = [self.w, [self.b, self.tau], list(self.c.values())]
        if self.risk_head is not None:
            if self.risk_head.w_r.shape != self.w.shape:
                raise ContractError(f"agent {self.id}: risk head dimension mismatch")
            params += [self.risk_head.w_r, [self.risk_head.b_r], list(self.risk_head.c_r.values())]
        if not all(np.isfinite(np.asarray(p, dtype=float)).all() for p in params):
            raise ContractError(f"agent {self.id}: parameters must be finite")

    @property
    def dim(self):
        return self.w.shape[0]

    def with_params(self, **changes):
        return replace(self, **changes)

    def same_params(self, other):
        """Parameter equality, ignoring the identifier"""
        if not (np.array_equal(self.w, other.w) and self.b == other.b
                and self.c == other.c and self.tau == other.tau):
            return False
        if (self.risk_head is None) != (other.risk_head is None):
            return False
        if self.risk_head is None:
            return True
        a, b = self.risk_head, other.risk_head
        return (np.array_equal(a.w_r, b.w_r) and a.b_r == b.b_r and a.c_r == b.c_r
                and a.ell_min == b.ell_min and a.ell_max == b.ell_max)
