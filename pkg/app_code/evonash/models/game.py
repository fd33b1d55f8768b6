from dataclasses import dataclass, field
from typing import List

import numpy as np

from evonash.errors import ContractError
from evonash.models.base import BaseModel

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PayoffMatrix:
    """Antisymmetric meta-game payoffs, A[i, j] = pnl_i - pnl_j"""
    A: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ContractError("payoff matrix must be square")
        object.__setattr__(self, 'A', A)

    @property
    def K(self):
        return self.A.shape[0]

    @property
    def G(self):
        """Payoff bound max |A_ij|"""
        return float(np.abs(self.A).max()) if self.A.size else 0.0


@dataclass(frozen=True, eq=False)
class MetaStrategy:
    m: np.ndarray
    eta: float = 0.25
    iterations: int = 0

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.ndim != 1 or (m < 0).any() or abs(m.sum() - 1.0) > 1e-9:
            raise ContractError("meta-strategy must lie on the simplex")
        object.__setattr__(self, 'm', m)

    @classmethod
    def uniform(cls, K, eta=0.25):
        return cls(np.full(K, 1.0 / K), eta=eta)


@dataclass(eq=False)
class PsroResult(BaseModel):
    """Output of a meta-strategy solve.

    ``final`` is the last iterate, ``average`` the mean of the iterates at
    which payoffs were evaluated. ``gap_trace`` holds the gap of each iterate.
    """
    final: np.ndarray
    average: np.ndarray
    gap_trace: List[float] = field(default_factory=list)
    final_gap: float = 0.0
    average_gap: float = 0.0
    bound: float = 0.0
