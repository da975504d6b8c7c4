"""Separable convex penalties on symmetric matrices.

Three closed penalty families, all acting on off-diagonal entries only
(diagonal entries are never penalized, since shrinking variances is not
part of the estimation problem):

* ``l1``: lam * sum_{i != j} |a_ij|
* ``elastic_net``: lam1 * sum |a_ij| + (lam2 / 2) * sum a_ij^2 with
  lam1 = ratio * lam and lam2 = (1 - ratio) * lam
* ``ridge``: (lam / 2) * sum_{i != j} a_ij^2

Each family evaluates its value and its exact proximal map, the unique
minimizer of lam * phi(A) + (mu / 2) * ||A - V||_F^2. All maps are
entrywise, preserve symmetry, and leave the diagonal untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PenaltySpec", "soft_threshold", "PENALTY_KINDS"]

L1 = "l1"
ELASTIC_NET = "elastic_net"
RIDGE = "ridge"
PENALTY_KINDS = (L1, ELASTIC_NET, RIDGE)


def soft_threshold(v: np.ndarray, tau: float) -> np.ndarray:
    """Shrink off-diagonal entries toward zero by tau, keeping signs.

    Entrywise sgn(v) * max(0, |v| - tau) off the diagonal; diagonal entries
    are copied unchanged. Entries with |v| <= tau map to exactly 0.
    """
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    v = np.asarray(v, dtype=float)
    out = np.sign(v) * np.maximum(np.abs(v) - tau, 0.0)
    np.fill_diagonal(out, np.diag(v))
    return out


def _offdiag(a: np.ndarray) -> np.ndarray:
    mask = ~np.eye(a.shape[0], dtype=bool)
    return a[mask]


@dataclass(frozen=True)
class PenaltySpec:
    """A penalty family with its regularization weight.

    ``ratio`` is only meaningful for the elastic net, where it splits lam
    into an l1 part ratio*lam and a quadratic part (1-ratio)*lam.
    """

    kind: str
    lam: float
    ratio: float = 0.5

    def __post_init__(self):
        if self.kind not in PENALTY_KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}, expected one of {PENALTY_KINDS}")
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError(f"ratio must lie in [0, 1], got {self.ratio}")

    @classmethod
    def l1(cls, lam: float) -> "PenaltySpec":
        return cls(kind=L1, lam=lam)

    @classmethod
    def elastic_net(cls, lam: float, ratio: float = 0.5) -> "PenaltySpec":
        return cls(kind=ELASTIC_NET, lam=lam, ratio=ratio)

    @classmethod
    def ridge(cls, lam: float) -> "PenaltySpec":
        return cls(kind=RIDGE, lam=lam)

    @property
    def lam1(self) -> float:
        """l1 weight of the elastic net split."""
        return self.ratio * self.lam

    @property
    def lam2(self) -> float:
        """Quadratic weight of the elastic net split."""
        return (1.0 - self.ratio) * self.lam

    def value(self, a: np.ndarray) -> float:
        """Evaluate the penalty, weight included, over off-diagonal entries."""
        a = np.asarray(a, dtype=float)
        off = _offdiag(a)
        if self.kind == L1:
            return float(self.lam * np.sum(np.abs(off)))
        if self.kind == ELASTIC_NET:
            return float(self.lam1 * np.sum(np.abs(off)) + 0.5 * self.lam2 * np.sum(off**2))
        return float(0.5 * self.lam * np.sum(off**2))

    def prox(self, v: np.ndarray, mu: float) -> np.ndarray:
        """Unique minimizer of lam*phi(A) + (mu/2)*||A - v||_F^2.

        Closed forms, all leaving the diagonal unchanged:
        l1 soft-thresholds at lam/mu; ridge rescales by mu/(mu+lam);
        elastic net rescales by mu/(mu+lam2) then thresholds at
        lam1/(mu+lam2).
        """
        if mu <= 0:
            raise ValueError(f"mu must be positive, got {mu}")
        v = np.asarray(v, dtype=float)
        if self.kind == L1:
            return soft_threshold(v, self.lam / mu)
        if self.kind == ELASTIC_NET:
            scaled = mu * v / (mu + self.lam2)
            out = soft_threshold(scaled, self.lam1 / (mu + self.lam2))
            np.fill_diagonal(out, np.diag(v))
            return out
        out = mu * v / (mu + self.lam)
        np.fill_diagonal(out, np.diag(v))
        return out
