"""Interpolation toward a single absorbing state.

``P(s) = (1 - s) P + s P'`` where ``P'`` replaces the outgoing edges of the
target state ``j`` with a self-loop.  For reversible ``P`` the stationary
distribution of ``P(s)`` has a closed form, and at
``s* = 1 - pi_j / (1 - pi_j)`` the mass on ``j`` is exactly one half.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError, NotReversibleError, NoValidJError, RangeError
from .markov_core import MarkovChain, is_reversible, stationary_distribution, validate_chain

__all__ = [
    "InterpolationSpec",
    "absorbing_variant",
    "interpolate",
    "interpolated_chain",
    "s_star",
    "valid_targets",
    "interpolated_stationary",
]


@dataclass(frozen=True)
class InterpolationSpec:
    base: MarkovChain
    target_j: int
    s: float
    s_star: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.s <= 1.0:
            raise RangeError(f"s = {self.s} outside [0, 1]")

    @classmethod
    def from_chain(cls, chain: MarkovChain, j: int, s: float) -> "InterpolationSpec":
        pi_j = float(stationary_distribution(chain)[j])
        star = 1.0 - pi_j / (1.0 - pi_j) if 0.0 < pi_j < 0.5 else None
        return cls(base=chain, target_j=j, s=s, s_star=star)

    def chain(self) -> MarkovChain:
        return interpolated_chain(self.base, self.target_j, self.s)


def absorbing_variant(chain: MarkovChain, j: int) -> MarkovChain:
    """``P'``: identical to ``P`` except that row ``j`` is the unit vector ``e_j``."""
    if not 0 <= j < chain.n:
        raise IndexError(f"state {j} out of range for n={chain.n}")
    Pp = chain.P.copy()
    Pp[j, :] = 0.0
    Pp[j, j] = 1.0
    return validate_chain(Pp, labels=chain.labels, require_ergodic=False)


def interpolate(P: MarkovChain, P_prime: MarkovChain, s: float) -> MarkovChain:
    """Entrywise convex combination ``(1 - s) P + s P'``."""
    if P.n != P_prime.n:
        raise DimensionMismatchError(f"cannot interpolate n={P.n} with n={P_prime.n}")
    if not 0.0 <= s <= 1.0:
        raise RangeError(f"s = {s} outside [0, 1]")
    if s == 0.0:
        M = P.P.copy()
    elif s == 1.0:
        M = P_prime.P.copy()
    else:
        M = (1.0 - s) * P.P + s * P_prime.P
    return validate_chain(M, labels=P.labels, require_ergodic=False)


def interpolated_chain(chain: MarkovChain, j: int, s: float) -> MarkovChain:
    return interpolate(chain, absorbing_variant(chain, j), s)


def s_star(pi_j: float) -> float:
    """``1 - pi_j / (1 - pi_j)``; lies in (0, 1) only for ``pi_j`` in (0, 1/2)."""
    if not 0.0 < pi_j < 1.0:
        raise RangeError(f"pi_j = {pi_j} outside (0, 1)")
    if pi_j >= 0.5:
        warnings.warn(f"pi_j = {pi_j} >= 1/2: s* = {1.0 - pi_j / (1.0 - pi_j)} is not in (0, 1)", stacklevel=2)
    return 1.0 - pi_j / (1.0 - pi_j)


def valid_targets(pi) -> np.ndarray:
    """Indices ``j`` with ``pi_j < 1/2``; raises :class:`NoValidJError` if there are none."""
    idx = np.flatnonzero((np.asarray(pi) > 0) & (np.asarray(pi) < 0.5))
    if idx.size == 0:
        raise NoValidJError("no valid j: every state has stationary mass >= 1/2")
    return idx


def interpolated_stationary(chain: MarkovChain, j: int, s: float, pi=None) -> np.ndarray:
    """Closed-form stationary distribution of ``P(s)`` toward absorbing state ``j``.

    ``pi_j(s) = pi_j / (1 - s(1 - pi_j))`` and
    ``pi_x(s) = pi_x (1 - s) / (1 - s(1 - pi_j))`` for ``x != j``.
    Only valid for reversible ergodic ``P`` and ``s < 1``.
    """
    if not 0.0 <= s < 1.0:
        raise RangeError(f"s = {s} outside [0, 1): P(1) is not ergodic")
    if pi is None:
        pi = stationary_distribution(chain)
    if not is_reversible(chain, pi):
        raise NotReversibleError("closed form requires a reversible chain")
    pi = np.asarray(pi, dtype=float)
    denom = 1.0 - s * (1.0 - pi[j])
    out = pi * (1.0 - s) / denom
    out[j] = pi[j] / denom
    return out
