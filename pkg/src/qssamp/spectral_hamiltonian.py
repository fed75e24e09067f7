"""Hamiltonian with a zero-energy ground state encoding ``sqrt(pi)``.

The symmetric discriminant ``D_xy = sqrt(P_xy P_yx)`` of a reversible chain
has the spectrum of ``P`` and top eigenvector ``sqrt(pi)``.  Mapping every
eigenvalue ``lambda`` of ``D`` to ``mu = sqrt(1 - lambda**2)`` while keeping the
eigenvectors gives a positive semidefinite ``H`` whose kernel is spanned by
``sqrt(pi)`` and whose other eigenvalues lie in ``(0, 1]``.  Its gap satisfies
``gap**2 = 1 - lambda_2**2``, so evolution times scale as ``1/sqrt(Delta)``.

Single-space realisation: eigenvalue indices run over ``n`` states rather than
the ``n**2`` pairs of a doubled register.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateTopEigenvalueError, NotErgodicError, NotNormalizedError, NotReversibleError
from .markov_core import MarkovChain, is_reversible, stationary_distribution

__all__ = [
    "DiscriminantMatrix",
    "HamiltonianModel",
    "discriminant",
    "build_hamiltonian",
    "hamiltonian_for",
    "hamiltonian_gap",
    "expand_in_eigenbasis",
    "chain_gap_to_hamiltonian_gap",
]

# eigenvalue clusters closer than this are treated as one eigenspace
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DiscriminantMatrix:
    D: np.ndarray
    source: Optional[MarkovChain] = None

    @property
    def n(self) -> int:
        return self.D.shape[0]


@dataclass(frozen=True, eq=False)
class HamiltonianModel:
    """Eigen-representation ``H = U diag(mu) U.T`` with ``mu`` ascending and ``mu[0] = 0``."""

    mu: np.ndarray
    U: np.ndarray
    gap: float
    source: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    @property
    def ground_state(self) -> np.ndarray:
        return self.U[:, 0]

    @property
    def chain_gap(self) -> float:
        """Spectral gap ``1 - |lambda_2|`` of the chain behind this Hamiltonian."""
        g2 = self.gap**2
        return g2 / (1.0 + np.sqrt(1.0 - g2))

    def matrix(self) -> np.ndarray:
        return (self.U * self.mu) @ self.U.T

    def apply(self, v) -> np.ndarray:
        return self.U @ (self.mu * (self.U.T @ v))

    def eigenspaces(self, tol: float = DEGENERACY_TOL):
        """List of ``(mu, projector)`` with degenerate eigenvalues merged."""
        out = []
        start = 0
        for k in range(1, self.n + 1):
            if k == self.n or self.mu[k] - self.mu[start] > tol:
                V = self.U[:, start:k]
                out.append((float(self.mu[start:k].mean()), V @ V.T))
                start = k
        return out

    def to_json(self) -> str:
        return json.dumps({"mu": self.mu.tolist(), "U": self.U.tolist()})


def discriminant(chain: MarkovChain, pi=None) -> DiscriminantMatrix:
    """``D_xy = sqrt(P_xy P_yx)`` for a reversible ergodic chain."""
    if not chain.ergodic:
        raise NotErgodicError("discriminant requires an ergodic chain",
                              irreducible=chain.irreducible, aperiodic=chain.aperiodic)
    if pi is None:
        pi = stationary_distribution(chain)
    if not is_reversible(chain, pi):
        raise NotReversibleError("discriminant requires a reversible chain")
    P = chain.P
    D = np.sqrt(P * P.T)
    D.setflags(write=False)
    return DiscriminantMatrix(D=D, source=chain)


def _fix_signs(U: np.ndarray) -> np.ndarray:
    U = U.copy()
    if U[:, 0].sum() < 0:
        U[:, 0] *= -1
    for k in range(1, U.shape[1]):
        col = U[:, k]
        first = np.flatnonzero(np.abs(col) > 1e-12)
        if first.size and col[first[0]] < 0:
            U[:, k] *= -1
    return U


def build_hamiltonian(D: DiscriminantMatrix, source: Optional[dict] = None) -> HamiltonianModel:
    """Map the eigenpairs ``(lambda_k, v_k)`` of ``D`` to ``(sqrt(1 - lambda_k**2), v_k)``.

    The top eigenvalue (1 for an ergodic reversible chain) is sent to exactly
    zero.  A repeated top eigenvalue, or an eigenvalue at -1, means the chain
    was not ergodic and raises :class:`DegenerateTopEigenvalueError`.
    """
    lam, V = np.linalg.eigh(D.D)
    n = lam.shape[0]
    if n > 1 and lam[-1] - lam[-2] <= 1e-12:
        raise DegenerateTopEigenvalueError("top eigenvalue of the discriminant is not simple")
    rest = lam[:-1]
    mu_rest = np.sqrt(np.clip((1.0 - rest) * (1.0 + rest), 0.0, None))
    if np.any(mu_rest <= 0.0):
        raise DegenerateTopEigenvalueError("discriminant has eigenvalue -1 (periodic chain)")
    order = np.argsort(mu_rest, kind="stable")
    mu = np.concatenate([[0.0], mu_rest[order]])
    U = np.column_stack([V[:, -1], V[:, :-1][:, order]])
    U = _fix_signs(U)
    mu.setflags(write=False)
    U.setflags(write=False)
    gap = float(mu[1]) if n > 1 else 1.0
    return HamiltonianModel(mu=mu, U=U, gap=gap, source=dict(source or {}))


def hamiltonian_for(chain: MarkovChain, j: Optional[int] = None, s: float = 0.0) -> HamiltonianModel:
    """Hamiltonian of ``chain`` or, when ``j`` is given, of its interpolation ``P(s)``."""
    from .interpolation import interpolated_chain

    target = chain if j is None or s == 0.0 else interpolated_chain(chain, j, s)
    return build_hamiltonian(discriminant(target), source={"j": j, "s": float(s)})


def hamiltonian_gap(H: HamiltonianModel) -> float:
    """Smallest nonzero eigenvalue of ``H``."""
    nz = H.mu[H.mu > 0]
    return float(nz.min()) if nz.size else 1.0


def chain_gap_to_hamiltonian_gap(delta: float) -> float:
    """Hamiltonian gap ``sqrt(1 - (1 - delta)**2)`` implied by a chain gap ``delta``."""
    return float(np.sqrt(delta * (2.0 - delta)))


def expand_in_eigenbasis(H: HamiltonianModel, psi, tol: float = 1e-9) -> np.ndarray:
    """Coefficients ``alpha_k = <u_k|psi>``; ``alpha_0`` is the ground-state overlap."""
    psi = np.asarray(psi)
    if psi.shape != (H.n,):
        raise ValueError(f"expected a vector of length {H.n}, got shape {psi.shape}")
    norm = np.vdot(psi, psi).real
    if abs(norm - 1.0) > tol:
        raise NotNormalizedError(f"state has squared norm {norm}")
    return H.U.T @ psi
