"""Classical Markov-chain representation and the quantities built on it.

A chain is a fixed row-stochastic matrix ``P`` with ``P[i, j]`` the probability
of moving from state ``i`` to state ``j``.  Distributions evolve as
``w = P.T @ v``.  Everything downstream (interpolation, the Hamiltonian,
the cost model) is anchored on the stationary distribution, spectral gap,
mixing time and hitting time computed here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .errors import (
    BadParamsError,
    ConvergenceError,
    EigensolverError,
    IterationCapError,
    NegativeEntryError,
    NotErgodicError,
    RowSumError,
    SingularSystemError,
    ValidationError,
    ZeroStationaryEntryError,
)

__all__ = [
    "ROW_SUM_TOL",
    "MarkovChain",
    "ChainStatistics",
    "Spectrum",
    "validate_chain",
    "stationary_distribution",
    "is_reversible",
    "spectrum",
    "spectral_gap",
    "mixing_time",
    "hitting_time",
    "time_reverse",
    "lazify",
    "gen_family",
    "FAMILIES",
    "chain_statistics",
    "chain_to_json",
    "chain_from_json",
    "read_chain",
    "write_chain",
]

ROW_SUM_TOL = 1e-9
REVERSIBILITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """Validated row-stochastic transition matrix.

    Instances are produced by :func:`validate_chain`; the matrix is stored
    read-only so chains can be shared freely.
    """

    P: np.ndarray
    labels: Optional[tuple] = None
    irreducible: bool = False
    aperiodic: bool = False

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic

    def allclose(self, other: "MarkovChain", atol: float = 1e-12) -> bool:
        return self.P.shape == other.P.shape and bool(np.allclose(self.P, other.P, rtol=0.0, atol=atol))

    def __repr__(self):
        return f"MarkovChain(n={self.n}, ergodic={self.ergodic})"


@dataclass(frozen=True)
class ChainStatistics:
    pi: np.ndarray
    delta: float
    t_mix: int
    t_hit: float
    eps_mix: float
    target_j: int


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending by modulus.

    ``eigenvectors`` are the orthonormal eigenvectors of the symmetric
    discriminant and are only available for reversible chains.  ``reliable``
    is False when a general (non-symmetric) eigensolver had to be used.
    """

    eigenvalues: np.ndarray
    eigenvectors: Optional[np.ndarray] = None
    reliable: bool = True


# ---------------------------------------------------------------------------
# validation


def _period(adj: csr_matrix) -> int:
    """Period of a strongly connected graph: gcd of level differences over edges."""
    order, _ = breadth_first_order(adj, 0, directed=True, return_predecessors=True)
    level = np.full(adj.shape[0], -1, dtype=np.int64)
    level[0] = 0
    # breadth_first_order returns nodes in BFS order; rebuild levels from it
    indptr, indices = adj.indptr, adj.indices
    for u in order:
        for v in indices[indptr[u]:indptr[u + 1]]:
            if level[v] < 0:
                level[v] = level[u] + 1
    rows = np.repeat(np.arange(adj.shape[0]), np.diff(indptr))
    diffs = np.abs(level[rows] + 1 - level[indices])
    return int(reduce(math.gcd, diffs.tolist(), 0))


def validate_chain(
    matrix,
    *,
    labels: Optional[Sequence[str]] = None,
    require_ergodic: bool = True,
    renormalize: bool = False,
) -> MarkovChain:
    """Check a transition matrix and wrap it as a :class:`MarkovChain`.

    Parameters
    ----------
    matrix : array_like, shape (n, n)
        Candidate transition matrix.
    labels : sequence of str, optional
        State names.
    require_ergodic : bool
        Raise :class:`NotErgodicError` unless the chain is irreducible and
        aperiodic.  With False the flags are still computed and stored.
    renormalize : bool
        Rescale rows to sum to one instead of rejecting them.  Off by default.

    Raises
    ------
    ValidationError, NegativeEntryError, RowSumError, NotErgodicError
    """
    P = np.array(matrix, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
        raise ValidationError(f"transition matrix must be square, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise ValidationError("transition matrix has non-finite entries")
    if np.any(P < 0):
        i, j = np.argwhere(P < 0)[0]
        raise NegativeEntryError(f"negative entry P[{i}][{j}] = {float(P[i, j])!r}")
    sums = P.sum(axis=1)
    if renormalize:
        if np.any(sums == 0):
            raise RowSumError(f"row {int(np.argmin(sums))} is all zero")
        P = P / sums[:, None]
    else:
        bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
        if bad.size:
            raise RowSumError(f"row {int(bad[0])} sums to {float(sums[bad[0]])!r}, not 1")
    if np.any(P > 1.0 + ROW_SUM_TOL):
        raise ValidationError("entry exceeds 1")
    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != P.shape[0]:
            raise ValidationError(f"{len(labels)} labels for {P.shape[0]} states")

    adj = csr_matrix(P > 0)
    ncomp, _ = connected_components(adj, directed=True, connection="strong")
    irreducible = ncomp == 1
    aperiodic = irreducible and _period(adj) == 1
    if require_ergodic and not (irreducible and aperiodic):
        if not irreducible:
            msg = f"chain is reducible ({ncomp} strongly connected components)"
        else:
            msg = f"chain is periodic (period {_period(adj)})"
        raise NotErgodicError(msg, irreducible=irreducible, aperiodic=aperiodic)

    P.setflags(write=False)
    return MarkovChain(P=P, labels=labels, irreducible=irreducible, aperiodic=aperiodic)


def _require_ergodic(chain: MarkovChain):
    if not chain.ergodic:
        raise NotErgodicError(
            "operation requires an ergodic chain",
            irreducible=chain.irreducible,
            aperiodic=chain.aperiodic,
        )


# ---------------------------------------------------------------------------
# stationary distribution and reversibility


def stationary_distribution(
    chain: MarkovChain,
    method: str = "linear-solve",
    *,
    tol: float = 1e-14,
    max_iter: int = 1_000_000,
) -> np.ndarray:
    """Stationary distribution ``pi`` with ``pi = P.T @ pi``.

    ``"linear-solve"`` solves ``(P.T - I) pi = 0`` with the normalisation row
    ``sum(pi) = 1`` appended (least squares on the stacked system).
    ``"power-iteration"`` iterates ``pi <- P.T pi`` from the uniform vector
    until successive iterates differ by less than ``tol`` in l1 norm.
    """
    _require_ergodic(chain)
    P = chain.P
    n = chain.n
    if method == "linear-solve":
        A = np.vstack([P.T - np.eye(n), np.ones((1, n))])
        b = np.zeros(n + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
    elif method == "power-iteration":
        pi = np.full(n, 1.0 / n)
        for _ in range(max_iter):
            nxt = pi @ P
            nxt /= nxt.sum()
            if np.abs(nxt - pi).sum() < tol:
                pi = nxt
                break
            pi = nxt
        else:
            raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")
    else:
        raise ValueError(f"unknown method {method!r}")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def is_reversible(chain: MarkovChain, pi=None, tol: float = REVERSIBILITY_TOL) -> bool:
    """True iff ``|pi_i P_ij - pi_j P_ji| <= tol`` for every pair."""
    if pi is None:
        pi = stationary_distribution(chain)
    flow = np.asarray(pi)[:, None] * chain.P
    return bool(np.max(np.abs(flow - flow.T)) <= tol)


# ---------------------------------------------------------------------------
# spectrum


def spectrum(chain: MarkovChain, pi=None) -> Spectrum:
    """Eigen-decomposition of ``P``.

    Reversible chains go through the symmetric discriminant, which has the
    same eigenvalues as ``P`` and a real orthonormal eigenbasis.  Other chains
    fall back to a general eigensolver and are flagged ``reliable=False``.
    """
    from .spectral_hamiltonian import discriminant

    _require_ergodic(chain)
    if pi is None:
        pi = stationary_distribution(chain)
    try:
        if is_reversible(chain, pi):
            D = discriminant(chain, pi=pi).D
            w, V = np.linalg.eigh(D)
            order = np.argsort(-np.abs(w), kind="stable")
            return Spectrum(eigenvalues=w[order], eigenvectors=V[:, order], reliable=True)
        w = np.linalg.eigvals(chain.P)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    order = np.argsort(-np.abs(w), kind="stable")
    return Spectrum(eigenvalues=w[order], eigenvectors=None, reliable=False)


def spectral_gap(chain: MarkovChain, pi=None) -> float:
    """Absolute spectral gap ``|lambda_1| - |lambda_2| = 1 - |lambda_2|``."""
    if chain.n == 1:
        return 1.0
    ev = np.abs(spectrum(chain, pi).eigenvalues)
    return float(min(max(1.0 - ev[1], 0.0), 1.0))


# ---------------------------------------------------------------------------
# mixing and hitting


def mixing_time(chain: MarkovChain, eps_mix: float = 0.25, *, max_steps: int = 10**7, pi=None) -> int:
    """Smallest ``t >= 1`` with ``max_x TV(P^t[x], pi) <= eps_mix``.

    The worst case over deterministic starting states is taken, and ``P^t``
    is built by repeated multiplication.
    """
    _require_ergodic(chain)
    if not 0.0 < eps_mix < 1.0:
        raise ValueError("eps_mix must lie in (0, 1)")
    if pi is None:
        pi = stationary_distribution(chain)
    P = chain.P
    M = P.copy()
    for t in range(1, max_steps + 1):
        tv = 0.5 * np.abs(M - pi[None, :]).sum(axis=1).max()
        if tv <= eps_mix:
            return t
        M = M @ P
    raise IterationCapError(f"mixing time exceeds {max_steps} steps")


def hitting_time(chain: MarkovChain, j: int, pi=None) -> float:
    """Expected steps to first reach ``j`` when starting from ``pi``.

    Solves ``(I - P_minor) h = 1`` on the states other than ``j`` and returns
    ``sum_x pi_x h_x``; a start at ``j`` contributes zero.
    """
    _require_ergodic(chain)
    n = chain.n
    if not 0 <= j < n:
        raise IndexError(f"state {j} out of range for n={n}")
    if pi is None:
        pi = stationary_distribution(chain)
    if n == 1:
        return 0.0
    keep = np.arange(n) != j
    A = np.eye(n - 1) - chain.P[np.ix_(keep, keep)]
    try:
        h = np.linalg.solve(A, np.ones(n - 1))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"first-step system singular for j={j}") from exc
    return float(pi[keep] @ h)


# ---------------------------------------------------------------------------
# transformations


def time_reverse(chain: MarkovChain, pi=None) -> MarkovChain:
    """Reversed chain ``P^_ij = pi_j P_ji / pi_i``."""
    _require_ergodic(chain)
    if pi is None:
        pi = stationary_distribution(chain)
    pi = np.asarray(pi, dtype=float)
    if np.any(pi <= 0):
        raise ZeroStationaryEntryError("stationary distribution has a zero entry")
    R = chain.P.T * pi[None, :] / pi[:, None]
    return validate_chain(R, labels=chain.labels, require_ergodic=False)


def lazify(chain: MarkovChain) -> MarkovChain:
    """Lazy version ``(I + P) / 2``; eigenvalues map to ``(1 + lambda) / 2``."""
    L = 0.5 * (np.eye(chain.n) + chain.P)
    return validate_chain(L, labels=chain.labels, require_ergodic=False)


# ---------------------------------------------------------------------------
# test ensembles


def _two_state(n, rng, p=0.1, q=0.1):
    if n != 2:
        raise BadParamsError("two-state family requires n = 2")
    if not (0 < p <= 1 and 0 < q <= 1) or (p == 1 and q == 1):
        raise BadParamsError(f"two-state needs p, q in (0, 1], not both 1; got p={p}, q={q}")
    return [[1 - p, p], [q, 1 - q]]


def _cycle_lazy(n, rng, laziness=0.5):
    if not 0 < laziness < 1:
        raise BadParamsError("laziness must lie in (0, 1)")
    P = laziness * np.eye(n)
    step = (1 - laziness) / 2
    for x in range(n):
        P[x, (x + 1) % n] += step
        P[x, (x - 1) % n] += step
    return P


def _complete(n, rng):
    return np.full((n, n), 1.0 / n)


def _birth_death(n, rng, up=None, down=None):
    ups = rng.uniform(0.05, 0.45, n - 1) if up is None else np.full(n - 1, float(up))
    downs = rng.uniform(0.05, 0.45, n - 1) if down is None else np.full(n - 1, float(down))
    if np.any(ups <= 0) or np.any(downs <= 0) or np.any(ups >= 1) or np.any(downs >= 1):
        raise BadParamsError("birth-death rates must lie in (0, 1)")
    P = np.zeros((n, n))
    for x in range(n - 1):
        P[x, x + 1] = ups[x]
        P[x + 1, x] = downs[x]
    hold = 1.0 - P.sum(axis=1)
    if np.any(hold < 0):
        raise BadParamsError("up + down rates exceed 1 at some state")
    P[np.diag_indices(n)] = hold
    return P


def _random_reversible(n, rng):
    W = rng.uniform(0.0, 1.0, (n, n))
    W = W + W.T
    W[W == 0] = 1e-3
    return W / W.sum(axis=1, keepdims=True)


FAMILIES = {
    "two-state": _two_state,
    "cycle-lazy": _cycle_lazy,
    "complete": _complete,
    "birth-death": _birth_death,
    "random-reversible": _random_reversible,
}


def gen_family(family: str, n: int = 2, seed: int = 0, **params) -> MarkovChain:
    """Generate an ergodic, reversible member of a named chain family.

    Families: ``two-state`` (p, q), ``cycle-lazy`` (laziness), ``complete``,
    ``birth-death`` (up, down; drawn from ``seed`` when omitted) and
    ``random-reversible`` (symmetric positive weights, rows normalised).
    Output is deterministic in ``seed``.
    """
    if family not in FAMILIES:
        raise BadParamsError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    if int(n) != n or n < 2:
        raise BadParamsError("n must be an integer >= 2")
    rng = np.random.default_rng(seed)
    try:
        P = FAMILIES[family](int(n), rng, **params)
    except TypeError as exc:
        raise BadParamsError(str(exc)) from exc
    try:
        return validate_chain(P)
    except ValidationError as exc:
        raise BadParamsError(f"{family}: {exc}") from exc


def chain_statistics(chain: MarkovChain, eps_mix: float = 0.25, j: int = 0) -> ChainStatistics:
    pi = stationary_distribution(chain)
    return ChainStatistics(
        pi=pi,
        delta=spectral_gap(chain, pi),
        t_mix=mixing_time(chain, eps_mix, pi=pi),
        t_hit=hitting_time(chain, j, pi),
        eps_mix=eps_mix,
        target_j=j,
    )


# ---------------------------------------------------------------------------
# JSON format: {"n": int, "P": [[...]], "labels": [...]}


def chain_to_json(chain: MarkovChain) -> str:
    doc = {"n": chain.n, "P": chain.P.tolist()}
    if chain.labels is not None:
        doc["labels"] = list(chain.labels)
    return json.dumps(doc)


def chain_from_json(text: str, *, require_ergodic: bool = True) -> MarkovChain:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed chain JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("chain JSON must be an object")
    if "P" not in doc:
        raise ValidationError("chain JSON missing field 'P'")
    P = doc["P"]
    if not isinstance(P, list) or not all(isinstance(r, list) for r in P):
        raise ValidationError("field 'P' must be a list of rows")
    n = doc.get("n", len(P))
    if not isinstance(n, int) or n != len(P):
        raise ValidationError(f"field 'n' ({n!r}) does not match the {len(P)} rows of 'P'")
    try:
        return validate_chain(P, labels=doc.get("labels"), require_ergodic=require_ergodic)
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"field 'P': {exc}") from exc


def read_chain(path, *, require_ergodic: bool = True) -> MarkovChain:
    with open(path) as fh:
        return chain_from_json(fh.read(), require_ergodic=require_ergodic)


def write_chain(path, chain: MarkovChain) -> None:
    with open(path, "w") as fh:
        fh.write(chain_to_json(chain))
        fh.write("\n")
