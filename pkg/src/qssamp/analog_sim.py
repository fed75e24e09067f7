"""Pointer-register simulation of the two-stage stationary-state preparation.

The system (``n`` chain states) is coupled to a pointer living on a periodic
position lattice ``x_m = m dx``, ``m = -L/2 .. L/2 - 1``.  Evolving under
``H (x) p`` translates the pointer by ``mu_k t`` on the ``k``-th eigencomponent
of ``H``; post-selecting the pointer back at ``x = 0`` keeps the zero-energy
component intact and suppresses the rest.  Repeating this ``copies`` times
(with a fresh pointer each round) filters a state toward the ground state.

Amplitudes are stored as an ``(n, L)`` complex grid in the (system
computational) x (pointer position) basis, pointer index ``L // 2`` being
``x = 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np

from .errors import (
    BadSizeError,
    ConvergenceError,
    DimensionMismatchError,
    NonPositiveGapError,
    NoValidJError,
    NotReversibleError,
    RangeError,
    ZeroProbabilityError,
)
from .interpolation import s_star
from .markov_core import MarkovChain, is_reversible, stationary_distribution
from .spectral_hamiltonian import HamiltonianModel, hamiltonian_for

__all__ = [
    "PointerRegister",
    "JointState",
    "ProtocolConfig",
    "StageDiagnostics",
    "ProtocolResult",
    "init_pointer",
    "pointer_for_time",
    "joint_state",
    "evolve",
    "postselect_zero",
    "filter_stage",
    "default_copies",
    "time_per_round",
    "sampled_acceptance",
    "run_protocol",
]


@dataclass(frozen=True)
class PointerRegister:
    L: int
    dx: float = 1.0

    def __post_init__(self):
        L = self.L
        if int(L) != L or L < 4 or L & (L - 1):
            raise BadSizeError(f"pointer size must be a power of two >= 4, got {L}")
        if not self.dx > 0:
            raise BadSizeError(f"lattice spacing must be positive, got {self.dx}")

    @property
    def zero_index(self) -> int:
        return self.L // 2

    @property
    def positions(self) -> np.ndarray:
        return (np.arange(self.L) - self.L // 2) * self.dx

    @property
    def momenta(self) -> np.ndarray:
        """Momenta ``2 pi k / (L dx)`` in FFT order, conjugate to :attr:`positions`."""
        return 2.0 * np.pi * np.fft.fftfreq(self.L, d=self.dx)

    def delta(self) -> np.ndarray:
        v = np.zeros(self.L, dtype=complex)
        v[self.zero_index] = 1.0
        return v

    def to_momentum(self, phi, axis=-1) -> np.ndarray:
        return np.fft.fft(np.fft.ifftshift(phi, axes=axis), axis=axis, norm="ortho")

    def to_position(self, phi_p, axis=-1) -> np.ndarray:
        return np.fft.fftshift(np.fft.ifft(phi_p, axis=axis, norm="ortho"), axes=axis)


@dataclass(frozen=True, eq=False)
class JointState:
    """System x pointer amplitudes plus the product of post-selection probabilities so far."""

    amplitudes: np.ndarray
    pointer: PointerRegister
    probability: float = 1.0

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def init_pointer(L: int, dx: float = 1.0) -> PointerRegister:
    """Pointer lattice of ``L`` sites; its initial state is the delta at ``x = 0``."""
    return PointerRegister(L=L, dx=dx)


def pointer_for_time(t: float, dx: float = 1.0) -> PointerRegister:
    """Smallest power-of-two lattice with ``L dx > 2 t`` (and ``L >= 8``)."""
    L = 8
    while L * dx <= 2.0 * t + 2.0 * dx:
        L *= 2
    return PointerRegister(L=L, dx=dx)


def joint_state(psi, pointer: PointerRegister) -> JointState:
    """``psi (x) |x=0>``."""
    psi = np.asarray(psi, dtype=complex)
    amps = np.zeros((psi.shape[0], pointer.L), dtype=complex)
    amps[:, pointer.zero_index] = psi
    return JointState(amplitudes=amps, pointer=pointer)


def evolve(H: HamiltonianModel, state: JointState, t: float) -> JointState:
    """Apply ``exp(-i t H (x) p)``.

    Works in the product of the eigenbasis of ``H`` and the momentum basis of
    the pointer, where the evolution is the diagonal phase
    ``exp(-i mu_k p_m t)``.
    """
    if state.n != H.n:
        raise DimensionMismatchError(f"state has {state.n} system levels, Hamiltonian {H.n}")
    if t < 0:
        raise RangeError("evolution time must be nonnegative")
    ptr = state.pointer
    coeffs = H.U.T @ state.amplitudes
    mom = ptr.to_momentum(coeffs, axis=1)
    mom *= np.exp(-1j * t * np.outer(H.mu, ptr.momenta))
    amps = H.U @ ptr.to_position(mom, axis=1)
    return JointState(amplitudes=amps, pointer=ptr, probability=state.probability)


def postselect_zero(state: JointState, window: int = 0, min_probability: float = 0.0):
    """Project the pointer onto the sites ``|m| <= window`` around ``x = 0``.

    Returns ``(kept, probability)`` where ``probability`` is the conditional
    success probability.  With ``window = 0`` the pointer collapses to a single
    site and ``kept`` is the renormalised system vector.  For ``window > 0``
    ``kept`` is the renormalised ``(n, 2 window + 1)`` block of joint
    amplitudes; no coherent aggregation over sites is attempted.
    """
    if window < 0:
        raise RangeError("window must be >= 0")
    z = state.pointer.zero_index
    block = state.amplitudes[:, z - window:z + window + 1]
    total = state.norm_sq()
    kept = float(np.vdot(block, block).real)
    prob = kept / total if total > 0 else 0.0
    if prob <= min_probability:
        raise ZeroProbabilityError(f"post-selection probability {prob:.3e} is zero within tolerance")
    block = block / math.sqrt(kept)
    if window == 0:
        block = block[:, 0]
    return block, prob


# ---------------------------------------------------------------------------
# filtering stage


def time_per_round(gap_estimate: float) -> float:
    """Evolution time ``1 / sqrt(gap_estimate)`` for a chain-gap estimate.

    ``sqrt(Delta)`` never exceeds the Hamiltonian gap ``sqrt(Delta (2 - Delta))``,
    so with the exact chain gap every nonzero eigencomponent is displaced by
    at least one lattice unit (``dx = 1``).
    """
    if not gap_estimate > 0:
        raise NonPositiveGapError(f"gap estimate must be positive, got {gap_estimate}")
    return 1.0 / math.sqrt(gap_estimate)


def default_copies(eps: float) -> int:
    """``ceil(log2(4 / eps))`` pointer copies."""
    if not 0.0 < eps < 1.0:
        raise RangeError("eps must lie in (0, 1)")
    return math.ceil(math.log2(4.0 / eps))


@dataclass
class StageDiagnostics:
    rounds: int
    t_per_round: float
    evolution_time: float
    success_prob: float
    round_probs: list
    overlap_in: float
    overlap_out: float
    leakage: float
    pointer_size: int
    gap_estimate: float
    attempts: int = 1
    rounds_executed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def sampled_acceptance(round_probs, trials: int, rng: np.random.Generator) -> int:
    """Number of accepted stage attempts out of ``trials`` independent ones."""
    draws = rng.random((trials, len(round_probs)))
    return int(np.all(draws < np.asarray(round_probs)[None, :], axis=1).sum())


def _sample_attempts(round_probs, rng, max_attempts=1_000_000):
    attempts = 0
    executed = 0
    while attempts < max_attempts:
        attempts += 1
        for p in round_probs:
            executed += 1
            if rng.random() >= p:
                break
        else:
            return attempts, executed
    raise ConvergenceError(f"stage not accepted after {max_attempts} attempts")


def filter_stage(
    H: HamiltonianModel,
    psi,
    eps: float,
    gap_estimate: Optional[float] = None,
    copies: Optional[int] = None,
    pointer: Optional[PointerRegister] = None,
    *,
    t: Optional[float] = None,
    rng: Optional[np.random.Generator] = None,
    min_probability: float = 1e-12,
):
    """Run ``copies`` rounds of evolve / post-select / reset on a system state.

    Parameters
    ----------
    H : HamiltonianModel
    psi : array_like
        Normalised system state with nonzero ground-state overlap.
    eps : float
        Target precision; fixes the default number of copies.
    gap_estimate : float, optional
        User-supplied estimate of the chain spectral gap behind ``H``; the
        evolution time per round is :func:`time_per_round` of it.  ``None``
        uses the exact gap.
    copies : int, optional
        Number of rounds, default ``ceil(log2(4 / eps))``.
    pointer : PointerRegister, optional
        Lattice; default is the smallest one with ``L dx > 2 t``.
    t : float, optional
        Override of the evolution time per round.
    rng : numpy.random.Generator, optional
        Switches to sampled mode: rejected attempts restart the stage and are
        counted in ``attempts`` and ``rounds_executed``.

    Returns
    -------
    out : ndarray
        Renormalised state conditioned on every post-selection succeeding.
    diag : StageDiagnostics
    """
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    if copies is None:
        copies = default_copies(eps)
    if copies < 1:
        raise RangeError("copies must be >= 1")
    if gap_estimate is None:
        gap_estimate = H.chain_gap
    elif not gap_estimate > 0:
        raise NonPositiveGapError(f"gap estimate must be positive, got {gap_estimate}")
    if t is None:
        t = time_per_round(gap_estimate)
    if pointer is None:
        pointer = pointer_for_time(t)
    elif pointer.L * pointer.dx <= 2.0 * t:
        raise BadSizeError(f"pointer of {pointer.L} sites too small for t = {t} (needs L dx > 2 t)")

    u0 = H.ground_state
    overlap_in = abs(np.vdot(u0, psi)) ** 2
    state = psi
    probs = []
    leakage = 0.0
    for _ in range(copies):
        joint = evolve(H, joint_state(state, pointer), t)
        state, p = postselect_zero(joint, 0, min_probability)
        a0_sq = abs(np.vdot(u0, state)) ** 2
        # acceptance mass not explained by the ground-state component
        leakage += p * (1.0 - a0_sq)
        probs.append(p)
    success = float(np.prod(probs))
    diag = StageDiagnostics(
        rounds=copies,
        t_per_round=float(t),
        evolution_time=float(copies * t),
        success_prob=success,
        round_probs=[float(p) for p in probs],
        overlap_in=float(overlap_in),
        overlap_out=float(abs(np.vdot(u0, state)) ** 2),
        leakage=float(leakage),
        pointer_size=pointer.L,
        gap_estimate=float(gap_estimate),
        rounds_executed=copies,
    )
    if rng is not None:
        diag.attempts, diag.rounds_executed = _sample_attempts(probs, rng)
        diag.evolution_time = float(diag.rounds_executed * t)
    return state, diag


# ---------------------------------------------------------------------------
# full protocol


@dataclass(frozen=True)
class ProtocolConfig:
    """Parameters of a protocol run.

    ``s_prime`` is the interpolation value used in place of ``s*``; the string
    ``"auto"`` computes ``s*`` from the exact stationary distribution, which is
    recorded as oracle-assisted.  Gap estimates are chain spectral gaps
    (``None`` means exact).
    """

    eps: float = 0.05
    s_prime: Union[float, str] = "auto"
    gap_estimate_stage1: Optional[float] = None
    gap_estimate_stage2: Optional[float] = None
    copies_stage1: Optional[int] = None
    copies_stage2: Optional[int] = None
    t_per_round: Optional[float] = None
    pointer_size: Optional[int] = None
    dx: float = 1.0
    mode: str = "exact-conditional"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise RangeError("eps must lie in (0, 1)")
        if self.s_prime != "auto" and not (isinstance(self.s_prime, (int, float)) and 0.0 <= self.s_prime < 1.0):
            raise RangeError(f"s_prime must be 'auto' or in [0, 1), got {self.s_prime!r}")
        for name in ("copies_stage1", "copies_stage2"):
            c = getattr(self, name)
            if c is not None and c < 1:
                raise RangeError(f"{name} must be >= 1")
        for name in ("gap_estimate_stage1", "gap_estimate_stage2", "t_per_round"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise NonPositiveGapError(f"{name} must be positive")
        if self.mode not in ("exact-conditional", "sampled"):
            raise RangeError(f"unknown mode {self.mode!r}")
        if self.pointer_size is not None:
            ptr = PointerRegister(self.pointer_size, self.dx)
            if self.t_per_round is not None and ptr.L * ptr.dx <= 2.0 * self.t_per_round:
                raise BadSizeError("pointer_size must satisfy L dx > 2 t_per_round")

    @property
    def copies(self):
        base = default_copies(self.eps)
        return (self.copies_stage1 or base, self.copies_stage2 or base)


@dataclass
class ProtocolResult:
    final_state: np.ndarray
    fidelity_sq: float
    success_prob: float
    total_evolution_time: float
    stage1: StageDiagnostics
    stage2: StageDiagnostics
    leakage: float
    j: int
    s_prime: float
    s_prime_source: str
    alpha_sq: float
    beta_sq: float
    stage1_overlap_pi: float
    mode: str = "exact-conditional"

    def to_dict(self) -> dict:
        return {
            "fidelity_sq": self.fidelity_sq,
            "success_prob": self.success_prob,
            "total_evolution_time": self.total_evolution_time,
            "stage1": dict(self.stage1.to_dict(), overlap_pi=self.stage1_overlap_pi, alpha_sq=self.alpha_sq),
            "stage2": dict(self.stage2.to_dict(), beta_sq=self.beta_sq),
            "leakage": self.leakage,
            "j": self.j,
            "s_prime": self.s_prime,
            "s_prime_source": self.s_prime_source,
            "oracle_assisted": self.s_prime_source == "oracle-assisted",
            "mode": self.mode,
            "final_state": {"re": self.final_state.real.tolist(), "im": self.final_state.imag.tolist()},
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def run_protocol(chain: MarkovChain, j: int, config: ProtocolConfig = ProtocolConfig()) -> ProtocolResult:
    """Two-stage preparation of ``sqrt(pi)`` starting from the basis state ``|j>``.

    Stage 1 filters ``|j>`` with the Hamiltonian of ``P(s')``; stage 2 filters
    the result with the Hamiltonian of ``P``.
    """
    pi = stationary_distribution(chain)
    if not is_reversible(chain, pi):
        raise NotReversibleError("protocol requires a reversible chain")
    if not 0 <= j < chain.n:
        raise IndexError(f"state {j} out of range for n={chain.n}")
    pi_j = float(pi[j])
    if config.s_prime == "auto":
        if not 0.0 < pi_j < 0.5:
            raise NoValidJError(f"pi_{j} = {pi_j:.6g} is not below 1/2, so s* is not in (0, 1)")
        sp = s_star(pi_j)
        source = "oracle-assisted"
    else:
        sp = float(config.s_prime)
        source = "user"

    rng = np.random.default_rng(config.seed) if config.mode == "sampled" else None
    ptr = PointerRegister(config.pointer_size, config.dx) if config.pointer_size else None
    c1, c2 = config.copies

    H1 = hamiltonian_for(chain, j, sp)
    H2 = hamiltonian_for(chain)
    e_j = np.zeros(chain.n, dtype=complex)
    e_j[j] = 1.0
    mid, d1 = filter_stage(H1, e_j, config.eps, config.gap_estimate_stage1, c1, ptr,
                           t=config.t_per_round, rng=rng)
    out, d2 = filter_stage(H2, mid, config.eps, config.gap_estimate_stage2, c2, ptr,
                           t=config.t_per_round, rng=rng)

    sqrt_pi = np.sqrt(pi)
    return ProtocolResult(
        final_state=out,
        fidelity_sq=float(abs(np.vdot(sqrt_pi, out)) ** 2),
        success_prob=d1.success_prob * d2.success_prob,
        total_evolution_time=d1.evolution_time + d2.evolution_time,
        stage1=d1,
        stage2=d2,
        leakage=d1.leakage + d2.leakage,
        j=j,
        s_prime=sp,
        s_prime_source=source,
        alpha_sq=float(abs(H1.ground_state[j]) ** 2),
        beta_sq=float(abs(np.vdot(H1.ground_state, sqrt_pi)) ** 2),
        stage1_overlap_pi=float(abs(np.vdot(sqrt_pi, mid)) ** 2),
        mode=config.mode,
    )
