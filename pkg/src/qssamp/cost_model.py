"""Closed-form cost analysis of the two-stage protocol at a possibly wrong ``s'``.

Natural logarithms throughout.  With ``a = alpha**2`` and ``b = beta**2``::

    stage 1  sqrt(1 / (Delta(s') a)) * log(2 / (eps a))
    stage 2  sqrt(1 / (Delta b))     * log(2 / (eps b))
    A = log(2 / (eps a)) / (a sqrt(1 - a))        (constant factor 4 dropped)
    B = log(2 / (eps b)) / b

and the total scales as ``A sqrt(T_hit) + B sqrt(T_mix)``.  Misestimated gaps
enter through the ratio ``C = Delta' / Delta`` of used to true gap.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DivergenceError, RangeError
from .interpolation import interpolated_chain, s_star
from .markov_core import MarkovChain, hitting_time, spectral_gap, stationary_distribution, write_chain

__all__ = [
    "CostReport",
    "SensitivityConfig",
    "FIGURE1_PRESETS",
    "overlap_alpha",
    "overlap_beta",
    "stage_costs",
    "coefficients_AB",
    "cost_report",
    "sweep_AB",
    "sweep_to_csv",
    "sweep_summary",
    "hitting_bound_ratio",
    "HitBoundRow",
    "hitbound_audit",
    "hitbound_to_csv",
    "total_scaling",
    "sensitivity_copies",
    "sensitivity_delta",
    "alt_stage2_cost",
    "compare_sensitivity_routes",
    "underestimate_effect",
]

# (eps, pi_j) pairs plotted in the reference figure
FIGURE1_PRESETS = ((0.01, 0.1), (0.05, 0.5))


def _check_unit(name, x, lo_open=True, hi_open=True, lo=0.0, hi=1.0):
    ok = (x > lo if lo_open else x >= lo) and (x < hi if hi_open else x <= hi)
    if not ok:
        raise RangeError(f"{name} = {float(x)!r} out of range")


# ---------------------------------------------------------------------------
# overlaps


def overlap_alpha(pi_j: float, s_prime: float) -> float:
    """``<j|sqrt(pi(s'))> = sqrt(pi_j / (1 - s'(1 - pi_j)))``."""
    _check_unit("pi_j", pi_j)
    _check_unit("s_prime", s_prime, lo_open=False, hi_open=False)
    return math.sqrt(pi_j / (1.0 - s_prime * (1.0 - pi_j)))


def overlap_beta(pi, j: int, s_prime: float) -> float:
    """``<sqrt(pi(s'))|sqrt(pi)>``.

    Equals ``(pi_j + (1 - pi_j) sqrt(1 - s')) / sqrt(1 - s'(1 - pi_j))`` since
    the off-target masses sum to ``1 - pi_j``; ``pi`` may also be a scalar
    ``pi_j``.
    """
    pi_j = float(pi) if np.ndim(pi) == 0 else float(np.asarray(pi)[j])
    _check_unit("pi_j", pi_j, hi_open=False)
    _check_unit("s_prime", s_prime, lo_open=False, hi_open=False)
    # written as 1 - (...) so that s' = 0 gives exactly 1
    num = 1.0 - (1.0 - pi_j) * (1.0 - math.sqrt(1.0 - s_prime))
    return num / math.sqrt(1.0 - s_prime * (1.0 - pi_j))


# ---------------------------------------------------------------------------
# costs


def stage_costs(delta_s, delta, alpha, beta, eps, variant: str = "sqrt-product"):
    """Complexities of the two filtering stages.

    ``variant="sqrt-product"`` uses ``sqrt(1/(Delta |alpha|^2))`` as prefactor;
    ``variant="linear-overlap"`` uses ``1/(sqrt(Delta) |alpha|^2)``, the form in
    which the two stages are summed into the total.
    """
    for name, v in (("delta_s", delta_s), ("delta", delta)):
        if not v > 0:
            raise RangeError(f"{name} must be positive")
    _check_unit("alpha", alpha, hi_open=False)
    _check_unit("beta", beta, hi_open=False)
    _check_unit("eps", eps)
    a, b = alpha * alpha, beta * beta
    log1 = math.log(2.0 / (eps * a))
    log2 = math.log(2.0 / (eps * b))
    if variant == "sqrt-product":
        return math.sqrt(1.0 / (delta_s * a)) * log1, math.sqrt(1.0 / (delta * b)) * log2
    if variant == "linear-overlap":
        return log1 / (math.sqrt(delta_s) * a), log2 / (math.sqrt(delta) * b)
    raise ValueError(f"unknown variant {variant!r}")


def coefficients_AB(alpha: float, beta: float, eps: float):
    """``(A, B)`` multiplying ``sqrt(T_hit)`` and ``sqrt(T_mix)``."""
    _check_unit("alpha", alpha, hi_open=False)
    _check_unit("beta", beta, hi_open=False)
    _check_unit("eps", eps)
    a, b = alpha * alpha, beta * beta
    if a >= 1.0:
        raise DivergenceError("A diverges at alpha = 1")
    A = math.log(2.0 / (eps * a)) / (a * math.sqrt(1.0 - a))
    B = math.log(2.0 / (eps * b)) / b
    return A, B


def total_scaling(A: float, B: float, t_hit: float, t_mix: float) -> float:
    return A * math.sqrt(t_hit) + B * math.sqrt(t_mix)


@dataclass(frozen=True)
class CostReport:
    alpha: float
    beta: float
    cost_stage1: float
    cost_stage2: float
    A: float
    B: float
    total_scaling: Optional[float] = None
    variant: str = "sqrt-product"
    log_convention: str = "natural"
    precision_preserved: bool = True
    annotations: tuple = ()


def cost_report(pi_j, s_prime, eps, delta_s, delta, t_hit=None, t_mix=None, variant="sqrt-product") -> CostReport:
    alpha = overlap_alpha(pi_j, s_prime)
    beta = overlap_beta(pi_j, 0, s_prime)
    c1, c2 = stage_costs(delta_s, delta, alpha, beta, eps, variant)
    A, B = coefficients_AB(alpha, beta, eps)
    total = total_scaling(A, B, t_hit, t_mix) if t_hit is not None and t_mix is not None else None
    return CostReport(alpha, beta, c1, c2, A, B, total, variant)


# ---------------------------------------------------------------------------
# sweeps


def sweep_AB(pi_j: float, eps: float, grid: int = 512) -> np.ndarray:
    """Rows ``(s', alpha, beta, A, B)`` for ``s' = i / grid``, ``i = 0 .. grid - 1``."""
    if int(grid) != grid or grid < 16:
        raise RangeError("grid must be an integer >= 16")
    _check_unit("pi_j", pi_j)
    _check_unit("eps", eps)
    rows = np.empty((grid, 5))
    for i in range(grid):
        s = i / grid
        al = overlap_alpha(pi_j, s)
        be = overlap_beta(pi_j, 0, s)
        A, B = coefficients_AB(al, be, eps)
        rows[i] = (s, al, be, A, B)
    return rows


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write("s_prime,alpha,beta,A,B\n")
    for r in rows:
        buf.write(",".join(format(float(v), ".17g") for v in r))
        buf.write("\n")
    return buf.getvalue()


def sweep_summary(pi_j: float, eps: float, rows) -> dict:
    """``argmin(A)`` on the grid next to ``s*`` (these need not coincide)."""
    k = int(np.argmin(rows[:, 3]))
    star = 1.0 - pi_j / (1.0 - pi_j)
    A_star = coefficients_AB(overlap_alpha(pi_j, star), overlap_beta(pi_j, 0, star), eps)[0] if 0.0 <= star < 1.0 else None
    return {"eps": eps, "pi_j": pi_j, "s_star": star, "A_at_s_star": A_star,
            "argmin_A": float(rows[k, 0]), "min_A": float(rows[k, 3])}


# ---------------------------------------------------------------------------
# hitting-time bound audit


def hitting_bound_ratio(chain: MarkovChain, j: int, s_prime: float) -> float:
    """``(1 / Delta(s')) (1 - alpha**2) / (4 T_hit)``; >= 1 when the claimed bound holds."""
    _check_unit("s_prime", s_prime, lo_open=False)
    pi = stationary_distribution(chain)
    alpha = overlap_alpha(float(pi[j]), s_prime)
    d_s = spectral_gap(interpolated_chain(chain, j, s_prime))
    t_hit = hitting_time(chain, j, pi)
    return (1.0 / d_s) * (1.0 - alpha**2) / (4.0 * t_hit)


@dataclass(frozen=True)
class HitBoundRow:
    name: str
    n: int
    j: int
    s_prime: float
    delta_s: float
    t_hit: float
    alpha: float
    ratio: float
    archived: Optional[str] = None


def hitbound_audit(chains, s_rule="star", archive_dir=None):
    """Evaluate :func:`hitting_bound_ratio` on ``(name, chain, j)`` triples.

    ``s_rule`` is ``"star"`` (exact ``s*`` of the target) or a float.  Chains
    with ratio below one are written to ``archive_dir`` as chain JSON when it
    is given.
    """
    rows = []
    for name, chain, j in chains:
        pi = stationary_distribution(chain)
        sp = s_star(float(pi[j])) if s_rule == "star" else float(s_rule)
        d_s = spectral_gap(interpolated_chain(chain, j, sp))
        t_hit = hitting_time(chain, j, pi)
        alpha = overlap_alpha(float(pi[j]), sp)
        ratio = (1.0 / d_s) * (1.0 - alpha**2) / (4.0 * t_hit)
        path = None
        if ratio < 1.0 and archive_dir is not None:
            os.makedirs(archive_dir, exist_ok=True)
            path = os.path.join(archive_dir, f"{name}.json")
            write_chain(path, chain)
        rows.append(HitBoundRow(name, chain.n, int(j), sp, d_s, t_hit, alpha, ratio, path))
    return rows


def hitbound_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "n", "j", "s_prime", "delta_s", "t_hit", "alpha", "ratio", "archived"])
    for r in rows:
        w.writerow([r.name, r.n, r.j] + [format(v, ".17g") for v in (r.s_prime, r.delta_s, r.t_hit, r.alpha, r.ratio)]
                   + [r.archived or ""])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# gap misestimation


@dataclass(frozen=True)
class SensitivityConfig:
    C: float
    eps: float
    which_gap: str = "stage2"

    def __post_init__(self):
        _check_unit("C", self.C, hi=2.0)
        _check_unit("eps", self.eps)
        if self.which_gap not in ("stage1", "stage2"):
            raise RangeError(f"which_gap must be 'stage1' or 'stage2', got {self.which_gap!r}")


_NO_GUARANTEE = ("C >= 2: a gap estimate twice the true gap or more leaves no guaranteed "
                 "overlap between the filtered and target states")


def sensitivity_copies(C: float, eps: float) -> int:
    """``ceil(log_{2/C}(4/eps))`` pointer copies for an overestimate ``Delta' = C Delta``."""
    if C >= 2.0:
        raise RangeError(_NO_GUARANTEE)
    _check_unit("C", C, hi=2.0)
    _check_unit("eps", eps)
    # log2 keeps C = 1 exact (log2(2) == 1)
    return math.ceil(math.log2(4.0 / eps) / math.log2(2.0 / C))


def sensitivity_delta(C: float, eps: float) -> float:
    """Overlap ``(eps/4) ** log_{1/2}(C/2)`` left after stage 1 run with the original copies."""
    if C >= 2.0:
        raise RangeError(_NO_GUARANTEE)
    _check_unit("C", C, hi=2.0)
    _check_unit("eps", eps)
    return (eps / 4.0) ** (math.log(C / 2.0) / math.log(0.5))


def alt_stage2_cost(delta: float, delta_overlap: float) -> float:
    """``log(1/delta_overlap) / (delta * delta_overlap)``."""
    if not delta > 0:
        raise RangeError("delta must be positive")
    _check_unit("delta_overlap", delta_overlap)
    return math.log(1.0 / delta_overlap) / (delta * delta_overlap)


def compare_sensitivity_routes(C: float, eps: float, delta: float) -> dict:
    """Stage-2 cost of the extra-copies route against the degraded-overlap route.

    Extra copies multiply the baseline ``sqrt(1/Delta) log(2/eps)`` cost by
    ``copies(C) / copies(1)``; the alternative restarts stage 2 from overlap
    ``delta_overlap`` and costs :func:`alt_stage2_cost`.
    """
    copies = sensitivity_copies(C, eps)
    base = sensitivity_copies(1.0, eps)
    overlap = sensitivity_delta(C, eps)
    extra = math.sqrt(1.0 / delta) * math.log(2.0 / eps) * copies / base
    alt = alt_stage2_cost(delta, overlap)
    return {"C": C, "eps": eps, "delta": delta, "copies": copies, "baseline_copies": base,
            "delta_overlap": overlap, "extra_copies_cost": extra, "alt_cost": alt,
            "cheaper": "extra-copies" if extra <= alt else "alt-cost"}


def underestimate_effect(report: CostReport, delta_true: float, delta_used: float, which_gap: str = "stage2") -> CostReport:
    """Annotate ``report`` for a gap estimate ``delta_used <= delta_true``.

    Precision is kept; the affected stage cost grows by ``sqrt(delta_true / delta_used)``.
    """
    if not 0.0 < delta_used <= delta_true:
        raise RangeError("underestimate requires 0 < delta_used <= delta_true")
    if delta_used == delta_true:
        return report
    factor = math.sqrt(delta_true / delta_used)
    field = "cost_stage1" if which_gap == "stage1" else "cost_stage2"
    note = f"{which_gap} gap underestimated by {delta_true / delta_used:.6g}x; cost x{factor:.6g}"
    return replace(report, **{field: getattr(report, field) * factor},
                   precision_preserved=True, annotations=report.annotations + (note,))
