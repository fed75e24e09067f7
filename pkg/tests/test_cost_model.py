import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qssamp import cost_model as cm
from qssamp import interpolation as ip
from qssamp import markov_core as mc
from qssamp.errors import DivergenceError, RangeError


# --- overlaps -----------------------------------------------------------


def test_alpha_examples():
    assert cm.overlap_alpha(0.3, 0.0) == pytest.approx(math.sqrt(0.3), abs=1e-15)
    assert cm.overlap_alpha(0.1, 8 / 9) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert cm.overlap_alpha(0.1, 0.5) == pytest.approx(0.426401, abs=1e-6)
    with pytest.raises(RangeError):
        cm.overlap_alpha(0.0, 0.5)
    with pytest.raises(RangeError):
        cm.overlap_alpha(0.1, 1.5)


def test_beta_examples():
    assert cm.overlap_beta(0.1, 0, 0.0) == 1.0
    expected = (math.sqrt(0.1) + math.sqrt(0.9)) / math.sqrt(2)
    assert cm.overlap_beta(0.1, 0, 8 / 9) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.894427, abs=1e-6)
    assert cm.overlap_beta(np.array([0.3, 0.1, 0.6]), 1, 8 / 9) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 8), seed=st.integers(0, 10**6), s=st.floats(0, 0.999), data=st.data())
def test_overlaps_match_inner_products(n, seed, s, data):
    c = mc.gen_family("random-reversible", n, seed)
    j = data.draw(st.integers(0, n - 1))
    pi = mc.stationary_distribution(c)
    root_s = np.sqrt(ip.interpolated_stationary(c, j, s, pi))
    assert cm.overlap_alpha(pi[j], s) == pytest.approx(root_s[j], abs=1e-12)
    assert cm.overlap_beta(pi, j, s) == pytest.approx(root_s @ np.sqrt(pi), abs=1e-12)
    assert 0 < cm.overlap_beta(pi, j, s) <= 1


@settings(max_examples=60, deadline=None)
@given(pi_j=st.floats(1e-3, 0.999), s=st.floats(0, 1))
def test_overlap_ranges(pi_j, s):
    assert 0 < cm.overlap_alpha(pi_j, s) <= 1 + 1e-15
    assert 0 < cm.overlap_beta(pi_j, 0, s) <= 1 + 1e-15


def test_alpha_at_star_is_half_exactly():
    for pi_j in (0.01, 0.1, 0.25, 0.4):
        assert cm.overlap_alpha(pi_j, ip.s_star(pi_j)) ** 2 == pytest.approx(0.5, abs=1e-12)


# --- costs --------------------------------------------------------------


def test_stage_cost_examples():
    c1, _ = cm.stage_costs(1.0, 1.0, 1.0, 1.0, 2 / math.e)
    assert c1 == pytest.approx(1.0, abs=1e-15)
    c1, _ = cm.stage_costs(0.01, 1.0, math.sqrt(0.5), 1.0, 0.05)
    assert c1 == pytest.approx(math.sqrt(200) * math.log(80), abs=1e-12)
    assert c1 == pytest.approx(61.97, abs=0.01)
    _, c2 = cm.stage_costs(0.3, 0.04, 0.5, 1.0, 0.05)
    assert c2 == pytest.approx(math.sqrt(1 / 0.04) * math.log(2 / 0.05))


def test_stage_cost_variants_differ():
    a, b = math.sqrt(0.3), 0.9
    sq = cm.stage_costs(0.01, 0.02, a, b, 0.05, "sqrt-product")
    lin = cm.stage_costs(0.01, 0.02, a, b, 0.05, "linear-overlap")
    assert lin[0] == pytest.approx(math.log(2 / (0.05 * 0.3)) / (0.1 * 0.3))
    assert lin[0] > sq[0]
    with pytest.raises(ValueError):
        cm.stage_costs(0.01, 0.02, a, b, 0.05, "other")


def test_AB_examples():
    A, _ = cm.coefficients_AB(math.sqrt(0.5), 0.9, 0.01)
    assert A == pytest.approx(2 * math.sqrt(2) * math.log(400), abs=1e-9)
    assert A == pytest.approx(16.946, abs=1e-3)
    A, B = cm.coefficients_AB(math.sqrt(0.1), 1.0, 0.01)
    assert A == pytest.approx(math.log(2000) / (0.1 * math.sqrt(0.9)))
    assert A == pytest.approx(80.12, abs=0.01)
    assert B == pytest.approx(math.log(200))
    assert cm.coefficients_AB(0.5, 1.0, 2 / math.e)[1] == pytest.approx(1.0)
    with pytest.raises(DivergenceError):
        cm.coefficients_AB(1.0, 1.0, 0.05)


def test_total_scaling():
    assert cm.total_scaling(1, 1, 4, 9) == 5
    assert cm.total_scaling(3, 0, 16, 9) == 12


def test_cost_report_recombines():
    c = mc.gen_family("birth-death", 4, up=0.33, down=0.2)
    st_ = mc.chain_statistics(c, 0.05, 0)
    pj = st_.pi[0]
    sp = ip.s_star(pj)
    rep = cm.cost_report(pj, sp, 0.05, mc.spectral_gap(ip.interpolated_chain(c, 0, sp)), st_.delta,
                         st_.t_hit, st_.t_mix)
    assert rep.log_convention == "natural"
    assert rep.total_scaling == pytest.approx(rep.A * math.sqrt(st_.t_hit) + rep.B * math.sqrt(st_.t_mix), abs=1e-12)
    assert rep.cost_stage1 > 0 and rep.cost_stage2 > 0


# --- sweeps -------------------------------------------------------------


def test_sweep_shape_and_endpoints():
    rows = cm.sweep_AB(0.1, 0.01, 512)
    assert rows.shape == (512, 5)
    assert rows[0, 0] == 0.0 and rows[-1, 0] == 511 / 512
    assert rows[0, 2] == 1.0
    assert rows[0, 4] == math.log(200)
    assert np.all(np.diff(rows[:, 4]) >= 0)


def test_sweep_second_preset_boundary():
    rows = cm.sweep_AB(0.5, 0.05, 64)
    assert rows[0, 4] == math.log(2 / 0.05)
    s = cm.sweep_summary(0.5, 0.05, rows)
    assert s["s_star"] == 0.0


def test_A_diverges_toward_one():
    A_star = 2 * math.sqrt(2) * math.log(400)
    last = [cm.sweep_AB(0.1, 0.01, g)[-1, 3] for g in (512, 4096, 16384)]
    assert last[0] < last[1] < last[2]
    assert last[2] >= 10 * A_star


def test_argmin_differs_from_star():
    rows = cm.sweep_AB(0.1, 0.01, 512)
    s = cm.sweep_summary(0.1, 0.01, rows)
    assert s["argmin_A"] > s["s_star"]
    assert s["A_at_s_star"] == pytest.approx(2 * math.sqrt(2) * math.log(400), abs=1e-9)


def test_sweep_csv_format():
    text = cm.sweep_to_csv(cm.sweep_AB(0.1, 0.01, 16))
    lines = text.splitlines()
    assert lines[0] == "s_prime,alpha,beta,A,B"
    assert len(lines) == 17
    assert float(lines[1].split(",")[4]) == math.log(200)
    assert text == cm.sweep_to_csv(cm.sweep_AB(0.1, 0.01, 16))


def test_sweep_rejects_small_grid():
    with pytest.raises(RangeError):
        cm.sweep_AB(0.1, 0.01, 8)


# --- hitting bound ------------------------------------------------------


def _first_step_hitting(P, pi, j):
    # h_x = 1 + sum_y P_xy h_y, h_j = 0, solved on all n states at once
    n = len(pi)
    A = np.eye(n) - P
    A[j, :] = 0
    A[j, j] = 1
    b = np.ones(n)
    b[j] = 0
    return float(pi @ np.linalg.solve(A, b))


def test_hitting_ratio_complete_four():
    c = mc.gen_family("complete", 4)
    pi = mc.stationary_distribution(c)
    sp = ip.s_star(pi[0])
    lam = np.sort(np.abs(np.linalg.eigvals(ip.interpolated_chain(c, 0, sp).P)))[::-1]
    t_hit = _first_step_hitting(c.P, pi, 0)
    assert t_hit == pytest.approx(3.0)
    expected = (1 / (1 - lam[1])) * 0.5 / (4 * t_hit)
    assert cm.hitting_bound_ratio(c, 0, sp) == pytest.approx(expected, rel=1e-9)


def test_hitbound_audit_archives(tmp_path):
    chains = [(f"complete-{n}", mc.gen_family("complete", n), 0) for n in (3, 4)]
    rows = cm.hitbound_audit(chains, "star", archive_dir=tmp_path)
    assert [r.name for r in rows] == ["complete-3", "complete-4"]
    for r in rows:
        assert r.alpha ** 2 == pytest.approx(0.5)
        if r.ratio < 1:
            back = mc.read_chain(r.archived)
            assert back.n == r.n
    csv_text = cm.hitbound_to_csv(rows)
    assert csv_text.splitlines()[0].startswith("name,n,j,s_prime,delta_s,t_hit,alpha,ratio")
    assert cm.hitbound_to_csv([]).count("\n") == 1


# --- gap misestimation --------------------------------------------------


@pytest.mark.parametrize("eps", [0.5, 0.05, 0.005])
def test_copies_reduce_at_C_one(eps):
    assert cm.sensitivity_copies(1.0, eps) == math.ceil(math.log2(4 / eps))
    assert cm.sensitivity_delta(1.0, eps) == eps / 4


def test_sensitivity_examples():
    assert cm.sensitivity_copies(1.5, 0.05) == 16
    assert cm.sensitivity_copies(1.99, 0.05) == 875
    assert cm.sensitivity_delta(1.5, 0.05) == pytest.approx(0.1621, abs=1e-3)
    for C in (2.0, 2.5):
        with pytest.raises(RangeError, match="no guaranteed"):
            cm.sensitivity_copies(C, 0.05)
        with pytest.raises(RangeError):
            cm.sensitivity_delta(C, 0.05)


def test_delta_increasing_in_C():
    # exponent log2(2/C) falls with C and eps/4 < 1
    grid = np.linspace(0.01, 1.99, 200)
    vals = [cm.sensitivity_delta(C, 0.05) for C in grid]
    assert np.all(np.diff(vals) > 0)


def test_alt_cost_examples():
    assert cm.alt_stage2_cost(1.0, 1 / math.e) == pytest.approx(math.e)
    d = cm.sensitivity_delta(1.5, 0.05)
    assert cm.alt_stage2_cost(0.01, d) == pytest.approx(1122.6, rel=2e-3)


def test_route_comparison():
    r = cm.compare_sensitivity_routes(1.5, 0.05, 0.01)
    assert r["copies"] == 16 and r["baseline_copies"] == 7
    assert r["cheaper"] == "extra-copies"
    assert cm.compare_sensitivity_routes(1.99, 0.05, 0.01)["cheaper"] == "alt-cost"


def test_sensitivity_config():
    cm.SensitivityConfig(1.5, 0.05, "stage1")
    with pytest.raises(RangeError):
        cm.SensitivityConfig(2.0, 0.05)
    with pytest.raises(RangeError):
        cm.SensitivityConfig(1.0, 0.05, "both")


def test_underestimate_effect():
    rep = cm.cost_report(0.1, 8 / 9, 0.05, 0.01, 0.02)
    assert cm.underestimate_effect(rep, 0.02, 0.02) is rep
    out = cm.underestimate_effect(rep, 0.02, 0.005)
    assert out.cost_stage2 == pytest.approx(2 * rep.cost_stage2)
    assert out.cost_stage1 == rep.cost_stage1
    assert out.precision_preserved and out.annotations
    with pytest.raises(RangeError):
        cm.underestimate_effect(rep, 0.02, 0.03)
