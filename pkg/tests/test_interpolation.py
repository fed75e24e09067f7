import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qssamp import interpolation as ip
from qssamp import markov_core as mc
from qssamp.errors import NotReversibleError, NoValidJError, RangeError

HALF = mc.validate_chain([[0.5, 0.5], [0.5, 0.5]])


def _top_eigvec_stationary(P):
    w, V = np.linalg.eig(P.T)
    v = np.real(V[:, np.argmax(w.real)])
    return v / v.sum()


def test_absorbing_variant_example():
    Pp = ip.absorbing_variant(HALF, 0)
    np.testing.assert_array_equal(Pp.P, [[1, 0], [0.5, 0.5]])
    np.testing.assert_array_equal(Pp.P @ Pp.P, [[1, 0], [0.75, 0.25]])
    assert not Pp.ergodic


def test_interpolate_endpoints_and_midpoint():
    Pp = ip.absorbing_variant(HALF, 0)
    np.testing.assert_array_equal(ip.interpolate(HALF, Pp, 0.0).P, HALF.P)
    np.testing.assert_array_equal(ip.interpolate(HALF, Pp, 1.0).P, Pp.P)
    np.testing.assert_allclose(ip.interpolate(HALF, Pp, 0.5).P, [[0.75, 0.25], [0.5, 0.5]], atol=1e-15)


def test_interpolate_rejects_bad_s():
    with pytest.raises(RangeError):
        ip.interpolated_chain(HALF, 0, 1.2)
    with pytest.raises(RangeError):
        ip.InterpolationSpec(HALF, 0, -0.1)


def test_interpolation_record_helper():
    c = mc.gen_family("birth-death", 4, up=0.33, down=0.2)
    cfg = ip.InterpolationSpec.from_chain(c, 0, 0.3)
    assert cfg.s_star == pytest.approx(ip.s_star(mc.stationary_distribution(c)[0]))
    np.testing.assert_allclose(cfg.chain().P, ip.interpolated_chain(c, 0, 0.3).P)
    # s = 1 is representable even though stationary queries reject it
    assert ip.InterpolationSpec(c, 0, 1.0).chain().P[0, 0] == 1.0


@pytest.mark.parametrize("pi_j,expected", [(0.1, 8 / 9), (1 / 3, 0.5)])
def test_s_star_values(pi_j, expected):
    assert ip.s_star(pi_j) == pytest.approx(expected, abs=1e-15)


def test_s_star_boundary_warns():
    with pytest.warns(UserWarning):
        assert ip.s_star(0.5) == 0.0
    with pytest.raises(RangeError):
        ip.s_star(0.0)


def test_no_valid_target():
    with pytest.raises(NoValidJError):
        ip.valid_targets([0.5, 0.5])
    np.testing.assert_array_equal(ip.valid_targets([0.2, 0.5, 0.3]), [0, 2])


def test_stationary_endpoint_and_star():
    c = mc.gen_family("random-reversible", 6, seed=4)
    pi = mc.stationary_distribution(c)
    np.testing.assert_array_equal(ip.interpolated_stationary(c, 2, 0.0, pi), pi)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for j in ip.valid_targets(pi):
            out = ip.interpolated_stationary(c, j, ip.s_star(pi[j]), pi)
            assert abs(out[j] - 0.5) < 1e-12


def test_stationary_rejects_s_one_and_irreversible():
    c = mc.gen_family("complete", 3)
    with pytest.raises(RangeError):
        ip.interpolated_stationary(c, 0, 1.0)
    P = [[0.3, 0.6, 0.1], [0.1, 0.8, 0.1], [0.4, 0.1, 0.5]]
    with pytest.raises(NotReversibleError):
        ip.interpolated_stationary(mc.validate_chain(P), 0, 0.5)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 9), seed=st.integers(0, 10**6), s=st.floats(0.0, 0.99), data=st.data())
def test_closed_form_matches_eigenvector(n, seed, s, data):
    c = mc.gen_family("random-reversible", n, seed)
    j = data.draw(st.integers(0, n - 1))
    closed = ip.interpolated_stationary(c, j, s)
    Ps = ip.interpolated_chain(c, j, s)
    np.testing.assert_allclose(closed, _top_eigvec_stationary(Ps.P), atol=1e-9)
    assert abs(closed.sum() - 1) < 1e-12
    assert mc.is_reversible(mc.validate_chain(Ps.P), closed, tol=1e-12)


def test_monotone_in_s():
    c = mc.gen_family("birth-death", 5, seed=9)
    grid = np.linspace(0, 0.99, 100)
    rows = np.array([ip.interpolated_stationary(c, 1, s) for s in grid])
    d = np.diff(rows, axis=0)
    assert np.all(d[:, 1] > 0)
    assert np.all(np.delete(d, 1, axis=1) < 0)
