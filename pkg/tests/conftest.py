import numpy as np
import pytest

from qssamp import markov_core as mc


def reversible_ensemble():
    """Named reversible chains with n <= 6, each paired with a target whose pi_j is near 0.1."""
    chains = [
        ("two-state", mc.gen_family("two-state", 2, p=0.2, q=0.05)),
        ("birth-death-4", mc.gen_family("birth-death", 4, up=0.33, down=0.2)),
        ("cycle-lazy-5", mc.gen_family("cycle-lazy", 5, laziness=0.75)),
        ("lazy-random-6", mc.lazify(mc.gen_family("random-reversible", 6, seed=1))),
        ("birth-death-6", mc.gen_family("birth-death", 6, seed=3)),
        ("random-5", mc.gen_family("random-reversible", 5, seed=2)),
        ("complete-4", mc.gen_family("complete", 4)),
    ]
    out = []
    for name, chain in chains:
        pi = mc.stationary_distribution(chain)
        out.append((name, chain, int(np.argmin(np.abs(pi - 0.1)))))
    return out


ENSEMBLE = reversible_ensemble()


@pytest.fixture(params=ENSEMBLE, ids=[e[0] for e in ENSEMBLE])
def member(request):
    return request.param


def random_stochastic(n, rng):
    W = rng.random((n, n)) + 0.05
    return W / W.sum(axis=1, keepdims=True)


# criterion number -> (passed, detail), filled in by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
