"""The compiled and numpy kernels must agree draw for draw."""
import numpy as np
import pytest

from qborn import _backend
from qborn.circuit import NoiseSpec, sample_shots_noisy, simulate

from conftest import random_circuit, random_state

pytestmark = pytest.mark.skipif(_backend.compiled is None, reason="compiled kernels not built")


def test_backends_listed():
    assert _backend.available() == ["cython", "python"]


def test_simulate_agrees(rng):
    for n in range(1, 7):
        c = random_circuit(rng, n, 40)
        psi = random_state(rng, n)
        a = simulate(c, psi, backend="cython").amplitudes
        b = simulate(c, psi, backend="python").amplitudes
        assert np.allclose(a, b, atol=1e-13)


@pytest.mark.parametrize("noise", [
    NoiseSpec(),
    NoiseSpec(0.1, 0.2, 0.05, 0.05),
    NoiseSpec(1.0, 1.0, 0.0, 0.0),
])
def test_trajectories_agree(rng, noise):
    c = random_circuit(rng, 3, 25)
    a = sample_shots_noisy(c, noise, 3000, seed=1, force_trajectories=True, backend="cython")
    b = sample_shots_noisy(c, noise, 3000, seed=1, force_trajectories=True, backend="python")
    assert a == b


def test_uniform_width_checked():
    k = _backend.compiled
    ops = np.zeros(1, dtype=np.intc)
    with pytest.raises(ValueError):
        k.run_trajectories(1, ops, ops, ops, np.zeros(1), 0.0, 0.0, 0.0, 0.0,
                           np.zeros((2, 3)), np.zeros(2, dtype=np.int64))
