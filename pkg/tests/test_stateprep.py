import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qborn.circuit import GateCircuit, GateKind, adjoint, simulate
from qborn.errors import NormalizationError
from qborn.statevec import StateVector
from qborn.stateprep import (
    cnot_bound,
    multiplexed_rotation,
    multiplexor_angles,
    prepare_circuit,
    prepare_inverse,
    prepare_state,
)

from conftest import dense_unitary, random_state


def _ry_matrix(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]])


def _rz_matrix(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _block_diag_oracle(kind, thetas):
    """Multiplexor with the controls above the target: block diagonal by control value."""
    m = len(thetas)
    out = np.zeros((2 * m, 2 * m), dtype=complex)
    for c, t in enumerate(thetas):
        out[2 * c:2 * c + 2, 2 * c:2 * c + 2] = _ry_matrix(t) if kind is GateKind.RY else _rz_matrix(t)
    return out


class TestMultiplexor:
    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    @pytest.mark.parametrize("kind", [GateKind.RY, GateKind.RZ])
    @pytest.mark.parametrize("mirrored", [False, True])
    def test_matches_block_diagonal(self, rng, k, kind, mirrored):
        thetas = rng.uniform(-np.pi, np.pi, 1 << k)
        circ = GateCircuit(k + 1, tuple(multiplexed_rotation(kind, k, list(range(k)), thetas, mirrored)))
        assert np.allclose(dense_unitary(circ), _block_diag_oracle(kind, thetas), atol=1e-12)

    def test_cnot_count_is_power_of_two(self, rng):
        gates = multiplexed_rotation(GateKind.RY, 3, [0, 1, 2], rng.uniform(-1, 1, 8))
        assert sum(g.kind is GateKind.CNOT for g in gates) == 8

    def test_uniform_angle_collapses(self):
        gates = multiplexed_rotation(GateKind.RY, 2, [0, 1], np.full(4, 0.3))
        assert len(gates) == 1 and gates[0].angle == pytest.approx(0.3)

    def test_angles_invert_sign_matrix(self, rng):
        thetas = rng.normal(size=8)
        alphas = multiplexor_angles(thetas)
        gray = [i ^ (i >> 1) for i in range(8)]
        rebuilt = [sum((-1) ** bin(c & g).count("1") * a for g, a in zip(gray, alphas)) for c in range(8)]
        assert np.allclose(rebuilt, thetas, atol=1e-14)

    def test_wrong_angle_count(self):
        with pytest.raises(ValueError):
            multiplexed_rotation(GateKind.RY, 2, [0, 1], [0.1, 0.2])


class TestPrepare:
    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_zero_state_is_empty(self, n):
        rep = prepare_state(StateVector.basis(n))
        assert rep.circuit.gates == () and rep.cnot_count == 0 and rep.fidelity == 1.0

    def test_plus_state_single_ry(self):
        rep = prepare_state(StateVector(np.array([1, 1]) / np.sqrt(2)))
        (g,) = rep.circuit.gates
        assert g.kind is GateKind.RY and g.targets == (0,)
        assert g.angle == pytest.approx(np.pi / 2, abs=1e-15)
        assert rep.cnot_count == 0

    def test_random_three_qubit(self, rng):
        for _ in range(100):
            rep = prepare_state(random_state(rng, 3))
            assert rep.fidelity >= 1 - 1e-9
            assert rep.cnot_count <= 10

    @pytest.mark.parametrize("n", range(1, 7))
    def test_cnot_bound_and_exact_equality(self, rng, n):
        for real in (False, True):
            psi = random_state(rng, n, real=real)
            circ = prepare_circuit(psi)
            assert circ.cnot_count <= cnot_bound(n)
            # exact equality including the global phase
            assert np.allclose(simulate(circ).amplitudes, psi.amplitudes, atol=1e-12)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_tight_counts(self, rng, n):
        assert prepare_circuit(random_state(rng, n)).cnot_count == 2 ** (n + 1) - 2 * n - 2
        assert prepare_circuit(random_state(rng, n, real=True)).cnot_count == 2 ** n - 2

    def test_real_targets_skip_rz(self, rng):
        circ = prepare_circuit(random_state(rng, 4, real=True))
        assert circ.count(GateKind.RZ) == 0 and circ.count(GateKind.PHASE) == 0

    def test_sparse_targets(self):
        for idx in range(8):
            assert simulate(prepare_circuit(StateVector.basis(3, idx))).allclose(StateVector.basis(3, idx), atol=1e-14)
        ghz = StateVector.from_unnormalized(np.array([1, 0, 0, 0, 0, 0, 0, 1j]))
        assert simulate(prepare_circuit(ghz)).allclose(ghz, atol=1e-14)

    def test_negative_real_amplitudes(self):
        psi = StateVector(np.array([-0.6, 0.0, 0.0, -0.8]))
        assert simulate(prepare_circuit(psi)).allclose(psi, atol=1e-14)

    def test_inverse_maps_to_zero(self, rng):
        psi = random_state(rng, 4)
        assert simulate(prepare_inverse(psi), psi).allclose(StateVector.basis(4), atol=1e-10)
        assert prepare_inverse(StateVector.basis(2)).gates == ()

    def test_inverse_is_adjoint(self, rng):
        psi = random_state(rng, 3)
        assert prepare_inverse(psi) == adjoint(prepare_circuit(psi))

    def test_rejects_unnormalized(self):
        bad = object.__new__(StateVector)
        object.__setattr__(bad, "amplitudes", np.array([1.0, 1.0]))
        with pytest.raises(NormalizationError):
            prepare_circuit(bad)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.booleans())
def test_prepares_any_state(n, seed, real):
    psi = random_state(np.random.default_rng(seed), n, real=real)
    rep = prepare_state(psi)
    assert rep.fidelity >= 1 - 1e-9
    assert rep.cnot_count <= cnot_bound(n)
