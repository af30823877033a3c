"""Arbitrary state preparation with uniformly controlled rotations.

The target is built top-down. For qubit ``k`` a rotation multiplexed on
qubits ``0..k-1`` splits each branch's weight between its two children
(RY), and a second multiplexor fixes their relative phase (RZ). The
leftover mean phase at the root becomes a ``PHASE`` gate, so the prepared
state equals the target exactly, not only up to global phase.

Each multiplexor with ``k`` controls costs ``2**k`` CNOTs in the Gray-code
pattern. The RZ multiplexor is emitted mirrored so its leading CNOT cancels
the trailing CNOT of the RY multiplexor on the same target, giving at most
``2**(n+1) - 2n - 2`` CNOTs for a complex target and ``2**n - 2`` for a real
one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Gate, GateCircuit, GateKind, adjoint, cnot, phase, simulate
from .errors import NormalizationError
from .statevec import NORM_TOL, StateVector, projector_overlap

IMAG_TOL = 1e-14
ZERO_BRANCH_TOL = 1e-15
ANGLE_TOL = 1e-15


@dataclass(frozen=True)
class PrepReport:
    circuit: GateCircuit
    cnot_count: int
    fidelity: float


def cnot_bound(n_qubits: int) -> int:
    return 2 ** (n_qubits + 1) - 2 * n_qubits


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def multiplexor_angles(thetas: np.ndarray) -> np.ndarray:
    """Per-step rotation angles of the Gray-code multiplexor realising ``thetas``.

    ``thetas[c]`` is the rotation wanted when the controls read ``c``. Step
    ``i`` rotates by ``alpha[i]`` and contributes with sign
    ``(-1)**popcount(c & gray(i))``; the sign matrix is a permuted
    Walsh-Hadamard matrix, so inverting it is a transpose and a ``2**-k``.
    """
    m = thetas.size
    steps = np.array([_gray(i) for i in range(m)])
    parity = np.array([[bin(c & g).count("1") & 1 for c in range(m)] for g in steps])
    return (1.0 - 2.0 * parity) @ thetas / m


def multiplexed_rotation(kind: GateKind, target: int, controls: list[int], thetas, mirrored: bool = False) -> list[Gate]:
    """Gates applying ``kind(thetas[c])`` to ``target`` when ``controls`` read ``c``.

    ``controls[0]`` is the most significant bit of ``c``. With ``mirrored``
    the gate order is reversed, which realises the same operator.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    k = len(controls)
    if thetas.size != 1 << k:
        raise ValueError(f"{k} controls need {1 << k} angles, got {thetas.size}")
    if k == 0:
        return [Gate(kind, (target,), thetas[0])] if abs(thetas[0]) > ANGLE_TOL else []
    alphas = multiplexor_angles(thetas)
    if np.all(np.abs(alphas[1:]) <= ANGLE_TOL):
        # uniform angle: the CNOT ladder collapses to the identity
        return [Gate(kind, (target,), alphas[0])] if abs(alphas[0]) > ANGLE_TOL else []
    m = 1 << k
    gates: list[Gate] = []
    for i in range(m):
        if abs(alphas[i]) > ANGLE_TOL:
            gates.append(Gate(kind, (target,), alphas[i]))
        bit = (_gray(i) ^ _gray((i + 1) % m)).bit_length() - 1
        gates.append(cnot(controls[k - 1 - bit], target))
    return gates[::-1] if mirrored else gates


def _angle_tree(target: np.ndarray, n: int, use_phases: bool):
    """RY and RZ angles per level plus the root phase.

    Level ``k`` holds ``2**k`` entries indexed by the value of qubits
    ``0..k-1``. Real targets keep their signs in the last RY level instead
    of going through phases.
    """
    if use_phases:
        mags, phases = np.abs(target), np.angle(target)
    else:
        mags, phases = target.real.copy(), np.zeros(target.size)
    ry_levels, rz_levels = [None] * n, [None] * n
    for k in range(n - 1, -1, -1):
        a0, a1 = mags[0::2], mags[1::2]
        w0, w1 = phases[0::2], phases[1::2]
        degenerate = (np.abs(a0) < ZERO_BRANCH_TOL) & (np.abs(a1) < ZERO_BRANCH_TOL)
        ry_levels[k] = np.where(degenerate, 0.0, 2.0 * np.arctan2(a1, a0))
        rz_levels[k] = w1 - w0
        mags = np.hypot(a0, a1)
        phases = 0.5 * (w0 + w1)
    return ry_levels, rz_levels, float(phases[0])


def _check_target(target: StateVector) -> None:
    norm2 = float(np.vdot(target.amplitudes, target.amplitudes).real)
    if abs(norm2 - 1.0) > NORM_TOL:
        raise NormalizationError(f"target squared norm {norm2!r} is not 1")


def prepare_circuit(target: StateVector) -> GateCircuit:
    """Circuit ``U`` with ``U|0...0> = target``."""
    _check_target(target)
    n = target.n_qubits
    if n == 0:
        raise ValueError("cannot prepare a zero-qubit state")
    amps = target.amplitudes
    use_phases = bool(np.max(np.abs(amps.imag)) > IMAG_TOL)
    ry_levels, rz_levels, root_phase = _angle_tree(amps, n, use_phases)
    gates: list[Gate] = []
    if use_phases and abs(root_phase) > ANGLE_TOL:
        gates.append(phase(root_phase))
    for k in range(n):
        controls = list(range(k))
        gates += multiplexed_rotation(GateKind.RY, k, controls, ry_levels[k])
        if use_phases:
            rz_gates = multiplexed_rotation(GateKind.RZ, k, controls, rz_levels[k], mirrored=True)
            if gates and rz_gates and gates[-1] == rz_gates[0] and gates[-1].kind is GateKind.CNOT:
                gates.pop()
                rz_gates = rz_gates[1:]
            gates += rz_gates
    return GateCircuit(n, tuple(gates))


def prepare_state(target: StateVector) -> PrepReport:
    """Compile ``target`` and verify it by simulation."""
    circ = prepare_circuit(target)
    fidelity = projector_overlap(simulate(circ), target)
    return PrepReport(circ, circ.cnot_count, min(fidelity, 1.0))


def prepare_inverse(target: StateVector) -> GateCircuit:
    """Circuit mapping ``target`` to ``|0...0>``."""
    return adjoint(prepare_circuit(target))
