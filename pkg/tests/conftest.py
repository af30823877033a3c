import numpy as np
import pytest

from qborn import _backend
from qborn.circuit import GateCircuit, cnot, phase, ry, rz, x
from qborn.statevec import StateVector


@pytest.fixture(params=_backend.available())
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, n, real=False):
    v = rng.normal(size=1 << n)
    if not real:
        v = v + 1j * rng.normal(size=1 << n)
    return StateVector.from_unnormalized(v)


def random_circuit(rng, n, n_gates):
    gates = []
    for _ in range(n_gates):
        kind = rng.integers(5 if n > 1 else 4)
        q = int(rng.integers(n))
        if kind == 0:
            gates.append(ry(q, rng.uniform(-np.pi, np.pi)))
        elif kind == 1:
            gates.append(rz(q, rng.uniform(-np.pi, np.pi)))
        elif kind == 2:
            gates.append(x(q))
        elif kind == 3:
            gates.append(phase(rng.uniform(-np.pi, np.pi)))
        else:
            t = int(rng.choice([i for i in range(n) if i != q]))
            gates.append(cnot(q, t))
    return GateCircuit(n, tuple(gates))


# dense reference: build each gate's full matrix by Kronecker products
_I = np.eye(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_P0 = np.diag([1, 0]).astype(complex)
_P1 = np.diag([0, 1]).astype(complex)


def _embed(n, ops):
    out = np.ones((1, 1), dtype=complex)
    for q in range(n):
        out = np.kron(out, ops.get(q, _I))
    return out


def dense_unitary(circuit):
    n = circuit.n_qubits
    u = np.eye(1 << n, dtype=complex)
    for g in circuit.gates:
        k, t = g.kind.value, g.targets
        if k == "RY":
            c, s = np.cos(g.angle / 2), np.sin(g.angle / 2)
            m = _embed(n, {t[0]: np.array([[c, -s], [s, c]], dtype=complex)})
        elif k == "RZ":
            m = _embed(n, {t[0]: np.diag([np.exp(-0.5j * g.angle), np.exp(0.5j * g.angle)])})
        elif k == "X":
            m = _embed(n, {t[0]: _X})
        elif k == "CNOT":
            m = _embed(n, {t[0]: _P0}) + _embed(n, {t[0]: _P1, t[1]: _X})
        else:
            m = np.exp(1j * g.angle) * np.eye(1 << n)
        u = m @ u
    return u


# acceptance results, printed once at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> bool:
    ACCEPTANCE[number] = (bool(ok), detail)
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
