"""Pure-numpy implementation of the kernels in ``_kernels.pyx``.

Same signatures, same in-place semantics, same uniform-draw layout; used
when the compiled module is unavailable or ``QBORN_PURE_PYTHON=1``.
"""
import numpy as np

from ._program import OP_CNOT, OP_PHASE, OP_RY, OP_RZ, OP_X, OP_Y, OP_Z

IMPLEMENTATION = "python"


def _split(state, n, q):
    # view with the target qubit as the second-to-last axis; leading axes index shots
    return state.reshape(state.shape[:-1] + (1 << q, 2, 1 << (n - 1 - q)))


def _ry(state, n, q, theta):
    v = _split(state, n, q)
    c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
    a, b = v[..., 0, :].copy(), v[..., 1, :].copy()
    v[..., 0, :] = c * a - s * b
    v[..., 1, :] = s * a + c * b


def _rz(state, n, q, theta):
    v = _split(state, n, q)
    v[..., 0, :] *= np.exp(-0.5j * theta)
    v[..., 1, :] *= np.exp(0.5j * theta)


def _x(state, n, q):
    v = _split(state, n, q)
    a = v[..., 0, :].copy()
    v[..., 0, :] = v[..., 1, :]
    v[..., 1, :] = a


def _y(state, n, q):
    v = _split(state, n, q)
    a = v[..., 0, :].copy()
    v[..., 0, :] = -1j * v[..., 1, :]
    v[..., 1, :] = 1j * a


def _z(state, n, q):
    _split(state, n, q)[..., 1, :] *= -1


def _cnot(state, n, c, t):
    v = state.reshape(state.shape[:-1] + (2,) * n)
    lead = (slice(None),) * (state.ndim - 1)
    idx0 = [slice(None)] * n
    idx0[c], idx0[t] = 1, 0
    idx1 = list(idx0)
    idx1[t] = 1
    idx0, idx1 = lead + tuple(idx0), lead + tuple(idx1)
    tmp = v[idx0].copy()
    v[idx0] = v[idx1]
    v[idx1] = tmp


_PAULI = {1: _x, 2: _y, 3: _z}


def _apply_one(state, n, op, a, b, angle):
    if op == OP_RY:
        _ry(state, n, a, angle)
    elif op == OP_RZ:
        _rz(state, n, a, angle)
    elif op == OP_X:
        _x(state, n, a)
    elif op == OP_CNOT:
        _cnot(state, n, a, b)
    elif op == OP_PHASE:
        state *= np.exp(1j * angle)
    elif op == OP_Y:
        _y(state, n, a)
    elif op == OP_Z:
        _z(state, n, a)
    else:
        raise ValueError(f"unknown opcode {op}")


def apply_program(state, n, ops, q0, q1, angles):
    """Apply a program to ``state`` in place."""
    if state.shape[-1] != 1 << n:
        raise ValueError("state length does not match qubit count")
    for op, a, b, angle in zip(ops.tolist(), q0.tolist(), q1.tolist(), angles.tolist()):
        _apply_one(state, n, op, a, b, angle)


def _apply_pauli_rows(states, n, q, which, rows):
    """Apply Pauli ``which[r]`` (0 = identity) on qubit ``q`` to each selected row."""
    for p, fn in _PAULI.items():
        sel = rows[which == p]
        if sel.size:
            sub = states[sel]
            fn(sub, n, q)
            states[sel] = sub


def run_trajectories(n, ops, q0, q1, angles, p1, p2, p_readout, p_reset, uniforms, out):
    """Sample one noisy trajectory per row of ``uniforms`` (layout as in the compiled kernel).

    All rows evolve together as a ``(shots, 2**n)`` batch; a Pauli error is
    applied only to the rows whose draws select it.
    """
    n_ops = ops.shape[0]
    width = 2 * n + 2 * n_ops + 1
    if uniforms.shape[1] != width:
        raise ValueError(f"uniform block must have width {width}")
    if out.shape[0] != uniforms.shape[0]:
        raise ValueError("output length does not match shot count")
    shots = uniforms.shape[0]
    if shots == 0:
        return
    weights = 1 << np.arange(n - 1, -1, -1)
    states = np.zeros((shots, 1 << n), dtype=np.complex128)
    states[np.arange(shots), (uniforms[:, :n] < p_reset) @ weights] = 1
    program = zip(ops.tolist(), q0.tolist(), q1.tolist(), angles.tolist())
    for g, (op, a, b, angle) in enumerate(program):
        _apply_one(states, n, op, a, b, angle)
        occurs, choice = uniforms[:, n + 2 * g], uniforms[:, n + 2 * g + 1]
        if op == OP_CNOT:
            rows = np.flatnonzero(occurs < p2)
            if rows.size:
                which = np.minimum(1 + np.floor(choice[rows] * 15.0).astype(np.int64), 15)
                _apply_pauli_rows(states, n, a, which // 4, rows)
                _apply_pauli_rows(states, n, b, which % 4, rows)
        elif op != OP_PHASE:
            rows = np.flatnonzero(occurs < p1)
            if rows.size:
                which = np.minimum(1 + np.floor(choice[rows] * 3.0).astype(np.int64), 3)
                _apply_pauli_rows(states, n, a, which, rows)
    probs = states.real * states.real + states.imag * states.imag
    outcomes = sample_indices(probs, uniforms[:, n + 2 * n_ops])
    flips = uniforms[:, n + 2 * n_ops + 1:] < p_readout
    out[:] = outcomes ^ (flips @ weights)


def sample_indices(probs, u):
    """Row-wise :func:`sample_index` for a ``(rows, dim)`` probability array."""
    cdf = np.cumsum(probs, axis=1)
    idx = (cdf <= u[:, None]).sum(axis=1)
    over = np.flatnonzero(idx >= probs.shape[1])
    for r in over:
        idx[r] = np.flatnonzero(probs[r] > 0)[-1]
    return idx


def sample_index(probs, u):
    """First index whose running probability sum exceeds ``u``."""
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, u, side="right"))
    if i >= probs.size:
        i = int(np.flatnonzero(probs > 0)[-1])
    return i
