# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector kernels.

Programs are flat opcode arrays (see ``qborn._program``); every routine here
has a numpy twin in ``qborn._kernels_py`` with identical semantics, including
the layout of the per-shot uniform draws consumed by ``run_trajectories``.
"""
import numpy as np

from libc.math cimport cos, sin, floor
from libc.stdlib cimport malloc, free

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)

cdef enum:
    OP_RY = 0
    OP_RZ = 1
    OP_X = 2
    OP_CNOT = 3
    OP_PHASE = 4
    OP_Y = 5
    OP_Z = 6

IMPLEMENTATION = "cython"


cdef inline void _ry(double complex* s, Py_ssize_t dim, Py_ssize_t mask, double theta) noexcept nogil:
    cdef double c = cos(0.5 * theta), sn = sin(0.5 * theta)
    cdef Py_ssize_t i
    cdef double complex a, b
    for i in range(dim):
        if i & mask == 0:
            a = s[i]
            b = s[i | mask]
            s[i] = c * a - sn * b
            s[i | mask] = sn * a + c * b


cdef inline void _rz(double complex* s, Py_ssize_t dim, Py_ssize_t mask, double theta) noexcept nogil:
    cdef double complex e0 = cexp(-0.5j * theta), e1 = cexp(0.5j * theta)
    cdef Py_ssize_t i
    for i in range(dim):
        if i & mask:
            s[i] = s[i] * e1
        else:
            s[i] = s[i] * e0


cdef inline void _x(double complex* s, Py_ssize_t dim, Py_ssize_t mask) noexcept nogil:
    cdef Py_ssize_t i
    cdef double complex a
    for i in range(dim):
        if i & mask == 0:
            a = s[i]
            s[i] = s[i | mask]
            s[i | mask] = a


cdef inline void _y(double complex* s, Py_ssize_t dim, Py_ssize_t mask) noexcept nogil:
    # Y|0> = i|1>, Y|1> = -i|0>
    cdef Py_ssize_t i
    cdef double complex a
    for i in range(dim):
        if i & mask == 0:
            a = s[i]
            s[i] = -1j * s[i | mask]
            s[i | mask] = 1j * a


cdef inline void _z(double complex* s, Py_ssize_t dim, Py_ssize_t mask) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(dim):
        if i & mask:
            s[i] = -s[i]


cdef inline void _cnot(double complex* s, Py_ssize_t dim, Py_ssize_t cmask, Py_ssize_t tmask) noexcept nogil:
    cdef Py_ssize_t i
    cdef double complex a
    for i in range(dim):
        if (i & cmask) and not (i & tmask):
            a = s[i]
            s[i] = s[i | tmask]
            s[i | tmask] = a


cdef inline void _phase(double complex* s, Py_ssize_t dim, double theta) noexcept nogil:
    cdef double complex e = cexp(1j * theta)
    cdef Py_ssize_t i
    for i in range(dim):
        s[i] = s[i] * e


cdef inline void _pauli(double complex* s, Py_ssize_t dim, Py_ssize_t mask, int which) noexcept nogil:
    # which: 0 identity, 1 X, 2 Y, 3 Z
    if which == 1:
        _x(s, dim, mask)
    elif which == 2:
        _y(s, dim, mask)
    elif which == 3:
        _z(s, dim, mask)


cdef void _run(double complex* s, int n, const int* ops, const int* q0, const int* q1,
               const double* angles, Py_ssize_t n_ops) noexcept nogil:
    cdef Py_ssize_t dim = (<Py_ssize_t> 1) << n
    cdef Py_ssize_t g, m0, m1
    cdef int op
    for g in range(n_ops):
        op = ops[g]
        m0 = (<Py_ssize_t> 1) << (n - 1 - q0[g])
        if op == OP_RY:
            _ry(s, dim, m0, angles[g])
        elif op == OP_RZ:
            _rz(s, dim, m0, angles[g])
        elif op == OP_X:
            _x(s, dim, m0)
        elif op == OP_CNOT:
            m1 = (<Py_ssize_t> 1) << (n - 1 - q1[g])
            _cnot(s, dim, m0, m1)
        elif op == OP_PHASE:
            _phase(s, dim, angles[g])
        elif op == OP_Y:
            _y(s, dim, m0)
        elif op == OP_Z:
            _z(s, dim, m0)


def apply_program(double complex[::1] state, int n, const int[::1] ops, const int[::1] q0,
                  const int[::1] q1, const double[::1] angles):
    """Apply a program to ``state`` in place."""
    cdef Py_ssize_t n_ops = ops.shape[0]
    if state.shape[0] != (<Py_ssize_t> 1) << n:
        raise ValueError("state length does not match qubit count")
    if n_ops == 0:
        return
    with nogil:
        _run(&state[0], n, &ops[0], &q0[0], &q1[0], &angles[0], n_ops)


def run_trajectories(int n, const int[::1] ops, const int[::1] q0, const int[::1] q1,
                     const double[::1] angles, double p1, double p2, double p_readout,
                     double p_reset, const double[:, ::1] uniforms, long long[::1] out):
    """Sample one noisy trajectory per row of ``uniforms``.

    Row layout (width ``2*n + 2*G + 1`` for ``G`` program entries):
    ``[0, n)`` reset flips, ``n + 2g`` error-occurs draw and ``n + 2g + 1``
    Pauli choice for entry ``g``, ``n + 2G`` the Born sample,
    ``[n + 2G + 1, 2n + 2G + 1)`` readout flips.
    """
    cdef Py_ssize_t dim = (<Py_ssize_t> 1) << n
    cdef Py_ssize_t n_ops = ops.shape[0]
    cdef Py_ssize_t shots = uniforms.shape[0]
    cdef Py_ssize_t width = 2 * n + 2 * n_ops + 1
    if uniforms.shape[1] != width:
        raise ValueError(f"uniform block must have width {width}")
    if out.shape[0] != shots:
        raise ValueError("output length does not match shot count")
    cdef double complex* s = <double complex*> malloc(dim * sizeof(double complex))
    if s == NULL:
        raise MemoryError()
    cdef Py_ssize_t shot, q, g, i, m0, m1, base, outcome, last
    cdef int op, which
    cdef double u, acc, pr
    try:
        with nogil:
            for shot in range(shots):
                for i in range(dim):
                    s[i] = 0
                outcome = 0
                for q in range(n):
                    if uniforms[shot, q] < p_reset:
                        outcome |= (<Py_ssize_t> 1) << (n - 1 - q)
                s[outcome] = 1
                for g in range(n_ops):
                    op = ops[g]
                    _run(s, n, &ops[g], &q0[g], &q1[g], &angles[g], 1)
                    base = n + 2 * g
                    m0 = (<Py_ssize_t> 1) << (n - 1 - q0[g])
                    if op == OP_CNOT:
                        if uniforms[shot, base] < p2:
                            which = 1 + <int> floor(uniforms[shot, base + 1] * 15.0)
                            if which > 15:
                                which = 15
                            m1 = (<Py_ssize_t> 1) << (n - 1 - q1[g])
                            _pauli(s, dim, m0, which // 4)
                            _pauli(s, dim, m1, which % 4)
                    elif op != OP_PHASE:
                        if uniforms[shot, base] < p1:
                            which = 1 + <int> floor(uniforms[shot, base + 1] * 3.0)
                            if which > 3:
                                which = 3
                            _pauli(s, dim, m0, which)
                u = uniforms[shot, n + 2 * n_ops]
                acc = 0.0
                outcome = -1
                last = 0
                for i in range(dim):
                    pr = s[i].real * s[i].real + s[i].imag * s[i].imag
                    if pr > 0.0:
                        last = i
                    acc = acc + pr
                    if u < acc:
                        outcome = i
                        break
                if outcome < 0:
                    outcome = last
                base = n + 2 * n_ops + 1
                for q in range(n):
                    if uniforms[shot, base + q] < p_readout:
                        outcome ^= (<Py_ssize_t> 1) << (n - 1 - q)
                out[shot] = outcome
    finally:
        free(s)
