# cython: boundscheck=False, wraparound=False, cdivision=True
"""Strided in-place gate kernels; compiled twin of numpy_backend."""

from libc.stdint cimport int64_t


def apply_gate(double complex[:, ::1] blocks,
               const double complex[:, ::1] matrix,
               const int64_t[::1] bits):
    cdef Py_ssize_t ranks = blocks.shape[0]
    cdef Py_ssize_t n = blocks.shape[1]
    cdef int p = <int> bits.shape[0]
    cdef int dim = 1 << p
    if dim > 64 or matrix.shape[0] != dim:
        raise ValueError("gate wider than 6 qubits or matrix shape mismatch")
    cdef int L = 0
    while (<Py_ssize_t> 1 << L) < n:
        L += 1

    # integer bit index (0 = LSB) per gate slot, plus ascending copy for
    # zero-insertion when enumerating base indices
    cdef int64_t ibit[64]
    cdef int64_t ins[64]
    cdef int i, j
    for i in range(p):
        ibit[i] = L - 1 - bits[i]
        ins[i] = ibit[i]
    for i in range(1, p):
        for j in range(i, 0, -1):
            if ins[j] < ins[j - 1]:
                ins[j], ins[j - 1] = ins[j - 1], ins[j]

    cdef int64_t offs[64]
    cdef int t
    for t in range(dim):
        offs[t] = 0
        for i in range(p):
            if (t >> (p - 1 - i)) & 1:
                offs[t] += <int64_t> 1 << ibit[i]

    cdef double complex xs[64]
    cdef double complex ys[64]
    cdef Py_ssize_t rank, k, base
    cdef int64_t low_mask
    cdef Py_ssize_t groups = n >> p
    with nogil:
        for rank in range(ranks):
            for k in range(groups):
                base = k
                for i in range(p):
                    low_mask = (<int64_t> 1 << ins[i]) - 1
                    base = ((base & ~low_mask) << 1) | (base & low_mask)
                for t in range(dim):
                    xs[t] = blocks[rank, base + offs[t]]
                for t in range(dim):
                    ys[t] = 0
                    for j in range(dim):
                        ys[t] = ys[t] + matrix[t, j] * xs[j]
                for t in range(dim):
                    blocks[rank, base + offs[t]] = ys[t]


def apply_diagonal(double complex[:, ::1] blocks,
                   const double complex[::1] diag,
                   const int64_t[::1] bits):
    cdef Py_ssize_t ranks = blocks.shape[0]
    cdef Py_ssize_t n = blocks.shape[1]
    cdef int p = <int> bits.shape[0]
    cdef int dim = 1 << p
    if dim > 64 or diag.shape[0] != dim:
        raise ValueError("gate wider than 6 qubits or diagonal shape mismatch")
    cdef int L = 0
    while (<Py_ssize_t> 1 << L) < n:
        L += 1

    cdef int64_t ibit[64]
    cdef int64_t ins[64]
    cdef int i, j
    for i in range(p):
        ibit[i] = L - 1 - bits[i]
        ins[i] = ibit[i]
    for i in range(1, p):
        for j in range(i, 0, -1):
            if ins[j] < ins[j - 1]:
                ins[j], ins[j - 1] = ins[j - 1], ins[j]

    cdef int64_t offs[64]
    cdef int t
    for t in range(dim):
        offs[t] = 0
        for i in range(p):
            if (t >> (p - 1 - i)) & 1:
                offs[t] += <int64_t> 1 << ibit[i]

    cdef Py_ssize_t rank, k, base
    cdef int64_t low_mask
    cdef Py_ssize_t groups = n >> p
    with nogil:
        for rank in range(ranks):
            for k in range(groups):
                base = k
                for i in range(p):
                    low_mask = (<int64_t> 1 << ins[i]) - 1
                    base = ((base & ~low_mask) << 1) | (base & low_mask)
                for t in range(dim):
                    blocks[rank, base + offs[t]] = blocks[rank, base + offs[t]] * diag[t]
