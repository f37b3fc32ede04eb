# cython: boundscheck=False, wraparound=False, cdivision=True
"""Batched banded LU solves via LAPACK dgbsv.

One call factors and solves every system in a batch without touching
Python between them; this is the hot kernel of the transport stepper
(one bandwidth-2 system per group and ordinate per time step, plus the
bandwidth-1 macro systems per group).
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport dgbsv

cnp.import_array()


def solve_banded_batch(double[:, :, ::1] ab, double[:, ::1] rhs, int kl, int ku):
    """Solve a batch of banded systems.

    ab : (batch, kl+ku+1, n) in diagonal-ordered form, ab[b, ku+i-j, j]
         holding A[i, j] (the scipy.linalg.solve_banded layout).
    rhs: (batch, n).  Returns the solutions as a new (batch, n) array.
    """
    cdef Py_ssize_t batch = ab.shape[0]
    cdef int nbands = <int> ab.shape[1]
    cdef int n = <int> ab.shape[2]
    if nbands != kl + ku + 1:
        raise ValueError("ab has the wrong number of diagonal rows")
    if rhs.shape[0] != batch or rhs.shape[1] != n:
        raise ValueError("rhs shape does not match ab")

    out = np.array(rhs, dtype=np.float64, copy=True)
    cdef double[:, ::1] x = out
    cdef int ldab = 2 * kl + ku + 1
    cdef int info = 0, nrhs = 1
    cdef Py_ssize_t b
    cdef int i, j, lo, hi
    cdef double* work = <double*> malloc(<size_t>(ldab * n) * sizeof(double))
    cdef int* ipiv = <int*> malloc(<size_t>n * sizeof(int))
    if work == NULL or ipiv == NULL:
        free(work); free(ipiv)
        raise MemoryError()

    cdef Py_ssize_t bad = -1
    with nogil:
        for b in range(batch):
            # LAPACK band storage, column major: work[j*ldab + kl + ku + i - j]
            # holds A[i, j]; the top kl entries of each column are fill space.
            for j in range(n):
                for i in range(ldab):
                    work[j * ldab + i] = 0.0
                lo = j - ku
                if lo < 0:
                    lo = 0
                hi = j + kl + 1
                if hi > n:
                    hi = n
                for i in range(lo, hi):
                    work[j * ldab + kl + ku + i - j] = ab[b, ku + i - j, j]
            dgbsv(&n, &kl, &ku, &nrhs, work, &ldab, ipiv, &x[b, 0], &n, &info)
            if info != 0:
                bad = b
                break

    free(work)
    free(ipiv)
    if bad >= 0:
        raise np.linalg.LinAlgError(f"singular banded system in batch entry {bad}")
    return out
