"""Banded linear solves, batched over independent systems.

The compiled kernel (frte._kernels, Cython over LAPACK dgbsv) is picked
at import when available; otherwise a scipy.linalg.solve_banded loop is
used.  Both produce identical results (same LAPACK routine underneath);
set FRTE_NO_COMPILED=1 to force the fallback.
"""

import os

import numpy as np
from scipy.linalg import solve_banded as _scipy_solve_banded

try:
    if os.environ.get("FRTE_NO_COMPILED"):
        raise ImportError
    from . import _kernels
except ImportError:
    _kernels = None

HAVE_COMPILED = _kernels is not None


def solve_banded_batch(ab, rhs, kl, ku, compiled=None):
    """Solve A_b x_b = rhs_b for every b.

    ab : (batch, kl+ku+1, n) diagonal-ordered bands (solve_banded layout)
    rhs: (batch, n)
    compiled: force kernel choice (None = auto).
    """
    ab = np.ascontiguousarray(ab, dtype=float)
    rhs = np.ascontiguousarray(rhs, dtype=float)
    if ab.ndim != 3 or rhs.ndim != 2 or ab.shape[0] != rhs.shape[0] or ab.shape[2] != rhs.shape[1]:
        raise ValueError("ab must be (batch, kl+ku+1, n) and rhs (batch, n)")
    use_compiled = HAVE_COMPILED if compiled is None else compiled
    if use_compiled and not HAVE_COMPILED:
        raise RuntimeError("compiled kernel requested but not built")
    if use_compiled:
        return _kernels.solve_banded_batch(ab, rhs, kl, ku)
    out = np.empty_like(rhs)
    for b in range(ab.shape[0]):
        try:
            out[b] = _scipy_solve_banded((kl, ku), ab[b], rhs[b])
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(
                f"singular banded system in batch entry {b}") from exc
    return out
