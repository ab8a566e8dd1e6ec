"""Dense helpers for the module layer.

Row-vector conventions throughout: module elements are flat ROW vectors,
maps act on the right, and a Hermitian idempotent acts as the orthogonal
projection onto its row space.  For a matrix V with orthonormal rows the
projection onto its row span is ``V^H V``.

The brute-force oracle does not use this file; it carries its own
elimination and Jacobi routines.
"""

import numpy as np

from . import config


def svd_row_basis(stack: np.ndarray, rtol=None, floor=None) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``stack``.

    Rank cut at rtol * (largest singular value), floored for inputs that
    are identically zero.
    """
    tols = config.current()
    rtol = tols.rank_rel if rtol is None else rtol
    floor = tols.rank_floor if floor is None else floor
    if stack.size == 0 or stack.shape[0] == 0:
        return np.zeros((0, stack.shape[1] if stack.ndim == 2 else 0), dtype=complex)
    _, s, vh = np.linalg.svd(stack, full_matrices=False)
    cut = max(float(s[0]) * rtol, floor) if s.size else floor
    r = int(np.count_nonzero(s > cut))
    return vh[:r]


def row_null_basis(m: np.ndarray, rtol=None, floor=None) -> np.ndarray:
    """Orthonormal rows v with v @ m = 0."""
    tols = config.current()
    rtol = tols.rank_rel if rtol is None else rtol
    floor = tols.rank_floor if floor is None else floor
    d = m.shape[0]
    if m.size == 0 or m.shape[1] == 0:
        return np.eye(d, dtype=complex)
    # v m = 0  iff  m^T v^T = 0; null-space columns of m^T transpose to rows.
    _, s, vh = np.linalg.svd(m.T, full_matrices=True)
    cut = max((float(s[0]) * rtol) if s.size else 0.0, floor)
    r = int(np.count_nonzero(s > cut))
    v = vh.conj().T  # columns of V span the domain of m^T
    return v[:, r:].T.copy()


def span_projection(stack: np.ndarray, dim: int) -> np.ndarray:
    """Orthogonal projection (Hermitian idempotent) onto the row span."""
    basis = svd_row_basis(stack if stack.size else np.zeros((0, dim), dtype=complex))
    if basis.shape[0] == 0:
        return np.zeros((dim, dim), dtype=complex)
    p = basis.conj().T @ basis
    return 0.5 * (p + p.conj().T)


def hermitize(b: np.ndarray) -> np.ndarray:
    return 0.5 * (b + b.conj().T)


def expm_hermitian_phase(h: np.ndarray) -> np.ndarray:
    """exp(i h) for Hermitian h, via its eigendecomposition."""
    w, v = np.linalg.eigh(hermitize(h))
    return (v * np.exp(1j * w)) @ v.conj().T


def psd_function(h: np.ndarray, fn) -> np.ndarray:
    """Apply a real function to the eigenvalues of a Hermitian matrix."""
    w, v = np.linalg.eigh(hermitize(h))
    return (v * fn(w)) @ v.conj().T
