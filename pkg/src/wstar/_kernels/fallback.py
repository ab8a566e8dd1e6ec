"""Pure numpy implementations of the hot kernels.

Semantics must match ``_core.pyx`` exactly; the backend is picked at import
time in ``__init__``.
"""

import numpy as np


def series_bracket(p0, unit, scale, tol, max_terms):
    """Partial sums of  unit - sum_k lam_k p0^k  with the square-root
    Taylor coefficients lam_1 = 1/2, lam_{k+1} = lam_k (2k-1)/(2k+2).

    Stops once scale * lam_k * ||p0^k||_F drops below tol; gives up after
    max_terms terms.  Returns (accumulated matrix, terms used, converged).
    """
    p0 = np.ascontiguousarray(p0, dtype=complex)
    acc = np.array(unit, dtype=complex)
    term = p0.copy()
    lam = 0.5
    k = 1
    while True:
        acc -= lam * term
        last = scale * lam * float(np.sqrt(np.sum(np.abs(term) ** 2)))
        if last < tol:
            return acc, k, True
        if k >= max_terms:
            return acc, k, False
        term = term @ p0
        lam = lam * (2 * k - 1) / (2 * k + 2)
        k += 1


def jacobi_eigh(a, tol=1e-13, max_sweeps=60):
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
    rotations.  Returns (eigenvalues ascending, eigenvectors as columns).

    Each rotation zeroes one off-diagonal entry a[p, q] with the unitary
    plane rotation [[c, s b], [-s conj(b), c]], b the phase of a[p, q].
    """
    A = np.array(a, dtype=complex)
    d = A.shape[0]
    V = np.eye(d, dtype=complex)
    if d <= 1:
        return (np.array([A[0, 0].real]) if d == 1 else np.zeros(0)), V
    scale = float(np.sqrt(np.sum(np.abs(A) ** 2)))
    if scale == 0.0:
        return np.zeros(d), V
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(A - np.diag(np.diag(A))) ** 2))
        if off <= tol * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                m = abs(apq)
                if m <= 1e-300 or m <= tol * scale / (d * d):
                    continue
                beta = apq / m
                tau = (A[q, q].real - A[p, p].real) / (2.0 * m)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                gpp, gpq = c, s * beta
                gqp, gqq = -s * np.conj(beta), c
                # A <- G^H A G, columns then rows
                colp = A[:, p] * gpp + A[:, q] * gqp
                colq = A[:, p] * gpq + A[:, q] * gqq
                A[:, p] = colp
                A[:, q] = colq
                rowp = np.conj(gpp) * A[p, :] + np.conj(gqp) * A[q, :]
                rowq = np.conj(gpq) * A[p, :] + np.conj(gqq) * A[q, :]
                A[p, :] = rowp
                A[q, :] = rowq
                vcolp = V[:, p] * gpp + V[:, q] * gqp
                vcolq = V[:, p] * gpq + V[:, q] * gqq
                V[:, p] = vcolp
                V[:, q] = vcolq
    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]
