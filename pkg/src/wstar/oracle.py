"""Brute-force cross-check layer.

Forgets the module structure: a module element becomes one flat complex
row vector (dimension ambient rank times the complex dimension of the
algebra), a module map becomes one dense matrix acting on flat rows, and
every rank, kernel, harmonic space and trace is recomputed by plain dense
linear algebra.

Deliberately independent of the module layer: flat matrices are assembled
entry by entry from its own index bookkeeping, rank and null-space
questions go through hand-rolled Gaussian elimination, and eigenvalue
questions through a cyclic Jacobi sweep (a different algorithm family
from the LAPACK routines the module layer calls).  numpy appears only as
an array container with scalar arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from ._kernels import jacobi_eigh
from .errors import StructuralError

__all__ = [
    "FlatSpace",
    "flatten",
    "flatten_element",
    "oracle_rank",
    "oracle_kernel_dim",
    "oracle_eig",
    "oracle_unitary_eig",
    "oracle_lefschetz",
]


@dataclass(frozen=True)
class FlatSpace:
    """Index bookkeeping for the forgetful passage to complex rows.

    A coordinate of a module element is one entry of one block matrix of
    one ambient slot; the flat index orders them (block, block row, ambient
    slot, block column), matching row-major raveling per block.
    """

    block_sizes: tuple
    ambient_rank: int

    @property
    def dim(self) -> int:
        return self.ambient_rank * sum(n * n for n in self.block_sizes)

    def offset(self, block: int) -> int:
        off = 0
        for i in range(block):
            off += self.block_sizes[i] ** 2 * self.ambient_rank
        return off

    def index(self, block: int, brow: int, slot: int, bcol: int) -> int:
        ni = self.block_sizes[block]
        return self.offset(block) + (brow * self.ambient_rank + slot) * ni + bcol


def flat_space(module) -> FlatSpace:
    return FlatSpace(tuple(module.algebra.block_sizes), module.ambient_rank)


def flatten_element(x) -> np.ndarray:
    """Flat row vector of a module element."""
    space = flat_space(x.owner)
    out = np.zeros(space.dim, dtype=complex)
    for i, ni in enumerate(space.block_sizes):
        for slot in range(space.ambient_rank):
            e = x.vec.entry(0, slot)
            for a in range(ni):
                for b in range(ni):
                    out[space.index(i, a, slot, b)] = e.blocks[i][a, b]
    return out


def flatten(phi) -> np.ndarray:
    """Dense matrix of the flat right action of a module map.

    Functorial: the flat matrix of "apply phi then psi" is the product of
    the flat matrices.
    """
    src = flat_space(phi.source)
    tgt = flat_space(phi.target)
    out = np.zeros((src.dim, tgt.dim), dtype=complex)
    for i, ni in enumerate(src.block_sizes):
        for r in range(phi.source.ambient_rank):
            for c in range(phi.target.ambient_rank):
                e = phi.matrix.entry(r, c).blocks[i]
                for a in range(ni):
                    # rows (a, r, .) map into rows (a, c, .) with weights e
                    r0 = src.index(i, a, r, 0)
                    c0 = tgt.index(i, a, c, 0)
                    out[r0 : r0 + ni, c0 : c0 + ni] += e
    return out


def flat_membership_constraint(module) -> np.ndarray:
    """Matrix whose row null space is exactly the flat image of the module."""
    from .operators import identity_map

    q = flatten(identity_map(module))
    return np.eye(q.shape[0], dtype=complex) - q


# -- Gaussian elimination ------------------------------------------------------------


def _eliminate(m: np.ndarray, rtol=None):
    """Row echelon form by Gaussian elimination with partial pivoting.

    Returns (echelon matrix, pivot column list).  The pivot threshold is
    rtol times the largest absolute entry of the input, floored the same
    way the module layer floors its singular values.
    """
    tols = config.current()
    rtol = tols.rank_rel if rtol is None else rtol
    a = np.array(m, dtype=complex)
    rows, cols = a.shape
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    cut = max(scale * rtol, tols.rank_floor)
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= cut:
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for rr in range(rows):
            if rr != r and abs(a[rr, c]) > 0:
                a[rr] = a[rr] - a[rr, c] * a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def matrix_rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    _, pivots = _eliminate(m)
    return len(pivots)


def null_rows(m: np.ndarray) -> np.ndarray:
    """Basis (as rows) of { v : v m = 0 }, from the echelon form of m^T."""
    d = m.shape[0]
    if m.size == 0 or m.shape[1] == 0:
        return np.eye(d, dtype=complex)
    ech, pivots = _eliminate(m.T)
    free = [c for c in range(d) if c not in pivots]
    basis = np.zeros((len(free), d), dtype=complex)
    for j, fc in enumerate(free):
        basis[j, fc] = 1.0
        for r, pc in enumerate(pivots):
            basis[j, pc] = -ech[r, fc]
    return basis


def solve_square(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve a x = b by elimination on the augmented system."""
    d = a.shape[0]
    if d == 0:
        return np.zeros_like(b)
    aug = np.hstack([np.array(a, dtype=complex), np.array(b, dtype=complex)])
    ech, pivots = _eliminate(aug, rtol=1e-13)
    if pivots[: d] != list(range(d)):
        raise StructuralError("oracle solve hit a singular system")
    return ech[:d, d:]


# -- public oracle operations ----------------------------------------------------------


def oracle_rank(phi) -> int:
    """Complex rank of the flat action restricted to the source module."""
    f = flatten(phi)
    member = flat_membership_constraint(phi.source)
    inside = null_rows(member)  # rows spanning the flat module
    if inside.shape[0] == 0:
        return 0
    return matrix_rank(inside @ f)


def oracle_kernel_dim(phi) -> int:
    """Complex dimension of the kernel of the flat action inside the module."""
    f = flatten(phi)
    member = flat_membership_constraint(phi.source)
    stacked = np.hstack([f, member])
    return null_rows(stacked).shape[0]


def oracle_eig(h) -> tuple:
    """Jacobi eigendecomposition of the flat matrix of a self-adjoint map."""
    f = flatten(h)
    return jacobi_eigh(f)


def oracle_unitary_eig(b: np.ndarray):
    """Eigenvalues and orthonormal eigenbasis of a unitary matrix.

    Diagonalizes the Hermitian real part by Jacobi sweeps, then splits the
    surviving degeneracies with the imaginary part compressed to each
    eigenvalue cluster.  Returns (complex eigenvalues, columns).
    """
    d = b.shape[0]
    c = 0.5 * (b + b.conj().T)
    s = (b - b.conj().T) / 2j
    wc, vc = jacobi_eigh(c)
    cols = np.array(vc, dtype=complex)
    evs = np.zeros(d, dtype=complex)
    # cluster equal cosine eigenvalues
    groups = []
    start = 0
    for j in range(1, d + 1):
        if j == d or abs(wc[j] - wc[start]) > 1e-8:
            groups.append((start, j))
            start = j
    for lo, hi in groups:
        block = cols[:, lo:hi]
        if hi - lo > 1:
            sc = block.conj().T @ s @ block
            ws, vs = jacobi_eigh(sc)
            block = block @ vs
            cols[:, lo:hi] = block
        for j in range(lo, hi):
            v = cols[:, j]
            evs[j] = v.conj() @ (b @ v)
    return evs, cols


def _flat_harmonic_rows(c, m: int) -> np.ndarray:
    """Rows spanning the flat harmonic subspace in degree m."""
    pieces = [flat_membership_constraint(c.spaces[m])]
    if m < len(c.differentials):
        pieces.append(flatten(c.differentials[m]))
    if m > 0:
        prev = flatten(c.differentials[m - 1])
        pieces.append(prev.conj().T)  # flat adjoint: d* kills harmonic rows
    return null_rows(np.hstack(pieces))


def oracle_harmonic_dims(c) -> list:
    return [_flat_harmonic_rows(c, m).shape[0] for m in range(len(c.spaces))]


def oracle_lefschetz(c, u) -> complex:
    """Scalar Lefschetz number via flat traces on harmonic subspaces.

    Alternating sum over degrees of the trace of the flat endomorphism
    restricted to the flat harmonic subspace; equals the weighted sum of
    the HC0 invariant, component j times block size j, which is the bridge
    identity the acceptance suite pins.
    """
    total = 0.0 + 0.0j
    for m in range(len(c.spaces)):
        rows = _flat_harmonic_rows(c, m)
        if rows.shape[0] == 0:
            continue
        f = flatten(u.components[m])
        gram = rows @ rows.conj().T
        mixed = rows @ f @ rows.conj().T
        # trace of the restriction with a non-orthonormal basis
        coeffs = solve_square(gram, mixed)
        tr = complex(np.trace(coeffs))
        total += tr if m % 2 == 0 else -tr
    return total
