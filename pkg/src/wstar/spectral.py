"""Spectral decomposition of module unitaries and the derived invariants.

A unitary endomorphism of a presented module resolves into finitely many
point masses: U = sum_k exp(i phi_k) P_k with pairwise orthogonal module
projections summing to the module identity.  From the resolution come

* the K0-valued spectral function, angle -> class of the eigenprojection,
* the HC0-valued trace T(U): trace down the matrix of U to the algebra,
  then to the per-block trace vector,

and the invariance of T(U) under module isomorphisms is available as a
runtime check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from ._linalg import hermitize, svd_row_basis
from .algebra import AlgMatrix, HC0Class, K0Class, blocktrace, k0_of_projection
from .errors import InternalConsistencyError, PreconditionError, ValidationError
from .modules import HilbertModule
from .operators import ModuleMap, polar_isometry

__all__ = [
    "SpectralMeasure",
    "SpectralFunction",
    "spectral_measure",
    "spectral_function",
    "cyclic_trace",
    "conjugation_invariance_check",
]

TWO_PI = 2.0 * math.pi


@dataclass
class SpectralMeasure:
    """Finite projection-valued resolution of a module unitary."""

    module: HilbertModule
    points: list  # (angle, ModuleMap projection endomorphism), angle ascending
    warnings: list = field(default_factory=list)

    def reconstruct(self) -> AlgMatrix:
        acc = self.module.algebra.zeros(self.module.ambient_rank, self.module.ambient_rank)
        for angle, proj in self.points:
            acc = acc + complex(np.exp(1j * angle)) * proj.matrix
        return acc

    def completeness_defect(self) -> float:
        acc = self.module.algebra.zeros(self.module.ambient_rank, self.module.ambient_rank)
        for _, proj in self.points:
            acc = acc + proj.matrix
        return (acc - self.module.projection).norm()

    def orthogonality_defect(self) -> float:
        worst = 0.0
        for a in range(len(self.points)):
            for b in range(a + 1, len(self.points)):
                worst = max(
                    worst, (self.points[a][1].matrix @ self.points[b][1].matrix).norm()
                )
        return worst


@dataclass(frozen=True)
class SpectralFunction:
    """Finitely supported map from angles to K0 classes.

    The support is strictly increasing and never stores a zero class; in
    particular the zero function has empty support.
    """

    support: tuple  # ((angle, K0Class), ...)

    @classmethod
    def from_pairs(cls, pairs, merge_tol=None) -> "SpectralFunction":
        merge_tol = config.current().angle_cluster if merge_tol is None else merge_tol
        pairs = sorted(((float(a) % TWO_PI, c) for a, c in pairs), key=lambda t: t[0])
        merged = []
        for angle, cls_ in pairs:
            if merged and angle - merged[-1][0] <= merge_tol:
                old_a, old_c, cnt = merged[-1]
                merged[-1] = ((old_a * cnt + angle) / (cnt + 1), old_c + cls_, cnt + 1)
            else:
                merged.append((angle, cls_, 1))
        # seam: first and last clusters may be the same angle mod 2 pi
        if len(merged) > 1 and (merged[0][0] + TWO_PI) - merged[-1][0] <= merge_tol:
            a0, c0, n0 = merged[0]
            a1, c1, n1 = merged.pop()
            angle = ((a0 + TWO_PI) * n0 + a1 * n1) / (n0 + n1) % TWO_PI
            merged[0] = (angle, c0 + c1, n0 + n1)
        snap = config.current().angle_snap
        support = tuple(
            (0.0 if min(a, TWO_PI - a) <= snap else a, c)
            for a, c, _ in merged
            if not c.is_zero()
        )
        return cls(support)

    def __add__(self, other):
        return SpectralFunction.from_pairs(list(self.support) + list(other.support))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SpectralFunction(tuple((a, -c) for a, c in self.support))

    def total_class(self, k: int) -> K0Class:
        acc = K0Class.zero(k)
        for _, c in self.support:
            acc = acc + c
        return acc

    def is_zero(self) -> bool:
        return not self.support

    def matches(self, other, angle_tol=None) -> bool:
        """Same classes at the same angles, angles compared within the
        clustering width (exact class equality)."""
        angle_tol = config.current().angle_cluster if angle_tol is None else angle_tol
        if len(self.support) != len(other.support):
            return False
        for (a1, c1), (a2, c2) in zip(self.support, other.support):
            delta = abs(a1 - a2)
            delta = min(delta, TWO_PI - delta)
            if delta > angle_tol or c1 != c2:
                return False
        return True


def _canonical_angle(ev: complex) -> float:
    """Angle in [0, 2 pi) with the cut at 0; -1 lands on pi exactly."""
    theta = math.atan2(ev.imag, ev.real)
    if theta < 0:
        theta += TWO_PI
    if theta >= TWO_PI:
        theta -= TWO_PI
    return theta


def _cluster_angles(angles, width):
    """Single-linkage clusters of angles on the circle.

    Returns a list of index lists.  Handles the wrap at 2 pi by rotating
    the largest gap to the seam.
    """
    m = len(angles)
    if m == 0:
        return []
    order = sorted(range(m), key=lambda i: angles[i])
    gaps = []
    for j in range(m):
        a = angles[order[j]]
        b = angles[order[(j + 1) % m]] + (TWO_PI if j == m - 1 else 0.0)
        gaps.append(b - a)
    start = (int(np.argmax(gaps)) + 1) % m
    rotated = order[start:] + order[:start]
    clusters = [[rotated[0]]]
    prev = angles[rotated[0]]
    for idx in rotated[1:]:
        a = angles[idx]
        delta = a - prev
        if delta < 0:
            delta += TWO_PI
        if delta <= width:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
        prev = a
    return clusters


def spectral_measure(u: ModuleMap) -> SpectralMeasure:
    """Resolve a unitary module endomorphism into angle point masses.

    Eigenvalues of each inflated block are clustered by angle across all
    blocks; each cluster's eigenrows are projected into the module and
    orthonormalized, which both discards the artificial complement
    spectrum and yields exact projections.  Cluster centers closer than
    ten clustering widths (but not merged) are reported as warnings.
    """
    tols = config.current()
    if not u.is_endomorphism():
        raise ValidationError("spectral measure needs an endomorphism")
    defect = u.unitary_defect()
    if defect > tols.identity:
        raise ValidationError(f"operator is not unitary on its module: defect {defect:.3g}")

    mod = u.source
    algebra = mod.algebra
    n = mod.ambient_rank

    angles = []
    rows_by_block = []  # parallel to angles: (block index, eigenrow)
    for i, (ni, tb, qb) in enumerate(
        zip(algebra.block_sizes, u.matrix.blocks, mod.projection.blocks)
    ):
        d = n * ni
        full = tb + (np.eye(d, dtype=complex) - qb)
        evs, cols = np.linalg.eig(full.T)
        for j in range(d):
            row = cols[:, j].T @ qb  # module part only
            nrm = float(np.linalg.norm(row))
            if nrm <= 1e-6:
                continue  # complement direction
            angles.append(_canonical_angle(complex(evs[j])))
            rows_by_block.append((i, row / nrm))

    clusters = _cluster_angles(angles, tols.angle_cluster)
    centers = []
    for idxs in clusters:
        # circular mean, stable because cluster spread is tiny
        ref = angles[idxs[0]]
        vals = []
        for ix in idxs:
            a = angles[ix]
            if a - ref > math.pi:
                a -= TWO_PI
            elif ref - a > math.pi:
                a += TWO_PI
            vals.append(a)
        center = float(np.mean(vals)) % TWO_PI
        if min(center, TWO_PI - center) <= tols.angle_snap:
            center = 0.0  # roundoff-level angles are the branch cut itself
        centers.append(center)

    warnings = []
    ordered = sorted(range(len(centers)), key=lambda c: centers[c])
    for a, b in zip(ordered, ordered[1:]):
        delta = centers[b] - centers[a]
        if delta <= 10 * tols.angle_cluster:
            warnings.append(
                f"angle clusters at {centers[a]:.9f} and {centers[b]:.9f} are closer than "
                f"ten clustering widths"
            )

    points = []
    for c in ordered:
        idxs = clusters[c]
        blocks = []
        for i, ni in enumerate(algebra.block_sizes):
            d = n * ni
            rows = [rows_by_block[ix][1] for ix in idxs if rows_by_block[ix][0] == i]
            if rows:
                basis = svd_row_basis(np.vstack(rows))
                blocks.append(hermitize(basis.conj().T @ basis))
            else:
                blocks.append(np.zeros((d, d), dtype=complex))
        pmat = AlgMatrix(algebra, n, n, blocks)
        if all(np.allclose(b, 0) for b in pmat.blocks):
            continue
        points.append((centers[c], ModuleMap(mod, mod, pmat, check=False)))

    measure = SpectralMeasure(mod, points, warnings)
    recon = (measure.reconstruct() - u.matrix).norm()
    comp = measure.completeness_defect()
    orth = measure.orthogonality_defect()
    if recon > tols.loose or comp > tols.identity * 10 or orth > tols.identity * 10:
        raise InternalConsistencyError(
            f"spectral resolution failed its own invariants: reconstruction {recon:.3g}, "
            f"completeness {comp:.3g}, orthogonality {orth:.3g}"
        )
    return measure


def spectral_function(u: ModuleMap) -> SpectralFunction:
    """K0-valued spectral function: each angle maps to its projection class."""
    measure = spectral_measure(u)
    pairs = [(angle, k0_of_projection(proj.matrix)) for angle, proj in measure.points]
    return SpectralFunction.from_pairs(pairs)


def cyclic_trace(u: ModuleMap) -> HC0Class:
    """HC0-valued trace of a module unitary.

    Assembles sum_k exp(i phi_k) P_k from the spectral resolution, traces
    the matrix down to the algebra, then takes per-block traces.  Equals
    the per-block trace of the matrix of U itself, which the oracle layer
    checks through flat traces.
    """
    measure = spectral_measure(u)
    acc = measure.reconstruct()
    return blocktrace(acc.trace_down())


def conjugation_invariance_check(u_m: ModuleMap, j: ModuleMap):
    """Transport a unitary along an isomorphism and compare the traces.

    The conjugate is built with the polar isometry V of J, so it stays
    unitary; intertwining V U = U' V holds by construction.  Returns
    (trace on the source, trace on the target, equal within tolerance).
    """
    if not j.source.is_same_presentation(u_m.source):
        raise PreconditionError("isomorphism must start on the unitary's module")
    v = polar_isometry(j)  # raises PreconditionError when J is not invertible
    u_n = v.adjoint().then(u_m).then(v)
    t_m = cyclic_trace(u_m)
    t_n = cyclic_trace(u_n)
    return t_m, t_n, t_m.isclose(t_n, config.current().trace)
