"""Finitely generated projective Hilbert modules over a block algebra.

A module is presented as the image of a projection q acting (on the right)
on the free module A^n; its elements are the rows x in A^n with x q = x.
Submodules are always stored as projections dominated by q, so "being a
direct summand" is a representation invariant here, not a theorem to
re-check.  Inner products are A-valued, A-linear in the first slot:
``<x, y> = sum_j x_j y_j*``.

Per algebra block, the picture collapses to ordinary Hilbert-space
geometry: a module element contributes flat row vectors, a submodule is a
complex subspace of the presentation's row space, and all complement /
intersection / sum operations are subspace computations done blockwise.
"""

from __future__ import annotations

import numpy as np

from . import config
from ._linalg import hermitize, psd_function, row_null_basis, span_projection, svd_row_basis
from .algebra import AlgElem, AlgMatrix, BlockAlgebra, K0Class, k0_of_projection
from .errors import StructuralError, ValidationError

__all__ = [
    "HilbertModule",
    "ModuleElement",
    "Submodule",
    "inner_product",
    "orthogonal_complement",
    "biorthogonal_complement",
    "intersect",
    "submodule_sum",
    "structure_decompose",
    "ideal_support_projection",
    "is_direct_summand",
]


class HilbertModule:
    """The projective module q(A^n), carried by its presenting projection."""

    def __init__(self, algebra: BlockAlgebra, ambient_rank: int, projection: AlgMatrix):
        if ambient_rank < 1:
            raise ValidationError("ambient rank must be positive")
        if projection.algebra != algebra or projection.rows != ambient_rank:
            raise StructuralError("presenting projection has the wrong shape")
        defect = projection.projection_defect()
        if defect > config.current().identity:
            raise ValidationError(f"presenting matrix is not a projection: defect {defect:.3g}")
        self.algebra = algebra
        self.ambient_rank = ambient_rank
        self.projection = projection

    def k0(self) -> K0Class:
        return k0_of_projection(self.projection)

    def element(self, vec: AlgMatrix) -> "ModuleElement":
        return ModuleElement(self, vec)

    def element_from_rows(self, flat_rows) -> "ModuleElement":
        """Element from its per-block flat coordinate rows (n_i, n*n_i)."""
        vec = AlgMatrix(self.algebra, 1, self.ambient_rank, flat_rows)
        return ModuleElement(self, vec)

    def zero_element(self) -> "ModuleElement":
        return ModuleElement(self, self.algebra.zeros(1, self.ambient_rank))

    def coordinate_generators(self):
        """The elements e_r q; they generate the module over A."""
        out = []
        n = self.ambient_rank
        for r in range(n):
            blocks = []
            for ni, qb in zip(self.algebra.block_sizes, self.projection.blocks):
                blocks.append(qb[r * ni : (r + 1) * ni, :].copy())
            out.append(ModuleElement(self, AlgMatrix(self.algebra, 1, n, blocks)))
        return out

    def full_submodule(self) -> "Submodule":
        return Submodule(self, self.projection.copy())

    def zero_submodule(self) -> "Submodule":
        return Submodule(self, self.algebra.zeros(self.ambient_rank, self.ambient_rank))

    def is_same_presentation(self, other, tol=None) -> bool:
        return (
            isinstance(other, HilbertModule)
            and other.algebra == self.algebra
            and other.ambient_rank == self.ambient_rank
            and other.projection.isclose(self.projection, tol)
        )

    @staticmethod
    def direct_sum(mods) -> "HilbertModule":
        mods = list(mods)
        if not mods:
            raise StructuralError("direct sum of an empty family is not presentable")
        algebra = mods[0].algebra
        total = sum(m.ambient_rank for m in mods)
        blocks = []
        for i, ni in enumerate(algebra.block_sizes):
            big = np.zeros((total * ni, total * ni), dtype=complex)
            off = 0
            for m in mods:
                if m.algebra != algebra:
                    raise StructuralError("direct sum over mixed algebras")
                d = m.ambient_rank * ni
                big[off : off + d, off : off + d] = m.projection.blocks[i]
                off += d
            blocks.append(big)
        return HilbertModule(algebra, total, AlgMatrix(algebra, total, total, blocks))

    def __repr__(self):
        return f"HilbertModule(rank {self.ambient_rank} over {self.algebra}, k0={self.k0().ranks})"


class ModuleElement:
    """A row over A lying in its owner module (x q = x)."""

    __slots__ = ("owner", "vec")

    def __init__(self, owner: HilbertModule, vec: AlgMatrix):
        if vec.algebra != owner.algebra or (vec.rows, vec.cols) != (1, owner.ambient_rank):
            raise StructuralError("coordinate row has the wrong shape")
        resid = (vec @ owner.projection - vec).frobenius()
        if resid > config.current().identity * max(1.0, vec.frobenius()):
            raise ValidationError(f"element does not lie in the module: residual {resid:.3g}")
        self.owner = owner
        self.vec = vec

    def __add__(self, other):
        self._same(other)
        return ModuleElement(self.owner, self.vec + other.vec)

    def __sub__(self, other):
        self._same(other)
        return ModuleElement(self.owner, self.vec - other.vec)

    def __neg__(self):
        return ModuleElement(self.owner, -self.vec)

    def __rmul__(self, a):
        """Left action: by an algebra element, or by a complex scalar."""
        if isinstance(a, AlgElem):
            if a.algebra != self.owner.algebra:
                raise StructuralError("acting element from a different algebra")
            blocks = [ab @ xb for ab, xb in zip(a.blocks, self.vec.blocks)]
            return ModuleElement(
                self.owner, AlgMatrix(self.owner.algebra, 1, self.owner.ambient_rank, blocks)
            )
        return ModuleElement(self.owner, complex(a) * self.vec)

    def _same(self, other):
        if not isinstance(other, ModuleElement) or other.owner is not self.owner:
            if not (
                isinstance(other, ModuleElement)
                and other.owner.is_same_presentation(self.owner)
            ):
                raise StructuralError("elements of different modules")

    def norm(self) -> float:
        return float(np.sqrt(max(inner_product(self, self).norm(), 0.0)))

    def __repr__(self):
        return f"ModuleElement(norm={self.norm():.3g})"


class Submodule:
    """A direct summand of a module, in normal form: a dominated projection."""

    def __init__(self, ambient: HilbertModule, projection: AlgMatrix):
        n = ambient.ambient_rank
        if projection.algebra != ambient.algebra or projection.rows != n or projection.cols != n:
            raise StructuralError("submodule projection has the wrong shape")
        tol = config.current().identity
        defect = projection.projection_defect()
        if defect > tol:
            raise ValidationError(f"submodule matrix is not a projection: defect {defect:.3g}")
        dom = (projection @ ambient.projection - projection).frobenius()
        if dom > tol:
            raise ValidationError(
                f"submodule projection is not dominated by the presentation: {dom:.3g}"
            )
        self.ambient = ambient
        self.projection = projection

    def k0(self) -> K0Class:
        return k0_of_projection(self.projection)

    def as_module(self) -> HilbertModule:
        """The summand viewed as a module in its own right (same ambient)."""
        return HilbertModule(self.ambient.algebra, self.ambient.ambient_rank, self.projection)

    def complement(self) -> "Submodule":
        return Submodule(self.ambient, self.ambient.projection - self.projection)

    def contains(self, x: ModuleElement, tol=None) -> bool:
        tol = config.current().loose if tol is None else tol
        return (x.vec @ self.projection - x.vec).norm() <= tol * max(1.0, x.vec.norm())

    def generators(self):
        """Generating elements of the summand, living in the ambient module."""
        out = []
        n = self.ambient.ambient_rank
        for r in range(n):
            blocks = []
            for ni, rb in zip(self.ambient.algebra.block_sizes, self.projection.blocks):
                blocks.append(rb[r * ni : (r + 1) * ni, :].copy())
            out.append(ModuleElement(self.ambient, AlgMatrix(self.ambient.algebra, 1, n, blocks)))
        return out

    def isclose(self, other, tol=None) -> bool:
        return self.projection.isclose(other.projection, tol)

    def __repr__(self):
        return f"Submodule(k0={self.k0().ranks} of ambient rank {self.ambient.ambient_rank})"


# -- A-valued inner product ---------------------------------------------------------


def inner_product(x: ModuleElement, y: ModuleElement) -> AlgElem:
    """A-valued inner product, A-linear in the first slot."""
    x._same(y)
    return (x.vec @ y.vec.h).as_elem()


# -- complements and lattice operations ---------------------------------------------


def _stacked_rows(generators, ambient: HilbertModule):
    """Per block, the flat rows of all generators stacked."""
    n = ambient.ambient_rank
    out = []
    for i, ni in enumerate(ambient.algebra.block_sizes):
        if generators:
            out.append(np.vstack([g.vec.blocks[i] for g in generators]))
        else:
            out.append(np.zeros((0, n * ni), dtype=complex))
    return out

def _check_gens(generators, ambient):
    for g in generators:
        if not (g.owner is ambient or g.owner.is_same_presentation(ambient)):
            raise StructuralError("generator from a different ambient module")


def span_submodule(generators, ambient: HilbertModule) -> Submodule:
    """Smallest direct summand containing the generators (blockwise row span)."""
    _check_gens(generators, ambient)
    n = ambient.ambient_rank
    blocks = [
        span_projection(stack, n * ni)
        for stack, ni in zip(_stacked_rows(generators, ambient), ambient.algebra.block_sizes)
    ]
    return Submodule(ambient, AlgMatrix(ambient.algebra, n, n, blocks))


def orthogonal_complement(generators, ambient: HilbertModule) -> Submodule:
    """Projection onto { y in ambient : <x, y> = 0 for every generator x }.

    An empty generator list complements to the whole module.
    """
    span = span_submodule(generators, ambient)
    return Submodule(ambient, ambient.projection - span.projection)


def biorthogonal_complement(generators, ambient: HilbertModule) -> Submodule:
    """Orthogonal complement applied twice; contains every generator."""
    first = orthogonal_complement(generators, ambient)
    return orthogonal_complement(first.generators(), ambient)


def intersect(p: Submodule, q: Submodule) -> Submodule:
    """The intersection of two summands, again a summand."""
    if p.ambient is not q.ambient and not p.ambient.is_same_presentation(q.ambient):
        raise StructuralError("intersection needs a common ambient module")
    ambient = p.ambient
    n = ambient.ambient_rank
    blocks = []
    for ni, pb, qb in zip(ambient.algebra.block_sizes, p.projection.blocks, q.projection.blocks):
        d = n * ni
        eye = np.eye(d, dtype=complex)
        # v is in both images iff v kills both complement projections.
        constraints = np.hstack([eye - pb, eye - qb])
        basis = row_null_basis(constraints)
        if basis.shape[0] == 0:
            blocks.append(np.zeros((d, d), dtype=complex))
        else:
            blocks.append(hermitize(basis.conj().T @ basis))
    return Submodule(ambient, AlgMatrix(ambient.algebra, n, n, blocks))


def submodule_sum(p: Submodule, q: Submodule) -> Submodule:
    """Summand generated by the union of two summands."""
    if p.ambient is not q.ambient and not p.ambient.is_same_presentation(q.ambient):
        raise StructuralError("sum needs a common ambient module")
    ambient = p.ambient
    n = ambient.ambient_rank
    blocks = []
    for ni, pb, qb in zip(ambient.algebra.block_sizes, p.projection.blocks, q.projection.blocks):
        stack = np.vstack([pb, qb])
        blocks.append(span_projection(stack, n * ni))
    return Submodule(ambient, AlgMatrix(ambient.algebra, n, n, blocks))


# -- structure theory -----------------------------------------------------------------


def _pinv_sqrt_elem(h: AlgElem) -> AlgElem:
    """Pseudo-inverse square root of a positive element, blockwise."""
    tols = config.current()
    scale = h.norm()
    cut = max(scale * tols.rank_rel, tols.rank_floor)

    def fn(w):
        out = np.zeros_like(w)
        good = w > cut
        out[good] = 1.0 / np.sqrt(w[good])
        return out

    return AlgElem(h.algebra, [psd_function(b, fn) for b in h.blocks])


def structure_decompose(m: HilbertModule):
    """Split a module into pairwise orthogonal cyclic pieces A x with x
    normalized so that <x, x> is a projection p; each piece is then a copy
    of the ideal A p with its standard inner product.

    Returns a list of (generator, ideal projection) pairs whose cyclic
    summands sum orthogonally to the whole module.
    """
    tols = config.current()
    pieces = []
    remaining = m.full_submodule()
    for gen in m.coordinate_generators():
        x = m.element(gen.vec @ remaining.projection)
        if x.norm() <= 10 * tols.rank_floor:
            continue
        gram = inner_product(x, x)
        xn = _pinv_sqrt_elem(gram) * x
        p = inner_product(xn, xn)
        cyc = span_submodule([xn], m)
        pieces.append((xn, p))
        remaining = Submodule(m, remaining.projection - cyc.projection)
    return pieces


def ideal_support_projection(generators) -> AlgElem:
    """Support projection of the left ideal generated by algebra elements.

    Returns the unique projection p with A p equal to the ideal and d p = d
    for every ideal element d.
    """
    if not generators:
        raise StructuralError("support of the zero ideal needs at least the algebra")
    algebra = generators[0].algebra
    blocks = []
    for i, ni in enumerate(algebra.block_sizes):
        stack = np.vstack([g.blocks[i] for g in generators])
        blocks.append(span_projection(stack, ni))
    return AlgElem(algebra, blocks)


def is_direct_summand(generators, ambient: HilbertModule):
    """Whether the generated submodule admits a reproducing projection.

    Over a finite-dimensional algebra this always succeeds; the witness is
    the span projection and the check is that it reproduces each generator.
    """
    witness = span_submodule(generators, ambient)
    tol = config.current().loose
    ok = all(
        (g.vec @ witness.projection - g.vec).norm() <= tol * max(1.0, g.vec.norm())
        for g in generators
    )
    return ok, witness
