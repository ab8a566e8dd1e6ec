"""Bounded module maps between Hilbert modules.

A map from q(A^m) to q'(A^n) is an m x n matrix T over A acting on the
right, x -> x T, compatible with the presentations (q T q' = T).
Composition is written in application order: ``f.then(g)`` applies f
first, and its matrix is the product of the two matrices.

Highlights: kernels come out as direct summands in projection normal
form; positive operators get a square root either by the Taylor series
of sqrt(1 - x) (a genuinely iterative scheme, run by the compiled kernel
when available) or by diagonalization; injective maps with dense range
factor through an exact isometry (the polar part); and every map has a
K0-valued index, kernel class minus cokernel class.
"""

from __future__ import annotations

import numpy as np

from . import config
from ._kernels import series_bracket
from ._linalg import hermitize, psd_function
from .algebra import AlgMatrix, K0Class, k0_of_projection
from .errors import (
    ConvergenceError,
    PreconditionError,
    StructuralError,
    ValidationError,
)
from .modules import (
    HilbertModule,
    ModuleElement,
    Submodule,
    orthogonal_complement,
    span_submodule,
)

__all__ = [
    "ModuleMap",
    "identity_map",
    "zero_map",
    "adjoint_map",
    "kernel_projection",
    "operator_sqrt",
    "polar_isometry",
    "embed_as_summand",
    "fredholm_index",
]

SQRT_MAX_TERMS = 10_000


class ModuleMap:
    """An A-linear map between two presented modules."""

    def __init__(self, source: HilbertModule, target: HilbertModule, matrix: AlgMatrix,
                 check: bool = True):
        if source.algebra != target.algebra or matrix.algebra != source.algebra:
            raise StructuralError("source, target and matrix must share one algebra")
        if (matrix.rows, matrix.cols) != (source.ambient_rank, target.ambient_rank):
            raise StructuralError("matrix shape does not match the ambient ranks")
        if check:
            clipped = source.projection @ matrix @ target.projection
            resid = (clipped - matrix).frobenius()
            if resid > config.current().identity * max(1.0, matrix.frobenius()):
                raise ValidationError(
                    f"matrix does not respect the presentations: residual {resid:.3g}"
                )
        self.source = source
        self.target = target
        self.matrix = matrix

    # -- algebra of maps -------------------------------------------------------

    def then(self, other: "ModuleMap") -> "ModuleMap":
        """Apply self first, then other."""
        if not other.source.is_same_presentation(self.target):
            raise StructuralError("composition needs matching middle module")
        return ModuleMap(self.source, other.target, self.matrix @ other.matrix, check=False)

    def adjoint(self) -> "ModuleMap":
        return ModuleMap(self.target, self.source, self.matrix.h, check=False)

    def apply(self, x: ModuleElement) -> ModuleElement:
        if not (x.owner is self.source or x.owner.is_same_presentation(self.source)):
            raise StructuralError("element not in the source module")
        return ModuleElement(self.target, x.vec @ self.matrix)

    def __add__(self, other):
        self._same_signature(other)
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other):
        self._same_signature(other)
        return ModuleMap(self.source, self.target, self.matrix - other.matrix, check=False)

    def __mul__(self, scalar):
        return ModuleMap(self.source, self.target, complex(scalar) * self.matrix, check=False)

    __rmul__ = __mul__

    def __neg__(self):
        return ModuleMap(self.source, self.target, -self.matrix, check=False)

    def _same_signature(self, other):
        if not (
            isinstance(other, ModuleMap)
            and other.source.is_same_presentation(self.source)
            and other.target.is_same_presentation(self.target)
        ):
            raise StructuralError("maps with different signatures")

    def norm(self) -> float:
        return self.matrix.norm()

    def is_endomorphism(self) -> bool:
        return self.target.is_same_presentation(self.source)

    def unitary_defect(self) -> float:
        """Distance of T T* and T* T from the two presentations."""
        left = (self.matrix @ self.matrix.h - self.source.projection).norm()
        right = (self.matrix.h @ self.matrix - self.target.projection).norm()
        return max(left, right)

    def is_unitary(self, tol=None) -> bool:
        tol = config.current().identity if tol is None else tol
        return self.unitary_defect() <= tol

    def direct_sum(self, other: "ModuleMap") -> "ModuleMap":
        src = HilbertModule.direct_sum([self.source, other.source])
        tgt = HilbertModule.direct_sum([self.target, other.target])
        blocks = []
        for i, ni in enumerate(self.source.algebra.block_sizes):
            a = self.matrix.blocks[i]
            b = other.matrix.blocks[i]
            big = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=complex)
            big[: a.shape[0], : a.shape[1]] = a
            big[a.shape[0] :, a.shape[1] :] = b
            blocks.append(big)
        mat = AlgMatrix(src.algebra, src.ambient_rank, tgt.ambient_rank, blocks)
        return ModuleMap(src, tgt, mat, check=False)

    def __repr__(self):
        return (
            f"ModuleMap({self.source.ambient_rank}->{self.target.ambient_rank}"
            f" over {self.source.algebra}, norm={self.norm():.3g})"
        )


def identity_map(module: HilbertModule) -> ModuleMap:
    return ModuleMap(module, module, module.projection.copy(), check=False)


def zero_map(source: HilbertModule, target: HilbertModule) -> ModuleMap:
    return ModuleMap(
        source, target, source.algebra.zeros(source.ambient_rank, target.ambient_rank),
        check=False,
    )


def adjoint_map(phi: ModuleMap) -> ModuleMap:
    """The adjoint, satisfying <phi x, y> = <x, phi* y>."""
    return phi.adjoint()


def kernel_projection(phi: ModuleMap) -> Submodule:
    """The kernel of a module map as a direct summand of the source.

    Blockwise this is the row null space of the inflated matrix inside the
    presentation's row space; the result coincides with its own
    bi-orthogonal complement, which tests re-verify.
    """
    from ._linalg import row_null_basis

    src = phi.source
    n = src.ambient_rank
    blocks = []
    for ni, tb, qb in zip(src.algebra.block_sizes, phi.matrix.blocks, src.projection.blocks):
        d = n * ni
        eye = np.eye(d, dtype=complex)
        constraints = np.hstack([tb, eye - qb])
        basis = row_null_basis(constraints)
        if basis.shape[0] == 0:
            blocks.append(np.zeros((d, d), dtype=complex))
        else:
            blocks.append(hermitize(basis.conj().T @ basis))
    return Submodule(src, AlgMatrix(src.algebra, n, n, blocks))


def _validate_positive_endo(h: ModuleMap):
    if not h.is_endomorphism():
        raise StructuralError("square root needs an endomorphism")
    tol = config.current().identity
    if (h.matrix - h.matrix.h).norm() > tol * max(1.0, h.norm()):
        raise ValidationError("square root needs a self-adjoint operator")
    low = min(float(np.linalg.eigvalsh(hermitize(b))[0]) if b.size else 0.0
              for b in h.matrix.blocks)
    if low < -tol:
        raise ValidationError(f"operator is not positive: eigenvalue {low:.3g}")


def operator_sqrt(h: ModuleMap, method: str = "series") -> ModuleMap:
    """Square root of a positive endomorphism.

    ``series`` evaluates norm(h)^(1/2) (q - sum_k lam_k (q - h/norm(h))^k)
    with the Taylor coefficients of sqrt(1 - x), truncated adaptively; the
    module identity q plays the unit.  Slow decay of the terms signals a
    near-singular operator and raises ConvergenceError.  ``oracle``
    diagonalizes blockwise and clips tiny negative eigenvalues at zero.
    """
    _validate_positive_endo(h)
    mod = h.source
    q = mod.projection
    if method == "oracle":
        blocks = [psd_function(b, lambda w: np.sqrt(np.clip(w, 0.0, None)))
                  for b in h.matrix.blocks]
        # keep the complement of the presentation exactly dead
        mat = q @ AlgMatrix(mod.algebra, q.rows, q.cols, blocks) @ q
        return ModuleMap(mod, mod, mat, check=False)
    if method != "series":
        raise ValueError(f"unknown square-root method {method!r}")

    tols = config.current()
    norm = h.norm()
    if norm <= tols.rank_floor:
        return zero_map(mod, mod)
    scale = float(np.sqrt(norm))
    blocks = []
    worst_terms = 0
    for qb, hb in zip(q.blocks, h.matrix.blocks):
        p0 = np.ascontiguousarray(qb - hb / norm)
        bracket, terms, ok = series_bracket(p0, qb, scale, tols.tight, SQRT_MAX_TERMS)
        worst_terms = max(worst_terms, terms)
        if not ok:
            raise ConvergenceError(
                f"square-root series did not converge within {SQRT_MAX_TERMS} terms; "
                "the operator is nearly singular, use the diagonalization route"
            )
        blocks.append(scale * bracket)
    mat = AlgMatrix(mod.algebra, q.rows, q.cols, blocks)
    out = ModuleMap(mod, mod, mat, check=False)
    out.series_terms = worst_terms
    return out


def _inverse_sqrt(h: ModuleMap) -> ModuleMap:
    """Pseudo-inverse square root on the presentation's range."""
    tols = config.current()
    mod = h.source
    norm = h.norm()
    cut = max(norm * tols.rank_rel**2, tols.rank_floor)

    def fn(w):
        out = np.zeros_like(w)
        good = w > cut
        out[good] = 1.0 / np.sqrt(w[good])
        return out

    blocks = [psd_function(b, fn) for b in h.matrix.blocks]
    mat = mod.projection @ AlgMatrix(mod.algebra, mod.ambient_rank, mod.ambient_rank, blocks) \
        @ mod.projection
    return ModuleMap(mod, mod, mat, check=False)


def _range_span(alpha: ModuleMap) -> Submodule:
    """Bi-orthogonal complement of the range, as a summand of the target."""
    images = [alpha.apply(g) for g in alpha.source.coordinate_generators()]
    return span_submodule(images, alpha.target)


def _require_injective(alpha: ModuleMap, who: str):
    ker = kernel_projection(alpha)
    if not ker.k0().is_zero():
        raise PreconditionError(f"{who} requires an injective map; kernel class {ker.k0().ranks}",
                                defect=ker)
    return ker


def polar_isometry(alpha: ModuleMap) -> ModuleMap:
    """The isometric part alpha (alpha* alpha)^(-1/2).

    Needs alpha injective with bi-orthogonally dense range; the result is a
    module isomorphism onto the target preserving inner products.
    """
    _require_injective(alpha, "polar_isometry")
    rng = _range_span(alpha)
    defect = rng.complement()
    if not defect.k0().is_zero():
        raise PreconditionError(
            "polar_isometry requires the range's bi-orthogonal complement to fill the target; "
            f"missing class {defect.k0().ranks}",
            defect=defect,
        )
    h = alpha.then(alpha.adjoint())  # alpha* alpha as an endomorphism of the source
    return _inverse_sqrt(h).then(alpha)


def embed_as_summand(alpha: ModuleMap):
    """Factor an injective map through an exact isometry onto a summand.

    Returns (isometry onto the range's bi-orthogonal complement, orthogonal
    complement of that summand in the target).
    """
    _require_injective(alpha, "embed_as_summand")
    rng = _range_span(alpha)
    h = alpha.then(alpha.adjoint())
    v = _inverse_sqrt(h).then(alpha)
    iso = ModuleMap(alpha.source, rng.as_module(), v.matrix, check=False)
    return iso, rng.complement()


def fredholm_index(f: ModuleMap) -> K0Class:
    """Kernel class minus cokernel class in K0.

    Over a finite-dimensional algebra every map between presented modules
    qualifies; the cokernel is the orthogonal complement of the range.
    """
    ker = kernel_projection(f)
    coker = _range_span(f).complement()
    return ker.k0() - coker.k0()
