"""Block matrix algebras, their elements, and the invariants K0 and HC0.

The base algebra is a finite direct sum of complex matrix blocks,
``A = M_{n_1}(C) + ... + M_{n_k}(C)``, described by its block sizes.
An element carries one complex ``n_i x n_i`` matrix per block.

Rectangular matrices over A are stored *inflated*: the block-i part of an
``m x n`` matrix over A is a single complex ``(m*n_i) x (n*n_i)`` array
whose (r, c) grid cell of size ``n_i x n_i`` is the block-i part of entry
(r, c).  Under inflation, products and adjoints of matrices over A are
ordinary dense matrix products and conjugate transposes, block by block,
and projections over A are exactly the tuples of complex orthogonal
projections.  All higher layers lean on this.

K0 of the algebra is Z^k via multiplicities of the simple blocks; the K0
class of a projection matrix over A has i-th rank equal to the complex
rank of its inflated block i.  HC0 (the algebra modulo commutators) is
C^k via per-block traces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import InternalConsistencyError, StructuralError, ValidationError

__all__ = [
    "BlockAlgebra",
    "AlgElem",
    "AlgMatrix",
    "K0Class",
    "HC0Class",
    "blocktrace",
    "k0_of_projection",
    "chern_ch0",
]


def _opnorm(b: np.ndarray) -> float:
    if b.size == 0:
        return 0.0
    return float(np.linalg.norm(b, 2))


class BlockAlgebra:
    """A finite-dimensional W*-algebra given by its matrix block sizes."""

    def __init__(self, block_sizes):
        sizes = tuple(int(n) for n in block_sizes)
        if len(sizes) < 1 or any(n < 1 for n in sizes):
            raise ValidationError("block sizes must be a nonempty list of positive integers")
        self.block_sizes = sizes

    @property
    def k(self) -> int:
        return len(self.block_sizes)

    @property
    def dim(self) -> int:
        """Complex dimension, sum of n_i squared."""
        return sum(n * n for n in self.block_sizes)

    def __eq__(self, other):
        return isinstance(other, BlockAlgebra) and self.block_sizes == other.block_sizes

    def __hash__(self):
        return hash(self.block_sizes)

    def __repr__(self):
        return f"BlockAlgebra{self.block_sizes}"

    # -- element constructors -------------------------------------------------

    def elem(self, blocks) -> "AlgElem":
        return AlgElem(self, blocks)

    def zero(self) -> "AlgElem":
        return AlgElem(self, [np.zeros((n, n), dtype=complex) for n in self.block_sizes])

    def one(self) -> "AlgElem":
        return AlgElem(self, [np.eye(n, dtype=complex) for n in self.block_sizes])

    def diag_elem(self, scalars) -> "AlgElem":
        """Element that is ``scalars[i]`` times the identity in block i."""
        if len(scalars) != self.k:
            raise StructuralError("one scalar per block expected")
        return AlgElem(
            self,
            [complex(s) * np.eye(n, dtype=complex) for s, n in zip(scalars, self.block_sizes)],
        )

    # -- matrix constructors --------------------------------------------------

    def zeros(self, rows: int, cols: int) -> "AlgMatrix":
        return AlgMatrix(
            self,
            rows,
            cols,
            [np.zeros((rows * n, cols * n), dtype=complex) for n in self.block_sizes],
        )

    def identity(self, rank: int) -> "AlgMatrix":
        return AlgMatrix(
            self,
            rank,
            rank,
            [np.eye(rank * n, dtype=complex) for n in self.block_sizes],
        )


class AlgElem:
    """One element of a block algebra: a tuple of complex square blocks."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: BlockAlgebra, blocks):
        if len(blocks) != algebra.k:
            raise StructuralError("wrong number of blocks")
        out = []
        for n, b in zip(algebra.block_sizes, blocks):
            arr = np.asarray(b, dtype=complex)
            if arr.shape != (n, n):
                raise StructuralError(f"block of shape {arr.shape}, expected {(n, n)}")
            out.append(arr)
        self.algebra = algebra
        self.blocks = out

    def _same(self, other):
        if not isinstance(other, AlgElem) or other.algebra != self.algebra:
            raise StructuralError("operands belong to different algebras")

    def __add__(self, other):
        self._same(other)
        return AlgElem(self.algebra, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._same(other)
        return AlgElem(self.algebra, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgElem(self.algebra, [-a for a in self.blocks])

    def __mul__(self, other):
        if isinstance(other, AlgElem):
            self._same(other)
            return AlgElem(self.algebra, [a @ b for a, b in zip(self.blocks, other.blocks)])
        if isinstance(other, (int, float, complex, np.integer, np.floating, np.complexfloating)):
            return AlgElem(self.algebra, [complex(other) * a for a in self.blocks])
        return NotImplemented

    def __rmul__(self, other):
        # scalar * elem
        return AlgElem(self.algebra, [complex(other) * a for a in self.blocks])

    def adjoint(self) -> "AlgElem":
        return AlgElem(self.algebra, [a.conj().T for a in self.blocks])

    @property
    def h(self) -> "AlgElem":
        return self.adjoint()

    def norm(self) -> float:
        """Largest block operator norm; this is the C*-norm of the element."""
        return max(_opnorm(b) for b in self.blocks)

    def trace_vector(self) -> np.ndarray:
        return np.array([np.trace(b) for b in self.blocks])

    def is_projection(self, tol=None) -> bool:
        tol = config.current().identity if tol is None else tol
        return all(
            _opnorm(b - b.conj().T) <= tol and _opnorm(b @ b - b) <= tol for b in self.blocks
        )

    def isclose(self, other, tol=None) -> bool:
        tol = config.current().identity if tol is None else tol
        return (self - other).norm() <= tol

    def __repr__(self):
        return f"AlgElem({self.algebra}, norm={self.norm():.3g})"


class AlgMatrix:
    """A rectangular matrix of algebra elements, stored inflated per block.

    Shape (rows, cols) counts entries over A.  Block i is the complex array
    of shape (rows*n_i, cols*n_i).  ``a @ b`` multiplies entrywise over A,
    ``m.h`` is the entrywise-adjointed transpose, and both agree with the
    plain dense operations on the inflated blocks.
    """

    __slots__ = ("algebra", "rows", "cols", "blocks")

    def __init__(self, algebra: BlockAlgebra, rows: int, cols: int, blocks):
        if len(blocks) != algebra.k:
            raise StructuralError("wrong number of blocks")
        out = []
        for n, b in zip(algebra.block_sizes, blocks):
            arr = np.asarray(b, dtype=complex)
            if arr.shape != (rows * n, cols * n):
                raise StructuralError(
                    f"inflated block of shape {arr.shape}, expected {(rows * n, cols * n)}"
                )
            out.append(arr)
        self.algebra = algebra
        self.rows = rows
        self.cols = cols
        self.blocks = out

    # -- construction ----------------------------------------------------------

    @classmethod
    def from_entries(cls, algebra: BlockAlgebra, entries) -> "AlgMatrix":
        """Build from a rows x cols nested list of AlgElem values."""
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        blocks = []
        for i, n in enumerate(algebra.block_sizes):
            big = np.zeros((rows * n, cols * n), dtype=complex)
            for r in range(rows):
                if len(entries[r]) != cols:
                    raise StructuralError("ragged entry rows")
                for c in range(cols):
                    e = entries[r][c]
                    if e.algebra != algebra:
                        raise StructuralError("entry from a different algebra")
                    big[r * n : (r + 1) * n, c * n : (c + 1) * n] = e.blocks[i]
            blocks.append(big)
        return cls(algebra, rows, cols, blocks)

    @classmethod
    def from_elem(cls, e: AlgElem) -> "AlgMatrix":
        return cls(e.algebra, 1, 1, [b.copy() for b in e.blocks])

    def entry(self, r: int, c: int) -> AlgElem:
        pieces = []
        for n, b in zip(self.algebra.block_sizes, self.blocks):
            pieces.append(b[r * n : (r + 1) * n, c * n : (c + 1) * n].copy())
        return AlgElem(self.algebra, pieces)

    def as_elem(self) -> AlgElem:
        if (self.rows, self.cols) != (1, 1):
            raise StructuralError("only a 1x1 matrix converts to an element")
        return self.entry(0, 0)

    # -- arithmetic --------------------------------------------------------------

    def _same_shape(self, other):
        if (
            not isinstance(other, AlgMatrix)
            or other.algebra != self.algebra
            or (other.rows, other.cols) != (self.rows, self.cols)
        ):
            raise StructuralError("matrix shape or algebra mismatch")

    def __add__(self, other):
        self._same_shape(other)
        return AlgMatrix(
            self.algebra,
            self.rows,
            self.cols,
            [a + b for a, b in zip(self.blocks, other.blocks)],
        )

    def __sub__(self, other):
        self._same_shape(other)
        return AlgMatrix(
            self.algebra,
            self.rows,
            self.cols,
            [a - b for a, b in zip(self.blocks, other.blocks)],
        )

    def __neg__(self):
        return AlgMatrix(self.algebra, self.rows, self.cols, [-a for a in self.blocks])

    def __mul__(self, scalar):
        return AlgMatrix(
            self.algebra, self.rows, self.cols, [complex(scalar) * a for a in self.blocks]
        )

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, AlgMatrix) or other.algebra != self.algebra:
            raise StructuralError("matrix product needs matrices over one algebra")
        if self.cols != other.rows:
            raise StructuralError(
                f"inner dimensions do not match: {self.cols} vs {other.rows}"
            )
        return AlgMatrix(
            self.algebra,
            self.rows,
            other.cols,
            [a @ b for a, b in zip(self.blocks, other.blocks)],
        )

    def adjoint(self) -> "AlgMatrix":
        return AlgMatrix(
            self.algebra, self.cols, self.rows, [a.conj().T for a in self.blocks]
        )

    @property
    def h(self) -> "AlgMatrix":
        return self.adjoint()

    def scaled_block_sum(self, other, alpha=1.0, beta=1.0):
        self._same_shape(other)
        return AlgMatrix(
            self.algebra,
            self.rows,
            self.cols,
            [alpha * a + beta * b for a, b in zip(self.blocks, other.blocks)],
        )

    # -- structure helpers --------------------------------------------------------

    def trace_down(self) -> AlgElem:
        """Sum of the diagonal entries: the A-valued trace of a square matrix."""
        if self.rows != self.cols:
            raise StructuralError("trace of a non-square matrix")
        pieces = []
        for n, b in zip(self.algebra.block_sizes, self.blocks):
            acc = np.zeros((n, n), dtype=complex)
            for r in range(self.rows):
                acc += b[r * n : (r + 1) * n, r * n : (r + 1) * n]
            pieces.append(acc)
        return AlgElem(self.algebra, pieces)

    def norm(self) -> float:
        return max(_opnorm(b) for b in self.blocks)

    def frobenius(self) -> float:
        """Frobenius norm over all blocks; an upper bound for norm().

        Validation gates use this bound: it never accepts anything the
        operator norm would reject, and skips a singular value
        decomposition per block.
        """
        return float(np.sqrt(sum(np.sum(np.abs(b) ** 2) for b in self.blocks)))

    def is_hermitian(self, tol=None) -> bool:
        if self.rows != self.cols:
            return False
        tol = config.current().identity if tol is None else tol
        return (self - self.h).frobenius() <= tol

    def is_projection(self, tol=None) -> bool:
        if self.rows != self.cols:
            return False
        tol = config.current().identity if tol is None else tol
        return self.projection_defect() <= tol

    def projection_defect(self) -> float:
        if self.rows != self.cols:
            return float("inf")
        worst = 0.0
        for b in self.blocks:
            worst = max(
                worst,
                float(np.sqrt(np.sum(np.abs(b - b.conj().T) ** 2))),
                float(np.sqrt(np.sum(np.abs(b @ b - b) ** 2))),
            )
        return worst

    def isclose(self, other, tol=None) -> bool:
        tol = config.current().identity if tol is None else tol
        return (self - other).norm() <= tol

    def copy(self) -> "AlgMatrix":
        return AlgMatrix(
            self.algebra, self.rows, self.cols, [b.copy() for b in self.blocks]
        )

    def __repr__(self):
        return f"AlgMatrix({self.algebra}, {self.rows}x{self.cols})"


# -- invariants -------------------------------------------------------------------


@dataclass(frozen=True)
class K0Class:
    """Element of K0 of the algebra: one integer multiplicity per block.

    Negative entries encode formal differences of projective modules.
    """

    ranks: tuple

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))

    def __add__(self, other):
        self._compatible(other)
        return K0Class(tuple(a + b for a, b in zip(self.ranks, other.ranks)))

    def __sub__(self, other):
        self._compatible(other)
        return K0Class(tuple(a - b for a, b in zip(self.ranks, other.ranks)))

    def __neg__(self):
        return K0Class(tuple(-a for a in self.ranks))

    def _compatible(self, other):
        if not isinstance(other, K0Class) or len(other.ranks) != len(self.ranks):
            raise StructuralError("K0 classes over different algebras")

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.ranks)

    @classmethod
    def zero(cls, k: int) -> "K0Class":
        return cls((0,) * k)


@dataclass(frozen=True)
class HC0Class:
    """Element of degree-zero cyclic homology: one complex trace per block."""

    traces: tuple

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(complex(t) for t in self.traces))

    def __add__(self, other):
        return HC0Class(tuple(a + b for a, b in zip(self.traces, other.traces)))

    def __sub__(self, other):
        return HC0Class(tuple(a - b for a, b in zip(self.traces, other.traces)))

    def __neg__(self):
        return HC0Class(tuple(-a for a in self.traces))

    def conj(self) -> "HC0Class":
        return HC0Class(tuple(t.conjugate() for t in self.traces))

    def scaled(self, z) -> "HC0Class":
        return HC0Class(tuple(complex(z) * t for t in self.traces))

    def isclose(self, other, tol) -> bool:
        return self.distance(other) <= tol

    def distance(self, other) -> float:
        return max(
            (abs(a - b) for a, b in zip(self.traces, other.traces)),
            default=0.0,
        )

    @classmethod
    def zero(cls, k: int) -> "HC0Class":
        return cls((0j,) * k)


def blocktrace(a: AlgElem) -> HC0Class:
    """Per-block trace of an element; the quotient map onto HC0.

    Kills commutators: blocktrace(ab) equals blocktrace(ba) up to rounding.
    """
    return HC0Class(tuple(np.trace(b) for b in a.blocks))


def k0_of_projection(p) -> K0Class:
    """K0 class of a projection matrix over the algebra.

    The i-th rank is the complex rank of the inflated block i, computed by
    counting eigenvalues above 1/2.  Projections have spectrum {0, 1}, so
    the split is safe at the validation tolerance; an eigenvalue far from
    both is reported as a broken projection rather than rounded.
    """
    if isinstance(p, AlgElem):
        p = AlgMatrix.from_elem(p)
    tol = config.current().identity
    if p.rows != p.cols:
        raise ValidationError("projection matrix must be square")
    defect = p.projection_defect()
    if defect > tol:
        raise ValidationError(
            f"input is not a projection: self-adjoint/idempotent defect {defect:.3g}"
        )
    ranks = []
    for b in p.blocks:
        if b.size == 0:
            ranks.append(0)
            continue
        evs = np.linalg.eigvalsh(b)
        stray = evs[(np.abs(evs) > 1e-6) & (np.abs(evs - 1.0) > 1e-6)]
        if stray.size:
            raise InternalConsistencyError(
                f"projection spectrum not clustered at 0/1: stray eigenvalue {stray[0]:.3g}"
            )
        ranks.append(int(np.count_nonzero(evs > 0.5)))
    return K0Class(tuple(ranks))


def chern_ch0(c: K0Class) -> HC0Class:
    """Degree-zero Chern character K0 -> HC0.

    A minimal projection of block i has trace 1, so the class of a
    projective module maps to its multiplicity vector read as traces.
    """
    return HC0Class(tuple(complex(r) for r in c.ranks))
