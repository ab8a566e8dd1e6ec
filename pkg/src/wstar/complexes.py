"""Finite complexes of Hilbert modules, Hodge theory and Lefschetz numbers.

A finite complex is a list of presented modules with differentials
d_m : E_m -> E_{m+1} composing to zero.  The harmonic summand in degree m
is the orthogonal complement of the image of d_{m-1} inside the kernel of
d_m; it computes the cohomology, is invariant under any unitary chain
endomorphism, and the kernel of d + d* restricted to the even (odd) total
module is exactly the direct sum of the even (odd) harmonic summands.

Two invariants of a unitary chain endomorphism U:

* the angle-resolved one: alternating sum over degrees of the K0-valued
  spectral functions of U restricted to the harmonic summands,
* the trace-valued one in HC0: same alternating sum of cyclic traces.

Pushing the first through the degree-zero Chern character and integrating
against exp(i angle) over the support recovers the second; that identity
is exposed as a checkable report (the unweighted reading, without the
exponential factor, is available behind a flag for comparison but fails
in general).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .algebra import AlgMatrix, HC0Class, K0Class, chern_ch0
from .errors import (
    InternalConsistencyError,
    PreconditionError,
    StructuralError,
    ValidationError,
)
from .modules import HilbertModule, Submodule, intersect, orthogonal_complement
from .operators import (
    ModuleMap,
    fredholm_index,
    kernel_projection,
    polar_isometry,
    zero_map,
)
from .spectral import SpectralFunction, cyclic_trace, spectral_function

__all__ = [
    "FiniteComplex",
    "ComplexEndomorphism",
    "HarmonicSpaces",
    "validate_complex",
    "hodge_spaces",
    "fredholm_F",
    "lefschetz_L1",
    "lefschetz_L0",
    "chern_consistency",
    "conjugate_complex",
]


class FiniteComplex:
    """Spaces E_0 .. E_N with differentials d_m : E_m -> E_{m+1}."""

    def __init__(self, spaces, differentials):
        spaces = list(spaces)
        differentials = list(differentials)
        if not spaces:
            raise StructuralError("a complex needs at least one space")
        if len(differentials) != len(spaces) - 1:
            raise StructuralError("need exactly one differential between consecutive spaces")
        algebra = spaces[0].algebra
        for s in spaces:
            if s.algebra != algebra:
                raise StructuralError("complex over mixed algebras")
        for m, d in enumerate(differentials):
            if not d.source.is_same_presentation(spaces[m]) or not d.target.is_same_presentation(
                spaces[m + 1]
            ):
                raise StructuralError(f"differential {m} does not match its spaces")
        self.spaces = spaces
        self.differentials = differentials
        self._hodge = None  # memoized; the complex is immutable by contract

    @property
    def algebra(self):
        return self.spaces[0].algebra

    def __len__(self):
        return len(self.spaces)


@dataclass
class ComplexValidation:
    residuals: list
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(r <= self.tolerance for r in self.residuals)


def validate_complex(c: FiniteComplex) -> ComplexValidation:
    """Residual norms of d_{m+1} d_m, pass/fail at the master tolerance."""
    residuals = [
        c.differentials[m].then(c.differentials[m + 1]).norm()
        for m in range(len(c.differentials) - 1)
    ]
    return ComplexValidation(residuals, config.current().identity)


class ComplexEndomorphism:
    """Degreewise unitary maps commuting with the differentials."""

    def __init__(self, complex_: FiniteComplex, components):
        components = list(components)
        if len(components) != len(complex_.spaces):
            raise StructuralError("one unitary component per degree expected")
        tol = config.current().identity
        for m, u in enumerate(components):
            if not u.source.is_same_presentation(complex_.spaces[m]) or not u.is_endomorphism():
                raise StructuralError(f"component {m} is not an endomorphism of space {m}")
            defect = u.unitary_defect()
            if defect > tol:
                raise ValidationError(f"component {m} is not unitary: defect {defect:.3g}")
        for m, d in enumerate(complex_.differentials):
            resid = (components[m].then(d) - d.then(components[m + 1])).norm()
            if resid > tol * max(1.0, d.norm()):
                raise ValidationError(
                    f"component pair ({m}, {m + 1}) does not commute with the "
                    f"differential: residual {resid:.3g}"
                )
        self.complex = complex_
        self.components = components


@dataclass
class HarmonicSpaces:
    """Harmonic summand per degree, plus its closedness residuals."""

    spaces: list  # Submodule per degree
    d_residuals: list = field(default_factory=list)
    dstar_residuals: list = field(default_factory=list)


def _require_valid(c: FiniteComplex):
    report = validate_complex(c)
    if not report.passed:
        worst = max(report.residuals)
        raise PreconditionError(
            f"complex does not satisfy d^2 = 0: worst residual {worst:.3g}"
        )


def hodge_spaces(c: FiniteComplex) -> HarmonicSpaces:
    """Harmonic summands: complement of the image inside the kernel."""
    if c._hodge is not None:
        return c._hodge
    _require_valid(c)
    out = []
    d_res = []
    ds_res = []
    for m, space in enumerate(c.spaces):
        if m < len(c.differentials):
            ker = kernel_projection(c.differentials[m])
        else:
            ker = space.full_submodule()
        if m > 0:
            d_prev = c.differentials[m - 1]
            images = [d_prev.apply(g) for g in d_prev.source.coordinate_generators()]
            co_im = orthogonal_complement(images, space)
            h = intersect(ker, co_im)
        else:
            h = ker
        out.append(h)
        # closedness residuals, recorded for the invariant report
        if m < len(c.differentials):
            d_res.append((h.projection @ c.differentials[m].matrix).norm())
        else:
            d_res.append(0.0)
        if m > 0:
            ds_res.append((h.projection @ c.differentials[m - 1].matrix.h).norm())
        else:
            ds_res.append(0.0)
    loose = config.current().loose
    worst = max(max(d_res, default=0.0), max(ds_res, default=0.0))
    if worst > loose:
        raise InternalConsistencyError(
            f"harmonic summand fails closedness at {worst:.3g}"
        )
    c._hodge = HarmonicSpaces(out, d_res, ds_res)
    return c._hodge


def _interleaved(c: FiniteComplex, parity: int):
    return [c.spaces[m] for m in range(parity, len(c.spaces), 2)]


def _zero_module(algebra) -> HilbertModule:
    return HilbertModule(algebra, 1, algebra.zeros(1, 1))


def total_module(c: FiniteComplex, parity: int) -> HilbertModule:
    spaces = _interleaved(c, parity)
    if not spaces:
        return _zero_module(c.algebra)
    return HilbertModule.direct_sum(spaces)


def fredholm_F(c: FiniteComplex) -> ModuleMap:
    """The operator d + d* from the even total module to the odd one."""
    _require_valid(c)
    ev = total_module(c, 0)
    od = total_module(c, 1)
    algebra = c.algebra
    evs = _interleaved(c, 0)
    ods = _interleaved(c, 1)
    if not ods or not evs:
        return zero_map(ev, od)

    ev_offsets = np.cumsum([0] + [s.ambient_rank for s in evs])
    od_offsets = np.cumsum([0] + [s.ambient_rank for s in ods])
    blocks = []
    for i, ni in enumerate(algebra.block_sizes):
        big = np.zeros((ev.ambient_rank * ni, od.ambient_rank * ni), dtype=complex)
        for e_pos, m in enumerate(range(0, len(c.spaces), 2)):
            r0 = ev_offsets[e_pos] * ni
            if m < len(c.differentials):
                c0 = od_offsets[m // 2] * ni  # degree m+1 sits at odd slot m//2
                d_blk = c.differentials[m].matrix.blocks[i]
                big[r0 : r0 + d_blk.shape[0], c0 : c0 + d_blk.shape[1]] = d_blk
            if m > 0:
                c0 = od_offsets[(m - 2) // 2 + 0] * ni  # degree m-1 at odd slot (m-1)//2
                a_blk = c.differentials[m - 1].matrix.h.blocks[i]
                big[r0 : r0 + a_blk.shape[0], c0 : c0 + a_blk.shape[1]] = a_blk
        blocks.append(big)
    mat = AlgMatrix(algebra, ev.ambient_rank, od.ambient_rank, blocks)
    return ModuleMap(ev, od, mat)


def harmonic_total_projection(c: FiniteComplex, h: HarmonicSpaces, parity: int) -> AlgMatrix:
    """Block-diagonal projection of the even or odd harmonic sum."""
    tot = total_module(c, parity)
    subs = [h.spaces[m] for m in range(parity, len(c.spaces), 2)]
    algebra = c.algebra
    if not subs:
        return algebra.zeros(tot.ambient_rank, tot.ambient_rank)
    blocks = []
    for i, ni in enumerate(algebra.block_sizes):
        size = tot.ambient_rank * ni
        big = np.zeros((size, size), dtype=complex)
        off = 0
        for s in subs:
            d = s.ambient.ambient_rank * ni
            big[off : off + d, off : off + d] = s.projection.blocks[i]
            off += d
        blocks.append(big)
    return AlgMatrix(algebra, tot.ambient_rank, tot.ambient_rank, blocks)


def restrict_unitary(sub: Submodule, u: ModuleMap) -> ModuleMap:
    """A unitary compressed to an invariant summand, as its endomorphism.

    When the invariance residual sits between the exactness band and the
    loose tolerance the compression is re-unitarized by its polar part, so
    numerical drift cannot break unitarity downstream; a residual beyond
    the loose tolerance means the summand was not invariant at all.
    """
    tols = config.current()
    r = sub.projection
    leak = (r @ u.matrix - r @ u.matrix @ r).norm()
    if leak > tols.loose:
        raise InternalConsistencyError(
            f"summand is not invariant under the endomorphism: leak {leak:.3g}"
        )
    as_mod = sub.as_module()
    compressed = ModuleMap(as_mod, as_mod, r @ u.matrix @ r, check=False)
    if leak > tols.restrict_exact:
        compressed = polar_isometry(compressed)
    return compressed


def lefschetz_L1(c: FiniteComplex, u: ComplexEndomorphism) -> SpectralFunction:
    """Alternating sum of the spectral functions on the harmonic summands."""
    _check_match(c, u)
    h = hodge_spaces(c)
    acc = SpectralFunction(())
    for m, sub in enumerate(h.spaces):
        if sub.k0().is_zero():
            continue
        restricted = restrict_unitary(sub, u.components[m])
        term = spectral_function(restricted)
        acc = acc + (term if m % 2 == 0 else -term)
    return acc


def lefschetz_L0(c: FiniteComplex, u: ComplexEndomorphism) -> HC0Class:
    """Alternating sum of the cyclic traces on the harmonic summands."""
    _check_match(c, u)
    h = hodge_spaces(c)
    acc = HC0Class.zero(c.algebra.k)
    for m, sub in enumerate(h.spaces):
        if sub.k0().is_zero():
            continue
        restricted = restrict_unitary(sub, u.components[m])
        term = cyclic_trace(restricted)
        acc = acc + (term if m % 2 == 0 else -term)
    return acc


def chern_consistency(c: FiniteComplex, u: ComplexEndomorphism, weighted: bool = True,
                      l0=None, l1=None):
    """Compare the HC0 invariant against the pushed-forward K0 one.

    The right-hand side integrates the Chern character of the angle-resolved
    invariant against exp(i angle) over its finite support; with
    ``weighted=False`` the exponential weight is dropped (that reading does
    not satisfy the identity in general and exists for comparison).
    Returns (lhs, rhs, equal within the trace tolerance).  Precomputed
    invariants can be passed to avoid recomputation.
    """
    lhs = lefschetz_L0(c, u) if l0 is None else l0
    l1 = lefschetz_L1(c, u) if l1 is None else l1
    rhs = HC0Class.zero(c.algebra.k)
    for angle, cls_ in l1.support:
        w = np.exp(1j * angle) if weighted else 1.0
        rhs = rhs + chern_ch0(cls_).scaled(w)
    return lhs, rhs, lhs.isclose(rhs, config.current().trace)


def euler_class(c: FiniteComplex) -> K0Class:
    """Alternating sum of the space classes."""
    acc = K0Class.zero(c.algebra.k)
    for m, s in enumerate(c.spaces):
        acc = acc + (s.k0() if m % 2 == 0 else -s.k0())
    return acc


def index_report(c: FiniteComplex):
    """The index of d + d* computed three independent ways.

    Returns (index of F, Euler class of the spaces, harmonic even minus
    odd class); all three agree as integers on a valid complex.
    """
    f = fredholm_F(c)
    idx = fredholm_index(f)
    eul = euler_class(c)
    h = hodge_spaces(c)
    ev = K0Class.zero(c.algebra.k)
    od = K0Class.zero(c.algebra.k)
    for m, sub in enumerate(h.spaces):
        if m % 2 == 0:
            ev = ev + sub.k0()
        else:
            od = od + sub.k0()
    return idx, eul, ev - od


def conjugate_complex(c: FiniteComplex, u: ComplexEndomorphism, isos):
    """Transport a complex and its endomorphism along degreewise unitaries.

    ``isos[m]`` must be a unitary module isomorphism from space m onto a
    fresh module; returns the conjugated (complex, endomorphism).
    """
    isos = list(isos)
    if len(isos) != len(c.spaces):
        raise StructuralError("one isomorphism per degree expected")
    tol = config.current().identity
    for m, v in enumerate(isos):
        if not v.source.is_same_presentation(c.spaces[m]):
            raise StructuralError(f"isomorphism {m} does not start at space {m}")
        if v.unitary_defect() > tol:
            raise ValidationError(f"isomorphism {m} is not unitary")
    new_spaces = [v.target for v in isos]
    new_diffs = [
        isos[m].adjoint().then(c.differentials[m]).then(isos[m + 1])
        for m in range(len(c.differentials))
    ]
    new_comps = [isos[m].adjoint().then(u.components[m]).then(isos[m]) for m in range(len(isos))]
    c2 = FiniteComplex(new_spaces, new_diffs)
    u2 = ComplexEndomorphism(c2, new_comps)
    return c2, u2


def _check_match(c: FiniteComplex, u: ComplexEndomorphism):
    if u.complex is not c and len(u.components) != len(c.spaces):
        raise StructuralError("endomorphism does not match the complex")
