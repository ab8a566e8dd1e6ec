"""The runnable property suite.

Every invariant promised by the library is exercised here against one
instance: algebra identities, complement and kernel laws, polar and
square-root behavior, spectral resolutions, Hodge theory, the two
Lefschetz invariants with their Chern compatibility, and the flat
brute-force bridges.  Each case yields named results with a residual and
the tolerance it was held to, so reports are machine-checkable.

Cases are pure functions of (instance, probe rng); the rng is seeded from
a digest of the instance itself, so a report is a deterministic function
of the instance bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config, oracle
from .algebra import (
    AlgElem,
    AlgMatrix,
    HC0Class,
    K0Class,
    blocktrace,
    chern_ch0,
    k0_of_projection,
)
from .complexes import (
    chern_consistency,
    conjugate_complex,
    euler_class,
    fredholm_F,
    harmonic_total_projection,
    hodge_spaces,
    index_report,
    lefschetz_L0,
    lefschetz_L1,
    restrict_unitary,
    total_module,
    validate_complex,
)
from .errors import ConvergenceError
from .instances import InstanceFile, _basis_isometry, _random_projection_blocks
from .modules import (
    HilbertModule,
    biorthogonal_complement,
    ideal_support_projection,
    inner_product,
    intersect,
    is_direct_summand,
    orthogonal_complement,
    span_submodule,
    structure_decompose,
    submodule_sum,
)
from .operators import (
    ModuleMap,
    embed_as_summand,
    fredholm_index,
    identity_map,
    kernel_projection,
    operator_sqrt,
    polar_isometry,
)
from .spectral import conjugation_invariance_check, cyclic_trace, spectral_function, spectral_measure

__all__ = ["CheckResult", "run_suite", "CASE_NAMES", "run_cases"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"{verdict}  {self.name}  residual={self.residual:.3e}  tol={self.tolerance:.1e}{extra}"


def _probe_rng(inst: InstanceFile):
    return np.random.default_rng(int.from_bytes(inst.digest()[:8], "big"))


def _random_elem(rng, algebra) -> AlgElem:
    return AlgElem(
        algebra,
        [
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            for n in algebra.block_sizes
        ],
    )


def _random_module_element(rng, module):
    n = module.ambient_rank
    blocks = [
        rng.standard_normal((ni, n * ni)) + 1j * rng.standard_normal((ni, n * ni))
        for ni in module.algebra.block_sizes
    ]
    raw = AlgMatrix(module.algebra, 1, n, blocks)
    return module.element(raw @ module.projection)


def _res(name, residual, tol, detail="") -> CheckResult:
    return CheckResult(name, bool(residual <= tol), float(residual), float(tol), detail)


def _flag(name, ok, detail="") -> CheckResult:
    return CheckResult(name, bool(ok), 0.0 if ok else 1.0, 0.0, detail)


# -- algebra ---------------------------------------------------------------------------


def case_algebra(inst: InstanceFile, rng):
    tols = config.current()
    algebra = inst.algebra
    out = []

    worst_sa = worst_cstar = 0.0
    worst_tracial = worst_linear = 0.0
    for _ in range(20):
        a = _random_elem(rng, algebra)
        b = _random_elem(rng, algebra)
        s = a + a.adjoint()
        worst_sa = max(worst_sa, (s - s.adjoint()).norm())
        na = a.norm()
        worst_cstar = max(
            worst_cstar,
            abs((a.adjoint() * a).norm() - na * na) / max(1.0, na * na),
        )
        tr_ab = blocktrace(a * b)
        tr_ba = blocktrace(b * a)
        worst_tracial = max(worst_tracial, tr_ab.distance(tr_ba))
        lin = blocktrace(a + 2.5 * b)
        ref = HC0Class(
            tuple(x + 2.5 * y for x, y in zip(blocktrace(a).traces, blocktrace(b).traces))
        )
        worst_linear = max(worst_linear, lin.distance(ref))
    out.append(_res("algebra.selfadjoint_sum", worst_sa, tols.tight * 10))
    out.append(_res("algebra.cstar_identity", worst_cstar, tols.tight))
    out.append(_res("algebra.blocktrace_tracial", worst_tracial, tols.probe))
    out.append(_res("algebra.blocktrace_linear", worst_linear, tols.probe))

    # orthogonal additivity and unitary invariance of the projection class
    m = inst.modules["M"]
    q = m.projection
    sub = span_submodule([_random_module_element(rng, m)], m)
    p1 = sub.projection
    p2 = q - p1
    add_ok = k0_of_projection(q) == k0_of_projection(p1) + k0_of_projection(p2)
    out.append(_flag("algebra.k0_orthogonal_additive", add_ok))
    u = inst.maps["U"]
    conj = u.matrix.h @ p1 @ u.matrix
    out.append(
        _flag(
            "algebra.k0_unitary_invariant",
            k0_of_projection(conj) == k0_of_projection(p1),
        )
    )
    c1 = k0_of_projection(p1)
    c2 = k0_of_projection(p2)
    hom_ok = chern_ch0(c1 + c2) == chern_ch0(c1) + chern_ch0(c2) and chern_ch0(
        c1 - c2
    ) == chern_ch0(c1) - chern_ch0(c2)
    out.append(_flag("algebra.chern_additive", hom_ok))
    both = chern_ch0(k0_of_projection(q)).distance(blocktrace(q.trace_down()))
    out.append(_res("algebra.chern_matches_blocktrace", both, tols.trace))
    return out


# -- modules ---------------------------------------------------------------------------


def case_module_inner(inst: InstanceFile, rng):
    tols = config.current()
    m = inst.modules["M"]
    out = []
    worst_sym = worst_pos = worst_cs = 0.0
    for _ in range(10):
        x = _random_module_element(rng, m)
        y = _random_module_element(rng, m)
        worst_sym = max(
            worst_sym, (inner_product(x, y) - inner_product(y, x).adjoint()).norm()
        )
        gram = inner_product(x, x)
        low = min(float(np.linalg.eigvalsh(0.5 * (b + b.conj().T))[0]) for b in gram.blocks)
        worst_pos = max(worst_pos, max(0.0, -low))
        # Cauchy-Schwarz in every block: <x,y><y,x> <= ||<y,y>|| <x,x>
        lhs = inner_product(x, y) * inner_product(y, x)
        rhs = inner_product(y, y).norm() * gram
        gap = min(
            float(np.linalg.eigvalsh(0.5 * (rb - lb) + 0.5 * (rb - lb).conj().T)[0])
            for lb, rb in zip(lhs.blocks, rhs.blocks)
        )
        worst_cs = max(worst_cs, max(0.0, -gap))
    out.append(_res("module.inner_conjugate_symmetry", worst_sym, tols.identity))
    out.append(_res("module.inner_positive", worst_pos, tols.identity))
    out.append(_res("module.cauchy_schwarz", worst_cs, tols.loose))
    return out


def case_module_complements(inst: InstanceFile, rng):
    tols = config.current()
    m = inst.modules["M"]
    out = []
    gens = [_random_module_element(rng, m) for _ in range(2)]
    comp = orthogonal_complement(gens, m)
    bio = biorthogonal_complement(gens, m)
    out.append(
        _res(
            "module.complement_direct_sum",
            (comp.projection + bio.projection - m.projection).norm(),
            tols.identity,
        )
    )
    contain = max((g.vec @ bio.projection - g.vec).norm() for g in gens)
    out.append(_res("module.biorthogonal_contains", contain, tols.loose))
    triple = orthogonal_complement(bio.generators(), m)
    out.append(
        _res("module.triple_complement", (triple.projection - comp.projection).norm(), tols.identity)
    )
    again = biorthogonal_complement(bio.generators(), m)
    out.append(
        _res("module.biorthogonal_idempotent", (again.projection - bio.projection).norm(), tols.identity)
    )
    ok, witness = is_direct_summand(gens, m)
    out.append(_flag("module.is_direct_summand", ok and witness.isclose(bio)))

    # lattice: rank(P) + rank(Q) = rank(P+Q) + rank(P^Q), blockwise, against the oracle
    p = span_submodule([_random_module_element(rng, m)], m)
    qq = span_submodule([_random_module_element(rng, m), _random_module_element(rng, m)], m)
    s = submodule_sum(p, qq)
    i = intersect(p, qq)
    lhs = p.k0() + qq.k0()
    rhs = s.k0() + i.k0()
    out.append(_flag("module.intersect_sum_rank", lhs == rhs, f"{lhs.ranks} vs {rhs.ranks}"))
    return out


def case_module_structure(inst: InstanceFile, rng):
    tols = config.current()
    m = inst.modules["M"]
    out = []
    pieces = structure_decompose(m)
    total = m.algebra.zeros(m.ambient_rank, m.ambient_rank)
    worst_orth = 0.0
    worst_proj = 0.0
    worst_ideal = 0.0
    spans = []
    for x, p in pieces:
        cyc = span_submodule([x], m)
        spans.append(cyc)
        total = total + cyc.projection
        worst_proj = max(worst_proj, AlgMatrix.from_elem(p).projection_defect())
        a = _random_elem(rng, m.algebra)
        b = _random_elem(rng, m.algebra)
        lhs = inner_product(a * x, b * x)
        rhs = a * p * b.adjoint()
        worst_ideal = max(worst_ideal, (lhs - rhs).norm())
    for i_ in range(len(spans)):
        for j_ in range(i_ + 1, len(spans)):
            worst_orth = max(worst_orth, (spans[i_].projection @ spans[j_].projection).norm())
    out.append(_res("module.decompose_sums_to_module", (total - m.projection).norm(), tols.identity))
    out.append(_res("module.decompose_orthogonal", worst_orth, tols.identity))
    out.append(_res("module.decompose_ideal_projections", worst_proj, tols.identity * 10))
    out.append(_res("module.decompose_standard_inner", worst_ideal, tols.loose))
    k0_sum = K0Class.zero(m.algebra.k)
    for s in spans:
        k0_sum = k0_sum + s.k0()
    out.append(_flag("module.decompose_k0_bookkeeping", k0_sum == m.k0()))

    d = _random_elem(rng, m.algebra)
    p = ideal_support_projection([d])
    out.append(
        _res(
            "module.ideal_support",
            max(
                AlgMatrix.from_elem(p).projection_defect(),
                (d * p - d).norm(),
            ),
            tols.loose,
        )
    )
    return out


# -- operators --------------------------------------------------------------------------


def case_operator_adjoint(inst: InstanceFile, rng):
    tols = config.current()
    out = []
    worst_pair = 0.0
    worst_inv = 0.0
    for name in ("phi", "alpha", "J"):
        f = inst.maps[name]
        worst_inv = max(worst_inv, (f.adjoint().adjoint().matrix - f.matrix).norm())
        for _ in range(5):
            x = _random_module_element(rng, f.source)
            y = _random_module_element(rng, f.target)
            lhs = inner_product(f.apply(x), y)
            rhs = inner_product(x, f.adjoint().apply(y))
            worst_pair = max(worst_pair, (lhs - rhs).norm())
    out.append(_res("operator.adjoint_pairing", worst_pair, tols.identity * 100))
    out.append(_res("operator.adjoint_involution", worst_inv, tols.tight * 10))
    return out


def _iter_named_maps(inst: InstanceFile):
    for name, f in sorted(inst.maps.items()):
        yield name, f


def case_operator_kernel(inst: InstanceFile, rng):
    tols = config.current()
    out = []
    worst_sum = 0.0
    worst_bio = 0.0
    worst_dim = None
    for name, f in _iter_named_maps(inst):
        ker = kernel_projection(f)
        comp = orthogonal_complement(ker.generators(), f.source)
        worst_sum = max(
            worst_sum,
            (ker.projection + comp.projection - f.source.projection).norm(),
        )
        bio = biorthogonal_complement(ker.generators(), f.source)
        worst_bio = max(worst_bio, (bio.projection - ker.projection).norm())
        flat_dim = oracle.oracle_kernel_dim(f)
        module_dim = sum(
            ni * r for ni, r in zip(inst.algebra.block_sizes, ker.k0().ranks)
        )
        good = flat_dim == module_dim
        if worst_dim is None:
            worst_dim = good
        else:
            worst_dim = worst_dim and good
        # image of the kernel is dead
        worst_sum = max(worst_sum, (ker.projection @ f.matrix).norm())
    out.append(_res("operator.kernel_direct_sum", worst_sum, tols.loose))
    out.append(_res("operator.kernel_biorthogonal", worst_bio, tols.loose))
    out.append(_flag("oracle.kernel_dim_bridge", bool(worst_dim)))
    return out


def _corner_min_eigenvalue(h) -> float:
    """Smallest eigenvalue of an endomorphism on its module (not the ambient)."""
    from ._linalg import svd_row_basis

    low = None
    for qb, hb in zip(h.source.projection.blocks, h.matrix.blocks):
        basis = svd_row_basis(qb)
        if basis.shape[0] == 0:
            continue
        small = basis @ hb @ basis.conj().T
        w = np.linalg.eigvalsh(0.5 * (small + small.conj().T))
        low = float(w[0]) if low is None else min(low, float(w[0]))
    return 0.0 if low is None else low


def case_operator_sqrt(inst: InstanceFile, rng):
    tols = config.current()
    out = []
    alpha = inst.maps["alpha"]
    h = alpha.then(alpha.adjoint())
    # the series contract is quantified over operators with spectrum
    # bounded away from zero; record that the generated one qualifies
    out.append(_flag("operator.sqrt_spectrum_bound", _corner_min_eigenvalue(h) >= 1e-4))
    s_series = operator_sqrt(h, method="series")
    s_oracle = operator_sqrt(h, method="oracle")
    out.append(
        _res(
            "operator.sqrt_series_vs_oracle",
            (s_series.matrix - s_oracle.matrix).norm(),
            tols.sqrt_agree,
        )
    )
    out.append(
        _res(
            "operator.sqrt_squares",
            max(
                (s_series.then(s_series).matrix - h.matrix).norm(),
                (s_oracle.then(s_oracle).matrix - h.matrix).norm(),
            ),
            tols.loose,
        )
    )
    out.append(
        _res(
            "operator.sqrt_selfadjoint",
            (s_series.matrix - s_series.matrix.h).norm(),
            tols.loose,
        )
    )
    # flat eigenvalues of the square root must be square roots of flat ones
    wh, _ = oracle.oracle_eig(h)
    ws, _ = oracle.oracle_eig(s_series)
    worst = float(np.max(np.abs(np.sqrt(np.clip(wh, 0.0, None)) - np.clip(ws, 0.0, None))))
    out.append(_res("oracle.sqrt_eig_check", worst, tols.sqrt_agree * 10))

    phi = inst.maps["phi"]
    ker = kernel_projection(phi)
    hs = phi.then(phi.adjoint())
    if not ker.k0().is_zero() and hs.norm() > 1e-6:
        # singular but nonzero: spectrum reaches 0, the series must give up
        try:
            operator_sqrt(hs, method="series")
            out.append(_flag("operator.sqrt_flags_singular", False, "series accepted a singular operator"))
        except ConvergenceError:
            out.append(_flag("operator.sqrt_flags_singular", True))
        s2 = operator_sqrt(hs, method="oracle")
        out.append(
            _res(
                "operator.sqrt_oracle_on_singular",
                (s2.then(s2).matrix - hs.matrix).norm(),
                tols.loose,
            )
        )
    return out


def case_operator_polar(inst: InstanceFile, rng):
    tols = config.current()
    out = []
    worst_pair = 0.0
    worst_proj = 0.0
    for name in ("alpha", "J"):
        f = inst.maps[name]
        v = polar_isometry(f)
        for _ in range(10):
            x = _random_module_element(rng, f.source)
            y = _random_module_element(rng, f.source)
            lhs = inner_product(v.apply(x), v.apply(y))
            rhs = inner_product(x, y)
            worst_pair = max(worst_pair, (lhs - rhs).norm())
        worst_proj = max(
            worst_proj,
            (v.matrix @ v.matrix.h - f.source.projection).norm(),
            (v.matrix.h @ v.matrix - f.target.projection).norm(),
        )
    out.append(_res("operator.polar_isometry_pairs", worst_pair, tols.loose))
    out.append(_res("operator.polar_projections", worst_proj, tols.loose))

    beta = inst.maps["beta"]
    iso, comp = embed_as_summand(beta)
    out.append(
        _res(
            "operator.embed_isometry",
            max(
                (iso.matrix @ iso.matrix.h - beta.source.projection).norm(),
                (iso.matrix.h @ iso.matrix - iso.target.projection).norm(),
            ),
            tols.loose,
        )
    )
    total = iso.target.k0() + comp.k0()
    out.append(_flag("operator.embed_rank_sum", total == beta.target.k0()))
    return out


def case_operator_index(inst: InstanceFile, rng):
    out = []
    phi = inst.maps["phi"]
    alpha = inst.maps["alpha"]
    idx_phi = fredholm_index(phi)
    # composition with invertibles on either side keeps the index
    left = fredholm_index(alpha.then(phi))
    right = fredholm_index(phi.then(alpha))
    out.append(
        _flag(
            "operator.index_invertible_invariance",
            idx_phi == left == right,
            f"{idx_phi.ranks} vs {left.ranks}, {right.ranks}",
        )
    )
    both = fredholm_index(phi.direct_sum(alpha))
    out.append(_flag("operator.index_additive", both == idx_phi + fredholm_index(alpha)))
    inv = fredholm_index(alpha)
    out.append(_flag("operator.index_invertible_zero", inv.is_zero()))
    return out


# -- spectral ---------------------------------------------------------------------------


def case_spectral(inst: InstanceFile, rng):
    tols = config.current()
    out = []
    u = inst.maps["U"]
    measure = spectral_measure(u)
    out.append(_res("spectral.measure_reconstructs", (measure.reconstruct() - u.matrix).norm(), tols.loose))
    out.append(_res("spectral.measure_complete", measure.completeness_defect(), tols.loose))
    out.append(_res("spectral.measure_orthogonal", measure.orthogonality_defect(), tols.identity))
    worst_comm = 0.0
    worst_proj = 0.0
    for _, proj in measure.points:
        worst_comm = max(worst_comm, (proj.matrix @ u.matrix - u.matrix @ proj.matrix).norm())
        worst_proj = max(worst_proj, proj.matrix.projection_defect())
    out.append(_res("spectral.projections_commute", worst_comm, tols.identity))
    out.append(_res("spectral.projections_exact", worst_proj, tols.identity))

    fn = spectral_function(u)
    total = fn.total_class(inst.algebra.k)
    out.append(_flag("spectral.function_total_class", total == u.source.k0(),
                     f"{total.ranks} vs {u.source.k0().ranks}"))

    trace = cyclic_trace(u)
    flat = oracle.flatten(u)
    # per block: flat trace equals block size times the HC0 component
    worst_bridge = 0.0
    off = 0
    for i, ni in enumerate(inst.algebra.block_sizes):
        d = ni * ni * u.source.ambient_rank
        blk = flat[off : off + d, off : off + d]
        worst_bridge = max(worst_bridge, abs(np.trace(blk) - ni * trace.traces[i]))
        off += d
    out.append(_res("spectral.trace_bridge", worst_bridge, tols.loose))

    conj_tr = cyclic_trace(u.adjoint())
    out.append(_res("spectral.trace_conjugate", conj_tr.distance(trace.conj()), tols.trace))

    t_m, t_n, equal = conjugation_invariance_check(u, inst.maps["J"])
    out.append(_res("spectral.conjugation_invariance", t_m.distance(t_n), tols.trace))
    return out


# -- complexes ----------------------------------------------------------------------------


def case_complex(inst: InstanceFile, rng):
    tols = config.current()
    out = []
    cx, endo = inst.endomorphism_object("V")
    report = validate_complex(cx)
    out.append(_res("complex.d_squared_zero", max(report.residuals, default=0.0), tols.identity))

    h = hodge_spaces(cx)
    out.append(_res("complex.hodge_d_closed", max(h.d_residuals, default=0.0), tols.loose))
    out.append(_res("complex.hodge_dstar_closed", max(h.dstar_residuals, default=0.0), tols.loose))

    worst_inv = 0.0
    for m, sub in enumerate(h.spaces):
        r = sub.projection
        um = endo.components[m]
        worst_inv = max(worst_inv, (r @ um.matrix - r @ um.matrix @ r).norm())
    out.append(_res("complex.hodge_u_invariance", worst_inv, tols.loose))

    f = fredholm_F(cx)
    ker_ev = kernel_projection(f)
    h_ev = harmonic_total_projection(cx, h, 0)
    out.append(_res("complex.hodge_kernel_even", (ker_ev.projection - h_ev).norm(), tols.loose))
    ker_od = kernel_projection(f.adjoint())
    h_od = harmonic_total_projection(cx, h, 1)
    out.append(_res("complex.hodge_kernel_odd", (ker_od.projection - h_od).norm(), tols.loose))

    idx, eul, harm = index_report(cx)
    out.append(_flag("complex.index_three_way", idx == eul == harm,
                     f"{idx.ranks}, {eul.ranks}, {harm.ranks}"))

    # identity endomorphism degenerates the angle-resolved invariant to the index
    ident = ComplexEndoIdentity(cx)
    l1_id = lefschetz_L1(cx, ident)
    support_ok = all(abs(a) <= tols.angle_cluster for a, _ in l1_id.support)
    out.append(_flag("complex.l1_identity_support", support_ok))
    total = l1_id.total_class(inst.algebra.k)
    out.append(_flag("complex.l1_identity_is_index", total == idx, f"{total.ranks} vs {idx.ranks}"))
    l0_id = lefschetz_L0(cx, ident)
    out.append(
        _res(
            "complex.l0_identity_is_chern_index",
            l0_id.distance(chern_ch0(idx)),
            tols.trace,
        )
    )

    l0 = lefschetz_L0(cx, endo)
    l1 = lefschetz_L1(cx, endo)
    lhs, rhs, equal = chern_consistency(cx, endo, l0=l0, l1=l1)
    out.append(_res("complex.chern_consistency", lhs.distance(rhs), tols.trace))

    flat_lef = oracle.oracle_lefschetz(cx, endo)
    weighted = sum(ni * t for ni, t in zip(inst.algebra.block_sizes, l0.traces))
    out.append(_res("oracle.lefschetz_bridge", abs(flat_lef - weighted), tols.loose))

    # conjugation by degreewise unitaries preserves both invariants
    isos = []
    for m, s in enumerate(cx.spaces):
        fresh = HilbertModule(
            inst.algebra,
            s.ambient_rank,
            AlgMatrix(
                inst.algebra,
                s.ambient_rank,
                s.ambient_rank,
                _random_projection_blocks(rng, inst.algebra, s.ambient_rank, list(s.k0().ranks)),
            ),
        )
        isos.append(_basis_isometry(s, fresh))
    cx2, endo2 = conjugate_complex(cx, endo, isos)
    l0_2 = lefschetz_L0(cx2, endo2)
    out.append(_res("complex.invariance_L0", l0.distance(l0_2), tols.trace))
    l1_2 = lefschetz_L1(cx2, endo2)
    out.append(_flag("complex.invariance_L1", l1.matches(l1_2)))

    # flat harmonic dimensions agree with the module-level ranks
    dims = oracle.oracle_harmonic_dims(cx)
    ranks = [
        sum(ni * r for ni, r in zip(inst.algebra.block_sizes, sub.k0().ranks))
        for sub in h.spaces
    ]
    out.append(_flag("oracle.harmonic_dims", dims == ranks, f"{dims} vs {ranks}"))
    return out


class ComplexEndoIdentity:
    """Identity endomorphism of a complex, built without validation cost."""

    def __init__(self, cx):
        self.complex = cx
        self.components = [identity_map(s) for s in cx.spaces]


def case_oracle(inst: InstanceFile, rng):
    tols = config.current()
    out = []
    f = inst.maps["phi"]
    g = inst.maps["alpha"]
    lhs = oracle.flatten(f.then(g))
    rhs = oracle.flatten(f) @ oracle.flatten(g)
    out.append(
        _res(
            "oracle.flatten_functorial",
            float(np.max(np.abs(lhs - rhs))) if lhs.size else 0.0,
            tols.probe,
        )
    )
    out.append(
        _flag(
            "oracle.rank_nullity",
            oracle.oracle_rank(f) + oracle.oracle_kernel_dim(f)
            == sum(
                ni * r
                for ni, r in zip(inst.algebra.block_sizes, f.source.k0().ranks)
            ),
        )
    )

    # spectral cross-check on the flat unitary, dimension permitting
    u = inst.maps["U"]
    flat = oracle.flatten(u)
    if flat.shape[0] <= 48:
        member = oracle.flat_membership_constraint(u.source)
        inside = oracle.null_rows(member)
        if inside.shape[0]:
            evs, _ = oracle.oracle_unitary_eig(_orthonormal_restriction(inside, flat))
            module_angles = []
            for angle, proj in spectral_measure(u).points:
                mult = sum(
                    ni * r
                    for ni, r in zip(inst.algebra.block_sizes, k0_of_projection(proj.matrix).ranks)
                )
                module_angles.extend([angle] * mult)
            flat_angles = sorted(float(np.angle(e)) % (2 * np.pi) for e in evs)
            module_angles = sorted(a % (2 * np.pi) for a in module_angles)
            agree = len(flat_angles) == len(module_angles) and all(
                min(abs(a - b), 2 * np.pi - abs(a - b)) <= 1e-6
                for a, b in zip(flat_angles, module_angles)
            )
            out.append(_flag("oracle.spectral_angles", agree))
    return out


def _orthonormal_restriction(rows, flat):
    """Restrict a flat map to the row span, in an orthonormalized basis."""
    from ._linalg import svd_row_basis

    basis = svd_row_basis(rows)
    return basis @ flat @ basis.conj().T


CASES = [
    ("algebra", case_algebra),
    ("module_inner", case_module_inner),
    ("module_complements", case_module_complements),
    ("module_structure", case_module_structure),
    ("operator_adjoint", case_operator_adjoint),
    ("operator_kernel", case_operator_kernel),
    ("operator_sqrt", case_operator_sqrt),
    ("operator_polar", case_operator_polar),
    ("operator_index", case_operator_index),
    ("spectral", case_spectral),
    ("complex", case_complex),
    ("oracle", case_oracle),
]

CASE_NAMES = [name for name, _ in CASES]


def run_cases(inst: InstanceFile, names=None):
    """Run selected case groups in catalog order."""
    wanted = set(CASE_NAMES if names is None else names)
    results = []
    for name, fn in CASES:
        if name not in wanted:
            continue
        rng = _probe_rng(inst)
        results.extend(fn(inst, rng))
    return results


def run_suite(inst: InstanceFile):
    return run_cases(inst, None)
