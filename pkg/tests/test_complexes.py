import math

import numpy as np
import pytest

from wstar.algebra import AlgMatrix, BlockAlgebra, HC0Class, K0Class, chern_ch0
from wstar.complexes import (
    ComplexEndomorphism,
    FiniteComplex,
    chern_consistency,
    conjugate_complex,
    euler_class,
    fredholm_F,
    harmonic_total_projection,
    hodge_spaces,
    index_report,
    lefschetz_L0,
    lefschetz_L1,
    validate_complex,
)
from wstar.errors import PreconditionError, ValidationError
from wstar.instances import generate_instance, _basis_isometry, _random_projection_blocks
from wstar.modules import HilbertModule
from wstar.operators import ModuleMap, fredholm_index, identity_map, kernel_projection, zero_map


def free_module(algebra, n):
    return HilbertModule(algebra, n, algebra.identity(n))


def scalar_matrix(algebra, rows):
    arr = np.array(rows, dtype=complex)
    return AlgMatrix(algebra, arr.shape[0], arr.shape[1], [arr.copy() for _ in algebra.block_sizes])


def two_term(algebra, rows, n0, n1):
    s0 = free_module(algebra, n0)
    s1 = free_module(algebra, n1)
    d = ModuleMap(s0, s1, scalar_matrix(algebra, rows))
    return FiniteComplex([s0, s1], [d])


def test_validate_trivial_and_violation():
    a = BlockAlgebra([1])
    s = free_module(a, 1)
    c = FiniteComplex([s, s, s], [zero_map(s, s), zero_map(s, s)])
    report = validate_complex(c)
    assert report.passed and report.residuals == [0.0]

    ident = identity_map(s)
    bad = FiniteComplex([s, s, s], [ident, ident])
    report = validate_complex(bad)
    assert not report.passed
    assert report.residuals[0] == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        hodge_spaces(bad)


def test_hodge_exact_two_term():
    a = BlockAlgebra([1])
    c = two_term(a, [[1.0]], 1, 1)
    h = hodge_spaces(c)
    assert all(sub.k0().is_zero() for sub in h.spaces)
    f = fredholm_F(c)
    assert fredholm_index(f).is_zero()


def test_hodge_zero_differentials():
    a = BlockAlgebra([2])
    s0 = free_module(a, 1)
    s1 = free_module(a, 2)
    c = FiniteComplex([s0, s1], [zero_map(s0, s1)])
    h = hodge_spaces(c)
    assert h.spaces[0].isclose(s0.full_submodule())
    assert h.spaces[1].isclose(s1.full_submodule())


def test_hodge_exact_three_term():
    # 0 -> C -> C^2 -> C -> 0 with d0 = (1, 0), d1 = (0, 1)^T is exact
    a = BlockAlgebra([1])
    s0 = free_module(a, 1)
    s1 = free_module(a, 2)
    s2 = free_module(a, 1)
    d0 = ModuleMap(s0, s1, scalar_matrix(a, [[1.0, 0.0]]))
    d1 = ModuleMap(s1, s2, scalar_matrix(a, [[0.0], [1.0]]))
    c = FiniteComplex([s0, s1, s2], [d0, d1])
    assert validate_complex(c).passed
    h = hodge_spaces(c)
    assert all(sub.k0().is_zero() for sub in h.spaces)
    idx, eul, harm = index_report(c)
    assert idx.is_zero() and eul.is_zero() and harm.is_zero()


def test_fredholm_f_kernel_is_harmonic():
    inst = generate_instance(12, "small")
    cx = inst.complex_object("E")
    h = hodge_spaces(cx)
    f = fredholm_F(cx)
    ker = kernel_projection(f)
    assert (ker.projection - harmonic_total_projection(cx, h, 0)).norm() < 1e-8
    ker_od = kernel_projection(f.adjoint())
    assert (ker_od.projection - harmonic_total_projection(cx, h, 1)).norm() < 1e-8


def test_index_three_ways_on_generated():
    for seed in range(8):
        inst = generate_instance(seed, "small")
        cx = inst.complex_object("E")
        idx, eul, harm = index_report(cx)
        assert idx == eul == harm


def test_lefschetz_identity_endo_degenerates_to_index():
    a = BlockAlgebra([1])
    s = free_module(a, 1)
    c = FiniteComplex([s, s], [zero_map(s, s)])
    u = ComplexEndomorphism(c, [identity_map(s), identity_map(s)])
    l1 = lefschetz_L1(c, u)
    # alternating classes cancel: (1) at angle 0 from degree 0, -(1) from degree 1
    assert l1.is_zero()
    l0 = lefschetz_L0(c, u)
    assert l0.distance(HC0Class((0,))) < 1e-12


def test_lefschetz_sign_structure():
    a = BlockAlgebra([1])
    s = free_module(a, 1)
    c = FiniteComplex([s, s], [zero_map(s, s)])
    minus = ModuleMap(s, s, scalar_matrix(a, [[-1.0]]))
    u = ComplexEndomorphism(c, [identity_map(s), minus])
    l1 = lefschetz_L1(c, u)
    assert [a_ for a_, _ in l1.support] == [0.0, math.pi]
    assert [cl.ranks for _, cl in l1.support] == [(1,), (-1,)]
    l0 = lefschetz_L0(c, u)
    assert l0.distance(HC0Class((2,))) < 1e-12
    lhs, rhs, ok = chern_consistency(c, u)
    assert ok
    assert lhs.distance(HC0Class((2,))) < 1e-12


def test_exact_complex_gives_empty_invariants():
    a = BlockAlgebra([1])
    c = two_term(a, [[1.0]], 1, 1)
    u = ComplexEndomorphism(c, [identity_map(c.spaces[0]), identity_map(c.spaces[1])])
    assert lefschetz_L1(c, u).is_zero()
    assert lefschetz_L0(c, u).distance(HC0Class((0,))) < 1e-12


def test_chern_consistency_weighted_vs_not():
    # with a genuine angle at pi the unweighted reading must differ
    a = BlockAlgebra([1])
    s = free_module(a, 1)
    c = FiniteComplex([s, s], [zero_map(s, s)])
    minus = ModuleMap(s, s, scalar_matrix(a, [[-1.0]]))
    u = ComplexEndomorphism(c, [identity_map(s), minus])
    _, _, ok = chern_consistency(c, u, weighted=True)
    assert ok
    _, _, ok2 = chern_consistency(c, u, weighted=False)
    assert not ok2


def test_chern_consistency_campaign():
    for seed in range(20):
        inst = generate_instance(seed, "small")
        cx, endo = inst.endomorphism_object("V")
        lhs, rhs, ok = chern_consistency(cx, endo)
        assert ok, (seed, lhs.traces, rhs.traces)


def test_identity_l1_support_and_class():
    for seed in range(6):
        inst = generate_instance(seed, "small")
        cx = inst.complex_object("E")
        ident = ComplexEndomorphism(cx, [identity_map(s) for s in cx.spaces])
        l1 = lefschetz_L1(cx, ident)
        assert all(a_ == 0.0 for a_, _ in l1.support)
        f = fredholm_F(cx)
        assert l1.total_class(inst.algebra.k) == fredholm_index(f)
        l0 = lefschetz_L0(cx, ident)
        assert l0.distance(chern_ch0(fredholm_index(f))) < 1e-9


def test_conjugation_invariance_of_invariants():
    rng = np.random.default_rng(0)
    for seed in range(6):
        inst = generate_instance(seed, "small")
        cx, endo = inst.endomorphism_object("V")
        isos = []
        for s in cx.spaces:
            fresh = HilbertModule(
                inst.algebra,
                s.ambient_rank,
                AlgMatrix(
                    inst.algebra,
                    s.ambient_rank,
                    s.ambient_rank,
                    _random_projection_blocks(
                        rng, inst.algebra, s.ambient_rank, list(s.k0().ranks)
                    ),
                ),
            )
            isos.append(_basis_isometry(s, fresh))
        cx2, endo2 = conjugate_complex(cx, endo, isos)
        l0 = lefschetz_L0(cx, endo)
        l0c = lefschetz_L0(cx2, endo2)
        assert l0.distance(l0c) < 1e-9
        assert lefschetz_L1(cx, endo).matches(lefschetz_L1(cx2, endo2))


def test_endomorphism_validation():
    a = BlockAlgebra([1])
    s = free_module(a, 1)
    c = two_term(a, [[1.0]], 1, 1)
    not_unitary = ModuleMap(c.spaces[0], c.spaces[0], scalar_matrix(a, [[2.0]]))
    with pytest.raises(ValidationError):
        ComplexEndomorphism(c, [not_unitary, identity_map(c.spaces[1])])
    minus = ModuleMap(c.spaces[0], c.spaces[0], scalar_matrix(a, [[-1.0]]))
    with pytest.raises(ValidationError):
        # does not commute with the identity differential
        ComplexEndomorphism(c, [minus, identity_map(c.spaces[1])])


def test_euler_class():
    a = BlockAlgebra([1, 1])
    s0 = free_module(a, 2)
    s1 = free_module(a, 1)
    c = FiniteComplex([s0, s1], [zero_map(s0, s1)])
    assert euler_class(c) == K0Class((1, 1))
