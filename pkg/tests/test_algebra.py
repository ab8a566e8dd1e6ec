import numpy as np
import pytest

from wstar.algebra import (
    AlgElem,
    AlgMatrix,
    BlockAlgebra,
    HC0Class,
    K0Class,
    blocktrace,
    chern_ch0,
    k0_of_projection,
)
from wstar.errors import InternalConsistencyError, StructuralError, ValidationError


def random_elem(rng, algebra):
    return AlgElem(
        algebra,
        [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
         for n in algebra.block_sizes],
    )


def test_block_algebra_basics():
    a = BlockAlgebra([2, 1])
    assert a.k == 2
    assert a.dim == 5
    with pytest.raises(ValidationError):
        BlockAlgebra([])
    with pytest.raises(ValidationError):
        BlockAlgebra([2, 0])


def test_orthogonal_idempotents():
    # over C + C: (1,0) * (0,1) = (0,0)
    a = BlockAlgebra([1, 1])
    e1 = a.diag_elem([1, 0])
    e2 = a.diag_elem([0, 1])
    assert (e1 * e2).norm() == 0.0


def test_adjoint_is_conjugate_transpose():
    m2 = BlockAlgebra([2])
    x = m2.elem([np.array([[0, 1], [0, 0]], dtype=complex)])
    expected = np.array([[0, 0], [1, 0]], dtype=complex)
    assert np.allclose(x.adjoint().blocks[0], expected)


def test_sum_with_adjoint_selfadjoint():
    rng = np.random.default_rng(7)
    a = BlockAlgebra([2, 3, 1])
    for _ in range(100):
        x = random_elem(rng, a)
        s = x + x.adjoint()
        assert (s - s.adjoint()).norm() < 1e-12


def test_cstar_identity():
    rng = np.random.default_rng(3)
    a = BlockAlgebra([3, 2])
    for _ in range(50):
        x = random_elem(rng, a)
        assert abs((x.adjoint() * x).norm() - x.norm() ** 2) <= 1e-12 * x.norm() ** 2


def test_blocktrace_trivial():
    m2 = BlockAlgebra([2])
    assert blocktrace(m2.one()).traces == (2 + 0j,)
    cc = BlockAlgebra([1, 1])
    assert blocktrace(cc.diag_elem([1, 0])).traces == (1 + 0j, 0j)


def test_blocktrace_tracial_on_random_pairs():
    rng = np.random.default_rng(11)
    a = BlockAlgebra([2, 2, 1])
    for _ in range(100):
        x = random_elem(rng, a)
        y = random_elem(rng, a)
        assert blocktrace(x * y).distance(blocktrace(y * x)) < 1e-10


def test_k0_of_projection_values():
    m2 = BlockAlgebra([2])
    # identity on A^1 over M2: the free module of one copy
    assert k0_of_projection(m2.identity(1)).ranks == (2,)
    cc = BlockAlgebra([1, 1])
    assert k0_of_projection(cc.diag_elem([1, 0])).ranks == (1, 0)
    assert k0_of_projection(cc.zeros(1, 1)).ranks == (0, 0)


def test_k0_rejects_non_projection():
    m2 = BlockAlgebra([2])
    bad = AlgMatrix(m2, 1, 1, [np.array([[0.5, 0], [0, 0.25]], dtype=complex)])
    with pytest.raises(ValidationError):
        k0_of_projection(bad)


def test_k0_flags_broken_projection_under_loose_gate():
    # Under the default gate a Hermitian near-projection has spectrum within
    # 1e-9 of {0, 1}, so the stray-eigenvalue branch guards loosened
    # tolerance regimes: defect 1e-4 passes a 1e-3 gate but the eigenvalue
    # sits a full 1e-4 off the cluster.
    from wstar import config

    m1 = BlockAlgebra([1])
    val = 0.5 + 0.5 * np.sqrt(1 + 4e-4)  # x^2 - x = 1e-4
    almost = AlgMatrix(m1, 1, 1, [np.array([[val]], dtype=complex)])
    with config.override(1e-3):
        assert almost.projection_defect() <= 1e-3
        with pytest.raises(InternalConsistencyError):
            k0_of_projection(almost)


def test_k0_additive_on_orthogonal_projections():
    cc = BlockAlgebra([1, 1])
    p = cc.diag_elem([1, 0])
    q = cc.diag_elem([0, 1])
    total = k0_of_projection(p + q)
    assert total == k0_of_projection(p) + k0_of_projection(q)


def test_chern_values_and_consistency():
    assert chern_ch0(K0Class((1, 0))).traces == (1 + 0j, 0j)
    assert chern_ch0(K0Class((-1, 3))).traces == (-1 + 0j, 3 + 0j)
    m2 = BlockAlgebra([2])
    p = m2.identity(1)
    # both routes: chern of the class, and the block trace of the matrix
    via_k0 = chern_ch0(k0_of_projection(p))
    via_trace = blocktrace(p.trace_down())
    assert via_k0.distance(via_trace) == 0.0


def test_k0_arithmetic():
    a = K0Class((1, 2))
    b = K0Class((0, -1))
    assert (a + b).ranks == (1, 1)
    assert (a - b).ranks == (1, 3)
    assert (-b).ranks == (0, 1)
    assert K0Class.zero(2).is_zero()


def test_hc0_arithmetic():
    a = HC0Class((1 + 1j, 2))
    assert a.conj().traces == (1 - 1j, 2 - 0j)
    assert (a - a).distance(HC0Class.zero(2)) == 0.0
    assert a.scaled(2).traces == (2 + 2j, 4 + 0j)


def test_matrix_product_matches_entrywise():
    rng = np.random.default_rng(5)
    a = BlockAlgebra([2, 1])

    def rand_mat(r, c):
        return AlgMatrix(
            a, r, c,
            [rng.standard_normal((r * n, c * n)) + 1j * rng.standard_normal((r * n, c * n))
             for n in a.block_sizes],
        )

    x = rand_mat(2, 3)
    y = rand_mat(3, 2)
    z = x @ y
    # entry (r, c) must be sum_j x[r, j] y[j, c] computed over the algebra
    for r in range(2):
        for c in range(2):
            acc = a.zero()
            for j in range(3):
                acc = acc + x.entry(r, j) * y.entry(j, c)
            assert (z.entry(r, c) - acc).norm() < 1e-12


def test_matrix_adjoint_transposes_entries():
    rng = np.random.default_rng(6)
    a = BlockAlgebra([2, 2])
    m = AlgMatrix(
        a, 2, 3,
        [rng.standard_normal((2 * n, 3 * n)) + 1j * rng.standard_normal((2 * n, 3 * n))
         for n in a.block_sizes],
    )
    mh = m.h
    for r in range(2):
        for c in range(3):
            assert (mh.entry(c, r) - m.entry(r, c).adjoint()).norm() == 0.0


def test_shape_mismatch_raises():
    a = BlockAlgebra([2])
    b = BlockAlgebra([3])
    with pytest.raises(StructuralError):
        a.one() + b.one()
    with pytest.raises(StructuralError):
        a.identity(2) @ a.identity(3)


def test_trace_down():
    a = BlockAlgebra([2, 1])
    m = a.identity(3)
    t = m.trace_down()
    assert np.allclose(t.blocks[0], 3 * np.eye(2))
    assert np.allclose(t.blocks[1], 3 * np.eye(1))
