import math

import numpy as np
import pytest

from wstar.algebra import AlgMatrix, BlockAlgebra
from wstar.errors import ValidationError
from wstar.modules import HilbertModule
from wstar.operators import ModuleMap, identity_map
from wstar.spectral import (
    SpectralFunction,
    conjugation_invariance_check,
    cyclic_trace,
    spectral_function,
    spectral_measure,
)
from wstar.algebra import K0Class


def free_module(algebra, n):
    return HilbertModule(algebra, n, algebra.identity(n))


def scalar_unitary(module, rows):
    a = module.algebra
    arr = np.array(rows, dtype=complex)
    blocks = [arr.copy() for _ in a.block_sizes]
    return ModuleMap(module, module, AlgMatrix(a, arr.shape[0], arr.shape[1], blocks))


def random_unitary(rng, module):
    blocks = []
    for qb in module.projection.blocks:
        d = qb.shape[0]
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = qb @ (g + g.conj().T) @ qb
        w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
        e = (v * np.exp(1j * w)) @ v.conj().T
        blocks.append(e @ qb)
    return ModuleMap(
        module, module, AlgMatrix(module.algebra, module.ambient_rank, module.ambient_rank, blocks)
    )


def test_identity_has_single_point_at_zero():
    a = BlockAlgebra([1])
    m = free_module(a, 2)
    measure = spectral_measure(identity_map(m))
    assert len(measure.points) == 1
    angle, proj = measure.points[0]
    assert angle == 0.0
    assert (proj.matrix - m.projection).norm() < 1e-12


def test_diag_plus_minus_one():
    a = BlockAlgebra([1])
    m = free_module(a, 2)
    u = scalar_unitary(m, [[1, 0], [0, -1]])
    measure = spectral_measure(u)
    assert len(measure.points) == 2
    (a0, p0), (a1, p1) = measure.points
    assert a0 == 0.0
    assert a1 == math.pi  # -1 lands exactly on pi
    assert np.allclose(p0.matrix.blocks[0], np.diag([1.0, 0.0]))
    assert np.allclose(p1.matrix.blocks[0], np.diag([0.0, 1.0]))


def test_rotation_eigenangles():
    theta = math.pi / 5
    a = BlockAlgebra([1])
    m = free_module(a, 2)
    u = scalar_unitary(
        m, [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )
    measure = spectral_measure(u)
    angles = [ang for ang, _ in measure.points]
    assert len(angles) == 2
    assert abs(angles[0] - theta) < 1e-12
    assert abs(angles[1] - (2 * math.pi - theta)) < 1e-12
    for _, p in measure.points:
        assert sum(p.matrix.blocks[0].diagonal().real.round(9)) == pytest.approx(1.0)


def test_measure_invariants_random():
    rng = np.random.default_rng(0)
    a = BlockAlgebra([2, 1])
    for _ in range(10):
        blocks = []
        n = 2
        for ni in a.block_sizes:
            d = n * ni
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            w, v = np.linalg.eigh(g + g.conj().T)
            r = rng.integers(1, d + 1)
            blocks.append(v[:, :r] @ v[:, :r].conj().T)
        m = HilbertModule(a, n, AlgMatrix(a, n, n, blocks))
        u = random_unitary(rng, m)
        measure = spectral_measure(u)
        assert (measure.reconstruct() - u.matrix).norm() < 1e-8
        assert measure.completeness_defect() < 1e-8
        assert measure.orthogonality_defect() < 1e-9
        for _, p in measure.points:
            assert (p.matrix @ u.matrix - u.matrix @ p.matrix).norm() < 1e-9


def test_rejects_non_unitary():
    a = BlockAlgebra([1])
    m = free_module(a, 2)
    with pytest.raises(ValidationError):
        spectral_measure(scalar_unitary(m, [[2, 0], [0, 1]]))


def test_spectral_function_values():
    m2 = BlockAlgebra([2])
    m = free_module(m2, 1)
    fn = spectral_function(identity_map(m))
    assert fn.support == ((0.0, K0Class((2,))),)

    cc = BlockAlgebra([1])
    m = free_module(cc, 2)
    u = scalar_unitary(m, [[1, 0], [0, -1]])
    fn = spectral_function(u)
    assert [a for a, _ in fn.support] == [0.0, math.pi]
    assert [c.ranks for _, c in fn.support] == [(1,), (1,)]
    total = fn.total_class(1)
    assert total == m.k0()


def test_spectral_function_arithmetic():
    c1 = K0Class((1,))
    f = SpectralFunction.from_pairs([(0.0, c1), (math.pi, c1)])
    g = SpectralFunction.from_pairs([(0.0, c1)])
    diff = f - g
    assert diff.support == ((math.pi, c1),)
    # cancellation removes the support point entirely
    assert (f - f).is_zero()
    # nearby angles merge
    h = SpectralFunction.from_pairs([(1.0, c1), (1.0 + 1e-9, c1)])
    assert len(h.support) == 1
    assert h.support[0][1] == K0Class((2,))


def test_cyclic_trace_values():
    cc = BlockAlgebra([1])
    m = free_module(cc, 2)
    u = scalar_unitary(m, [[1, 0], [0, -1]])
    assert cyclic_trace(u).distance(__import__("wstar").HC0Class((0,))) < 1e-12

    m2 = BlockAlgebra([2])
    m_one = free_module(m2, 1)
    assert cyclic_trace(identity_map(m_one)).traces[0] == pytest.approx(2.0)

    diag_i = m2.elem([np.diag([1j, -1j])])
    u2 = ModuleMap(m_one, m_one, AlgMatrix.from_elem(diag_i))
    assert abs(cyclic_trace(u2).traces[0]) < 1e-12


def test_cyclic_trace_conjugate():
    rng = np.random.default_rng(1)
    a = BlockAlgebra([2, 1])
    m = free_module(a, 2)
    u = random_unitary(rng, m)
    t = cyclic_trace(u)
    ts = cyclic_trace(u.adjoint())
    assert ts.distance(t.conj()) < 1e-10


def test_trace_matches_matrix_trace():
    # the spectral route reproduces the plain trace of the matrix of U
    rng = np.random.default_rng(2)
    a = BlockAlgebra([2, 2])
    m = free_module(a, 2)
    u = random_unitary(rng, m)
    t = cyclic_trace(u)
    direct = u.matrix.trace_down()
    for i in range(a.k):
        assert abs(t.traces[i] - np.trace(direct.blocks[i])) < 1e-10


def test_conjugation_invariance():
    rng = np.random.default_rng(3)
    a = BlockAlgebra([2, 1])
    m = free_module(a, 2)
    for _ in range(20):
        u = random_unitary(rng, m)
        g = random_unitary(rng, m)
        # a non-unitary isomorphism: positive invertible times unitary
        h_blocks = []
        for qb in m.projection.blocks:
            d = qb.shape[0]
            x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            hh = 0.5 * (x + x.conj().T)
            w, v = np.linalg.eigh(hh)
            h_blocks.append((v * np.exp(0.5 * np.tanh(w))) @ v.conj().T)
        pos = ModuleMap(m, m, AlgMatrix(a, 2, 2, h_blocks))
        j = pos.then(g)
        t_m, t_n, equal = conjugation_invariance_check(u, j)
        assert equal
        assert t_m.distance(t_n) < 1e-9


def test_permutation_conjugation_trivial():
    cc = BlockAlgebra([1])
    m = free_module(cc, 2)
    u = scalar_unitary(m, [[1, 0], [0, -1]])
    swap = scalar_unitary(m, [[0, 1], [1, 0]])
    t_m, t_n, equal = conjugation_invariance_check(u, swap)
    assert equal
    assert abs(t_m.traces[0]) < 1e-12
    assert abs(t_n.traces[0]) < 1e-12


def test_angle_wrap_near_one():
    # eigenvalue a hair under angle 2 pi clusters with angle 0
    cc = BlockAlgebra([1])
    m = free_module(cc, 2)
    eps = 1e-9
    u = scalar_unitary(m, [[np.exp(-1j * eps), 0], [0, np.exp(1j * eps)]])
    measure = spectral_measure(u)
    assert len(measure.points) == 1
    angle = measure.points[0][0]
    assert min(angle, 2 * math.pi - angle) < 1e-8
