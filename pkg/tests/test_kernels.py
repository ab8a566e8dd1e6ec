"""Backend parity: the compiled kernels and the numpy fallback must agree."""

import numpy as np
import pytest

import wstar._kernels as kernels
import wstar._kernels.fallback as fallback


def random_hermitian(rng, d):
    x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (x + x.conj().T)


compiled = pytest.mark.skipif(
    kernels.BACKEND != "compiled", reason="extension not built"
)


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")
    assert "python" in kernels.backends()


@compiled
def test_series_parity():
    rng = np.random.default_rng(0)
    core = kernels.backends()["compiled"]
    for d in (1, 2, 5, 9):
        x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = x @ x.conj().T + 0.3 * np.eye(d)
        nrm = float(np.linalg.norm(h, 2))
        p0 = np.eye(d) - h / nrm
        b1, k1, ok1 = core.series_bracket(p0, np.eye(d), np.sqrt(nrm), 1e-12, 10000)
        b2, k2, ok2 = fallback.series_bracket(p0, np.eye(d), np.sqrt(nrm), 1e-12, 10000)
        assert ok1 == ok2 is True
        assert k1 == k2
        assert np.max(np.abs(np.asarray(b1) - b2)) < 1e-13


@compiled
def test_series_divergence_parity():
    # an exact zero mode stalls the term decay in both backends
    p0 = np.diag([1.0, 0.2]).astype(complex)
    b1, k1, ok1 = kernels.backends()["compiled"].series_bracket(
        p0, np.eye(2, dtype=complex), 1.0, 1e-12, 500
    )
    b2, k2, ok2 = fallback.series_bracket(p0, np.eye(2, dtype=complex), 1.0, 1e-12, 500)
    assert ok1 == ok2 is False
    assert k1 == k2 == 500


@compiled
def test_jacobi_parity_and_correctness():
    rng = np.random.default_rng(1)
    core = kernels.backends()["compiled"]
    for d in (1, 3, 8, 15):
        h = random_hermitian(rng, d)
        w1, v1 = core.jacobi_eigh(h)
        w2, v2 = fallback.jacobi_eigh(h)
        ref = np.linalg.eigvalsh(h)
        assert np.max(np.abs(np.asarray(w1) - ref)) < 1e-10
        assert np.max(np.abs(np.asarray(w1) - np.asarray(w2))) < 1e-10
        v1 = np.asarray(v1)
        assert np.max(np.abs(v1 @ np.diag(w1) @ v1.conj().T - h)) < 1e-9


def test_series_square_root_of_scalar():
    # sqrt(1 - x) series at the matrix level: h = 0.25 gives bracket 0.5
    p0 = np.array([[0.75]], dtype=complex)
    bracket, terms, ok = fallback.series_bracket(p0, np.eye(1, dtype=complex), 1.0, 1e-12, 10000)
    assert ok
    assert abs(bracket[0, 0] - 0.5) < 1e-10


def test_series_coefficients_match_taylor():
    # lam_1 = 1/2, lam_2 = 1/8, lam_3 = 1/16, lam_4 = 5/128: feed a nilpotent
    # argument so the partial sum exposes the coefficients directly
    n = np.zeros((5, 5), dtype=complex)
    for j in range(4):
        n[j, j + 1] = 1.0
    bracket, _, ok = fallback.series_bracket(n, np.eye(5, dtype=complex), 1.0, 1e-30, 50)
    assert ok  # the nilpotent argument kills every term past the fourth
    coeffs = [-bracket[0, j + 1].real for j in range(4)]
    assert np.allclose(coeffs, [0.5, 0.125, 0.0625, 5.0 / 128.0], atol=1e-14)


def test_jacobi_zero_and_tiny():
    w, v = fallback.jacobi_eigh(np.zeros((3, 3), dtype=complex))
    assert np.allclose(w, 0.0)
    assert np.allclose(v, np.eye(3))
    w, v = fallback.jacobi_eigh(np.array([[2.0]], dtype=complex))
    assert w[0] == 2.0
