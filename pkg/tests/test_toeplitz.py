"""Toeplitz lift/adjoint pairing and PSD checks."""

import numpy as np
import numpy.testing as npt
import pytest

import gridless as gl


def test_lift_identity():
    u = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
    npt.assert_array_equal(gl.toeplitz_lift(u), np.eye(4))


def test_lift_zero():
    npt.assert_array_equal(gl.toeplitz_lift(np.zeros(5, dtype=complex)), np.zeros((5, 5)))


def test_lift_rank_one_sinusoid():
    # u[d] = p exp(-i 2 pi f d) lifts to p a(f) a(f)^H
    n, f, p = 6, 0.3, 2.0
    u = p * np.exp(-2j * np.pi * f * np.arange(n))
    a = gl.steering_vector(f, n)
    npt.assert_allclose(gl.toeplitz_lift(u), p * np.outer(a, a.conj()), atol=1e-14)


def test_lift_is_hermitian_toeplitz():
    rng = np.random.default_rng(0)
    u = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    u[0] = u[0].real
    t = gl.toeplitz_lift(u)
    npt.assert_allclose(t, t.conj().T, atol=1e-15)
    for d in range(5):
        npt.assert_allclose(np.diagonal(t, offset=d), u[d], atol=1e-15)


def test_adjoint_identity_trace():
    # pairing with the identity recovers n times the zero-lag entry
    u = np.array([0.7, 0.2 - 0.1j, 0.05j], dtype=complex)
    v = gl.toeplitz_adjoint(np.eye(3, dtype=complex))
    pairing = np.real(np.vdot(u, v))
    assert pairing == pytest.approx(3 * 0.7, abs=1e-14)


def test_adjoint_pairing_identity():
    # Re tr(T(u)^H M) == Re <u, adjoint(M)> for dense random pairs
    rng = np.random.default_rng(1)
    for _ in range(1000):
        n = rng.integers(2, 9)
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        u[0] = u[0].real
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        m = (g + g.conj().T) / 2
        lhs = np.real(np.trace(gl.toeplitz_lift(u).conj().T @ m))
        rhs = np.real(np.vdot(u, gl.toeplitz_adjoint(m)))
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_adjoint_of_sinusoid_outer_product():
    # diagonal-d sum of a(f)a(f)^H has n-d terms of modulus one
    n, f = 7, 0.21
    a = gl.steering_vector(f, n)
    v = gl.toeplitz_adjoint(np.outer(a, a.conj()))
    # independent direct diagonal sums
    expect = np.zeros(n, dtype=complex)
    m = np.outer(a, a.conj())
    expect[0] = np.sum(np.diagonal(m)).real
    for d in range(1, n):
        expect[d] = 2 * np.sum(np.diagonal(m, offset=d))
    npt.assert_allclose(v, expect, atol=1e-12)


def test_eigencheck_psd_identity():
    ok, lam_min = gl.eigencheck_psd(np.eye(4))
    assert ok and lam_min == pytest.approx(1.0)


def test_eigencheck_psd_negative_identity():
    ok, lam_min = gl.eigencheck_psd(-np.eye(4))
    assert not ok and lam_min == pytest.approx(-1.0)


def test_eigencheck_psd_gram():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    ok, lam_min = gl.eigencheck_psd(a.conj().T @ a, tol=1e-12)
    assert ok
