"""Frequency retrieval from Toeplitz parameters and scoring helpers."""

import numpy as np
import numpy.testing as npt
import pytest

import gridless as gl


def sinusoid_parameter(freqs, powers, n):
    d = np.arange(n)
    u = np.zeros(n, dtype=complex)
    for f, p in zip(np.atleast_1d(freqs), np.atleast_1d(powers)):
        u += p * np.exp(-2j * np.pi * f * d)
    return u


# ------------------------------------------------------------ rank


def test_numerical_rank_identity():
    assert gl.numerical_rank(np.eye(5)) == 5


def test_numerical_rank_rank_one():
    n = 8
    a = gl.steering_vector(0.3, n)
    assert gl.numerical_rank(2.0 * np.outer(a, a.conj()), rel_tol=1e-8) == 1


def test_numerical_rank_zero_matrix():
    assert gl.numerical_rank(np.zeros((4, 4))) == 0


def test_numerical_rank_accepts_parameter_vector():
    u = sinusoid_parameter([0.1, 0.4], [1.0, 2.0], 10)
    assert gl.numerical_rank(u, rel_tol=1e-8) == 2


# ------------------------------------------------------------ decomposition


def test_decompose_single_sinusoid():
    u = sinusoid_parameter(0.3, 2.0, 8)
    spec = gl.vandermonde_decompose(u, 1)
    npt.assert_allclose(spec.freqs, [0.3], atol=1e-10)
    npt.assert_allclose(spec.powers, [2.0], rtol=1e-10)


def test_decompose_zero_parameter():
    spec = gl.vandermonde_decompose(np.zeros(6, dtype=complex), 0)
    assert spec.freqs.size == 0 and spec.powers.size == 0


def test_decompose_round_trip_many():
    # reconstruct T(u) from the retrieved (f, p) pairs; relative Frobenius
    # error stays at solver-independent machine scale
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(4, 33))
        k = int(rng.integers(1, min(n - 1, 6) + 1))
        f = np.sort(rng.uniform(0, 1, k))
        while k > 1 and np.min(np.diff(np.concatenate([f, [f[0] + 1]]))) < 1.0 / n:
            f = np.sort(rng.uniform(0, 1, k))
        p = rng.uniform(0.5, 3.0, k)
        u = sinusoid_parameter(f, p, n)
        spec = gl.vandermonde_decompose(u, k)
        t_hat = sum(
            pw * np.outer(gl.steering_vector(fr, n), gl.steering_vector(fr, n).conj())
            for fr, pw in zip(spec.freqs, spec.powers)
        )
        t = gl.toeplitz_lift(u)
        err = np.linalg.norm(t_hat - t) / np.linalg.norm(t)
        worst = max(worst, err)
    assert worst <= 1e-6


def test_decompose_power_sum_matches_trace():
    u = sinusoid_parameter([0.12, 0.55, 0.8], [1.0, 2.5, 0.7], 16)
    spec = gl.vandermonde_decompose(u, 3)
    # tr T(u) = n * sum of powers
    assert np.sum(spec.powers) == pytest.approx(u[0].real, rel=1e-10)


def test_decompose_rejects_full_rank():
    u = np.zeros(4, dtype=complex)
    u[0] = 3.0  # 3 I has no rank-deficient Vandermonde form
    with pytest.raises(gl.FullRankError):
        gl.vandermonde_decompose(u, 4)


def test_decompose_rejects_non_psd():
    u = sinusoid_parameter(0.2, 1.0, 6)
    u[0] -= 2.0  # shift spectrum negative
    with pytest.raises(ValueError):
        gl.vandermonde_decompose(u, 1)


def test_decompose_reconstruction_error_raised():
    # an identity-like parameter is far from any rank-1 model
    u = np.zeros(6, dtype=complex)
    u[0] = 1.0
    with pytest.raises((gl.ReconstructionError, gl.FullRankError)):
        gl.vandermonde_decompose(u, 1)


def test_spectrum_serialization():
    u = sinusoid_parameter([0.2, 0.6], [1.0, 2.0], 12)
    spec = gl.vandermonde_decompose(u, 2)
    text = spec.to_csv()
    assert text.splitlines()[0] == "freq,power"
    assert len(text.splitlines()) == 3
    back = gl.RetrievedSpectrum.from_json(spec.to_json())
    npt.assert_array_equal(back.freqs, spec.freqs)
    npt.assert_array_equal(back.powers, spec.powers)


# ------------------------------------------------------------ scoring


def test_match_exact():
    truth = np.array([0.1, 0.5, 0.8])
    mse, detected, per_src = gl.match_frequencies(truth.copy(), truth)
    assert mse == 0.0
    assert detected.all()
    npt.assert_array_equal(per_src, 0.0)


def test_match_extra_spurious_component():
    mix = gl.FrequencyMixture([0.1, 0.5], [[1.0], [1.0]])
    spec = gl.RetrievedSpectrum(
        np.array([0.1, 0.5, 0.9]), np.array([1.0, 1.0, 0.1]), 3
    )
    res = gl.match_and_score(spec, mix)
    assert res.order_error == 1
    assert res.freq_mse == pytest.approx(0.0, abs=1e-15)


def test_match_permutation_invariant():
    truth = np.array([0.15, 0.45, 0.75])
    est = np.array([0.46, 0.76, 0.14])
    mse1, det1, _ = gl.match_frequencies(est, truth)
    mse2, det2, _ = gl.match_frequencies(est[::-1].copy(), truth)
    assert mse1 == pytest.approx(mse2, rel=1e-12)
    npt.assert_array_equal(det1, det2)


def test_match_uses_wrap_distance():
    mse, detected, per_src = gl.match_frequencies(np.array([0.99]), np.array([0.01]))
    assert per_src[0] == pytest.approx(0.02, abs=1e-12)


def test_signal_relative_mse_cases():
    y = np.ones((4, 2), dtype=complex)
    assert gl.signal_relative_mse(y, y) == 0.0
    assert gl.signal_relative_mse(2 * y, y) == pytest.approx(1.0)
    rng = np.random.default_rng(1)
    a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    b = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    direct = np.linalg.norm(a - b) ** 2 / np.linalg.norm(b) ** 2
    assert gl.signal_relative_mse(a, b) == pytest.approx(direct, rel=1e-12)


def test_signal_relative_mse_zero_truth_error():
    with pytest.raises(ValueError):
        gl.signal_relative_mse(np.ones((2, 1)), np.zeros((2, 1)))
