import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from mfwtnn.shrinkage import (
    NumericalError,
    check_weights,
    dw_prox,
    dw_prox_spectrum,
    fw_log_norm,
    fw_norm,
    fw_prox,
    fw_prox_spectrum,
    log_shrink,
    log_shrink_scalar,
    slice_svd,
    soft_threshold,
    svt_slice,
)
from mfwtnn.tensor3 import fft_mode3, frobenius_norm, ifft_mode3

from .oracles import fw_prox_oracle, grid_local_min, log_objective, svt_oracle


def paired_weights(rng, n3, lo=0.5, hi=2.0):
    w = rng.uniform(lo, hi, n3)
    w[1:] = np.maximum(w[1:], w[1:][::-1])
    return w


# ---------------------------------------------------------------- soft threshold


@pytest.mark.parametrize("x,t,expected", [(0.5, 0.2, 0.3), (-0.1, 0.2, 0.0), (-0.9, 0.4, -0.5)])
def test_soft_threshold_examples(x, t, expected):
    assert soft_threshold(np.array([x]), t)[0] == pytest.approx(expected, abs=1e-15)


def test_soft_threshold_negative_t():
    with pytest.raises(ValueError):
        soft_threshold(np.zeros(3), -1e-3)


# ---------------------------------------------------------------- SVT


def test_svt_diagonal():
    np.testing.assert_allclose(svt_slice(np.diag([3.0, 1.0]), 2.0), np.diag([1.0, 0.0]), atol=1e-14)


def test_svt_zero_threshold_reconstructs(rng):
    m = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    np.testing.assert_allclose(svt_slice(m, 0.0), m, atol=1e-10)


def test_svt_matches_oracle(rng):
    m = rng.standard_normal((6, 4))
    np.testing.assert_allclose(svt_slice(m, 0.5), svt_oracle(m, 0.5), atol=1e-12)


def test_svt_is_prox_of_nuclear_norm(rng):
    # optimality: random perturbations never lower t*||Z||_* + 0.5*||Z - m||^2
    m = rng.standard_normal((6, 4))
    t = 0.5
    z = svt_slice(m, t)

    def obj(z_):
        return t * np.sum(np.linalg.svd(z_, compute_uv=False)) + 0.5 * np.sum((z_ - m) ** 2)

    base = obj(z)
    for _ in range(50):
        assert obj(z + 1e-3 * rng.standard_normal(z.shape)) >= base - 1e-12


def test_slice_svd_invariants(rng):
    m = rng.standard_normal((7, 4)) + 1j * rng.standard_normal((7, 4))
    d = slice_svd(m, 3)
    assert d.u.shape == (7, 4) and d.v.shape == (4, 4) and d.s.shape == (4,)
    assert np.all(np.diff(d.s) <= 0) and np.all(d.s >= 0)
    np.testing.assert_allclose(d.u.conj().T @ d.u, np.eye(4), atol=1e-8)
    np.testing.assert_allclose(d.v.conj().T @ d.v, np.eye(4), atol=1e-8)
    np.testing.assert_allclose((d.u * d.s) @ d.v.conj().T, m, atol=1e-12)


def test_slice_svd_failure_names_slice(monkeypatch):
    def boom(*a, **k):
        raise np.linalg.LinAlgError("did not converge")

    monkeypatch.setattr(np.linalg, "svd", boom)
    with pytest.raises(NumericalError, match="slice 5"):
        slice_svd(np.eye(3), 5)


# ---------------------------------------------------------------- log shrinkage


def test_log_shrink_zero():
    assert log_shrink_scalar(0.0, 0.3, 0.1) == 0.0


def test_log_shrink_frozen_value():
    # c1 = 1.99, c2 = 3.6401; value frozen from a dense grid minimization on [-4, 4]
    v = log_shrink_scalar(2.0, 0.1, 0.01)
    assert v == pytest.approx((1.99 + np.sqrt(3.6401)) / 2, abs=1e-12)
    assert v == pytest.approx(1.9489523, abs=1e-7)
    assert v == pytest.approx(grid_local_min(2.0, 0.1, 0.01), abs=1e-3)


def test_log_shrink_kills_small_input():
    assert log_shrink_scalar(1.0, 1.0, 0.5) == 0.0
    grid = np.arange(-4, 4 + 1e-4, 1e-4)
    f = log_objective(grid, 1.0, 1.0, 0.5)
    assert abs(grid[np.argmin(f)]) < 1e-3


def test_log_shrink_nonpositive_tau():
    with pytest.raises(ValueError):
        log_shrink_scalar(1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        log_shrink(np.ones(2), -1.0, 0.1)


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(1e-3, 5), st.floats(0.01, 0.99))
def test_log_shrink_is_odd(y, tau, frac):
    eps = frac * min(np.sqrt(tau), tau / abs(y)) if y else frac * np.sqrt(tau)
    assert log_shrink_scalar(-y, tau, eps) == -log_shrink_scalar(y, tau, eps)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 10), st.floats(1e-3, 5), st.floats(0.01, 0.99))
def test_log_shrink_never_expands(y, tau, frac):
    eps = frac * min(np.sqrt(tau), tau / y) if y else frac * np.sqrt(tau)
    v = log_shrink_scalar(y, tau, eps)
    assert 0.0 <= v <= y


def test_log_shrink_vector_matches_scalar(rng):
    s = np.sort(rng.uniform(0, 3, 30))[::-1]
    s[-3:] = 0.0
    tau, eps = 0.4, 0.05
    vec = log_shrink(s, tau, eps)
    for si, vi in zip(s, vec):
        bound = min(np.sqrt(tau), tau / si) if si > 0 else np.inf
        e = eps if eps < bound else 0.9 * bound
        assert vi == pytest.approx(log_shrink_scalar(si, tau, e), abs=1e-15)


def test_log_shrink_clips_eps():
    # eps = 1 breaks the bound min(sqrt(0.25), 0.25/2) = 0.125, so eps' = 0.1125
    got = log_shrink(np.array([2.0]), 0.25, 1.0)[0]
    assert got == pytest.approx(log_shrink_scalar(2.0, 0.25, 0.1125), abs=1e-15)


# ---------------------------------------------------------------- weights check


def test_check_weights():
    check_weights([1.0, 2.0, 3.0, 2.0], 4)
    with pytest.raises(ValueError, match="expected 4"):
        check_weights([1.0, 1.0], 4)
    with pytest.raises(ValueError, match="pairing"):
        check_weights([1.0, 2.0, 3.0, 4.0], 4)
    with pytest.raises(ValueError, match="positive"):
        check_weights([1.0, 0.0, 0.0], 3)


# ---------------------------------------------------------------- FW prox


def test_fw_prox_zero_tau_is_identity(rng):
    y = rng.standard_normal((4, 5, 6))
    assert np.max(np.abs(fw_prox(y, np.ones(6), 0.0) - y)) <= 1e-12


def test_fw_prox_uniform_matches_oracle(rng):
    y = rng.standard_normal((8, 9, 5))
    np.testing.assert_allclose(fw_prox(y, np.ones(5), 0.3), fw_prox_oracle(y, np.ones(5), 0.3), atol=1e-8)


@pytest.mark.parametrize("n3", [1, 2, 5, 6])
def test_fw_prox_weighted_matches_oracle(rng, n3):
    y = rng.standard_normal((5, 4, n3))
    w = paired_weights(rng, n3)
    np.testing.assert_allclose(fw_prox(y, w, 0.2), fw_prox_oracle(y, w, 0.2), atol=1e-8)


def test_fw_prox_huge_weight_zeroes_slice(rng):
    y = rng.standard_normal((6, 5, 7))
    w = np.ones(7)
    w[2] = w[5] = 1e6
    out = fft_mode3(fw_prox(y, w, 0.1)).data
    assert np.max(np.abs(out[:, :, 2])) < 1e-9
    assert np.max(np.abs(out[:, :, 5])) < 1e-9
    assert np.max(np.abs(out[:, :, 0])) > 1e-3


def test_fw_prox_weight_commutation(rng):
    y = rng.standard_normal((5, 6, 4))
    c = 0.6
    a = fw_prox(y, np.full(4, c), 0.3)
    b = fw_prox(y, np.ones(4), c * 0.3)
    assert np.array_equal(a, b)


def test_fw_prox_nonexpansive_per_slice(rng):
    y = rng.standard_normal((6, 6, 5))
    w = paired_weights(rng, 5)
    yf = fft_mode3(y).data
    of = fft_mode3(fw_prox(y, w, 0.2)).data
    for k in range(5):
        assert np.sum(np.linalg.svd(of[:, :, k], compute_uv=False)) <= np.sum(
            np.linalg.svd(yf[:, :, k], compute_uv=False)
        ) + 1e-12


def test_fw_prox_minimizes_objective(rng):
    y = rng.standard_normal((4, 5, 4))
    w = paired_weights(rng, 4)
    tau = 0.15
    x = fw_prox(y, w, tau)

    def obj(z):
        return tau * fw_norm(z, w) + 0.5 * np.sum((z - y) ** 2)

    base = obj(x)
    for _ in range(30):
        assert obj(x + 1e-3 * rng.standard_normal(x.shape)) >= base - 1e-12


def test_fw_prox_weight_errors(rng):
    y = rng.standard_normal((3, 3, 4))
    with pytest.raises(ValueError):
        fw_prox(y, np.ones(3), 0.1)
    with pytest.raises(ValueError):
        fw_prox(y, [1.0, 1.0, 2.0, 3.0], 0.1)
    with pytest.raises(ValueError):
        fw_prox(y, np.ones(4), -0.1)


# ---------------------------------------------------------------- DW prox


def test_dw_prox_zero_cube():
    assert np.array_equal(dw_prox(np.zeros((3, 4, 5)), np.ones(5), 0.2, 0.1), np.zeros((3, 4, 5)))


def _effective_eps(s, tau_k, eps):
    if s == 0:
        return eps
    bound = min(np.sqrt(tau_k), tau_k / s)
    return eps if eps < bound else 0.9 * bound


def test_dw_prox_per_value_oracle(rng):
    y = rng.standard_normal((6, 6, 4))
    w = paired_weights(rng, 4)
    tau, eps = 0.05, 0.1
    yf = np.fft.fft(y, axis=2)
    of = np.fft.fft(dw_prox(y, w, tau, eps), axis=2)
    for k in range(4):
        tk = 4 * tau * w[k]
        s_in = scipy.linalg.svdvals(yf[:, :, k])
        expected = np.sort([log_shrink_scalar(s, tk, _effective_eps(s, tk, eps)) for s in s_in])[::-1]
        got = scipy.linalg.svdvals(of[:, :, k])
        np.testing.assert_allclose(got, expected, atol=1e-9)


def test_dw_prox_shrinks_singular_values(rng):
    y = rng.standard_normal((5, 7, 6))
    w = paired_weights(rng, 6)
    yf = fft_mode3(y).data
    of = fft_mode3(dw_prox(y, w, 0.1, 0.05)).data
    for k in range(6):
        s_in = np.linalg.svd(yf[:, :, k], compute_uv=False)
        s_out = np.linalg.svd(of[:, :, k], compute_uv=False)
        assert np.all(s_out <= s_in + 1e-10)


def test_dw_prox_objective_non_increase():
    rng = np.random.default_rng(99)
    for _ in range(50):
        shape = tuple(rng.integers(2, 7, size=3))
        y = rng.standard_normal(shape)
        n3 = shape[2]
        w = paired_weights(rng, n3)
        tau = float(rng.uniform(0.01, 0.3))
        # eps small enough that no value is clipped, so one objective covers every slice
        smax = max(np.linalg.svd(fft_mode3(y).data[:, :, k], compute_uv=False)[0] for k in range(n3))
        tmin = n3 * tau * w.min()
        eps = 0.5 * min(np.sqrt(tmin), tmin / smax)
        x = dw_prox(y, w, tau, eps)

        def obj(z):
            return tau * fw_log_norm(z, w, eps) + 0.5 * np.sum((z - y) ** 2)

        assert obj(x) <= obj(y) + 1e-10


def test_dw_prox_requires_positive_tau(rng):
    with pytest.raises(ValueError):
        dw_prox(rng.standard_normal((2, 2, 2)), np.ones(2), 0.0, 0.1)


@pytest.mark.parametrize("n3", [1, 4, 7])
def test_prox_outputs_are_real(rng, n3):
    y = rng.standard_normal((5, 6, n3))
    w = paired_weights(rng, n3)
    ynorm = frobenius_norm(y)
    for spec, _ in (fw_prox_spectrum(y, w, 0.1), dw_prox_spectrum(y, w, 0.1, 0.05)):
        _, resid = ifft_mode3(spec, return_residual=True)
        assert resid <= 1e-10 * ynorm


def test_spectrum_svals_cover_all_slices(rng):
    y = rng.standard_normal((4, 3, 6))
    w = paired_weights(rng, 6)
    spec, svals = fw_prox_spectrum(y, w, 0.1)
    assert len(svals) == 6 and all(s is not None for s in svals)
    x = ifft_mode3(spec)
    assert fw_norm(None, w, svals) == pytest.approx(fw_norm(x, w), rel=1e-10)
