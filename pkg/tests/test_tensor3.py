import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfwtnn.tensor3 import (
    FreqCube,
    SymmetryError,
    as_cube,
    fft_mode3,
    frobenius_norm,
    ifft_mode3,
    inner,
    ipermute,
    is_conjugate_symmetric,
    l1_norm,
    permute,
)

from .oracles import naive_dft_tubes

dims = st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 7))


def test_permute_mode3_is_identity(rng):
    x = rng.standard_normal((3, 4, 5))
    assert np.array_equal(permute(x, 3), x)
    assert np.array_equal(ipermute(x, 3), x)


def test_permute_mode1_index_law():
    x = np.arange(24, dtype=float).reshape(2, 3, 4)
    x1 = permute(x, 1)
    assert x1.shape == (3, 4, 2)
    for i in range(2):
        for j in range(3):
            for k in range(4):
                assert x1[j, k, i] == x[i, j, k]


def test_permute_index_law_exhaustive(rng):
    x = rng.standard_normal((4, 5, 6))
    x1, x2, x3 = permute(x, 1), permute(x, 2), permute(x, 3)
    assert x2.shape == (6, 4, 5)
    for i, j, k in np.ndindex(*x.shape):
        assert x[i, j, k] == x1[j, k, i] == x2[k, i, j] == x3[i, j, k]


@pytest.mark.parametrize("p", [1, 2, 3])
def test_ipermute_roundtrip(rng, p):
    x = rng.standard_normal((5, 4, 3))
    assert np.array_equal(ipermute(permute(x, p), p), x)
    assert np.array_equal(permute(ipermute(x, p), p), x)


@pytest.mark.parametrize("p", [0, 4, -1, 1.5])
def test_permute_rejects_bad_mode(p):
    with pytest.raises(ValueError):
        permute(np.zeros((2, 2, 2)), p)
    with pytest.raises(ValueError):
        ipermute(np.zeros((2, 2, 2)), p)


@settings(max_examples=40, deadline=None)
@given(dims, st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_permute_roundtrip_property(shape, p, seed):
    x = np.random.default_rng(seed).standard_normal(shape)
    assert np.array_equal(ipermute(permute(x, p), p), x)


def test_fft_constant_tube():
    x = np.full((2, 3, 5), 0.7)
    xf = fft_mode3(x).data
    np.testing.assert_allclose(xf[:, :, 0], 5 * 0.7, rtol=1e-15)
    assert np.max(np.abs(xf[:, :, 1:])) < 1e-14


def test_fft_single_slice_is_identity(rng):
    x = rng.standard_normal((3, 4, 1))
    assert np.array_equal(fft_mode3(x).data, x.astype(complex))


@pytest.mark.parametrize("shape", [(3, 3, 4), (2, 5, 7), (4, 2, 1), (3, 3, 2)])
def test_fft_matches_naive_dft(rng, shape):
    x = rng.standard_normal(shape)
    np.testing.assert_allclose(fft_mode3(x).data, naive_dft_tubes(x), atol=1e-12, rtol=0)


def test_fft_of_complex_input_matches_naive(rng):
    x = rng.standard_normal((2, 3, 5)) + 1j * rng.standard_normal((2, 3, 5))
    k = np.arange(5)
    f = np.exp(-2j * np.pi * np.outer(k, k) / 5)
    np.testing.assert_allclose(fft_mode3(x).data, np.einsum("kl,ijl->ijk", f, x), atol=1e-12)


def test_fft_origin_tag(rng):
    x = rng.standard_normal((2, 3, 4))
    xf = fft_mode3(permute(x, 2), origin=2)
    assert isinstance(xf, FreqCube) and xf.origin == 2
    assert xf.shape == (4, 2, 3)
    np.testing.assert_array_equal(xf.slice(1), xf.data[:, :, 1])


def test_ifft_roundtrip(rng):
    x = rng.standard_normal((4, 4, 8))
    assert np.max(np.abs(ifft_mode3(fft_mode3(x)) - x)) <= 1e-12


@pytest.mark.parametrize("n", [16, 33, 64])
def test_ifft_roundtrip_relative_large(rng, n):
    x = rng.uniform(size=(n, n, n))
    err = frobenius_norm(ifft_mode3(fft_mode3(x)) - x) / frobenius_norm(x)
    assert err <= 1e-12


def test_ifft_zero():
    out = ifft_mode3(fft_mode3(np.zeros((3, 2, 4))))
    assert np.array_equal(out, np.zeros((3, 2, 4)))


def test_ifft_rejects_broken_symmetry(rng):
    xf = fft_mode3(rng.standard_normal((3, 3, 6)))
    data = xf.data.copy()
    data[:, :, 2] += 0.5j
    with pytest.raises(SymmetryError):
        ifft_mode3(FreqCube(data))


def test_ifft_reports_residual(rng):
    x = rng.standard_normal((3, 4, 6))
    out, resid = ifft_mode3(fft_mode3(x), return_residual=True)
    assert resid <= 1e-14 * frobenius_norm(x)
    np.testing.assert_allclose(out, x, atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(dims, st.integers(0, 2**32 - 1))
def test_conjugate_symmetry_property(shape, seed):
    x = np.random.default_rng(seed).standard_normal(shape)
    xf = fft_mode3(x)
    assert is_conjugate_symmetric(xf)
    n3 = shape[2]
    assert np.all(xf.data[:, :, 0].imag == 0)
    for i in range(1, n3):
        assert np.array_equal(np.conj(xf.data[:, :, i]), xf.data[:, :, n3 - i])


def test_symmetry_predicate_detects_violation(rng):
    xf = fft_mode3(rng.standard_normal((2, 2, 5)))
    bad = xf.data.copy()
    bad[0, 0, 1] += 1.0
    assert not is_conjugate_symmetric(bad)
    bad0 = xf.data.copy()
    bad0[0, 0, 0] += 1j
    assert not is_conjugate_symmetric(bad0)


def test_frobenius_examples():
    assert frobenius_norm(np.ones((2, 2, 2))) == pytest.approx(np.sqrt(8), rel=1e-15)
    assert frobenius_norm(np.zeros((3, 1, 2))) == 0.0


@settings(max_examples=30, deadline=None)
@given(dims, st.integers(0, 2**32 - 1))
def test_parseval(shape, seed):
    x = np.random.default_rng(seed).standard_normal(shape)
    lhs = frobenius_norm(x) ** 2
    rhs = frobenius_norm(fft_mode3(x)) ** 2 / shape[2]
    assert abs(lhs - rhs) <= 1e-10 * lhs


def test_l1_and_inner(rng):
    x = np.array([1.0, -2.0, 3.0, 0.0]).reshape(1, 2, 2)
    assert l1_norm(x) == 6.0
    a = rng.standard_normal((3, 4, 5))
    b = rng.standard_normal((3, 4, 5))
    assert inner(a, a) == pytest.approx(frobenius_norm(a) ** 2, rel=1e-13)
    oracle = sum(a[i, j, k] * b[i, j, k] for i, j, k in np.ndindex(*a.shape))
    assert inner(a, b) == pytest.approx(oracle, rel=1e-12)


def test_inner_dim_mismatch():
    with pytest.raises(ValueError):
        inner(np.zeros((2, 2, 2)), np.zeros((2, 2, 3)))


def test_as_cube_validation():
    with pytest.raises(ValueError):
        as_cube(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        as_cube(np.zeros((2, 0, 2)))
    with pytest.raises(ValueError):
        as_cube(np.array([[[np.nan]]]))
    assert as_cube(np.ones((1, 1, 1), dtype=np.float32)).dtype == np.float64
