"""Third-order tensor primitives.

A *cube* is a real ``numpy.ndarray`` of shape ``(n1, n2, n3)`` stored in C
order, so every tube ``x[i, j, :]`` is contiguous. The Fourier side is held
in :class:`FreqCube`, the mode-3 DFT of a cube together with the mode
permutation it was produced from.

The forward transform is unnormalized and the inverse carries the ``1/n3``
factor, so ``||X||_F**2 == ||fft_mode3(X)||_F**2 / n3``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FreqCube",
    "SymmetryError",
    "as_cube",
    "permute",
    "ipermute",
    "fft_mode3",
    "ifft_mode3",
    "is_conjugate_symmetric",
    "frobenius_norm",
    "l1_norm",
    "inner",
]

# axis orders realising X(i,j,k) = X1(j,k,i) = X2(k,i,j) = X3(i,j,k)
_FORWARD = {1: (1, 2, 0), 2: (2, 0, 1), 3: (0, 1, 2)}
_INVERSE = {1: (2, 0, 1), 2: (1, 2, 0), 3: (0, 1, 2)}

IMAG_TOL = 1e-8


class SymmetryError(ValueError):
    """Raised when an inverse transform leaves a non-negligible imaginary part."""


@dataclass(frozen=True)
class FreqCube:
    """Mode-3 spectrum of a cube.

    Attributes
    ----------
    data : ndarray of complex, shape (n1, n2, n3)
        Frontal slice ``data[:, :, k]`` is the k-th frequency slice.
    origin : int
        Mode permutation (1, 2 or 3) the spectrum was computed from.
    """

    data: np.ndarray
    origin: int = 3

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def slice(self, k: int) -> np.ndarray:
        return self.data[:, :, k]


def as_cube(x, name: str = "x") -> np.ndarray:
    """Validate ``x`` as a finite real third-order array and return it as float64."""
    arr = np.asarray(x)
    if arr.ndim != 3:
        raise ValueError(f"{name} must be a third-order array, got ndim={arr.ndim}")
    if min(arr.shape) < 1:
        raise ValueError(f"{name} has an empty dimension: {arr.shape}")
    if np.iscomplexobj(arr):
        raise TypeError(f"{name} must be real")
    arr = np.asarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def _check_mode(p: int) -> int:
    if p not in (1, 2, 3):
        raise ValueError(f"mode index must be 1, 2 or 3, got {p!r}")
    return p


def permute(x: np.ndarray, p: int) -> np.ndarray:
    """Mode-p permutation: cyclically rotate the axes so mode ``p`` becomes the tube axis.

    The result is a fresh C-contiguous copy.
    """
    _check_mode(p)
    return np.ascontiguousarray(np.transpose(x, _FORWARD[p]))


def ipermute(xp: np.ndarray, p: int) -> np.ndarray:
    """Inverse of :func:`permute`."""
    _check_mode(p)
    return np.ascontiguousarray(np.transpose(xp, _INVERSE[p]))


def fft_mode3(x: np.ndarray, origin: int = 3) -> FreqCube:
    """Unnormalized DFT along every tube ``x[i, j, :]``.

    Real input goes through ``rfft`` and the upper half of the spectrum is
    filled by conjugation, so the conjugate symmetry
    ``data[..., n3 - k] == conj(data[..., k])`` holds bit-exactly and the
    zero-frequency slice is exactly real.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return FreqCube(np.fft.fft(x, axis=2), origin)
    n3 = x.shape[2]
    half = np.fft.rfft(x, axis=2)
    out = np.empty(x.shape, dtype=np.complex128)
    m = half.shape[2]
    out[:, :, :m] = half
    if n3 > 1:
        out[:, :, 0] = half[:, :, 0].real
        # k = n3 - j for j = 1..n3-m
        for j in range(1, n3 - m + 1):
            out[:, :, n3 - j] = np.conj(half[:, :, j])
        if n3 % 2 == 0:
            out[:, :, n3 // 2] = half[:, :, n3 // 2].real
    else:
        out[:, :, 0] = x[:, :, 0]
    return FreqCube(out, origin)


def ifft_mode3(xf: FreqCube | np.ndarray, *, return_residual: bool = False):
    """Inverse of :func:`fft_mode3`, returning a real cube.

    The imaginary part is discarded only if its largest magnitude is at most
    ``1e-8`` times the Frobenius norm of the result; otherwise
    :class:`SymmetryError` is raised. With ``return_residual=True`` the pair
    ``(cube, max_imag)`` is returned.
    """
    data = xf.data if isinstance(xf, FreqCube) else np.asarray(xf)
    full = np.fft.ifft(data, axis=2)
    resid = float(np.max(np.abs(full.imag))) if full.size else 0.0
    scale = float(np.linalg.norm(full.ravel()))
    if resid > IMAG_TOL * scale:
        raise SymmetryError(
            f"imaginary residual {resid:.3e} exceeds {IMAG_TOL:g} * ||x||_F = {IMAG_TOL * scale:.3e}; "
            "input is not conjugate symmetric"
        )
    out = np.ascontiguousarray(full.real)
    if return_residual:
        return out, resid
    return out


def is_conjugate_symmetric(xf: FreqCube | np.ndarray, atol: float = 1e-10) -> bool:
    """Check that slice 1 is real and ``conj(slice(i)) == slice(n3 - i + 2)`` (1-based)."""
    data = xf.data if isinstance(xf, FreqCube) else np.asarray(xf)
    n3 = data.shape[2]
    scale = max(float(np.linalg.norm(data.ravel())), 1.0)
    tol = atol * scale
    if np.max(np.abs(data[:, :, 0].imag), initial=0.0) > tol:
        return False
    for i in range(1, n3):
        if np.max(np.abs(np.conj(data[:, :, i]) - data[:, :, n3 - i]), initial=0.0) > tol:
            return False
    return True


def frobenius_norm(x) -> float:
    data = x.data if isinstance(x, FreqCube) else np.asarray(x)
    return float(np.sqrt(np.sum(np.abs(data) ** 2)))


def l1_norm(x: np.ndarray) -> float:
    return float(np.sum(np.abs(x)))


def inner(x: np.ndarray, y: np.ndarray) -> float:
    """Elementwise inner product ``sum(x * y)`` of two real cubes."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    return float(np.sum(x * y))
