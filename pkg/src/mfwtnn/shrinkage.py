"""Proximal and thresholding operators.

``fw_prox`` is the frequency-weighted tensor SVT and ``dw_prox`` the
double-weighted log shrinkage. Both work on the mode-3 spectrum: slice ``k``
is shrunk with the effective threshold ``n3 * tau * w[k]``, which is what the
unnormalized FFT turns ``tau * sum_k w_k ||Xbar_k||_*  +  0.5 ||X - Y||_F**2``
into once the problem is split per slice.

Only slices ``0 .. n3 // 2`` are decomposed. The remaining ones are filled
by conjugation, which halves the SVD work and keeps the result real.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor3 import FreqCube, fft_mode3, ifft_mode3

__all__ = [
    "NumericalError",
    "SliceSVD",
    "slice_svd",
    "soft_threshold",
    "svt_slice",
    "log_shrink_scalar",
    "log_shrink",
    "fw_prox",
    "dw_prox",
    "fw_prox_spectrum",
    "dw_prox_spectrum",
    "fw_norm",
    "fw_log_norm",
    "check_weights",
]


class NumericalError(ArithmeticError):
    """An SVD did not converge."""


@dataclass(frozen=True)
class SliceSVD:
    """Thin SVD ``m = u @ diag(s) @ v.conj().T`` of one frequency slice."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


def slice_svd(m: np.ndarray, index: int | None = None) -> SliceSVD:
    """Full-rank (not truncated) SVD of a single slice."""
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        where = "" if index is None else f" of slice {index}"
        raise NumericalError(f"SVD{where} failed: {exc}") from exc
    return SliceSVD(u, s, vh.conj().T)


def soft_threshold(x, t: float) -> np.ndarray:
    """Elementwise ``sign(x) * max(|x| - t, 0)``."""
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def svt_slice(m: np.ndarray, t: float, index: int | None = None) -> np.ndarray:
    """Singular value thresholding ``U diag(max(s - t, 0)) V^H``."""
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    svd = slice_svd(m, index)
    s = np.maximum(svd.s - t, 0.0)
    return (svd.u * s) @ svd.v.conj().T


def log_shrink_scalar(y: float, tau: float, eps: float) -> float:
    """Local minimizer of ``tau * log(|x| + eps) + 0.5 * (x - y)**2``.

    With ``c1 = |y| - eps`` and ``c2 = c1**2 - 4 * (tau - eps * |y|)`` the
    result is 0 when ``c2 <= 0`` and ``sign(y) * (c1 + sqrt(c2)) / 2``
    otherwise. The formula is a local minimizer only for
    ``0 < eps < min(sqrt(tau), tau / |y|)``; clipping ``eps`` into that range
    is the caller's job.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    a = abs(y)
    c1 = a - eps
    c2 = c1 * c1 - 4.0 * (tau - eps * a)
    if c2 <= 0:
        return 0.0
    return float(np.sign(y)) * (c1 + np.sqrt(c2)) / 2.0


def _clip_eps(s: np.ndarray, tau: float, eps: float) -> np.ndarray:
    # eps' = 0.9 * min(sqrt(tau), tau / s) wherever eps breaks the local-minimum bound
    with np.errstate(divide="ignore"):
        bound = np.minimum(np.sqrt(tau), np.where(s > 0, tau / s, np.inf))
    return np.where(eps < bound, eps, 0.9 * bound)


def log_shrink(s: np.ndarray, tau: float, eps: float) -> np.ndarray:
    """Vectorised log shrinkage of nonnegative singular values.

    ``eps`` is clipped per value into the range where the closed form is a
    local minimizer. Zero inputs map to zero.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    s = np.asarray(s, dtype=np.float64)
    e = _clip_eps(s, tau, eps)
    c1 = s - e
    c2 = c1 * c1 - 4.0 * (tau - e * s)
    out = np.where(c2 > 0, (c1 + np.sqrt(np.maximum(c2, 0.0))) / 2.0, 0.0)
    out[s <= 0] = 0.0
    return out


def check_weights(w, n3: int) -> np.ndarray:
    """Validate a per-frequency weight vector: length, positivity and conjugate pairing."""
    w = np.asarray(w, dtype=np.float64).ravel()
    if w.shape[0] != n3:
        raise ValueError(f"expected {n3} frequency weights, got {w.shape[0]}")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise ValueError("frequency weights must be finite and strictly positive")
    # w[k] == w[n3 - k] for k = 1..n3-1 (0-based)
    if n3 > 1 and not np.allclose(w[1:], w[1:][::-1], rtol=1e-12, atol=0.0):
        raise ValueError("frequency weights violate conjugate pairing w_k == w_{n3-k+2}")
    return w


def _independent_slices(n3: int) -> range:
    return range(n3 // 2 + 1)


def _is_real_slice(k: int, n3: int) -> bool:
    return k == 0 or (n3 % 2 == 0 and k == n3 // 2)


def _shrink_spectrum(y, w, tau, shrink):
    """Apply ``shrink(s, tau_k)`` to the singular values of every frequency slice.

    Returns the shrunk spectrum and the list of output singular values per
    slice (conjugate slices included).
    """
    y = np.asarray(y, dtype=np.float64)
    n1, n2, n3 = y.shape
    w = check_weights(w, n3)
    yf = fft_mode3(y)
    out = np.zeros_like(yf.data)
    svals: list[np.ndarray | None] = [None] * n3
    for k in _independent_slices(n3):
        tau_k = n3 * (tau * w[k])
        m = yf.data[:, :, k]
        if _is_real_slice(k, n3):
            m = m.real
        svd = slice_svd(m, k)
        s = shrink(svd.s, tau_k)
        out[:, :, k] = (svd.u * s) @ svd.v.conj().T
        svals[k] = s
        if 0 < k and n3 - k != k:
            out[:, :, n3 - k] = np.conj(out[:, :, k])
            svals[n3 - k] = s
    return FreqCube(out, yf.origin), svals


def _soft(s, t):
    return np.maximum(s - t, 0.0)


def fw_prox_spectrum(y, w, tau: float):
    """Spectrum of :func:`fw_prox` before the inverse FFT, with per-slice singular values."""
    if tau < 0:
        raise ValueError(f"tau must be nonnegative, got {tau}")
    return _shrink_spectrum(y, w, tau, _soft)


def dw_prox_spectrum(y, w, tau: float, eps: float):
    """Spectrum of :func:`dw_prox` before the inverse FFT, with per-slice singular values."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return _shrink_spectrum(y, w, tau, lambda s, t: log_shrink(s, t, eps))


def fw_prox(y, w, tau: float) -> np.ndarray:
    """Frequency-weighted tensor SVT.

    Minimizes ``tau * sum_k w[k] * ||Xbar_k||_* + 0.5 * ||X - y||_F**2``.

    Parameters
    ----------
    y : ndarray, shape (n1, n2, n3)
    w : array_like, shape (n3,)
        Positive weights with ``w[k] == w[n3 - k]``.
    tau : float
        Nonnegative threshold.
    """
    spec, _ = fw_prox_spectrum(y, w, tau)
    return ifft_mode3(spec)


def dw_prox(y, w, tau: float, eps: float) -> np.ndarray:
    """Double-weighted log shrinkage of the t-SVD singular values.

    Each singular value of frequency slice ``k`` is replaced by the log
    shrinkage of itself with threshold ``n3 * tau * w[k]``.
    """
    spec, _ = dw_prox_spectrum(y, w, tau, eps)
    return ifft_mode3(spec)


def _slice_singular_values(x) -> list[np.ndarray]:
    xf = fft_mode3(np.asarray(x, dtype=np.float64))
    return [np.linalg.svd(xf.data[:, :, k], compute_uv=False) for k in range(xf.shape[2])]


def fw_norm(x, w, svals: list[np.ndarray] | None = None) -> float:
    """Frequency-weighted nuclear norm ``sum_k w[k] * ||Xbar_k||_*``."""
    if svals is None:
        svals = _slice_singular_values(x)
    return float(sum(wk * np.sum(s) for wk, s in zip(w, svals)))


def fw_log_norm(x, w, eps: float, svals: list[np.ndarray] | None = None) -> float:
    """Log surrogate ``sum_k w[k] * sum_i log(sigma_i(Xbar_k) + eps)``."""
    if svals is None:
        svals = _slice_singular_values(x)
    return float(sum(wk * np.sum(np.log(s + eps)) for wk, s in zip(w, svals)))
