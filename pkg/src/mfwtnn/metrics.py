"""Full-reference quality indices for hyperspectral cubes.

All indices treat the last axis as the spectral (band) axis and assume data
scaled to ``[0, 1]``.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

__all__ = [
    "PSNR_CAP",
    "MetricsReport",
    "psnr_per_band",
    "ssim_band",
    "ssim_per_band",
    "mpsnr",
    "mssim",
    "ergas",
    "msam",
    "report",
]

PSNR_CAP = 100.0
SSIM_WIN = 11
SSIM_SIGMA = 1.5
K1, K2 = 0.01, 0.03


def _pair(ref, est):
    ref = np.asarray(ref, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    if ref.shape != est.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {est.shape}")
    if ref.ndim == 2:
        ref, est = ref[:, :, None], est[:, :, None]
    if ref.ndim != 3:
        raise ValueError("expected (n1, n2, n3) cubes")
    return ref, est


def psnr_per_band(ref, est) -> np.ndarray:
    """``10 log10(1 / MSE_b)`` per band, peak 1, capped at 100 dB."""
    ref, est = _pair(ref, est)
    mse = np.mean((ref - est) ** 2, axis=(0, 1))
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(1.0 / mse)
    return np.minimum(out, PSNR_CAP)


def mpsnr(ref, est) -> float:
    return float(np.mean(psnr_per_band(ref, est)))


def _gauss_window(size: int = SSIM_WIN, sigma: float = SSIM_SIGMA) -> np.ndarray:
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(r**2) / (2.0 * sigma**2))
    return g / g.sum()


def _filter_valid(img: np.ndarray, g: np.ndarray) -> np.ndarray:
    # separable Gaussian window, keeping only positions where it fits entirely
    h = len(g) // 2
    out = correlate1d(correlate1d(img, g, axis=0, mode="constant"), g, axis=1, mode="constant")
    return out[h : img.shape[0] - h, h : img.shape[1] - h]


def ssim_band(a, b, data_range: float = 1.0) -> float:
    """Single-scale SSIM of two images with an 11x11 Gaussian window (sigma 1.5)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if min(a.shape) < SSIM_WIN:
        raise ValueError(f"band of shape {a.shape} is smaller than the {SSIM_WIN}x{SSIM_WIN} window")
    g = _gauss_window()
    c1 = (K1 * data_range) ** 2
    c2 = (K2 * data_range) ** 2
    mu_a = _filter_valid(a, g)
    mu_b = _filter_valid(b, g)
    saa = _filter_valid(a * a, g) - mu_a**2
    sbb = _filter_valid(b * b, g) - mu_b**2
    sab = _filter_valid(a * b, g) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * sab + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (saa + sbb + c2)
    return float(np.mean(num / den))


def ssim_per_band(ref, est) -> np.ndarray:
    ref, est = _pair(ref, est)
    return np.array([ssim_band(ref[:, :, k], est[:, :, k]) for k in range(ref.shape[2])])


def mssim(ref, est) -> float:
    return float(np.mean(ssim_per_band(ref, est)))


def ergas(ref, est) -> float:
    """``100 * sqrt(mean_b(RMSE_b**2 / mean_b**2))`` with resolution ratio 1.

    Bands whose reference mean is zero are skipped with a warning.
    """
    ref, est = _pair(ref, est)
    mse = np.mean((ref - est) ** 2, axis=(0, 1))
    mean = np.mean(ref, axis=(0, 1))
    ok = mean != 0
    if not np.all(ok):
        warnings.warn(f"ERGAS: skipping {int(np.sum(~ok))} band(s) with zero reference mean", RuntimeWarning, stacklevel=2)
    if not np.any(ok):
        return float("nan")
    return float(100.0 * np.sqrt(np.mean(mse[ok] / mean[ok] ** 2)))


def msam(ref, est) -> float:
    """Mean spectral angle in degrees over pixels; zero-norm spectra are skipped."""
    ref, est = _pair(ref, est)
    r = ref.reshape(-1, ref.shape[2])
    e = est.reshape(-1, est.shape[2])
    nr = np.linalg.norm(r, axis=1)
    ne = np.linalg.norm(e, axis=1)
    ok = (nr > 0) & (ne > 0)
    if not np.all(ok):
        warnings.warn(f"SAM: skipping {int(np.sum(~ok))} zero-norm spectra", RuntimeWarning, stacklevel=2)
    if not np.any(ok):
        return float("nan")
    # 2*atan(|u - v| / |u + v|) on unit vectors: exact 0 for parallel spectra, unlike arccos
    u = r[ok] / nr[ok, None]
    v = e[ok] / ne[ok, None]
    ang = 2.0 * np.arctan2(np.linalg.norm(u - v, axis=1), np.linalg.norm(u + v, axis=1))
    return float(np.degrees(np.mean(ang)))


@dataclass
class MetricsReport:
    mpsnr: float
    mssim: float
    ergas: float
    msam: float
    psnr_bands: np.ndarray | None = None
    ssim_bands: np.ndarray | None = None

    FIELDS = ("mpsnr", "mssim", "ergas", "msam")

    def row(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow({k: repr(float(v)) for k, v in self.row().items()})
        return buf.getvalue()

    def bands_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["band", "psnr", "ssim"])
        for k, (p, s) in enumerate(zip(self.psnr_bands, self.ssim_bands), start=1):
            w.writerow([k, repr(float(p)), repr(float(s))])
        return buf.getvalue()

    def __str__(self) -> str:
        return (
            f"MPSNR  {self.mpsnr:10.3f} dB\n"
            f"MSSIM  {self.mssim:10.4f}\n"
            f"ERGAS  {self.ergas:10.3f}\n"
            f"MSAM   {self.msam:10.3f} deg"
        )


def report(ref, est, per_band: bool = True) -> MetricsReport:
    psnr_b = psnr_per_band(ref, est)
    ssim_b = ssim_per_band(ref, est)
    return MetricsReport(
        mpsnr=float(np.mean(psnr_b)),
        mssim=float(np.mean(ssim_b)),
        ergas=ergas(ref, est),
        msam=msam(ref, est),
        psnr_bands=psnr_b if per_band else None,
        ssim_bands=ssim_b if per_band else None,
    )
