"""Reproducible mixed-noise degradation of hyperspectral cubes.

Noise is applied band by band in a fixed order: Gaussian, then impulse
(which overwrites), then stripes. Output is never clipped to ``[0, 1]``.

Every band draws from its own random stream, seeded by
``(seed, kind, band)``, so the result does not depend on processing order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor3 import as_cube

__all__ = [
    "StripeSpec",
    "NoiseSpec",
    "CASES",
    "band_rng",
    "add_gaussian",
    "add_impulse",
    "add_stripes",
    "apply_noise",
    "case_spec",
    "make_case",
    "default_stripe_bands",
    "low_rank_cube",
]

_GAUSS, _IMPULSE, _STRIPE = 0, 1, 2

Level = float | tuple[float, float]


@dataclass(frozen=True)
class StripeSpec:
    """Column stripes on bands ``bands[0]..bands[1]`` (1-based, inclusive).

    ``floor(column_fraction * n2)`` columns are drawn once for the whole band
    range; each (band, column) pair gets its own offset from ``offsets``.
    """

    bands: tuple[int, int]
    column_fraction: float = 0.1
    offsets: tuple[float, float] = (-0.25, 0.25)

    def __post_init__(self):
        lo, hi = self.bands
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid stripe band range {self.bands}")
        if not 0 <= self.column_fraction <= 1:
            raise ValueError(f"column_fraction must lie in [0, 1], got {self.column_fraction}")
        if self.offsets[0] > self.offsets[1]:
            raise ValueError(f"offset range must be ordered, got {self.offsets}")


@dataclass(frozen=True)
class NoiseSpec:
    """Degradation recipe.

    ``gaussian`` is a noise standard deviation, ``impulse`` a per-band pixel
    fraction. Either may be a ``(lo, hi)`` pair, in which case each band
    draws its own level uniformly from the range.
    """

    gaussian: Level = 0.0
    impulse: Level = 0.0
    stripes: StripeSpec | None = None
    seed: int = 0
    case: int | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("gaussian", "impulse"):
            v = getattr(self, name)
            if isinstance(v, (tuple, list)):
                if len(v) != 2 or v[0] > v[1]:
                    raise ValueError(f"{name} range must be (lo, hi), got {v}")
                object.__setattr__(self, name, (float(v[0]), float(v[1])))
        glo, ghi = _bounds(self.gaussian)
        plo, phi = _bounds(self.impulse)
        if glo < 0:
            raise ValueError("gaussian level must be nonnegative")
        if plo < 0 or phi >= 1:
            raise ValueError("impulse fraction must lie in [0, 1)")


def _bounds(level: Level) -> tuple[float, float]:
    if isinstance(level, tuple):
        return level
    return float(level), float(level)


def band_rng(seed: int, kind: int, band: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, kind, band])


def _level(level: Level, rng: np.random.Generator) -> float:
    if isinstance(level, tuple):
        return float(rng.uniform(level[0], level[1]))
    return float(level)


def add_gaussian(x, g: Level, seed: int = 0) -> np.ndarray:
    """Add zero-mean Gaussian noise of standard deviation ``g`` to every band."""
    x = as_cube(x)
    out = x.copy()
    n1, n2, n3 = x.shape
    for b in range(n3):
        rng = band_rng(seed, _GAUSS, b)
        sd = _level(g, rng)
        if sd > 0:
            out[:, :, b] += rng.normal(0.0, sd, size=(n1, n2))
    return out


def add_impulse(x, p: Level, seed: int = 0) -> np.ndarray:
    """Salt-and-pepper noise: ``round(p * n1 * n2)`` pixels per band set to 0 or 1."""
    x = as_cube(x)
    out = x.copy()
    n1, n2, n3 = x.shape
    npix = n1 * n2
    for b in range(n3):
        rng = band_rng(seed, _IMPULSE, b)
        frac = _level(p, rng)
        if not 0 <= frac < 1:
            raise ValueError(f"impulse fraction must lie in [0, 1), got {frac}")
        k = int(round(frac * npix))
        if k == 0:
            continue
        idx = rng.choice(npix, size=k, replace=False)
        band = out[:, :, b].reshape(-1)
        band[idx] = rng.integers(0, 2, size=k).astype(np.float64)
        out[:, :, b] = band.reshape(n1, n2)
    return out


def add_stripes(x, spec: StripeSpec, seed: int = 0) -> np.ndarray:
    """Add constant offsets to randomly chosen columns of the bands in ``spec.bands``."""
    x = as_cube(x)
    n1, n2, n3 = x.shape
    lo, hi = spec.bands
    if hi > n3:
        raise ValueError(f"stripe bands {spec.bands} exceed n3 = {n3}")
    out = x.copy()
    ncols = int(np.floor(spec.column_fraction * n2))
    if ncols == 0:
        return out
    cols = np.sort(band_rng(seed, _STRIPE, -1 & 0xFFFF).choice(n2, size=ncols, replace=False))
    for b in range(lo - 1, hi):
        rng = band_rng(seed, _STRIPE, b)
        offs = rng.uniform(spec.offsets[0], spec.offsets[1], size=ncols)
        out[:, cols, b] += offs[np.newaxis, :]
    return out


def apply_noise(x, spec: NoiseSpec) -> np.ndarray:
    """Gaussian, then impulse, then stripes, all from ``spec.seed``."""
    y = add_gaussian(x, spec.gaussian, spec.seed)
    y = add_impulse(y, spec.impulse, spec.seed)
    if spec.stripes is not None:
        y = add_stripes(y, spec.stripes, spec.seed)
    return y


# (gaussian, impulse) per case; ranges are per-band uniform draws
CASES: dict[int, tuple[Level, Level]] = {
    1: (0.1, 0.2),
    2: (0.1, 0.3),
    3: (0.1, 0.4),
    4: (0.15, 0.2),
    5: (0.2, 0.2),
    6: (0.1, (0.2, 0.4)),
    7: ((0.1, 0.3), 0.2),
    8: ((0.1, 0.3), (0.1, 0.3)),
}


def default_stripe_bands(n3: int) -> tuple[int, int]:
    """Stripe band range used by case 8.

    80 bands -> 54..64 and 191 bands -> 70..100 (the two reference scenes);
    other depths scale the 80-band range proportionally.
    """
    if n3 == 80:
        return (54, 64)
    if n3 == 191:
        return (70, 100)
    lo = max(1, int(round(54 / 80 * n3)))
    hi = min(n3, max(lo, int(round(64 / 80 * n3))))
    return (lo, hi)


def case_spec(case_id: int, n3: int, seed: int = 0, stripe_bands: tuple[int, int] | None = None) -> NoiseSpec:
    if case_id not in CASES:
        raise ValueError(f"noise case must be 1..8, got {case_id!r}")
    g, p = CASES[case_id]
    stripes = None
    if case_id == 8:
        stripes = StripeSpec(stripe_bands or default_stripe_bands(n3))
    return NoiseSpec(gaussian=g, impulse=p, stripes=stripes, seed=seed, case=case_id)


def make_case(x, case_id: int, seed: int = 0, stripe_bands: tuple[int, int] | None = None):
    """Degrade ``x`` with one of the eight reference noise cases.

    Returns
    -------
    noisy : ndarray
    spec : NoiseSpec
    """
    x = as_cube(x)
    spec = case_spec(case_id, x.shape[2], seed, stripe_bands)
    return apply_noise(x, spec), spec


def low_rank_cube(shape=(40, 40, 20), rank: int = 3, seed: int = 0) -> np.ndarray:
    """Smooth synthetic cube with tubal rank at most ``rank``, scaled to max 1.

    A sum of ``rank`` outer products ``a_r (x) b_r (x) c_r`` with uniform
    spatial factors and slowly varying positive spectral profiles.
    """
    n1, n2, n3 = shape
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 1.0, (n1, rank))
    b = rng.uniform(0.0, 1.0, (n2, rank))
    t = np.linspace(0.0, 1.0, n3)
    c = np.stack([1.0 + 0.5 * np.sin(2 * np.pi * t * (r + 1) / 2 + r) for r in range(rank)], axis=1)
    x = np.einsum("ir,jr,kr->ijk", a, b, c)
    return x / x.max()
