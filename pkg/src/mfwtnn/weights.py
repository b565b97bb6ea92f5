"""Adaptive frequency weights, modal weights and default regularization parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor3 import FreqCube, fft_mode3, permute

__all__ = [
    "DELTA",
    "D_FLOOR",
    "ModalWeights",
    "WeightState",
    "raw_weights",
    "schedule_weights",
    "default_lambda",
    "default_tau",
]

DELTA = 1e-6
# keeps the log denominator positive for slices with ||.||_F^2 <= 1
D_FLOOR = 1e-2


@dataclass(frozen=True)
class ModalWeights:
    """Mixing weights of the three mode permutations; they sum to one."""

    alpha: tuple[float, float, float] = (1 / 2.2, 1 / 2.2, 0.2 / 2.2)

    def __post_init__(self):
        a = tuple(float(v) for v in self.alpha)
        if len(a) != 3 or any(v < 0 for v in a):
            raise ValueError(f"alpha must be three nonnegative reals, got {self.alpha}")
        if abs(sum(a) - 1.0) > 1e-12:
            raise ValueError(f"alpha must sum to 1, got sum {sum(a)!r}")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def from_alpha3(cls, alpha3: float = 0.2) -> "ModalWeights":
        """``alpha = (1, 1, alpha3) / (2 + alpha3)``: equal weight for both spatial modes."""
        s = 2.0 + alpha3
        return cls((1.0 / s, 1.0 / s, alpha3 / s))

    def __getitem__(self, i: int) -> float:
        return self.alpha[i]

    def __iter__(self):
        return iter(self.alpha)


def raw_weights(xf: FreqCube | np.ndarray, delta: float = DELTA) -> np.ndarray:
    """Reciprocal-log slice energies ``h_k = 1 / (max(log ||Xbar_k||_F^2, 1e-2) + delta)``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    data = xf.data if isinstance(xf, FreqCube) else np.asarray(xf)
    energy = np.sum(np.abs(data) ** 2, axis=(0, 1))
    with np.errstate(divide="ignore"):
        d = np.maximum(np.log(energy), D_FLOOR) + delta
    return 1.0 / d


def schedule_weights(h, c1: float, c2: float) -> np.ndarray:
    """Iterative weight rule ``w_k = c1 * h_k / max(h) + c2``.

    Weights lie in ``[c2, c1 + c2]``; with ``c1 = 0`` every weight equals ``c2``.
    """
    h = np.asarray(h, dtype=np.float64)
    hmax = np.max(h) if h.size else 0.0
    if not hmax > 0:
        raise ValueError("raw weights must contain a positive entry")
    if c1 < 0 or c2 < 0:
        raise ValueError(f"c1 and c2 must be nonnegative, got {c1}, {c2}")
    return c1 * (h / hmax) + c2


@dataclass
class WeightState:
    """Raw values ``h[p]`` and active weights ``w[p]`` for the three modes (index 0..2)."""

    c1: float = 0.6
    c2: float = 0.6
    delta: float = DELTA
    h: list[np.ndarray] = field(default_factory=list)
    w: list[np.ndarray] = field(default_factory=list)

    def update(self, x: np.ndarray) -> "WeightState":
        """Recompute every mode's weights from the current estimate ``x``."""
        self.h = [raw_weights(fft_mode3(permute(x, p), origin=p), self.delta) for p in (1, 2, 3)]
        self.w = [schedule_weights(h, self.c1, self.c2) for h in self.h]
        return self


def default_lambda(dims, lambda_s: float = 0.011, alpha: ModalWeights | None = None) -> float:
    """Sparse-term weight scaled to the cube size.

    ``lambda_s * sum_p alpha_p / sqrt(max(n_{p+1}, n_{p+2}) * n_p)`` with
    indices taken cyclically.
    """
    n1, n2, n3 = (int(v) for v in dims)
    if min(n1, n2, n3) < 1:
        raise ValueError(f"dims must be positive, got {dims}")
    a1, a2, a3 = (alpha or ModalWeights()).alpha
    return lambda_s * (
        a1 / np.sqrt(max(n2, n3) * n1)
        + a2 / np.sqrt(max(n3, n1) * n2)
        + a3 / np.sqrt(max(n1, n2) * n3)
    )


def default_tau(sigma: float, tau_n: float = 1e-4) -> float:
    """Gaussian-term weight ``tau_n / sigma`` for noise standard deviation ``sigma``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return tau_n / sigma
