"""ADMM solver for MFWTNN / NonMFWTNN mixed-noise restoration.

The observation is split as ``Y = X + S + N`` (low-rank, sparse, Gaussian)
with auxiliary copies ``Z_p`` of the mode-p permutations of ``X``. One
iteration updates, in order, ``Z_p`` (proximal step), ``X`` (closed-form
quadratic), ``S`` (soft threshold), ``N`` (ridge), the multipliers, the
penalties and finally the frequency weights.

Conventions worth knowing:

* ``Z_p`` and ``Gamma_p`` live in permuted orientation.
* The X-step denominator is ``sum(mu) + beta``, the exact stationarity
  condition of its quadratic subproblem.
* Multipliers ascend along the constraint residual, ``Gamma_p += mu_p (X_p - Z_p)``.
* Warm start is ``X = Y``, ``Z_p = permute(Y, p)``, ``S = N = 0``.
* Stopping needs both a relative X change below ``tol`` and constraint
  residuals (``Y - X - S - N`` and every ``X_p - Z_p``, relative to
  ``||Y||``) below ``feas_tol``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import shrinkage
from .tensor3 import as_cube, ifft_mode3, ipermute, l1_norm, permute
from .weights import ModalWeights, WeightState, default_lambda, default_tau

__all__ = [
    "MODELS",
    "SolverConfig",
    "SolverState",
    "IterationRecord",
    "DenoiseResult",
    "init_state",
    "update_z",
    "update_x",
    "update_s",
    "update_n",
    "update_multipliers_and_penalties",
    "iterate",
    "denoise",
]

log = logging.getLogger(__name__)

MODELS = ("mfwtnn", "nonmfwtnn", "tnn")


@dataclass(frozen=True)
class SolverConfig:
    """Every scalar of the restoration algorithm.

    ``lam`` and ``tau`` may be left as ``None``: ``lam`` then follows
    :func:`~mfwtnn.weights.default_lambda` and ``tau`` follows
    :func:`~mfwtnn.weights.default_tau` with ``sigma`` (which must be set).

    ``model="tnn"`` is the single-mode convex baseline: ``alpha = (0, 0, 1)``
    and uniform weights ``c2`` regardless of the other fields.
    ``adaptive_weights=False`` keeps the frequency weights fixed at ``c2``
    and hands the prox uniform weights with the threshold scaled instead.
    """

    model: str = "nonmfwtnn"
    alpha: ModalWeights = field(default_factory=ModalWeights)
    lam: float | None = None
    lambda_s: float = 0.011
    tau: float | None = None
    tau_n: float = 1e-4
    sigma: float | None = None
    c1: float = 0.6
    c2: float = 0.6
    eps_log: float = 0.1
    delta: float = 1e-6
    mu0: float = 1e-3
    beta0: float = 1e-3
    rho: float = 1.2
    mu_max: float = 1e10
    tol: float = 1e-5
    feas_tol: float = 1e-3
    max_iters: int = 100
    adaptive_weights: bool = True

    def __post_init__(self):
        model = str(self.model).lower().replace("-", "").replace("_", "")
        if model == "tnnbaseline":
            model = "tnn"
        if model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODELS}")
        object.__setattr__(self, "model", model)
        if not isinstance(self.alpha, ModalWeights):
            object.__setattr__(self, "alpha", ModalWeights(tuple(self.alpha)))
        if not self.rho > 1:
            raise ValueError(f"rho must exceed 1, got {self.rho}")
        if not (0 < self.mu0 <= self.mu_max and 0 < self.beta0 <= self.mu_max):
            raise ValueError("mu0 and beta0 must be positive and not exceed mu_max")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not self.feas_tol > 0:
            raise ValueError(f"feas_tol must be positive, got {self.feas_tol}")
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if self.c1 < 0 or not self.c2 > 0:
            raise ValueError("need c1 >= 0 and c2 > 0 for strictly positive weights")
        if self.lam is not None and self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if self.tau is not None and self.tau < 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        if self.eps_log <= 0:
            raise ValueError(f"eps_log must be positive, got {self.eps_log}")

    @property
    def effective_alpha(self) -> tuple[float, float, float]:
        return (0.0, 0.0, 1.0) if self.model == "tnn" else self.alpha.alpha

    @property
    def uses_adaptive_weights(self) -> bool:
        return self.adaptive_weights and self.model != "tnn"

    def resolve_lambda(self, dims) -> float:
        if self.lam is not None:
            return float(self.lam)
        return default_lambda(dims, self.lambda_s, ModalWeights(self.effective_alpha))

    def resolve_tau(self) -> float:
        if self.tau is not None:
            return float(self.tau)
        if self.sigma is None:
            raise ValueError("either tau or sigma must be given")
        return default_tau(self.sigma, self.tau_n)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha"] = list(self.alpha.alpha)
        return d


@dataclass
class IterationRecord:
    iteration: int
    residual: float
    z_residual: float
    rel_change: float
    objective: float
    mu: float
    beta: float
    seconds: float


@dataclass
class SolverState:
    """Mutable iterate of the solver.

    ``z`` and ``gamma`` hold one cube per mode, each in mode-p orientation.
    """

    x: np.ndarray
    s: np.ndarray
    nn: np.ndarray
    z: list[np.ndarray]
    gamma: list[np.ndarray]
    lam: np.ndarray
    mu: list[float]
    beta: float
    weights: WeightState
    iter: int = 0
    history: list[IterationRecord] = field(default_factory=list)
    # singular values of each Z_p's spectrum from the last prox, for the objective log
    svals: list[list[np.ndarray] | None] = field(default_factory=lambda: [None, None, None])


@dataclass
class DenoiseResult:
    x_hat: np.ndarray
    s_hat: np.ndarray
    n_hat: np.ndarray
    iterations: int
    converged: bool
    history: list[IterationRecord]
    lam: float
    tau: float


def init_state(y: np.ndarray, config: SolverConfig) -> SolverState:
    y = as_cube(y, "y")
    ws = WeightState(c1=config.c1, c2=config.c2, delta=config.delta)
    if config.uses_adaptive_weights:
        ws.update(y)
    else:
        ws.w = [np.full(y.shape[i], config.c2) for i in range(3)]
    return SolverState(
        x=y.copy(),
        s=np.zeros_like(y),
        nn=np.zeros_like(y),
        z=[permute(y, p) for p in (1, 2, 3)],
        gamma=[np.zeros_like(permute(y, p)) for p in (1, 2, 3)],
        lam=np.zeros_like(y),
        mu=[config.mu0] * 3,
        beta=config.beta0,
        weights=ws,
    )


def _prox(arg, w, tau, config):
    if config.model == "nonmfwtnn":
        return shrinkage.dw_prox_spectrum(arg, w, tau, config.eps_log)
    return shrinkage.fw_prox_spectrum(arg, w, tau)


def update_z(state: SolverState, config: SolverConfig, p: int) -> np.ndarray:
    """Proximal step for ``Z_p`` on ``X_p + Gamma_p / mu_p`` with threshold ``alpha_p / mu_p``."""
    i = p - 1
    mu = state.mu[i]
    arg = permute(state.x, p) + state.gamma[i] / mu
    a = config.effective_alpha[i]
    if a == 0:
        state.svals[i] = None
        return arg
    tau = a / mu
    if config.uses_adaptive_weights:
        w = state.weights.w[i]
    else:
        # uniform weights c2, folded into the threshold
        w = np.ones(arg.shape[2])
        tau = config.c2 * tau
    spec, svals = _prox(arg, w, tau, config)
    state.svals[i] = svals
    return ifft_mode3(spec)


def update_x(state: SolverState, config: SolverConfig, y: np.ndarray) -> np.ndarray:
    """Closed-form minimizer of the X subproblem (denominator ``sum(mu) + beta``)."""
    beta = state.beta
    num = beta * (y - state.s - state.nn + state.lam / beta)
    for i, p in enumerate((1, 2, 3)):
        num = num + state.mu[i] * ipermute(state.z[i] - state.gamma[i] / state.mu[i], p)
    return num / (sum(state.mu) + beta)


def update_s(state: SolverState, config: SolverConfig, y: np.ndarray, lam: float) -> np.ndarray:
    beta = state.beta
    return shrinkage.soft_threshold(y - state.x - state.nn + state.lam / beta, lam / beta)


def update_n(state: SolverState, config: SolverConfig, y: np.ndarray, tau: float) -> np.ndarray:
    beta = state.beta
    return beta * (y - state.x - state.s + state.lam / beta) / (2.0 * tau + beta)


def update_multipliers_and_penalties(state: SolverState, config: SolverConfig, y: np.ndarray) -> SolverState:
    """Dual ascent, geometric penalty growth capped at ``mu_max``, then weight refresh."""
    for i, p in enumerate((1, 2, 3)):
        state.gamma[i] = state.gamma[i] + state.mu[i] * (permute(state.x, p) - state.z[i])
    state.lam = state.lam + state.beta * (y - state.x - state.s - state.nn)
    state.mu = [min(config.rho * m, config.mu_max) for m in state.mu]
    state.beta = min(config.rho * state.beta, config.mu_max)
    if config.uses_adaptive_weights:
        state.weights.update(state.x)
    return state


def _objective(state: SolverState, config: SolverConfig, lam: float, tau: float) -> float:
    total = lam * l1_norm(state.s) + tau * float(np.sum(state.nn**2))
    for i in range(3):
        a = config.effective_alpha[i]
        if a == 0 or state.svals[i] is None:
            continue
        w = state.weights.w[i]
        if config.model == "nonmfwtnn":
            total += a * shrinkage.fw_log_norm(None, w, config.eps_log, state.svals[i])
        else:
            total += a * shrinkage.fw_norm(None, w, state.svals[i])
    return total


def iterate(state: SolverState, config: SolverConfig, y: np.ndarray, lam: float, tau: float) -> float:
    """Run one full iteration in place; returns the relative change of X."""
    x_prev = state.x
    for p in (1, 2, 3):
        state.z[p - 1] = update_z(state, config, p)
    state.x = update_x(state, config, y)
    state.s = update_s(state, config, y, lam)
    state.nn = update_n(state, config, y, tau)
    # objective is logged with the weights that were used for this prox
    obj = _objective(state, config, lam, tau)
    update_multipliers_and_penalties(state, config, y)
    state.iter += 1
    change = float(np.linalg.norm(state.x - x_prev) / max(np.linalg.norm(x_prev), 1.0))
    ynorm = max(float(np.linalg.norm(y)), 1e-300)
    zres = max(float(np.linalg.norm(permute(state.x, p) - state.z[p - 1])) for p in (1, 2, 3))
    state.history.append(
        IterationRecord(
            iteration=state.iter,
            residual=float(np.linalg.norm(y - state.x - state.s - state.nn)) / ynorm,
            z_residual=zres / ynorm,
            rel_change=change,
            objective=obj,
            mu=state.mu[0],
            beta=state.beta,
            seconds=0.0,
        )
    )
    return change


def denoise(y, config: SolverConfig | None = None, **overrides) -> DenoiseResult:
    """Restore ``y`` by the configured low-rank model.

    Parameters
    ----------
    y : ndarray, shape (n1, n2, n3)
        Observed cube, expected in ``[0, 1]``.
    config : SolverConfig, optional
        Defaults to the NonMFWTNN configuration. Keyword ``overrides`` are
        applied on top with :func:`dataclasses.replace`.

    Returns
    -------
    DenoiseResult
    """
    config = config or SolverConfig()
    if overrides:
        config = replace(config, **overrides)
    y = as_cube(y, "y")
    if y.min() < 0 or y.max() > 1:
        log.warning("input outside [0, 1] (range %.3g..%.3g); parameter defaults assume [0, 1]", y.min(), y.max())
    lam = config.resolve_lambda(y.shape)
    tau = config.resolve_tau()
    state = init_state(y, config)
    converged = False
    for _ in range(int(config.max_iters)):
        t0 = time.perf_counter()
        change = iterate(state, config, y, lam, tau)
        state.history[-1].seconds = time.perf_counter() - t0
        rec = state.history[-1]
        log.debug("iter %d  change %.3e  residual %.3e  obj %.6g", rec.iteration, change, rec.residual, rec.objective)
        # a small step alone is not enough: X can stall while thresholds are still huge
        if change <= config.tol and max(rec.residual, rec.z_residual) <= config.feas_tol:
            converged = True
            break
    return DenoiseResult(
        x_hat=state.x,
        s_hat=state.s,
        n_hat=state.nn,
        iterations=state.iter,
        converged=converged,
        history=state.history,
        lam=lam,
        tau=tau,
    )
