"""Multi-modal, frequency-weighted tensor nuclear norm restoration of data cubes.

The top-level namespace re-exports the pieces most scripts need; the
submodules hold the rest.
"""

__version__ = "0.1.0"

from .metrics import MetricsReport, ergas, mpsnr, msam, mssim, report
from .noise import NoiseSpec, StripeSpec, apply_noise, make_case
from .shrinkage import dw_prox, fw_prox, log_shrink_scalar, soft_threshold, svt_slice
from .solver import DenoiseResult, SolverConfig, denoise
from .tensor3 import FreqCube, fft_mode3, ifft_mode3, ipermute, permute
from .weights import ModalWeights, default_lambda, default_tau

__all__ = [
    "DenoiseResult",
    "FreqCube",
    "MetricsReport",
    "ModalWeights",
    "NoiseSpec",
    "SolverConfig",
    "StripeSpec",
    "apply_noise",
    "default_lambda",
    "default_tau",
    "denoise",
    "dw_prox",
    "ergas",
    "fft_mode3",
    "fw_prox",
    "ifft_mode3",
    "ipermute",
    "log_shrink_scalar",
    "make_case",
    "mpsnr",
    "msam",
    "mssim",
    "permute",
    "report",
    "soft_threshold",
    "svt_slice",
]
