"""Convex and log-based shrinkage of t-SVD singular values.

Run with ``python demos/02_shrinkage_operators.py``.
"""

# %%
import numpy as np

from mfwtnn.shrinkage import dw_prox, fw_prox, log_shrink_scalar
from mfwtnn.tensor3 import fft_mode3
from mfwtnn.weights import WeightState

# %% [markdown]
# Scalar view first. Soft thresholding subtracts the same amount from every
# value. The log penalty barely touches large values and removes small ones
# completely.

# %%
tau, eps = 0.5, 0.05
print("   y    soft    log")
for y in (0.2, 0.6, 1.0, 2.0, 4.0):
    soft = max(y - tau, 0.0)
    print(f"{y:4.1f}  {soft:6.3f}  {log_shrink_scalar(y, tau, eps):6.3f}")

# %% [markdown]
# Tensor view. A rank-2 signal plus noise: compare the leading singular
# values of the zero-frequency slice before and after each operator.

# %%
rng = np.random.default_rng(1)
n1, n2, n3 = 20, 20, 10
signal = np.einsum("ir,jr,kr->ijk", rng.uniform(size=(n1, 2)), rng.uniform(size=(n2, 2)), rng.uniform(1, 2, (n3, 2)))
y = signal + 0.1 * rng.standard_normal(signal.shape)

w = WeightState().update(y).w[2]
print("frequency weights (mode 3):", np.round(w, 3))


def top_svals(z, k=0, m=4):
    return np.round(np.linalg.svd(fft_mode3(z).data[:, :, k], compute_uv=False)[:m], 2)


for name, z in (("input", y), ("fw_prox", fw_prox(y, w, 0.05)), ("dw_prox", dw_prox(y, w, 0.05, 0.1))):
    err = np.linalg.norm(z - signal) / np.linalg.norm(signal)
    print(f"{name:8s} slice-0 singular values {top_svals(z)}  rel. error {err:.3f}")
