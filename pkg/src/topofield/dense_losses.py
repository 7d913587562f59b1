"""Dense-prediction objectives: MSE, log-RMSE depth, Sobel gradient, SSIM,
total variation (with analytic gradient), and their weighted combination.

All losses are the plain unnormalized sums of their defining formulas; a
`mean=True` flag divides by the pixel count where numerical convenience
matters.  Only total variation and the topological penalty carry
gradients here - the supervised terms are evaluation-only.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DomainError, ShapeMismatchError
from .filtration import as_multichannel_field, as_scalar_field
from .topo_loss import LossGrad, TopoPenaltyConfig, topo_loss_multichannel

__all__ = [
    "ObjectiveWeights",
    "mse_loss",
    "depth_loss",
    "sobel_gradient_loss",
    "ssim_loss",
    "total_variation",
    "combined_objective",
]

# standard 3x3 Sobel kernels; horizontal = response to left-right change
SOBEL_HORIZONTAL = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_VERTICAL = SOBEL_HORIZONTAL.T.copy()


@dataclass(frozen=True)
class ObjectiveWeights:
    """Weights of the combined objective; defaults follow the U-Net setting."""

    lambda_d: float = 0.1
    lambda_g: float = 1.0
    lambda_s: float = 1.0
    lambda_tv: float = 1.0
    lambda_top: float = 0.001

    def __post_init__(self):
        for name in ("lambda_d", "lambda_g", "lambda_s", "lambda_tv", "lambda_top"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {value}")


def _pair(y, yhat):
    a, b = as_scalar_field(y), as_scalar_field(yhat)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"field shapes differ: {a.shape} vs {b.shape}")
    return a, b


def mse_loss(y, yhat, mean: bool = False) -> float:
    """Sum of squared differences."""
    a, b = _pair(y, yhat)
    total = float(np.sum((a - b) ** 2))
    return total / a.size if mean else total


def depth_loss(y, yhat, mean: bool = False, base: float = np.e) -> float:
    """sqrt of the summed squared log differences; values must be positive."""
    a, b = _pair(y, yhat)
    if np.any(a <= 0) or np.any(b <= 0):
        raise DomainError("depth loss requires strictly positive values")
    diff = (np.log(a) - np.log(b)) / np.log(base)
    total = np.sum(diff**2)
    return float(np.sqrt(total / a.size if mean else total))


def sobel_gradients(field) -> tuple[np.ndarray, np.ndarray]:
    """(horizontal, vertical) Sobel responses with replicate border padding."""
    arr = as_scalar_field(field)
    gh = ndimage.correlate(arr, SOBEL_HORIZONTAL, mode="nearest")
    gv = ndimage.correlate(arr, SOBEL_VERTICAL, mode="nearest")
    return gh, gv


def sobel_gradient_loss(y, yhat, mean: bool = False) -> float:
    """L1 mismatch of the two Sobel responses."""
    a, b = _pair(y, yhat)
    ah, av = sobel_gradients(a)
    bh, bv = sobel_gradients(b)
    total = float(np.sum(np.abs(av - bv) + np.abs(ah - bh)))
    return total / a.size if mean else total


def ssim_map(y, yhat, data_range: float, window: int = 7, k1: float = 0.01, k2: float = 0.03) -> np.ndarray:
    """Per-pixel SSIM with a uniform window and replicate padding."""
    a, b = _pair(y, yhat)
    if data_range <= 0:
        raise DomainError("data_range must be positive")
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    win = {"size": window, "mode": "nearest"}
    mu_a = ndimage.uniform_filter(a, **win)
    mu_b = ndimage.uniform_filter(b, **win)
    var_a = ndimage.uniform_filter(a * a, **win) - mu_a**2
    var_b = ndimage.uniform_filter(b * b, **win) - mu_b**2
    cov = ndimage.uniform_filter(a * b, **win) - mu_a * mu_b
    return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / ((mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2))


def ssim_loss(y, yhat, data_range: float = 1.0, window: int = 7, k1: float = 0.01, k2: float = 0.03) -> float:
    """(1 - mean SSIM) / 2, bounded in [0, 1]."""
    return float((1.0 - ssim_map(y, yhat, data_range, window, k1, k2).mean()) / 2.0)


def total_variation(h) -> LossGrad:
    """Sum of squared forward differences along rows and columns, per channel.

    The gradient is analytic: a difference d = h[next] - h[cur] adds +2d
    at next and -2d at cur.
    """
    arr = as_multichannel_field(h)
    squeeze = np.asarray(h).ndim == 2
    grad = np.zeros_like(arr)
    dv = arr[1:, :, :] - arr[:-1, :, :]
    dh = arr[:, 1:, :] - arr[:, :-1, :]
    value = float(np.sum(dv**2) + np.sum(dh**2))
    grad[1:, :, :] += 2.0 * dv
    grad[:-1, :, :] -= 2.0 * dv
    grad[:, 1:, :] += 2.0 * dh
    grad[:, :-1, :] -= 2.0 * dh
    return LossGrad(value, grad[:, :, 0] if squeeze else grad)


def combined_objective(
    y,
    yhat,
    h_a,
    h_b,
    weights: ObjectiveWeights = ObjectiveWeights(),
    k: int = 8,
    data_range: float = 1.0,
) -> float:
    """Weighted sum of the three supervised losses and the two regularizers.

    Terms with a zero weight are skipped entirely, so they impose no
    domain requirements on their inputs.
    """
    total = 0.0
    if weights.lambda_d:
        total += weights.lambda_d * depth_loss(y, yhat)
    if weights.lambda_g:
        total += weights.lambda_g * sobel_gradient_loss(y, yhat)
    if weights.lambda_s:
        total += weights.lambda_s * ssim_loss(y, yhat, data_range=data_range)
    if weights.lambda_tv:
        total += weights.lambda_tv * total_variation(h_a).value
    if weights.lambda_top:
        total += weights.lambda_top * topo_loss_multichannel(h_b, TopoPenaltyConfig(k=k)).value
    return float(total)
