"""Benchmark metrics: depth-estimation error/accuracy suite and binary mIoU."""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyMaskError, ShapeMismatchError
from .filtration import as_scalar_field

__all__ = ["DepthMetrics", "depth_metrics", "miou_binary"]


@dataclass(frozen=True)
class DepthMetrics:
    mae: float
    rmse: float
    abs_rel: float
    mae_log10: float
    rmse_log10: float
    delta1: float
    delta2: float
    delta3: float

    def as_dict(self) -> dict:
        return {
            "mae": self.mae,
            "rmse": self.rmse,
            "abs_rel": self.abs_rel,
            "mae_log10": self.mae_log10,
            "rmse_log10": self.rmse_log10,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta3": self.delta3,
        }


def depth_metrics(y, yhat, mask=None) -> DepthMetrics:
    """mae, rmse, abs rel, the log10 variants and strict threshold accuracies.

    abs rel divides by the prediction.  delta_k counts pixels whose
    larger of the two ratios is strictly below 1.25**k.  An optional
    boolean mask restricts evaluation to valid pixels.
    """
    a, b = as_scalar_field(y), as_scalar_field(yhat)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"field shapes differ: {a.shape} vs {b.shape}")
    if mask is not None:
        m = np.asarray(mask, dtype=bool)
        if m.shape != a.shape:
            raise ShapeMismatchError(f"mask shape {m.shape} does not match fields {a.shape}")
        a, b = a[m], b[m]
    else:
        a, b = a.ravel(), b.ravel()
    if a.size == 0:
        raise EmptyMaskError("no valid pixels to evaluate")
    if np.any(a <= 0) or np.any(b <= 0):
        raise DomainError("depth metrics require strictly positive values")

    err = a - b
    log_err = np.log10(a) - np.log10(b)
    ratio = np.maximum(a / b, b / a)
    return DepthMetrics(
        mae=float(np.mean(np.abs(err))),
        rmse=float(np.sqrt(np.mean(err**2))),
        abs_rel=float(np.mean(np.abs(err) / b)),
        mae_log10=float(np.mean(np.abs(log_err))),
        rmse_log10=float(np.sqrt(np.mean(log_err**2))),
        delta1=float(np.mean(ratio < 1.25)),
        delta2=float(np.mean(ratio < 1.25**2)),
        delta3=float(np.mean(ratio < 1.25**3)),
    )


def miou_binary(gt, pred, threshold: float = 0.5) -> float:
    """Mean of foreground and background IoU after thresholding both fields.

    Pixels strictly above the threshold are foreground.  A class with an
    empty union counts as IoU 1.
    """
    a, b = as_scalar_field(gt), as_scalar_field(pred)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"field shapes differ: {a.shape} vs {b.shape}")
    fg_a, fg_b = a > threshold, b > threshold
    ious = []
    for ca, cb in ((fg_a, fg_b), (~fg_a, ~fg_b)):
        union = np.count_nonzero(ca | cb)
        inter = np.count_nonzero(ca & cb)
        ious.append(1.0 if union == 0 else inter / union)
    return float(np.mean(ious))
