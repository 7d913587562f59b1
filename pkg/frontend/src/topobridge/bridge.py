"""Pythonic wrappers over the native token surface.

float32 inputs are upcast to float64 before crossing the boundary so
pairing decisions are deterministic; gradients come back float64 and
are downcast by the torch layer when needed.
"""

import ctypes

import numpy as np

from ._lib import BridgeError, check, native

__all__ = ["BridgeError", "TopoToken", "topo_forward", "tv_forward_backward"]

_DOUBLE_P = ctypes.POINTER(ctypes.c_double)


def _prepare(field) -> np.ndarray:
    arr = np.asarray(field, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise BridgeError(f"expected an (H, W) or (H, W, C) field, got shape {arr.shape}")
    return np.ascontiguousarray(arr)


class TopoToken:
    """Owns one create/forward/backward/destroy cycle of the native bridge."""

    def __init__(self, field, k: int):
        self._handle = None
        arr = _prepare(field)
        if k < 0:
            raise BridgeError("k must be non-negative")
        self.shape = arr.shape
        self._handle = native.tb_topo_create(
            arr.ctypes.data_as(_DOUBLE_P), *arr.shape, k
        )
        if not self._handle:
            raise BridgeError("token creation failed")

    def forward(self) -> float:
        value = ctypes.c_double()
        check(native.tb_topo_forward(self._handle, ctypes.byref(value)))
        return value.value

    def backward(self, upstream: float = 1.0) -> np.ndarray:
        grad = np.zeros(self.shape, dtype=np.float64)
        check(
            native.tb_topo_backward(
                self._handle, float(upstream), grad.ctypes.data_as(_DOUBLE_P)
            )
        )
        return grad

    def destroy(self) -> None:
        if self._handle:
            native.tb_topo_destroy(self._handle)
            self._handle = None

    def __del__(self):
        self.destroy()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.destroy()


def topo_forward(field, k: int) -> tuple[float, TopoToken]:
    """Evaluate the penalty and return (value, token-for-backward)."""
    token = TopoToken(field, k)
    return token.forward(), token


def tv_forward_backward(field) -> tuple[float, np.ndarray]:
    """Total variation value and dense gradient in one native call."""
    arr = _prepare(field)
    value = ctypes.c_double()
    grad = np.zeros(arr.shape, dtype=np.float64)
    check(
        native.tb_tv_forward_backward(
            arr.ctypes.data_as(_DOUBLE_P),
            *arr.shape,
            ctypes.byref(value),
            grad.ctypes.data_as(_DOUBLE_P),
        )
    )
    if np.asarray(field).ndim == 2:
        return value.value, grad[:, :, 0]
    return value.value, grad
