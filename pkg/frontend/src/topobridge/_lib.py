"""ctypes loading of the native bridge and the evaluator trampolines.

The shared library owns tokens and gradient caching; the evaluators
registered here forward every computation to the core package, so both
routes produce bit-identical numbers.
"""

import ctypes

import numpy as np
from topofield import TopoPenaltyConfig, topo_loss_multichannel, total_variation

from ._build import ensure_library

TB_OK = 0
TB_ERR_BAD_ARG = -1
TB_ERR_NO_EVAL = -2
TB_ERR_EVAL = -3
TB_ERR_STALE = -4
TB_ERR_NOT_EVALUATED = -5

_STATUS_MESSAGES = {
    TB_ERR_BAD_ARG: "bad argument",
    TB_ERR_NO_EVAL: "no evaluator registered",
    TB_ERR_EVAL: "evaluator failed",
    TB_ERR_STALE: "stale or invalidated token",
    TB_ERR_NOT_EVALUATED: "backward before forward",
}

_DOUBLE_P = ctypes.POINTER(ctypes.c_double)
_INT64_P = ctypes.POINTER(ctypes.c_int64)

TOPO_EVAL_FN = ctypes.CFUNCTYPE(
    ctypes.c_int32,
    _DOUBLE_P, ctypes.c_uint32, ctypes.c_uint32, ctypes.c_uint32,
    ctypes.c_int32, _DOUBLE_P, _INT64_P, _INT64_P, _DOUBLE_P,
)
TV_EVAL_FN = ctypes.CFUNCTYPE(
    ctypes.c_int32,
    _DOUBLE_P, ctypes.c_uint32, ctypes.c_uint32, ctypes.c_uint32,
    _DOUBLE_P, _DOUBLE_P,
)


class BridgeError(RuntimeError):
    """A native call reported a failure status."""


def check(status: int) -> None:
    if status != TB_OK:
        raise BridgeError(_STATUS_MESSAGES.get(status, f"status {status}"))


def _as_field(data_ptr, h, w, c) -> np.ndarray:
    flat = np.ctypeslib.as_array(data_ptr, shape=((h * w * c),))
    return flat.reshape(h, w, c).copy()


@TOPO_EVAL_FN
def _topo_eval(data_ptr, h, w, c, k, value_out, nnz_out, idx_out, coef_out):
    try:
        result = topo_loss_multichannel(_as_field(data_ptr, h, w, c), TopoPenaltyConfig(k=k))
        flat = np.ascontiguousarray(result.grad, dtype=np.float64).ravel()
        nonzero = np.flatnonzero(flat).astype(np.int64)
        value_out[0] = result.value
        nnz_out[0] = nonzero.size
        if nonzero.size:
            ctypes.memmove(idx_out, nonzero.ctypes.data, nonzero.size * 8)
            coefs = np.ascontiguousarray(flat[nonzero])
            ctypes.memmove(coef_out, coefs.ctypes.data, coefs.size * 8)
        return TB_OK
    except Exception:
        return TB_ERR_EVAL


@TV_EVAL_FN
def _tv_eval(data_ptr, h, w, c, value_out, grad_out):
    try:
        result = total_variation(_as_field(data_ptr, h, w, c))
        value_out[0] = result.value
        grad = np.ascontiguousarray(result.grad, dtype=np.float64)
        ctypes.memmove(grad_out, grad.ctypes.data, grad.size * 8)
        return TB_OK
    except Exception:
        return TB_ERR_EVAL


def _load() -> ctypes.CDLL:
    lib = ctypes.CDLL(str(ensure_library()))
    lib.tb_set_topo_eval.argtypes = [TOPO_EVAL_FN]
    lib.tb_set_topo_eval.restype = None
    lib.tb_set_tv_eval.argtypes = [TV_EVAL_FN]
    lib.tb_set_tv_eval.restype = None
    lib.tb_topo_create.argtypes = [_DOUBLE_P, ctypes.c_uint32, ctypes.c_uint32, ctypes.c_uint32, ctypes.c_int32]
    lib.tb_topo_create.restype = ctypes.c_void_p
    lib.tb_topo_forward.argtypes = [ctypes.c_void_p, _DOUBLE_P]
    lib.tb_topo_forward.restype = ctypes.c_int32
    lib.tb_topo_backward.argtypes = [ctypes.c_void_p, ctypes.c_double, _DOUBLE_P]
    lib.tb_topo_backward.restype = ctypes.c_int32
    lib.tb_topo_destroy.argtypes = [ctypes.c_void_p]
    lib.tb_topo_destroy.restype = None
    lib.tb_tv_forward_backward.argtypes = [
        _DOUBLE_P, ctypes.c_uint32, ctypes.c_uint32, ctypes.c_uint32, _DOUBLE_P, _DOUBLE_P,
    ]
    lib.tb_tv_forward_backward.restype = ctypes.c_int32

    lib.tb_set_topo_eval(_topo_eval)
    lib.tb_set_tv_eval(_tv_eval)
    return lib


native = _load()
