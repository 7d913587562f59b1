"""Foreign-function bindings for the differentiable field penalties."""

from .bridge import BridgeError, TopoToken, topo_forward, tv_forward_backward
from .torch_ops import topological_penalty, total_variation_penalty

__all__ = [
    "BridgeError",
    "TopoToken",
    "topo_forward",
    "tv_forward_backward",
    "topological_penalty",
    "total_variation_penalty",
]

__version__ = "0.1.0"
