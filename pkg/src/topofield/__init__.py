"""Super-level-set persistence of image-shaped fields and the losses built on it."""

from . import errors
from .dense_losses import (
    ObjectiveWeights,
    combined_objective,
    depth_loss,
    mse_loss,
    sobel_gradient_loss,
    ssim_loss,
    total_variation,
)
from .filtration import (
    Filtration,
    as_multichannel_field,
    as_scalar_field,
    build_filtration,
    project_channels,
    project_channels_grad,
)
from .grid import FreudenthalComplex, GridShape, build_complex, euler_characteristic, vertex_neighbors
from .metrics import DepthMetrics, depth_metrics, miou_binary
from .persistence import PersistenceDiagram, PersistencePair, diagram, ph0, ph1
from .topo_loss import (
    DEFAULT_PROTECTED_BARS,
    LossGrad,
    TopoPenaltyConfig,
    topo_loss_multichannel,
    topo_loss_with_grad,
    topo_penalty,
)

__all__ = [
    "errors",
    "GridShape",
    "FreudenthalComplex",
    "build_complex",
    "vertex_neighbors",
    "euler_characteristic",
    "Filtration",
    "as_scalar_field",
    "as_multichannel_field",
    "project_channels",
    "project_channels_grad",
    "build_filtration",
    "PersistencePair",
    "PersistenceDiagram",
    "ph0",
    "ph1",
    "diagram",
    "TopoPenaltyConfig",
    "LossGrad",
    "DEFAULT_PROTECTED_BARS",
    "topo_penalty",
    "topo_loss_with_grad",
    "topo_loss_multichannel",
    "ObjectiveWeights",
    "mse_loss",
    "depth_loss",
    "sobel_gradient_loss",
    "ssim_loss",
    "total_variation",
    "combined_objective",
    "DepthMetrics",
    "depth_metrics",
    "miou_binary",
]

__version__ = "0.1.0"
