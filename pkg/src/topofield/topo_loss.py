"""Topological penalty on dimension-0 bars and its subgradient.

The penalty sums the squared lengths of all but the k longest bars.
Births and deaths are copies of vertex values, so the subgradient routes
back to exactly the critical vertices: -2(d-b) at the birth vertex and
+2(d-b) at the death vertex of each penalized pair, accumulated when a
vertex is critical for several pairs.
"""

from dataclasses import dataclass

import numpy as np

from .filtration import as_multichannel_field, as_scalar_field, project_channels, project_channels_grad
from .persistence import PersistenceDiagram, diagram

__all__ = ["TopoPenaltyConfig", "LossGrad", "topo_penalty", "topo_loss_with_grad", "topo_loss_multichannel"]

DEFAULT_PROTECTED_BARS = 8


@dataclass(frozen=True)
class TopoPenaltyConfig:
    """k = number of longest bars exempt from the penalty (dim is fixed at 0)."""

    k: int = DEFAULT_PROTECTED_BARS
    dim: int = 0

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.dim != 0:
            raise ValueError("the penalty is defined on dimension 0 only")


@dataclass
class LossGrad:
    value: float
    grad: np.ndarray


def _penalized_pairs(dgm: PersistenceDiagram, k: int):
    pairs = sorted(dgm.in_dim(0), key=lambda p: (-p.persistence, -p.birth, p.birth_vertex))
    return pairs[k:]


def topo_penalty(dgm: PersistenceDiagram, config: TopoPenaltyConfig = TopoPenaltyConfig()) -> float:
    """Sum of (d - b)^2 over every dim-0 pair beyond the k longest."""
    return float(sum((p.death - p.birth) ** 2 for p in _penalized_pairs(dgm, config.k)))


def topo_loss_with_grad(f, config: TopoPenaltyConfig = TopoPenaltyConfig()) -> LossGrad:
    """Penalty value plus its subgradient with respect to the field values."""
    field = as_scalar_field(f)
    dgm = diagram(field, max_dim=0)
    grad = np.zeros(field.size, dtype=np.float64)
    value = 0.0
    for p in _penalized_pairs(dgm, config.k):
        gap = p.death - p.birth
        value += gap * gap
        grad[p.birth_vertex] += -2.0 * gap
        grad[p.death_vertex] += 2.0 * gap
    return LossGrad(float(value), grad.reshape(field.shape))


def topo_loss_multichannel(h, config: TopoPenaltyConfig = TopoPenaltyConfig()) -> LossGrad:
    """Penalty of the channel-norm projection, gradient pushed back to (H, W, C)."""
    arr = as_multichannel_field(h)
    projected = project_channels(arr)
    scalar = topo_loss_with_grad(projected, config)
    return LossGrad(scalar.value, project_channels_grad(arr, scalar.grad))
