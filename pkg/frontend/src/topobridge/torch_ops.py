"""torch.autograd bindings over the native bridge.

Both functions move data to CPU float64 for the native call and return
results in the input's dtype/device, so they slot into a training loop
as ordinary differentiable scalars.
"""

import torch

from .bridge import TopoToken, tv_forward_backward

__all__ = ["topological_penalty", "total_variation_penalty"]


class _TopologicalPenalty(torch.autograd.Function):
    @staticmethod
    def forward(ctx, field: torch.Tensor, k: int):
        arr = field.detach().cpu().to(torch.float64).contiguous().numpy()
        token = TopoToken(arr, k)
        value = token.forward()
        ctx.token = token
        ctx.unit_grad = None
        ctx.squeeze = field.dim() == 2
        ctx.meta = (field.dtype, field.device)
        return torch.tensor(value, dtype=field.dtype, device=field.device)

    @staticmethod
    def backward(ctx, grad_output):
        dtype, device = ctx.meta
        if ctx.unit_grad is None:
            # the token allows exactly one backward; cache the unit gradient
            # so autograd may replay this node (retain_graph, gradcheck)
            grad = ctx.token.backward(1.0)
            ctx.token.destroy()
            unit = torch.from_numpy(grad)
            if ctx.squeeze:
                unit = unit[:, :, 0]
            ctx.unit_grad = unit
        out = grad_output.to(torch.float64).cpu() * ctx.unit_grad
        return out.to(dtype=dtype, device=device), None


class _TotalVariationPenalty(torch.autograd.Function):
    @staticmethod
    def forward(ctx, field: torch.Tensor):
        arr = field.detach().cpu().to(torch.float64).contiguous().numpy()
        value, grad = tv_forward_backward(arr)
        ctx.save_for_backward(torch.from_numpy(grad))
        ctx.meta = (field.dtype, field.device)
        return torch.tensor(value, dtype=field.dtype, device=field.device)

    @staticmethod
    def backward(ctx, grad_output):
        (grad,) = ctx.saved_tensors
        dtype, device = ctx.meta
        return (grad_output.to(torch.float64).cpu() * grad).to(dtype=dtype, device=device)


def topological_penalty(field: torch.Tensor, k: int = 8) -> torch.Tensor:
    """Differentiable sum of squared lengths of all but the k longest bars."""
    return _TopologicalPenalty.apply(field, k)


def total_variation_penalty(field: torch.Tensor) -> torch.Tensor:
    """Differentiable sum of squared forward differences."""
    return _TotalVariationPenalty.apply(field)
