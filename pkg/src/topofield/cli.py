"""Command-line surface: diagram, loss, optimize, evaluate.

Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 numeric
or domain error.  All output is deterministic for fixed inputs.
"""

import argparse
import sys

import numpy as np

from . import fieldio
from .dense_losses import total_variation
from .errors import (
    DivergenceError,
    DomainError,
    EmptyMaskError,
    FieldFormatError,
    InvalidFieldError,
    InvalidShapeError,
    ShapeMismatchError,
)
from .fieldio import fmt_float
from .filtration import as_multichannel_field, project_channels
from .metrics import depth_metrics, miou_binary
from .persistence import PersistenceDiagram, diagram
from .topo_loss import DEFAULT_PROTECTED_BARS, TopoPenaltyConfig, topo_loss_multichannel, topo_penalty


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="topofield", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagram", help="compute a persistence diagram of a field")
    p.add_argument("input", nargs="+", help="field file(s); several files stack as channels")
    p.add_argument("--max-dim", type=int, choices=(0, 1), default=0)
    p.add_argument("--project", action="store_true", help="project channels even when C = 1")
    p.add_argument("--min-persistence", type=float, default=0.0, metavar="TAU",
                   help="hide pairs with persistence below TAU")
    p.add_argument("--out", help="write the diagram CSV here")

    p = sub.add_parser("loss", help="evaluate the topological penalty and total variation")
    p.add_argument("input", nargs="+")
    p.add_argument("--k", type=int, default=DEFAULT_PROTECTED_BARS, help="protected bar count")
    p.add_argument("--tv-weight", type=float, default=1.0)
    p.add_argument("--top-weight", type=float, default=0.001)
    p.add_argument("--grad-out", help="write the combined weighted gradient as raw-f32")

    p = sub.add_parser("optimize", help="gradient-descent topological simplification of a field")
    p.add_argument("input", nargs="+")
    p.add_argument("--k", type=int, default=DEFAULT_PROTECTED_BARS)
    p.add_argument("--steps", type=int, default=100, metavar="N")
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--tv-weight", type=float, default=0.0)
    p.add_argument("--top-weight", type=float, default=1.0)
    p.add_argument("--out", help="write the optimized field here")
    p.add_argument("--trace", help="write a per-step CSV trace of (step, topo, tv)")

    p = sub.add_parser("evaluate", help="score a prediction against ground truth")
    p.add_argument("gt")
    p.add_argument("pred")
    p.add_argument("--mask", help="validity mask file; nonzero marks valid pixels")
    p.add_argument("--task", choices=("depth", "seg"), default="depth")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--csv", help="also write the metrics as CSV")
    return parser


def _load_scalar(paths, project: bool = False) -> np.ndarray:
    """Read a field, projecting channels when asked or when C > 1."""
    arr = fieldio.read_field(paths)
    if arr.ndim == 3 or project:
        return project_channels(as_multichannel_field(arr))
    return arr


def cmd_diagram(args) -> int:
    field = _load_scalar(args.input, args.project)
    dgm = diagram(field, max_dim=args.max_dim)
    shown = [p for p in dgm.pairs if p.persistence >= args.min_persistence]
    if args.out:
        fieldio.write_diagram(args.out, PersistenceDiagram(shown, dgm.shape))
    for dim in range(args.max_dim + 1):
        print(f"dim{dim} {sum(1 for p in shown if p.dim == dim)}")
    return 0


def _loss_terms(arr, k):
    """Unweighted topo penalty and TV of a raw (possibly multi-channel) field."""
    mc = as_multichannel_field(arr)
    topo = topo_loss_multichannel(mc, TopoPenaltyConfig(k=k))
    tv = total_variation(mc)
    return mc, topo, tv


def cmd_loss(args) -> int:
    arr = fieldio.read_field(args.input)
    _, topo, tv = _loss_terms(arr, args.k)
    print(f"topo {fmt_float(topo.value)}")
    print(f"tv {fmt_float(tv.value)}")
    print(f"total {fmt_float(args.top_weight * topo.value + args.tv_weight * tv.value)}")
    if args.grad_out:
        combined = args.top_weight * topo.grad + args.tv_weight * tv.grad
        fieldio.write_field(args.grad_out, combined, fmt="raw-f32")
    return 0


def _stability_bound(lam_tv: float, lam_top: float, n_pairs: int) -> float:
    # conservative curvature estimate: TV Hessian norm <= 16 per channel,
    # each penalized pair contributes a 2x2 block of norm 4
    return 1.0 / (16.0 * lam_tv + 4.0 * lam_top * max(1, n_pairs) + 1e-300)


def cmd_optimize(args) -> int:
    if args.steps < 1:
        raise _UsageError("--steps must be at least 1")
    if args.lr <= 0:
        raise _UsageError("--lr must be positive")
    arr = fieldio.read_field(args.input)
    squeeze = arr.ndim == 2
    field = as_multichannel_field(arr).copy()

    def evaluate(x):
        # overflow to inf is the divergence signal handled below
        with np.errstate(over="ignore", invalid="ignore"):
            topo = topo_loss_multichannel(x, TopoPenaltyConfig(k=args.k))
            tv = total_variation(x)
            total = args.top_weight * topo.value + args.tv_weight * tv.value
            grad = args.top_weight * topo.grad + args.tv_weight * tv.grad
        return total, topo.value, tv.value, grad

    total, topo_v, tv_v, grad = evaluate(field)
    if not np.isfinite(total):
        raise DivergenceError(0)
    n_pairs = len(diagram(project_channels(field), 0).pairs)
    print(f"stability_bound {fmt_float(_stability_bound(args.tv_weight, args.top_weight, n_pairs))}")

    trace = [(0, topo_v, tv_v)]
    lr = args.lr
    stalled = False
    for step in range(1, args.steps + 1):
        if stalled or not grad.any():
            trace.append((step, topo_v, tv_v))
            continue
        accepted = False
        while lr >= 1e-30:
            candidate = field - lr * grad
            new_total, new_topo, new_tv, new_grad = evaluate(candidate)
            if not np.isfinite(new_total):
                raise DivergenceError(step)
            if new_total <= total:
                accepted = True
                break
            lr /= 2.0
        if accepted:
            field, total, topo_v, tv_v, grad = candidate, new_total, new_topo, new_tv, new_grad
        else:
            stalled = True
        trace.append((step, topo_v, tv_v))

    print(f"final_topo {fmt_float(topo_v)}")
    print(f"final_tv {fmt_float(tv_v)}")
    if args.out:
        fieldio.write_field(args.out, field[:, :, 0] if squeeze else field)
    if args.trace:
        lines = ["step,topo,tv"]
        lines += [f"{s},{fmt_float(a)},{fmt_float(b)}" for s, a, b in trace]
        with open(args.trace, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def cmd_evaluate(args) -> int:
    gt = _load_scalar([args.gt])
    pred = _load_scalar([args.pred])
    if args.task == "seg":
        rows = [("miou", miou_binary(gt, pred, args.threshold))]
    else:
        mask = None
        if args.mask:
            mask = fieldio.read_field(args.mask) != 0
        rows = list(depth_metrics(gt, pred, mask).as_dict().items())
    name_w = max(len(n) for n, _ in rows)
    for name, value in rows:
        print(f"{name:<{name_w}}  {fmt_float(value)}")
    if args.csv:
        lines = ["metric,value"] + [f"{n},{fmt_float(v)}" for n, v in rows]
        with open(args.csv, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


_COMMANDS = {
    "diagram": cmd_diagram,
    "loss": cmd_loss,
    "optimize": cmd_optimize,
    "evaluate": cmd_evaluate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FieldFormatError, ShapeMismatchError, InvalidShapeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, InvalidFieldError, EmptyMaskError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
