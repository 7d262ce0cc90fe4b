"""Empirical convergence-order estimation and trace rendering.

Order estimates are log-ratio measurements taken inside a usable window:
magnitudes must sit strictly between 10^(-precision+100) (above the
precision floor) and 10^-2 (past the pre-asymptotic phase).  An estimate
is anchored at an iteration whose magnitude is inside the window; the
successor it needs must also sit above the floor, since an iterate that
has already saturated carries only rounding residue.  Summaries are
medians, which keeps the single boundary iteration from dominating.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass

from .errors import InsufficientDataError
from .expr import eval_jet
from .numerics import MPVector, format_scalar, norm_inf
from .scheme import SchemeSpec, build_terms, evaluate_system
from .solver import IterationTrace
from .taylor import derivative_tensor


@dataclass(frozen=True)
class OrderEstimate:
    method: str  # "known-root" or "successive-steps"
    estimates: tuple  # (iteration, p_hat) pairs
    summary: float
    window: tuple  # anchor iteration indices

    def __repr__(self):
        return (
            f"OrderEstimate(method={self.method!r}, summary={self.summary:.3f}, "
            f"n={len(self.estimates)})"
        )


def _window(ctx, precision):
    return ctx.pow10(-precision + 100), ctx.mp.mpf("1e-2")


def estimate_order_known_root(trace: IterationTrace, root: MPVector) -> OrderEstimate:
    """Per-iteration p = log e(n+1) / log e(n) on distances to a known root."""
    ctx = trace.problem.context
    lower, upper = _window(ctx, trace.precision)
    root_residual = norm_inf(evaluate_system(trace.problem, root))
    if not root_residual < lower:
        raise ValueError(
            f"supplied root has residual {format_scalar(root_residual, 5)}; "
            "not accurate enough for error measurements"
        )
    errors = [norm_inf(row.x.sub(root)) for row in trace.rows]
    anchors = [n for n, e in enumerate(errors) if lower < e < upper]
    if len(anchors) < 3:
        raise InsufficientDataError(
            f"only {len(anchors)} iterations inside the usable window (need 3)"
        )
    log = ctx.mp.log
    estimates = []
    for n in anchors:
        # the successor must also sit above the precision floor: iterates
        # that have saturated leave only rounding residue behind
        if n + 1 < len(errors) and errors[n + 1] > lower:
            estimates.append((n, float(log(errors[n + 1]) / log(errors[n]))))
    if not estimates:
        raise InsufficientDataError("no anchor has a usable successor error")
    summary = statistics.median(p for _, p in estimates)
    return OrderEstimate("known-root", tuple(estimates), summary, tuple(anchors))


def estimate_order_successive(trace: IterationTrace) -> OrderEstimate:
    """Root-free estimate from step norms: log(s(n+1)/s(n)) / log(s(n)/s(n-1))."""
    ctx = trace.problem.context
    lower, upper = _window(ctx, trace.precision)
    steps = trace.step_norms()
    if len(steps) < 4:
        raise InsufficientDataError(f"only {len(steps)} steps recorded (need 4)")
    log = ctx.mp.log
    estimates = []
    anchors = []
    for k in range(1, len(steps) - 1):
        s_prev, s, s_next = steps[k - 1], steps[k], steps[k + 1]
        if not lower < s < upper:
            continue
        anchors.append(k + 1)  # step k belongs to iteration k+1
        if s_prev > 0 and s_next > lower and s != s_prev:
            estimates.append(
                (k + 1, float(log(s_next / s) / log(s / s_prev)))
            )
    if not estimates:
        raise InsufficientDataError("no step triple inside the usable window")
    summary = statistics.median(p for _, p in estimates)
    return OrderEstimate("successive-steps", tuple(estimates), summary, tuple(anchors))


def error_constant_check(problem, trace: IterationTrace, spec: SchemeSpec):
    """(measured, predicted) asymptotic error constants for a 1-variable problem.

    Measured is e(n+1)/e(n)^k at the last usable iteration.  Predicted is
    |a_k * f'(root)^k| where a_k is the first series coefficient the
    order-k update drops, taken from the tensors built at the root.
    """
    if problem.nvars != 1:
        raise ValueError("error_constant_check needs a 1-variable problem")
    if not problem.known_roots:
        raise ValueError("error_constant_check needs a known root")
    ctx = problem.context
    k = spec.order
    final_x = trace.rows[-1].x
    root = min(problem.known_roots, key=lambda r: norm_inf(final_x.sub(r)))
    deltas = [norm_inf(row.x.sub(root)) for row in trace.rows]
    lower, upper = _window(ctx, trace.precision)

    anchors = [
        n
        for n in range(len(deltas) - 1)
        if lower < deltas[n] < upper and deltas[n + 1] > lower
    ]
    if anchors:
        n = anchors[-1]
        measured = deltas[n + 1] / deltas[n] ** k
    elif any(
        deltas[n + 1] <= lower and deltas[n] > 0 for n in range(len(deltas) - 1)
    ):
        measured = ctx.zero  # landed on the root to the precision floor
    else:
        raise InsufficientDataError("no usable error pair in the trace")

    # first dropped coefficient: build one extra term at the root
    terms = build_terms(problem, root, SchemeSpec(k + 1))
    a_k = terms[k - 1].value[(0,) * (k + 1)] / math.factorial(k)
    fprime = derivative_tensor(eval_jet(problem.equations[0], root, 1, ctx), 1)[0]
    predicted = abs(a_k * fprime**k)
    return measured, predicted


TABLE_FORMATS = ("markdown", "csv", "json")
_STEP_DIGITS = 10


def _cells(trace: IterationTrace, sig_digits: int):
    has_root = trace.problem.known_roots != ()
    header = (
        ["iter"]
        + list(trace.problem.var_names)
        + ["step_norm", "residual_norm"]
        + (["error_vs_root"] if has_root else [])
    )
    body = []
    for row in trace.rows:
        cells = [str(row.index)]
        cells += [format_scalar(v, sig_digits, strip_zeros=True) for v in row.x]
        cells.append(
            "-" if row.step_norm is None else format_scalar(row.step_norm, _STEP_DIGITS)
        )
        cells.append(format_scalar(row.residual_norm, _STEP_DIGITS))
        if has_root:
            cells.append(format_scalar(row.error_vs_root, _STEP_DIGITS))
        body.append(cells)
    return header, body


def render_table(trace: IterationTrace, sig_digits: int = 50, format: str = "markdown") -> str:
    """Deterministic text table of a trace.

    Solution columns carry ``sig_digits`` significant digits and the step,
    residual and error columns ten; mantissas are truncated toward zero,
    never rounded, so equal traces render byte-identically.
    """
    if format not in TABLE_FORMATS:
        raise ValueError(f"format must be one of {TABLE_FORMATS}, got {format!r}")
    header, body = _cells(trace, sig_digits)
    if format == "markdown":
        lines = [
            "| " + " | ".join(header) + " |",
            "|" + "|".join("---" for _ in header) + "|",
        ]
        lines += ["| " + " | ".join(cells) + " |" for cells in body]
        return "\n".join(lines)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
        return buf.getvalue().rstrip("\n")
    rows = [dict(zip(header, cells)) for cells in body]
    return json.dumps(
        {"status": trace.status.value, "columns": header, "rows": rows}, indent=2
    )
