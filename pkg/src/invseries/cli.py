"""Command-line interface.

Exit codes: 0 converged (or all order checks passed), 1 usage or input
errors, 2 diverged or iteration cap reached, 3 singular Jacobian.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import (
    TABLE_FORMATS,
    estimate_order_known_root,
    estimate_order_successive,
    render_table,
)
from .corpus import BUILTIN_NAMES, builtin_problem
from .errors import InsufficientDataError, InvseriesError
from .expr import parse_problem
from .numerics import Context, norm_inf
from .solver import SolveConfig, Status, solve

_STATUS_EXIT = {
    Status.CONVERGED: 0,
    Status.DIVERGED: 2,
    Status.MAX_ITERS: 2,
    Status.SINGULAR_JACOBIAN: 3,
}

ORDER_CHECK_SLACK = 0.2


class _UsageError(Exception):
    pass


def _add_problem_flags(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--problem", metavar="PATH", help="problem file to solve")
    src.add_argument(
        "--builtin",
        metavar="NAME",
        help=f"builtin problem, one of: {', '.join(BUILTIN_NAMES)}",
    )


def _add_solve_flags(p):
    p.add_argument("--precision", type=int, default=1000, metavar="DIGITS")
    p.add_argument("--max-iters", type=int, default=30, metavar="N")
    p.add_argument("--tol", default=None, metavar="X", help="step-norm stop threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invseries",
        description="Build and run iteration schemes of arbitrary convergence order.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem and print the trace")
    _add_problem_flags(p_solve)
    p_solve.add_argument("--order", type=int, default=2, metavar="K")
    _add_solve_flags(p_solve)
    p_solve.add_argument("--format", choices=TABLE_FORMATS, default="markdown")
    p_solve.add_argument(
        "--digits", type=int, default=50, metavar="N", help="solution display digits"
    )

    p_tables = sub.add_parser(
        "tables", help="write benchmark traces for orders 2-5 as markdown files"
    )
    p_tables.add_argument("--precision", type=int, default=1000, metavar="DIGITS")
    p_tables.add_argument("--out-dir", default="tables", metavar="DIR")

    p_check = sub.add_parser(
        "order-check", help="measure convergence orders against their nominal values"
    )
    _add_problem_flags(p_check)
    p_check.add_argument(
        "--orders", default="2,3,4,5", metavar="K,K,...", help="comma-separated orders"
    )
    _add_solve_flags(p_check)
    return parser


def _load_problem(args, ctx: Context):
    if args.builtin is not None:
        return builtin_problem(args.builtin, ctx)
    return parse_problem(Path(args.problem).read_text(encoding="utf-8"), ctx)


def _check_order(order: int):
    if order < 2:
        raise _UsageError(f"--order must be at least 2, got {order}")


def _solve(args, problem):
    config = SolveConfig(
        order=args.order,
        precision=args.precision,
        max_iters=args.max_iters,
        tol=args.tol,
    )
    return solve(problem, config)


def cmd_solve(args) -> int:
    _check_order(args.order)
    ctx = Context(args.precision)
    problem = _load_problem(args, ctx)
    trace = _solve(args, problem)
    print(render_table(trace, args.digits, args.format))
    if args.format != "json":
        print(f"status: {trace.status.value}")
    return _STATUS_EXIT[trace.status]


def cmd_tables(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = Context(args.precision)
    problem = builtin_problem("incas-2var", ctx)
    for order in (2, 3, 4, 5):
        config = SolveConfig(order=order, precision=args.precision)
        trace = solve(problem, config)
        path = out_dir / f"table_order{order}.md"
        path.write_text(render_table(trace, 50, "markdown") + "\n", encoding="utf-8")
        print(f"wrote {path}")
    return 0


def _nearest_root(problem, trace):
    final = trace.rows[-1].x
    return min(problem.known_roots, key=lambda r: norm_inf(final.sub(r)))


def cmd_order_check(args) -> int:
    try:
        orders = [int(tok) for tok in args.orders.split(",") if tok.strip()]
    except ValueError:
        raise _UsageError(f"--orders must be a comma-separated list, got {args.orders!r}")
    if not orders:
        raise _UsageError("--orders lists no orders")
    for order in orders:
        _check_order(order)

    ctx = Context(args.precision)
    problem = _load_problem(args, ctx)
    print("| order | known_root | successive | verdict |")
    print("|---|---|---|---|")
    all_ok = True
    for order in orders:
        config = SolveConfig(
            order=order,
            precision=args.precision,
            max_iters=args.max_iters,
            tol=args.tol,
        )
        trace = solve(problem, config)
        summaries = []
        cells = []
        if problem.known_roots:
            try:
                est = estimate_order_known_root(trace, _nearest_root(problem, trace))
                summaries.append(est.summary)
                cells.append(f"{est.summary:.3f}")
            except InsufficientDataError:
                cells.append("insufficient-data")
        else:
            cells.append("no-root")
        try:
            est = estimate_order_successive(trace)
            summaries.append(est.summary)
            cells.append(f"{est.summary:.3f}")
        except InsufficientDataError:
            cells.append("insufficient-data")
        if not summaries:
            verdict = "no-data (converged too fast to measure)"
        elif all(abs(s - order) <= ORDER_CHECK_SLACK for s in summaries):
            verdict = "ok"
        else:
            verdict = "FAIL"
            all_ok = False
        print(f"| {order} | {cells[0]} | {cells[1]} | {verdict} |")
    return 0 if all_ok else 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; fold into the error exit code
        return 0 if not exc.code else 1
    handlers = {
        "solve": cmd_solve,
        "tables": cmd_tables,
        "order-check": cmd_order_check,
    }
    try:
        return handlers[args.command](args)
    except (_UsageError, InvseriesError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
