#!/usr/bin/env python3
"""Measure empirical convergence orders across the builtin corpus.

For each requested order the script solves the problem, then reports both
order estimators next to the nominal value, plus the asymptotic error
constant for one-variable problems.  Useful for eyeballing how far beyond
the tabulated orders 2-5 the generic builder keeps its promised rate.

Usage:
  python scripts/convergence_study.py [--builtin NAME] [--orders 2,3,4,5,6,7]
                                      [--precision N]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from invseries.analysis import (
    error_constant_check,
    estimate_order_known_root,
    estimate_order_successive,
)
from invseries.corpus import BUILTIN_NAMES, builtin_problem
from invseries.errors import InsufficientDataError
from invseries.numerics import Context, format_scalar, norm_inf
from invseries.scheme import SchemeSpec
from invseries.solver import SolveConfig, solve


def fmt(value):
    return f"{value:.4f}"


def run(name: str, orders, precision: int) -> int:
    ctx = Context(precision)
    problem = builtin_problem(name, ctx)
    print(f"# {name} at {precision} digits")
    print("| order | iters | known-root | successive | error-constant (meas/pred) |")
    print("|---|---|---|---|---|")
    for k in orders:
        trace = solve(problem, SolveConfig(order=k, precision=precision))
        cells = [str(k), str(len(trace.rows) - 1)]
        final = trace.rows[-1].x
        root = min(problem.known_roots, key=lambda r: norm_inf(final.sub(r)))
        for estimator in (
            lambda: estimate_order_known_root(trace, root),
            lambda: estimate_order_successive(trace),
        ):
            try:
                cells.append(fmt(estimator().summary))
            except InsufficientDataError:
                cells.append("n/a")
        if problem.nvars == 1 and k + 1 <= 8:
            try:
                measured, predicted = error_constant_check(
                    problem, trace, SchemeSpec(k)
                )
                cells.append(
                    f"{format_scalar(measured, 4)} / {format_scalar(predicted, 4)}"
                )
            except InsufficientDataError:
                cells.append("n/a")
        else:
            cells.append("-")
        print("| " + " | ".join(cells) + " |")
    return 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--builtin", default="scalar-square", choices=BUILTIN_NAMES)
    parser.add_argument("--orders", default="2,3,4,5,6,7")
    parser.add_argument("--precision", type=int, default=1000)
    args = parser.parse_args()
    orders = [int(tok) for tok in args.orders.split(",") if tok.strip()]
    raise SystemExit(run(args.builtin, orders, args.precision))
