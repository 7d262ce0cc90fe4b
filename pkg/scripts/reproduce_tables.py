#!/usr/bin/env python3
"""Regenerate the benchmark trace tables for orders 2 through 5.

Writes one markdown file per order into --out-dir (default: tables/).
The two-variable benchmark runs at 1000 decimal digits unless overridden,
so the solution and difference columns are reproducible digit for digit.

Usage:
  python scripts/reproduce_tables.py [--precision N] [--out-dir DIR]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from invseries.cli import main

if __name__ == "__main__":
    raise SystemExit(main(["tables", *sys.argv[1:]]))
