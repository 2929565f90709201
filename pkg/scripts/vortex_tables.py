#!/usr/bin/env python3
"""Reproduce the isentropic-vortex error tables.

Table 1: density errors at t = 2 on 32/64/128 grids (CFL 0.01, r = 3.2).
Table 2: long-time errors at t = 100.. with N = 64 (CFL 0.5, eta = 0.5, r = 2.8).
"""

import argparse
from pathlib import Path

from specshock.cli import RunRequest, run_benchmark

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--table", type=int, choices=(1, 2), default=1)
    parser.add_argument("--out", type=Path, default=Path("vortex-tables"))
    parser.add_argument("--t-final", type=float, default=None,
                        help="horizon for table 2 (checkpoints at 100, 200, ...)")
    args = parser.parse_args()
    request = RunRequest(example=11, table=args.table, out=args.out,
                         t_final=args.t_final)
    raise SystemExit(run_benchmark(request))
