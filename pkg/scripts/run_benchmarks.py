#!/usr/bin/env python3
"""Run every benchmark at its preset configuration against the pass gates.

Equivalent to `specshock --suite all`; handy when the package is not installed
as a console script.
"""

import sys

from specshock.cli import run_suite

if __name__ == "__main__":
    selection = sys.argv[1] if len(sys.argv) > 1 else "all"
    sys.exit(run_suite(selection))
