#!/usr/bin/env python3
"""Dissipative Ising-chain preset; extra flags are forwarded to the CLI.

Examples:
    python scripts/run_tfim.py
    python scripts/run_tfim.py --algo algo1 --basis-count 32 --plot
"""

import sys

from oqite.cli import main

if __name__ == "__main__":
    sys.exit(main(["preset", "tfim", *sys.argv[1:]]))
