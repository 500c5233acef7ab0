#!/usr/bin/env python3
"""Basis-size scan for the doubled-register driver on the Ising preset.

Examples:
    python scripts/sweep_paulis.py
    python scripts/sweep_paulis.py --counts 8,16,32 --seeds 138 --out scan.csv
"""

import sys

from oqite.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep-paulis", *sys.argv[1:]]))
