#!/usr/bin/env python3
"""Dissipation-rate scan comparing both drivers on the Ising preset.

Examples:
    python scripts/sweep_gamma.py
    python scripts/sweep_gamma.py --gammas 0,0.5,1.0 --tau 0.01 --steps 500
"""

import sys

from oqite.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep-gamma", *sys.argv[1:]]))
