#!/usr/bin/env python3
"""Damped two-level-system preset; extra flags are forwarded to the CLI.

Examples:
    python scripts/run_tls.py
    python scripts/run_tls.py --algo algo2 --shots 8192 --seeds 1,2,3 --plot
"""

import sys

from oqite.cli import main

if __name__ == "__main__":
    sys.exit(main(["preset", "tls", *sys.argv[1:]]))
