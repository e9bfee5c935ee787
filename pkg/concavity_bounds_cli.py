"""
Concavity Bounds command-line entry point.

Usage:
    python concavity_bounds_cli.py eval --bloch1 0,0,1 --bloch2 0,0,-1 --x 0.5
    python concavity_bounds_cli.py appendix --format json
    python concavity_bounds_cli.py fuzz --dims 2,3 --trials 100 --seed 7
    python concavity_bounds_cli.py critical --bloch1 0,0,1 --bloch2 0,0,-1 --x 0.5
"""

import sys

from concavity_bounds.commands import main

if __name__ == "__main__":
    sys.exit(main())
