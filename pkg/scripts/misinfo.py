#!/usr/bin/env python3
"""
Command-line entry point for the misinformation analysis toolkit.

Usage:
    python scripts/misinfo.py validate network.json
    python scripts/misinfo.py generate barbell --n1 4 --n2 2 --out tmp/barbell.json
    python scripts/misinfo.py analyze tmp/barbell.json --x0 1 0 0 0 0 0 0 0 0 0

Run with --help for every subcommand and option.
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
