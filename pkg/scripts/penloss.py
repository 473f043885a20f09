#!/usr/bin/env python3
"""
Penetration-loss command line entry point.

Usage:
    python scripts/penloss.py <command> [options]

Examples:
    python scripts/penloss.py synth --synth-config data/examples/concrete_line.json --out outputs/concrete
    python scripts/penloss.py process --manifest outputs/concrete/manifest.json --out outputs/concrete/loss.csv
    python scripts/penloss.py fit --series outputs/concrete/loss.csv --out outputs/concrete/model.json
    python scripts/penloss.py compare "Concrete Slab" "TR 38.901 Concrete Model"
    python scripts/penloss.py report --manifest outputs/concrete/manifest.json --out outputs/concrete/report
"""

import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
