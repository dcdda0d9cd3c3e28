#!/usr/bin/env python3
"""Run the shipped Penrose-inequality stability sweep (target mass 0.5).

Equivalent to:  imcf-lab run scenarios/rpi_sweep.json --out out
"""

import sys
from pathlib import Path

from imcf_lab.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(
        main(["run", str(ROOT / "scenarios" / "rpi_sweep.json"), "--out",
              str(ROOT / "out")] + sys.argv[1:])
    )
