#!/usr/bin/env python3
"""Run the shipped positive-mass stability sweep and write reports to out/.

Equivalent to:  imcf-lab run scenarios/pmt_sweep.json --out out
"""

import sys
from pathlib import Path

from imcf_lab.cli import main

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(
        main(["run", str(ROOT / "scenarios" / "pmt_sweep.json"), "--out",
              str(ROOT / "out")] + sys.argv[1:])
    )
