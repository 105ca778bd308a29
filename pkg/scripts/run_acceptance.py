#!/usr/bin/env python3
"""Run the acceptance gate and stream one verdict line per criterion.

Exit status follows pytest: 0 when every criterion passes.
"""

import subprocess
import sys
from pathlib import Path


def main() -> int:
    root = Path(__file__).resolve().parent.parent
    cmd = [sys.executable, "-m", "pytest", "-v",
           str(root / "tests" / "test_acceptance.py"), *sys.argv[1:]]
    return subprocess.call(cmd)


if __name__ == "__main__":
    sys.exit(main())
