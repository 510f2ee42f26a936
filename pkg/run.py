#!/usr/bin/env python3
"""
Command-line launcher for geophase.

Runs the CLI from a source checkout without installing the package:

    python run.py robustness --state data/states/bell.json --model exact2q
"""

import sys
from pathlib import Path

# Add the project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from geophase.main import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
