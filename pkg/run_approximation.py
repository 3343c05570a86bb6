"""
Command-line entry point.
Run from project root: python run_approximation.py approximate --fixture data/fixtures/sine-arc.json --epsilon 1/16
"""

import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
