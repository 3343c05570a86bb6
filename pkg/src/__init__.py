"""
Semicomputable graph approximation toolkit: core package.
"""

from src.config import (
    PROJECT_ROOT,
    DATA_DIR,
    FIXTURES_DIR,
    REPORTS_DIR,
    FIGURES_DIR,
    DEFAULT_DIM,
    RANDOM_STATE,
    ensure_dirs,
    fixture_path,
)

__all__ = [
    "PROJECT_ROOT",
    "DATA_DIR",
    "FIXTURES_DIR",
    "REPORTS_DIR",
    "FIGURES_DIR",
    "DEFAULT_DIM",
    "RANDOM_STATE",
    "ensure_dirs",
    "fixture_path",
]
