"""
Configuration and constants for the semicomputable graph approximation toolkit.
Centralizes paths, random seed, search budgets, precision defaults and rendering style.
"""

from fractions import Fraction
from pathlib import Path

# ---------------------------------------------------------------------------
# Base paths (project root = parent of 'src')
# ---------------------------------------------------------------------------
PROJECT_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = PROJECT_ROOT / "data"
FIXTURES_DIR = DATA_DIR / "fixtures"
REPORTS_DIR = PROJECT_ROOT / "reports"
FIGURES_DIR = REPORTS_DIR / "figures"

# ---------------------------------------------------------------------------
# Canonical fixtures (data/fixtures/<name>.json)
#
# Fixture schema (one edge per line, rationals as "p/q" strings):
#   {"name": str, "dim": int,
#    "edges": [{"id": str, "kind": "arc" | "ray",
#               "points": [["p/q", ...], ...],
#               "hidden": {"start" | "end": {"width": "p/q", "delay": int,
#                                            "hulls": [{"center": [...],
#                                                       "half_width": "p/q"}]}}}]}
# Hidden endpoint coordinates in "points" are ground truth and are never
# handed to the algorithms.
# ---------------------------------------------------------------------------
CANONICAL_FIXTURES = ("straight-arc", "sine-arc", "triangle-with-tail")
EXTRA_FIXTURES = ("hidden-arc", "hidden-ray", "hidden-both")
FIXTURE_SUFFIX = ".json"

# ---------------------------------------------------------------------------
# Ambient space
# ---------------------------------------------------------------------------
DEFAULT_DIM = 2
RANDOM_STATE = 42

# ---------------------------------------------------------------------------
# Search budgets and stage caps
# ---------------------------------------------------------------------------
DEFAULT_FUEL = 200_000
OMEGA_MAX_STAGE = 8          # stages tried per Ω / covers semidecision
SUBSET_EPS_EXTRA_STAGES = 6  # stages past the first admissible margin
CONTAINMENT_EXTRA_STAGES = 4 # stages tried when certifying K ⊆ J_j
POINT_MARGIN_STAGES = 12     # precisions past the smallest radius tried by point certificates
APPROX_MAX_STAGE = 6         # hit/cover stages tried by approximate()
BOUNDING_SEARCH_MAX_EXP = 16 # largest 2^e radius tried for a bounding ball
QUADTREE_MAX_DEPTH = 10      # refinement depth for carve_compact's removal cover
INFLATE_MAX_HALVINGS = 8     # radius halvings tried by inflate_quasichain
CHAIN_MAX_ATTEMPTS = 4       # grid constructions tried per chain stage
CHAIN_COVER_STAGES = 2       # Ω stages tried when certifying a chain stage covers S'

# ---------------------------------------------------------------------------
# Precision defaults
# ---------------------------------------------------------------------------
DEFAULT_PRECISION = 10       # k for endpoint approximations in reports
DIAM_UPPER_PRECISION = 10    # diam_upper(K) uses K's 2^-10 approximation
ISOLATION_PRECISION = 20     # hull level / sqrt precision for isolation bounds
CHART_POINT_PRECISION = 16   # precision of chart points in continuity grids
CHAIN_CENTER_SLACK = 256     # link centres are placed within speed·step/256 of the curve
ENCLOSURE_MAX_PRECISION = 16 # precision cap for enclosing_ball
CONTINUITY_GRID_STEP = Fraction(1, 16)
CHART_EPS_CAP = Fraction(1, 2)
DEFAULT_WINDOW = 8           # ray window [-R, R]^n

# ---------------------------------------------------------------------------
# CLI surface
# ---------------------------------------------------------------------------
CHECK_SUITES = ("formal", "chains", "sets", "approx", "all")
OUTPUT_FORMATS = ("json", "svg", "csv")
DEFAULT_JOBS = 1
REPORT_FNAME = "{name}_report.json"
ENDPOINTS_FNAME = "{name}_endpoints.csv"
FIGURE_FNAME = "{name}.svg"
LOG_FORMAT = "%(levelname)s: %(message)s"

# ---------------------------------------------------------------------------
# Rendering style (light stroke for S, highlight for T)
# ---------------------------------------------------------------------------
SVG_HASH_SALT = "semicomputable-graphs"
S_STYLE = {"color": "#b0b0b0", "linewidth": 3.0}
T_STYLE = {"color": "#d62728", "linewidth": 1.4}
HULL_STYLE = {"edgecolor": "#7f7f7f", "linewidth": 0.6, "linestyle": "--"}
MARKER_SIZE = 6


# ---------------------------------------------------------------------------
# Ensure directories exist (called when the CLI starts)
# ---------------------------------------------------------------------------
def ensure_dirs():
    FIXTURES_DIR.mkdir(parents=True, exist_ok=True)
    REPORTS_DIR.mkdir(parents=True, exist_ok=True)
    FIGURES_DIR.mkdir(parents=True, exist_ok=True)


def fixture_path(name: str) -> Path:
    """Path of a named fixture under data/fixtures/."""
    return FIXTURES_DIR / f"{name}{FIXTURE_SUFFIX}"
