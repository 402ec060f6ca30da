# Version: v1.2
"""
nilmoore.config — All constants, logging, and startup config validation.
"""

import logging
import os

# ---------------------------------------------------------------------------
# Lattice-closure certification
# ---------------------------------------------------------------------------
# Closure of exp(L) under the group product is checked exhaustively on pairs of
# basis elements, then on random words up to this length.
# Clamp to safe minimums to avoid invalid runtime behavior from env config.
DEFAULT_WORD_LENGTH = max(1, int(os.environ.get("MOORE_CLOSURE_WORD_LENGTH", "4")))
DEFAULT_CLOSURE_SAMPLES = max(0, int(os.environ.get("MOORE_CLOSURE_SAMPLES", "200")))
DEFAULT_SEED = int(os.environ.get("MOORE_SEED", "0"))

# ---------------------------------------------------------------------------
# Enumeration defaults
# ---------------------------------------------------------------------------
DEFAULT_SPECTRUM_BOUND = max(0, int(os.environ.get("MOORE_SPECTRUM_BOUND", "2")))
DEFAULT_WORKERS = max(1, int(os.environ.get("MOORE_WORKERS", "1")))
# Largest point window the independent enumeration oracle will materialise.
MAX_ENUMERATION_WINDOW = max(1, int(os.environ.get("MOORE_MAX_WINDOW", "20000")))
DEFAULT_ACTION_SPOT_CHECKS = max(
    0, int(os.environ.get("MOORE_ACTION_SPOT_CHECKS", "50"))
)

# ---------------------------------------------------------------------------
# Fixed constants
# ---------------------------------------------------------------------------
# Dynkin terms are hardcoded through total bracket degree 5.
MAX_BCH_STEP = 5
# Structured output carries this in its "formatVersion" field.
FORMAT_VERSION = 1

# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------
METRICS_FILE = os.environ.get("MOORE_METRICS_FILE") or None

# ---------------------------------------------------------------------------
# Logging
# ---------------------------------------------------------------------------
LOG_LEVEL = os.environ.get("MOORE_LOG_LEVEL", "WARNING").upper()
logging.basicConfig(level=getattr(logging, LOG_LEVEL, logging.WARNING))
logger = logging.getLogger("nilmoore")


# ---------------------------------------------------------------------------
# Startup config validation
# ---------------------------------------------------------------------------


def validate_config() -> list[str]:
    """Return a list of configuration warnings for operator review.

    Nothing here is fatal: the CLI logs each entry at WARNING level and
    carries on with the configured values.

    Returns:
        List of human-readable warning strings (empty = config is clean).
    """
    warnings: list[str] = []

    if DEFAULT_WORD_LENGTH < 2:
        warnings.append(
            f"MOORE_CLOSURE_WORD_LENGTH={DEFAULT_WORD_LENGTH}: only pairwise "
            "generator products will be tested for lattice closure."
        )
    if DEFAULT_CLOSURE_SAMPLES == 0:
        warnings.append(
            "MOORE_CLOSURE_SAMPLES=0 disables the randomized closure words; "
            "lattice subgroups are then certified on generator pairs only."
        )
    if MAX_ENUMERATION_WINDOW < 100:
        warnings.append(
            f"MOORE_MAX_WINDOW={MAX_ENUMERATION_WINDOW} is very small — "
            "the enumeration oracle will refuse most non-trivial orbits."
        )

    return warnings
