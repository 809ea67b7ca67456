"""First-swap law of uniform sorting networks and its semicircle limit.

Exact rational pmf and Stein identities, Beta/semicircle laws, Wasserstein
distances with certified bounds, and brute-force reduced-word enumeration.
"""

from ._accel import USE_NUMBA
from .continuous import BETA_3_2, SEMICIRCLE, ContinuousLaw, solve_stein_equation
from .exact import FirstLetterLaw, moments, pmf, psi
from .reduced_words import ReducedWord, enumerate_words, stanley_count, yb_stats
from .wasserstein import distance_report, scaled_distance_report, wasserstein_1d

__version__ = "0.1.0"

__all__ = [
    "BETA_3_2",
    "ContinuousLaw",
    "FirstLetterLaw",
    "ReducedWord",
    "SEMICIRCLE",
    "USE_NUMBA",
    "distance_report",
    "enumerate_words",
    "moments",
    "pmf",
    "psi",
    "scaled_distance_report",
    "solve_stein_equation",
    "stanley_count",
    "wasserstein_1d",
    "yb_stats",
]
