"""Centralized numerical tolerances.

Every module reads its tolerance constants from here so that tests and the
CLI agree on what "equal" means.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermiticity: float = 1e-10      # relative Hermiticity / structure checks
    comparison: float = 1e-9        # residuals of algebraic identities
    rank_cutoff: float = 1e-8       # singular-value cutoff for rank decisions
    zero_distance: float = 1e-7     # "is a scalar matrix" threshold
    infinite_ratio: float = 1e6     # witness ratio treated as distance infinity
    exact_permutation: float = 1e-12


TOL = Tolerances()
