"""Closed-form equilibria of the truncated cubic contest, with a brute-force
oracle that certifies them against the literal game."""
from .csf import (ContestTechnology, EffortProfile, cross_partial, in_admissible_domain,
                  raw_probability, truncated_probability, tullock_cross_partial)
from .complete_info import CompleteInfoProblem, solve_complete
from .bayes import affine_bne, dropout_threshold, solve_bayes
from .errors import ContestError, InapplicableCriterion, SolverError
from .priors import Degenerate, Discrete, ShiftedBetaMixture, Uniform

__all__ = [
    "ContestTechnology", "EffortProfile", "cross_partial", "in_admissible_domain",
    "raw_probability", "truncated_probability", "tullock_cross_partial",
    "CompleteInfoProblem", "solve_complete", "affine_bne", "dropout_threshold", "solve_bayes",
    "ContestError", "InapplicableCriterion", "SolverError",
    "Degenerate", "Discrete", "ShiftedBetaMixture", "Uniform",
]

__version__ = "0.1.0"
