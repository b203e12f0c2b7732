"""Exact computation in U(gl_N), the state/Markov-operator calculus on it, and
the push/block particle dynamics it describes."""

from .exactalg import LaurentPoly, MultiPoly, parse_poly
from .ugln import NCElement, apply_pt, is_central, normal_form, parse_element, state
from .center import evaluate_at, evaluate_levels, harish_chandra, psi, psi_sub, pt_expand
from .surface import InterlacedArray, McResult, densely_packed, mc_expectation, run
from .covariance import PathPoint, cov, solve_ckl
from .oracle import ctmc_expectation, detform_n2, state_diff_oracle

__all__ = [
    "LaurentPoly", "MultiPoly", "parse_poly",
    "NCElement", "apply_pt", "is_central", "normal_form", "parse_element", "state",
    "evaluate_at", "evaluate_levels", "harish_chandra", "psi", "psi_sub", "pt_expand",
    "InterlacedArray", "McResult", "densely_packed", "mc_expectation", "run",
    "PathPoint", "cov", "solve_ckl",
    "ctmc_expectation", "detform_n2", "state_diff_oracle",
]
