"""Hybrid modal logic over transitive frames.

Parsing and printing, model checking on finite hybrid Kripke models,
block-tree satisfiability over transitive and complete frames, the full
set of logic-to-logic translations, and a brute-force finite-model oracle.
"""

from .formula import (
    Formula,
    FragmentError,
    ParseError,
    diamond_closure,
    fragment_of,
    free_vars,
    parse,
    print_formula,
    strip_free,
)
from .model import HybridModel, load_model, save_model
from .checker import eval_formula, global_eval, phi_type
from .blocktree import FiniteRep, compute_types, realize, verify
from .solver import Budget, SatResult, sat_complete, sat_transitive
from .oracle import brute_fo_sat, brute_global_sat, brute_sat, enumerate_models

__all__ = [
    "Formula",
    "FragmentError",
    "ParseError",
    "diamond_closure",
    "fragment_of",
    "free_vars",
    "parse",
    "print_formula",
    "strip_free",
    "HybridModel",
    "load_model",
    "save_model",
    "eval_formula",
    "global_eval",
    "phi_type",
    "FiniteRep",
    "compute_types",
    "realize",
    "verify",
    "Budget",
    "SatResult",
    "sat_complete",
    "sat_transitive",
    "brute_fo_sat",
    "brute_global_sat",
    "brute_sat",
    "enumerate_models",
]
