"""Finite-model toolkit for the monadic modal logic MGrz and its relatives."""

from .decision import Countermodel, NoCountermodelUpTo, SearchConfig, decide, enumerate_frames
from .errors import InputError, InvariantViolation, MgrzError
from .filtration import selective_filtration, verify_bounds, verify_truth_lemma
from .frames import MKFrame, classify, in_class
from .semantics import Model, eval, frame_validity
from .syntax import parse_formula, render_formula, subformula_closure, translate_t

__all__ = [
    "Countermodel",
    "InputError",
    "InvariantViolation",
    "MKFrame",
    "MgrzError",
    "Model",
    "NoCountermodelUpTo",
    "SearchConfig",
    "classify",
    "decide",
    "enumerate_frames",
    "eval",
    "frame_validity",
    "in_class",
    "parse_formula",
    "render_formula",
    "selective_filtration",
    "subformula_closure",
    "translate_t",
    "verify_bounds",
    "verify_truth_lemma",
]

__version__ = "0.1.0"
