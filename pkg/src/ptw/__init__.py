"""Predicate transformer workbench for a finite-state while language."""

from ptw.errors import (
    CertificateError, ParseError, PtwError, ScopeError, SpaceMismatch,
    StateSpaceTooLarge,
)
from ptw.parser import load_spec, parse_expr, parse_formula, parse_program, parse_spec
from ptw.statespace import StateSet, StateSpace, enumerate_space
from ptw.transformers import Engine, sp, slp, wlp, wp

__version__ = "0.1.0"

__all__ = [
    "CertificateError", "Engine", "ParseError", "PtwError", "ScopeError",
    "SpaceMismatch", "StateSet", "StateSpace", "StateSpaceTooLarge",
    "enumerate_space", "load_spec", "parse_expr", "parse_formula",
    "parse_program", "parse_spec", "slp", "sp", "wlp", "wp",
]
