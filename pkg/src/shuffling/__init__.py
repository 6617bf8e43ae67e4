"""Balanced shuffling calculus: terms, reduction, multi-types and derivations."""
from .terms import Abs, App, Term, Var, parse, pretty
from .reduction import Mode, RedexKind, ReductionStep, ReductionSequence, normalize
from .multitypes import NegType, PosType, ZERO, Environment, parse_type
from .derivation import Ax, AppRule, LamRule, check, size

__all__ = [
    "Abs", "App", "Term", "Var", "parse", "pretty",
    "Mode", "RedexKind", "ReductionStep", "ReductionSequence", "normalize",
    "NegType", "PosType", "ZERO", "Environment", "parse_type",
    "Ax", "AppRule", "LamRule", "check", "size",
]
