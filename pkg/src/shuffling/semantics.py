"""
Bounded fragments of the relational interpretation and its semi-decisions.

The interpretation of ``t`` with respect to a list of variables ``x1..xk``
is the set of points ``((P1, ..., Pk), Q)`` such that some derivation
concludes ``x1:P1, ..., xk:Pk |- t : Q``.  It is invariant under reduction,
so every point of ``t`` is read off a derivation of its balanced normal form
and then pulled back to ``t`` as a witness.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .derivation import (
    Derivation, check, derive_empty, from_json, pull_back, to_json, type_normal,
)
from .multitypes import SemPoint, parse_type
from .reduction import DEFAULT_FUEL, Mode, normalize
from .search import DEFAULT_CAP, search_derivations
from .terms import Term, is_value, parse, pretty

__all__ = [
    "SuitableList", "UnsuitableList", "InterpretationFragment", "interpret_bounded",
    "NonEmpty", "Unknown", "Yes", "No", "is_nonempty_semi", "has_empty_point_semi",
    "point_of",
]


class UnsuitableList(ValueError):
    pass


@dataclass(frozen=True)
class SuitableList:
    vars: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if len(set(self.vars)) != len(self.vars):
            raise UnsuitableList(f"repeated variable in ({', '.join(self.vars)})")

    @classmethod
    def for_term(cls, t: Term) -> SuitableList:
        return cls(tuple(sorted(t.fv)))

    def validate(self, t: Term) -> None:
        missing = sorted(t.fv - set(self.vars))
        if missing:
            raise UnsuitableList(f"free variables {', '.join(missing)} of {pretty(t)} are not listed")

    def __str__(self):
        return "(" + ", ".join(self.vars) + ")"


def _as_list(t: Term, vars) -> SuitableList:
    if vars is None:
        vars = SuitableList.for_term(t)
    elif not isinstance(vars, SuitableList):
        vars = SuitableList(tuple(vars))
    vars.validate(t)
    return vars


def point_of(d: Derivation, vars: SuitableList) -> SemPoint:
    j = check(d)
    return SemPoint(tuple(j.env[x] for x in vars.vars), j.type)


@dataclass
class InterpretationFragment:
    """Points of the interpretation found under a type-size cap, with witnesses."""

    subject: Term
    vars: SuitableList
    points: frozenset
    bound: int
    incomplete: bool = False
    witnesses: dict = field(default_factory=dict, compare=False)

    def sorted_points(self) -> list:
        return sorted(self.points, key=SemPoint.sort_key)

    def lines(self) -> list:
        return [str(p) for p in self.sorted_points()]

    def to_json(self) -> dict:
        return {
            "subject": pretty(self.subject),
            "vars": list(self.vars.vars),
            "bound": self.bound,
            "incomplete": self.incomplete,
            "points": [
                {"inputs": [str(p) for p in pt.inputs], "output": str(pt.output),
                 **({"witness": to_json(self.witnesses[pt])} if pt in self.witnesses else {})}
                for pt in self.sorted_points()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> InterpretationFragment:
        points, witnesses = set(), {}
        for entry in data["points"]:
            pt = SemPoint(tuple(parse_type(p) for p in entry["inputs"]), parse_type(entry["output"]))
            points.add(pt)
            if "witness" in entry:
                witnesses[pt] = from_json(entry["witness"])
        return cls(parse(data["subject"]), SuitableList(tuple(data["vars"])), frozenset(points),
                   data["bound"], data["incomplete"], witnesses)


def interpret_bounded(t: Term, vars=None, size_cap: int = DEFAULT_CAP, fuel: int = DEFAULT_FUEL,
                      max_size: int | None = None) -> InterpretationFragment:
    """Points whose types all have at most ``size_cap`` arrows.

    A point is found when its normal-form derivation keeps every intermediate
    type within the cap too.  If ``t`` does not normalize within ``fuel`` the
    fragment is empty and flagged incomplete.
    """
    vars = _as_list(t, vars)
    seq = normalize(t, Mode.BALANCED, fuel)
    if not seq.normal:
        return InterpretationFragment(t, vars, frozenset(), size_cap, incomplete=True)
    witnesses = {}
    for d in search_derivations(seq.final, cap=size_cap, max_size=max_size):
        pt = point_of(d, vars)
        if any(p.size > size_cap for p in pt.inputs):
            continue
        best = witnesses.get(pt)
        if best is None or d.size < best.size:
            witnesses[pt] = d
    witnesses = {pt: pull_back(d, seq) for pt, d in witnesses.items()}
    return InterpretationFragment(t, vars, frozenset(witnesses), size_cap, False, witnesses)


# -- semi-decisions ----------------------------------------------------------------

@dataclass(frozen=True)
class NonEmpty:
    witness: Derivation

    def __str__(self):
        return "nonempty"


@dataclass(frozen=True)
class Yes:
    witness: Derivation

    def __str__(self):
        return "yes"


@dataclass(frozen=True)
class No:
    """The normal form was reached and is not a value."""

    normal_form: Term

    def __str__(self):
        return f"no (normal form {pretty(self.normal_form)} is not a value)"


@dataclass(frozen=True)
class Unknown:
    reason: str = "fuel exhausted"

    def __str__(self):
        return f"unknown ({self.reason})"


def is_nonempty_semi(t: Term, vars=None, fuel: int = DEFAULT_FUEL):
    """``NonEmpty`` with a witness when ``t`` normalizes within ``fuel``, else ``Unknown``."""
    _as_list(t, vars)
    seq = normalize(t, Mode.BALANCED, fuel)
    if not seq.normal:
        return Unknown()
    return NonEmpty(pull_back(type_normal(seq.final), seq))


def has_empty_point_semi(t: Term, vars=None, fuel: int = DEFAULT_FUEL):
    """Whether the point with only empty types belongs to the interpretation of ``t``."""
    _as_list(t, vars)
    seq = normalize(t, Mode.BALANCED, fuel)
    if not seq.normal:
        return Unknown()
    if not is_value(seq.final):
        return No(seq.final)
    return Yes(derive_empty(t, fuel))


def sort_points(points: Sequence[SemPoint]) -> list:
    return sorted(points, key=SemPoint.sort_key)
