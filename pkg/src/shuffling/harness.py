"""
Executable checks of the quantitative statements on terms and corpora.

Each check returns a :class:`CheckReport`.  Running out of fuel marks an
instance skipped; only a witnessed violation of an asserted equality is a
failure, and every failure records the input that reproduces it.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from .derivation import (
    AppRule, Ax, Derivation, check, derive_empty, from_json, lam, min_derivation_normal,
    pull_back, subject_expand, subject_reduce, type_normal,
)
from .multitypes import ZERO, SemPoint, arrow, point_size, pos, types_upto
from .reduction import (
    BETA_ONLY, DEFAULT_FUEL, SIGMA_ONLY, BudgetExceeded, Mode, RedexKind, balanced_size,
    explore, find_redexes, is_neutral, is_normal_form, normalize,
)
from .search import search_derivations
from .semantics import NonEmpty, is_nonempty_semi
from .terms import Abs, App, Term, Var, parse, pretty

__all__ = [
    "CheckReport", "OpenTerm", "check_number_steps", "check_same_number",
    "check_value_theorem", "check_counterexample", "check_plotkin_closed",
    "check_reduction_sizes", "check_sigma_termination", "counterexample_derivation",
    "TERM_CHECKS", "run_corpus", "load_corpus", "bundled_corpus_path",
    "random_closed_term", "random_term", "random_normal_term", "derivations_for", "load_counterexample",
    "bundled_counterexample_path", "parse_corpus", "run_terms", "normal_terms", "ALL_CHECKS",
]

GRAPH_DEPTH = 100
GRAPH_NODES = 20000


class OpenTerm(ValueError):
    pass


@dataclass
class CheckReport:
    check_name: str
    instances_run: int = 0
    failures: list = field(default_factory=list)
    skipped: int = 0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, subject, expected, actual):
        self.failures.append((subject, expected, actual))

    def merge(self, other: CheckReport) -> CheckReport:
        self.instances_run += other.instances_run
        self.failures.extend(other.failures)
        self.skipped += other.skipped
        self.notes.extend(other.notes)
        return self

    def summary(self) -> str:
        status = "pass" if self.passed else f"FAIL ({len(self.failures)})"
        return f"{self.check_name}: {status}  run={self.instances_run} skipped={self.skipped}"

    def to_json(self) -> dict:
        return {
            "check": self.check_name,
            "passed": self.passed,
            "instances_run": self.instances_run,
            "skipped": self.skipped,
            "failures": [
                {"input": str(i), "expected": str(e), "actual": str(a)} for i, e, a in self.failures
            ],
            "notes": list(self.notes),
        }


def _subject(t: Term) -> str:
    return pretty(t)


# -- number of steps ---------------------------------------------------------------

def check_number_steps(t: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    """``leng = size(pi) - |t0|`` for the pulled-back minimal derivation ``pi``.

    Non-minimal derivations of the normal form give ``leng <= size(pi) - |t0|``.
    """
    report = CheckReport("number-steps")
    seq = normalize(t, Mode.BALANCED, fuel)
    if not seq.normal:
        report.skipped += 1
        return report
    t0 = seq.final
    pi0 = min_derivation_normal(t0)
    pi = pull_back(pi0, seq)
    report.instances_run += 1
    bal = balanced_size(t0)
    if pi0.size != bal:
        report.fail(_subject(t), f"minimal size {bal}", pi0.size)
    if seq.leng_betav != pi.size - bal:
        report.fail(_subject(t), f"leng {seq.leng_betav}", f"{pi.size} - {bal}")
    for other in _larger_derivations(t0, bal):
        report.instances_run += 1
        big = pull_back(other, seq)
        if seq.leng_betav > big.size - bal or big.size - other.size != seq.leng_betav:
            report.fail(_subject(t), f"leng {seq.leng_betav} <= {big.size} - {bal}", big.size - bal)
    return report


def _larger_derivations(t0: Term, bal: int, limit: int = 4) -> list:
    if balanced_size(t0) > 6:
        return []
    found = [d for d in search_derivations(t0, cap=1, max_size=bal + 2) if d.size > bal]
    return found[:limit]


def check_same_number(t: Term, fuel: int = DEFAULT_FUEL, kinds=None) -> CheckReport:
    """All complete balanced sequences share their number of beta_v steps and normal form."""
    report = CheckReport("same-number")
    kinds = kinds or frozenset(RedexKind)
    try:
        graph = explore(t, Mode.BALANCED, min(fuel, GRAPH_DEPTH), kinds, GRAPH_NODES)
    except BudgetExceeded:
        report.skipped += 1
        return report
    if graph.find_cycle() is not None:
        if graph.normal_nodes():
            report.fail(_subject(t), "no normal form on a cyclic graph", "normal form reachable")
        else:
            report.skipped += 1
        return report
    outcomes = graph.outcomes()
    if not outcomes:
        report.skipped += 1
        return report
    report.instances_run += 1
    lengs = {n for n, _ in outcomes}
    normals = {nf for _, nf in outcomes}
    if len(lengs) > 1 or len(normals) > 1:
        report.fail(_subject(t), "one outcome",
                    "; ".join(f"{n} steps to {pretty(nf)}" for n, nf in sorted(outcomes, key=str)))
    if graph.truncated:
        report.notes.append(f"{_subject(t)}: graph cut at depth {GRAPH_DEPTH}")
    return report


def check_value_theorem(t: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    """For a term reaching a value, the derivation at ``|- t : 0`` has size ``leng``."""
    report = CheckReport("value-theorem")
    seq = normalize(t, Mode.BALANCED, fuel)
    if not seq.normal:
        report.skipped += 1
        return report
    d = derive_empty(t, fuel)
    if d is None:
        report.notes.append(f"{_subject(t)}: normal form is not a value")
        return report
    report.instances_run += 1
    j = check(d)
    if j.env or j.type or j.subject != t:
        report.fail(_subject(t), "|- t : 0", str(j))
    if d.size != seq.leng_betav:
        report.fail(_subject(t), seq.leng_betav, d.size)
    return report


# -- the counterexample ---------------------------------------------------------------

def counterexample_derivation() -> Derivation:
    """``y:[0>0] |- (\\x.x)(y y) : 0`` with two application rules."""
    ident = lam("x", Var("x"), [Ax("x", ZERO)])
    yy = AppRule(Ax("y", pos(arrow(ZERO, ZERO))), Ax("y", ZERO))
    return AppRule(ident, yy)


def check_counterexample(d: Derivation | None = None) -> CheckReport:
    """The derivation size exceeds the size of the point it witnesses."""
    report = CheckReport("counterexample")
    d = d or counterexample_derivation()
    report.instances_run += 1
    j = check(d)
    t = j.subject
    point = SemPoint(tuple(p for _, p in j.env.items()), j.type)
    expected = parse("(\\x.x)(y y)")
    if t != expected:
        report.fail(_subject(t), pretty(expected), _subject(t))
    if d.size != 2:
        report.fail(_subject(t), "size 2", d.size)
    if point_size(point) != 1:
        report.fail(_subject(t), "point size 1", point_size(point))
    if not d.size > point_size(point):
        report.fail(_subject(t), "size > point size", f"{d.size} <= {point_size(point)}")
    if find_redexes(t, Mode.FULL):
        report.fail(_subject(t), "normal in full mode", "has a redex")
    if balanced_size(t) != d.size:
        report.fail(_subject(t), f"balanced size {d.size}", balanced_size(t))
    report.notes.append(f"size={d.size} point_size={point_size(point)}")
    return report


# -- closed terms with beta_v only -------------------------------------------------------

def check_plotkin_closed(t: Term, fuel: int = DEFAULT_FUEL) -> CheckReport:
    """Coherence of the characterizations on a closed term, using beta_v steps only."""
    if t.fv:
        raise OpenTerm(f"{pretty(t)} has free variables {', '.join(sorted(t.fv))}")
    report = CheckReport("plotkin-closed")
    beta = normalize(t, Mode.BALANCED, fuel, BETA_ONLY)
    shuf = normalize(t, Mode.BALANCED, fuel)
    if not (beta.normal and shuf.normal):
        report.skipped += 1
        if beta.normal != shuf.normal:
            report.notes.append(f"{_subject(t)}: only one strategy finished within fuel")
        return report
    report.instances_run += 1
    subject = _subject(t)
    nf = beta.final
    if not isinstance(nf, Abs):
        report.fail(subject, "closed value", pretty(nf))
    if nf != shuf.final:
        report.fail(subject, pretty(shuf.final), pretty(nf))
    d = derive_empty(t, fuel)
    if d is None:
        report.fail(subject, "|- t : 0 derivable", "no derivation")
    elif d.size != beta.leng_betav:
        report.fail(subject, f"size = leng {beta.leng_betav}", d.size)
    if not isinstance(is_nonempty_semi(t, (), fuel), NonEmpty):
        report.fail(subject, "nonempty semantics", "unknown")
    if beta.leng_betav != shuf.leng_betav:
        report.fail(subject, f"leng {beta.leng_betav}", shuf.leng_betav)
    same = check_same_number(t, fuel, BETA_ONLY)
    report.failures.extend(same.failures)
    return report


# -- derivations and steps -----------------------------------------------------------------

def derivations_for(t0: Term, rng: random.Random, extra: int = 3) -> list:
    """Derivations of a balanced normal form: the minimal one plus a few others."""
    out = [type_normal(t0)]
    if is_neutral(t0):
        for _ in range(extra):
            q = rng.choice(types_upto(3))
            out.append(type_normal(t0, q))
    elif balanced_size(t0) <= 4:
        found = search_derivations(t0, cap=2, max_size=balanced_size(t0) + 2)
        rng.shuffle(found)
        out.extend(found[:extra])
    return out


def check_reduction_sizes(d: Derivation, step) -> CheckReport:
    """Exact size change of subject reduction and its inverse on one balanced step."""
    report = CheckReport("reduction-sizes", instances_run=1)
    j = check(d)
    subject = f"{pretty(j.subject)} @ {step.kind.value} {step.label()}"
    reduced = subject_reduce(d, step)
    jr = check(reduced)
    delta = -1 if step.kind is RedexKind.BETA_V else 0
    if (jr.env, jr.type) != (j.env, j.type):
        report.fail(subject, f"{j.env} : {j.type}", f"{jr.env} : {jr.type}")
    if reduced.size - d.size != delta:
        report.fail(subject, f"size change {delta}", reduced.size - d.size)
    expanded = subject_expand(reduced, j.subject, step)
    je = check(expanded)
    if (je.env, je.subject, je.type) != (j.env, j.subject, j.type):
        report.fail(subject, str(j), str(je))
    if expanded.size != d.size:
        report.fail(subject, f"expanded size {d.size}", expanded.size)
    return report


def check_sigma_termination(t: Term, depth: int = GRAPH_DEPTH) -> CheckReport:
    """Sigma steps alone terminate and do not change derivation sizes."""
    report = CheckReport("sigma-termination", instances_run=1)
    seq = normalize(t, Mode.BALANCED, depth, SIGMA_ONLY)
    if not seq.normal:
        report.fail(_subject(t), f"sigma-normal within {depth} steps", "still reducible")
    return report


# -- corpora ----------------------------------------------------------------------------

def _check_plotkin_if_closed(t: Term, fuel: int) -> CheckReport:
    if t.fv:
        report = CheckReport("plotkin-closed")
        report.notes.append(f"{pretty(t)}: open term")
        return report
    return check_plotkin_closed(t, fuel)


TERM_CHECKS: dict = {
    "number-steps": check_number_steps,
    "same-number": check_same_number,
    "value-theorem": check_value_theorem,
    "plotkin-closed": _check_plotkin_if_closed,
}
ALL_CHECKS = tuple(TERM_CHECKS) + ("counterexample",)


def bundled_corpus_path() -> Path:
    return Path(str(resources.files("shuffling") / "data" / "paper_terms.corpus"))


def bundled_counterexample_path() -> Path:
    return Path(str(resources.files("shuffling") / "data" / "counterexample.json"))


def load_counterexample() -> Derivation:
    return from_json(json.loads(bundled_counterexample_path().read_text()))


def parse_corpus(text: str) -> list:
    """Terms of a corpus: one per line, ``#`` starts a comment, ``I`` and ``D`` are constants."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse(line, constants=True))
    return out


def load_corpus(path) -> list:
    return parse_corpus(Path(path).read_text())


def run_terms(terms: Iterable[Term], fuel: int = DEFAULT_FUEL, checks=None) -> list:
    """Every selected check on every term, in input order."""
    terms = list(terms)
    names = list(checks or ALL_CHECKS)
    unknown = [n for n in names if n not in ALL_CHECKS]
    if unknown:
        raise ValueError(f"unknown check {unknown[0]!r}; choose from {', '.join(ALL_CHECKS)}")
    reports = []
    for t in terms:
        for name in names:
            if name in TERM_CHECKS:
                reports.append(TERM_CHECKS[name](t, fuel))
    if terms and "counterexample" in names:
        reports.append(check_counterexample())
    return reports


def run_corpus(path, fuel: int = DEFAULT_FUEL, checks=None) -> list:
    return run_terms(load_corpus(path), fuel, checks)


# -- random terms ------------------------------------------------------------------------------

_BINDERS = ("x", "y", "z", "w")
_FREE = ("a", "b", "c")


def random_closed_term(rng: random.Random, max_size: int = 10) -> Term:
    """Closed term with at most ``max_size`` nodes; half the nodes try to be abstractions."""
    n = rng.randint(2, max(2, max_size))
    return _closed(rng, n, ())


def _closed(rng, n, scope):
    if n == 1:
        return Var(rng.choice(scope))
    can_app = n >= 3 and (scope or n >= 5)
    if n == 2 or not can_app or rng.random() < 0.5:
        x = rng.choice(_BINDERS)
        return Abs(x, _closed(rng, n - 1, scope + (x,)))
    lo = 1 if scope else 2
    k = rng.randint(lo, n - 1 - lo)
    return App(_closed(rng, k, scope), _closed(rng, n - 1 - k, scope))


def random_term(rng: random.Random, max_size: int = 12) -> Term:
    """Term with at most ``max_size`` nodes whose free variables come from a small pool."""
    n = rng.randint(1, max(1, max_size))
    return _closed(rng, n, _FREE)


def random_normal_term(rng: random.Random, depth: int = 3) -> Term:
    """Balanced normal form drawn from the grammar of normal forms."""
    return _normal(rng, depth, ())


def _var(rng, scope):
    return Var(rng.choice(scope + _FREE))


def _value(rng, d, scope):
    if d <= 0 or rng.random() < 0.5:
        return _var(rng, scope)
    x = rng.choice(_BINDERS)
    return Abs(x, _normal(rng, d - 1, scope + (x,)))


def _neutral(rng, d, scope):
    if d <= 0:
        return App(_var(rng, scope), _var(rng, scope))
    r = rng.random()
    if r < 0.4:
        return App(_var(rng, scope), _value(rng, d - 1, scope))
    if r < 0.7:
        return App(_var(rng, scope), _neutral(rng, d - 1, scope))
    return App(_neutral(rng, d - 1, scope), _normal(rng, d - 1, scope))


def _normal(rng, d, scope):
    r = rng.random()
    if d <= 0 or r < 0.35:
        return _value(rng, d, scope)
    if r < 0.7:
        return _neutral(rng, d, scope)
    x = rng.choice(_BINDERS)
    return App(Abs(x, _normal(rng, d - 1, scope + (x,))), _neutral(rng, d - 1, scope))


def normal_terms(rng: random.Random, count: int, max_balanced: int = 4, depth: int = 3,
                 min_balanced: int = 0) -> Iterator[Term]:
    """``count`` random balanced normal forms with balanced size in the given range."""
    made = 0
    while made < count:
        t = random_normal_term(rng, depth)
        if min_balanced <= balanced_size(t) <= max_balanced and is_normal_form(t):
            made += 1
            yield t
