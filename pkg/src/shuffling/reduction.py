"""
Reduction in the shuffling calculus.

Three root rules are available::

    (\\x.t) v      ->  t{v/x}             beta_v
    (\\x.t) u s    ->  (\\x.t s) u         sigma1   (x not free in s)
    v ((\\x.s) u)  ->  (\\x.v s) u         sigma3   (x not free in v)

They are closed under arbitrary contexts (full mode) or under balanced
contexts only, which enter an abstraction body solely when the abstraction
is applied.  The side conditions of the sigma rules are met by renaming the
binder when needed, so a sigma redex is never dropped.

Positions are tuples of ``"fun"``, ``"arg"`` and ``"body"`` labels.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .terms import Abs, App, Term, Var, fresh_name, is_value, names, pretty, subst

__all__ = [
    "RedexKind", "Mode", "ReductionStep", "ReductionSequence", "NormalClass",
    "InvalidStep", "BudgetExceeded", "ALL_KINDS", "BETA_ONLY", "SIGMA_ONLY",
    "FUN", "ARG", "BODY", "is_balanced", "subterm_at", "root_kind",
    "contract", "find_redexes", "apply_step", "classify", "is_neutral",
    "is_normal_form", "normalize", "enumerate_sequences", "balanced_size",
    "Equivalence", "shuf_equiv_semi", "ReductionGraph", "explore",
    "DEFAULT_FUEL", "DEFAULT_ENUM_FUEL", "DEFAULT_MAX_SEQUENCES",
]

FUN, ARG, BODY = "fun", "arg", "body"

DEFAULT_FUEL = 10000
DEFAULT_ENUM_FUEL = 25
DEFAULT_MAX_SEQUENCES = 100000


class RedexKind(str, enum.Enum):
    BETA_V = "beta_v"
    SIGMA1 = "sigma1"
    SIGMA3 = "sigma3"

    def __str__(self):
        return self.value


class Mode(str, enum.Enum):
    BALANCED = "balanced"
    FULL = "full"

    def __str__(self):
        return self.value


ALL_KINDS = frozenset(RedexKind)
BETA_ONLY = frozenset({RedexKind.BETA_V})
SIGMA_ONLY = frozenset({RedexKind.SIGMA1, RedexKind.SIGMA3})


class InvalidStep(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ReductionStep:
    path: tuple
    kind: RedexKind
    mode: Mode = Mode.BALANCED

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))
        object.__setattr__(self, "kind", RedexKind(self.kind))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.BALANCED and not is_balanced(self.path):
            raise InvalidStep(f"position {'.'.join(self.path)} is not balanced")

    def label(self) -> str:
        return ".".join(self.path) if self.path else "root"


@dataclass
class ReductionSequence:
    start: Term
    steps: list = field(default_factory=list)
    normal: bool = False

    @property
    def final(self) -> Term:
        return self.steps[-1][1] if self.steps else self.start

    @property
    def terms(self) -> list:
        return [self.start] + [t for _, t in self.steps]

    @property
    def leng_betav(self) -> int:
        return sum(1 for s, _ in self.steps if s.kind is RedexKind.BETA_V)

    def __len__(self):
        return len(self.steps)

    def trace_lines(self, unicode: bool = False) -> list:
        return [
            f"{i}: {step.kind} @ {step.label()}  ⇒  {pretty(t, unicode)}"
            for i, (step, t) in enumerate(self.steps, 1)
        ]

    def to_json(self) -> dict:
        return {
            "start": pretty(self.start),
            "steps": [
                {"kind": s.kind.value, "path": list(s.path), "mode": s.mode.value,
                 "term": pretty(t)}
                for s, t in self.steps
            ],
            "normal": self.normal,
            "leng_bv": self.leng_betav,
            "result": pretty(self.final),
        }

    @classmethod
    def from_json(cls, data: dict) -> ReductionSequence:
        from .terms import parse
        steps = [
            (ReductionStep(tuple(s["path"]), RedexKind(s["kind"]), Mode(s["mode"])), parse(s["term"]))
            for s in data["steps"]
        ]
        return cls(parse(data["start"]), steps, bool(data["normal"]))

    def __eq__(self, other):
        if not isinstance(other, ReductionSequence):
            return NotImplemented
        return (self.start == other.start and self.normal == other.normal
                and self.steps == other.steps)


def is_balanced(path: Iterable[str]) -> bool:
    """A body step is balanced only when it enters the function of an application."""
    path = tuple(path)
    return all(step != BODY or (i > 0 and path[i - 1] == FUN) for i, step in enumerate(path))


def subterm_at(t: Term, path: Iterable[str]) -> Term:
    for step in path:
        if step == FUN and isinstance(t, App):
            t = t.fun
        elif step == ARG and isinstance(t, App):
            t = t.arg
        elif step == BODY and isinstance(t, Abs):
            t = t.body
        else:
            raise InvalidStep(f"no {step!r} child in {pretty(t)}")
    return t


def root_kind(t: Term) -> RedexKind | None:
    if not isinstance(t, App):
        return None
    f, a = t.fun, t.arg
    if isinstance(f, Abs) and is_value(a):
        return RedexKind.BETA_V
    if isinstance(f, App) and isinstance(f.fun, Abs):
        return RedexKind.SIGMA1
    if is_value(f) and isinstance(a, App) and isinstance(a.fun, Abs):
        return RedexKind.SIGMA3
    return None


def _avoid_capture(lam: Abs, moving: Term, extra=frozenset()) -> Abs:
    """Rename the binder of ``lam`` if it would capture a free variable of ``moving``."""
    if lam.binder not in moving.fv:
        return lam
    y = fresh_name(lam.binder, moving.fv | names(lam.body) | extra)
    return Abs(y, subst(lam.body, lam.binder, Var(y)))


def contract(t: Term, kind: RedexKind) -> Term:
    if root_kind(t) is not kind:
        raise InvalidStep(f"{pretty(t)} is not a {kind} redex")
    if kind is RedexKind.BETA_V:
        return subst(t.fun.body, t.fun.binder, t.arg)
    if kind is RedexKind.SIGMA1:
        lam, u, s = t.fun.fun, t.fun.arg, t.arg
        lam = _avoid_capture(lam, s)
        return App(Abs(lam.binder, App(lam.body, s)), u)
    v, lam, u = t.fun, t.arg.fun, t.arg.arg
    lam = _avoid_capture(lam, v)
    return App(Abs(lam.binder, App(v, lam.body)), u)


def find_redexes(t: Term, mode: Mode = Mode.BALANCED, kinds=ALL_KINDS) -> list:
    """Every redex of ``t`` admissible in ``mode``, leftmost-outermost first."""
    mode = Mode(mode)
    out = []

    def visit(node, path, applied):
        kind = root_kind(node)
        if kind is not None and kind in kinds:
            out.append(ReductionStep(path, kind, mode))
        if isinstance(node, App):
            visit(node.fun, path + (FUN,), True)
            visit(node.arg, path + (ARG,), False)
        elif isinstance(node, Abs) and (mode is Mode.FULL or applied):
            visit(node.body, path + (BODY,), False)

    visit(t, (), False)
    return out


def _rewrite(t, path, fn):
    if not path:
        return fn(t)
    step, rest = path[0], path[1:]
    if step == FUN and isinstance(t, App):
        return App(_rewrite(t.fun, rest, fn), t.arg)
    if step == ARG and isinstance(t, App):
        return App(t.fun, _rewrite(t.arg, rest, fn))
    if step == BODY and isinstance(t, Abs):
        return Abs(t.binder, _rewrite(t.body, rest, fn))
    raise InvalidStep(f"no {step!r} child in {pretty(t)}")


def apply_step(t: Term, step: ReductionStep) -> Term:
    if step.mode is Mode.BALANCED and not is_balanced(step.path):
        raise InvalidStep(f"position {step.label()} is not balanced")
    return _rewrite(t, step.path, lambda s: contract(s, step.kind))


# -- normal forms -------------------------------------------------------------

class NormalClass(str, enum.Enum):
    VALUE = "value"
    APP_NEUTRAL = "app-neutral"
    NORMAL = "normal"
    REDUCIBLE = "reducible"

    def __str__(self):
        return self.value


def is_neutral(t: Term) -> bool:
    """Membership in ``a ::= x v | x a | a n``."""
    if not isinstance(t, App):
        return False
    f, u = t.fun, t.arg
    if isinstance(f, Var):
        return is_value(u) or is_neutral(u)
    return is_neutral(f) and is_normal_form(u)


def is_normal_form(t: Term) -> bool:
    """Membership in ``n ::= v | a | (\\x.n) a``."""
    if is_value(t) or is_neutral(t):
        return True
    return (isinstance(t, App) and isinstance(t.fun, Abs)
            and is_normal_form(t.fun.body) and is_neutral(t.arg))


def classify(t: Term) -> NormalClass:
    if is_value(t):
        return NormalClass.VALUE
    if is_neutral(t):
        return NormalClass.APP_NEUTRAL
    if is_normal_form(t):
        return NormalClass.NORMAL
    return NormalClass.REDUCIBLE


def balanced_size(t: Term) -> int:
    """Number of applications of ``t`` sitting in a balanced context."""
    if not isinstance(t, App):
        return 0
    f = t.fun.body if isinstance(t.fun, Abs) else t.fun
    return balanced_size(f) + balanced_size(t.arg) + 1


# -- strategies ---------------------------------------------------------------

def normalize(t: Term, mode: Mode = Mode.BALANCED, fuel: int = DEFAULT_FUEL,
              kinds=ALL_KINDS) -> ReductionSequence:
    """Leftmost-outermost reduction; ``normal`` is False when fuel ran out."""
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    seq = ReductionSequence(t)
    current = t
    for _ in range(fuel):
        redexes = find_redexes(current, mode, kinds)
        if not redexes:
            seq.normal = True
            return seq
        step = redexes[0]
        current = apply_step(current, step)
        seq.steps.append((step, current))
    seq.normal = not find_redexes(current, mode, kinds)
    return seq


def enumerate_sequences(t: Term, mode: Mode = Mode.BALANCED, fuel: int = DEFAULT_ENUM_FUEL,
                        max_sequences: int = DEFAULT_MAX_SEQUENCES,
                        kinds=ALL_KINDS) -> list:
    """All maximal reduction sequences from ``t`` of length at most ``fuel``.

    Sequences cut by the fuel bound have ``normal == False``.
    """
    out = []
    steps = []

    def dfs(current, depth):
        redexes = find_redexes(current, mode, kinds)
        if not redexes or depth == fuel:
            if len(out) >= max_sequences:
                raise BudgetExceeded(f"more than {max_sequences} sequences from {pretty(t)}")
            out.append(ReductionSequence(t, list(steps), not redexes))
            return
        for step in redexes:
            nxt = apply_step(current, step)
            steps.append((step, nxt))
            dfs(nxt, depth + 1)
            steps.pop()

    dfs(t, 0)
    return out


class Equivalence(str, enum.Enum):
    EQUIVALENT = "equivalent"
    DISTINCT = "distinct"
    UNKNOWN = "unknown"

    def __str__(self):
        return self.value


def shuf_equiv_semi(t: Term, u: Term, fuel: int = DEFAULT_FUEL) -> Equivalence:
    """Compare balanced normal forms; sound but incomplete for shuffling equivalence."""
    a = normalize(t, Mode.BALANCED, fuel)
    b = normalize(u, Mode.BALANCED, fuel)
    if not (a.normal and b.normal):
        return Equivalence.UNKNOWN
    return Equivalence.EQUIVALENT if a.final == b.final else Equivalence.DISTINCT


# -- reduction graphs -----------------------------------------------------------

@dataclass
class ReductionGraph:
    """Reachable alpha-classes of a term, explored breadth-first up to a depth."""

    nodes: list
    edges: list
    depth: list
    truncated: bool
    mode: Mode
    kinds: frozenset

    @property
    def root(self) -> Term:
        return self.nodes[0]

    def normal_nodes(self) -> list:
        return [i for i, out in enumerate(self.edges) if out == [] and not self._cut(i)]

    def _cut(self, i):
        return self.edges[i] is None

    def find_cycle(self) -> list | None:
        """Node indices of some cycle, or None if the explored graph is acyclic."""
        WHITE, GREY, BLACK = 0, 1, 2
        color = [WHITE] * len(self.nodes)
        stack_path = []
        for root in range(len(self.nodes)):
            if color[root] != WHITE:
                continue
            work = [(root, 0)]
            while work:
                node, idx = work.pop()
                if idx == 0:
                    color[node] = GREY
                    stack_path.append(node)
                succ = self.edges[node] or []
                if idx < len(succ):
                    work.append((node, idx + 1))
                    nxt = succ[idx][1]
                    if color[nxt] == GREY:
                        return stack_path[stack_path.index(nxt):]
                    if color[nxt] == WHITE:
                        work.append((nxt, 0))
                else:
                    color[node] = BLACK
                    stack_path.pop()
        return None

    def outcomes(self) -> frozenset:
        """Pairs ``(leng_betav, normal form)`` over all complete paths from the root.

        Requires an acyclic graph.
        """
        if self.find_cycle() is not None:
            raise ValueError("outcomes are undefined on a cyclic reduction graph")
        memo = {}
        order = self._postorder()
        for node in order:
            succ = self.edges[node]
            if succ is None:
                memo[node] = frozenset()
            elif not succ:
                memo[node] = frozenset({(0, self.nodes[node])})
            else:
                acc = set()
                for step, nxt in succ:
                    bump = 1 if step.kind is RedexKind.BETA_V else 0
                    acc.update((n + bump, nf) for n, nf in memo[nxt])
                memo[node] = frozenset(acc)
        return memo[0]

    def has_incomplete_paths(self) -> bool:
        return self.truncated or self.find_cycle() is not None

    def _postorder(self):
        seen = [False] * len(self.nodes)
        order = []
        work = [(0, False)]
        while work:
            node, done = work.pop()
            if done:
                order.append(node)
                continue
            if seen[node]:
                continue
            seen[node] = True
            work.append((node, True))
            for _, nxt in self.edges[node] or []:
                if not seen[nxt]:
                    work.append((nxt, False))
        return order


def explore(t: Term, mode: Mode = Mode.BALANCED, fuel: int = DEFAULT_ENUM_FUEL,
            kinds=ALL_KINDS, max_nodes: int = 200000) -> ReductionGraph:
    """Build the reduction graph of ``t`` on alpha-classes up to depth ``fuel``.

    Nodes first reached at depth ``fuel`` are not expanded; their edge list is
    ``None`` and ``truncated`` is set.  Every path through this graph is a
    reduction sequence from ``t``, so it stands in for exhaustive sequence
    enumeration without the exponential blow-up of listing paths.
    """
    index = {t: 0}
    nodes, edges, depth = [t], [None], [0]
    queue = deque([0])
    truncated = False
    while queue:
        i = queue.popleft()
        if depth[i] >= fuel:
            if find_redexes(nodes[i], mode, kinds):
                truncated = True
                continue
            edges[i] = []
            continue
        out = []
        for step in find_redexes(nodes[i], mode, kinds):
            nxt = apply_step(nodes[i], step)
            j = index.get(nxt)
            if j is None:
                if len(nodes) >= max_nodes:
                    raise BudgetExceeded(f"reduction graph of {pretty(t)} exceeds {max_nodes} nodes")
                j = len(nodes)
                index[nxt] = j
                nodes.append(nxt)
                edges.append(None)
                depth.append(depth[i] + 1)
                queue.append(j)
            out.append((step, j))
        edges[i] = out
    return ReductionGraph(nodes, edges, depth, truncated, Mode(mode), frozenset(kinds))
