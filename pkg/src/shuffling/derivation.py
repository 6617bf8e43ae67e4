"""
Type derivations for the non-idempotent intersection type system.

Three rules::

    ---------------- ax
    x : P |- x : P

    G |- t : [<P,Q>]     G' |- u : P
    -------------------------------- @
           G + G' |- t u : Q

    G1, x:P1 |- t : Q1   ...   Gn, x:Pn |- t : Qn
    ---------------------------------------------- lam   (n >= 0)
    G1 + ... + Gn |- \\x.t : [<P1,Q1>, ..., <Pn,Qn>]

Derivation nodes carry only local data.  Conclusions are recomputed by
:func:`check` and never read from input.  The size of a derivation is its
number of ``@`` nodes.

The transformers below (substitution, subject reduction and expansion,
commutations) are exact on sizes, so they double as executable statements of
the quantitative bookkeeping: a beta_v step removes exactly one ``@`` node
from a derivation typed in a balanced context, a sigma step removes none.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

from .multitypes import ZERO, Environment, PosType, arrow, parse_type, pos
from .reduction import (
    ARG, DEFAULT_FUEL, FUN, Mode, RedexKind, ReductionSequence, ReductionStep,
    apply_step, is_neutral, is_normal_form, normalize,
)
from .terms import (
    Abs, App, Term, Var, fresh_name, is_value, names, parse, pretty, subst,
)

__all__ = [
    "Ax", "AppRule", "LamRule", "Derivation", "Judgment", "RuleViolation",
    "DerivationError", "lam", "check", "size", "empty_derivation",
    "decompose_value", "merge_values", "subst_derivation", "rename_free",
    "subject_reduce", "subject_expand", "pull_back", "commute_abstraction",
    "commute_application", "type_normal", "min_derivation_normal", "derive_empty",
    "to_json", "from_json", "format_judgment",
]


class DerivationError(ValueError):
    """A transformer was applied outside its precondition."""


class RuleViolation(DerivationError):
    def __init__(self, path, reason):
        where = ".".join(map(str, path)) or "root"
        super().__init__(f"rule violation at {where}: {reason}")
        self.path = tuple(path)
        self.reason = reason


@dataclass(frozen=True)
class Judgment:
    env: Environment
    subject: Term
    type: PosType

    def __str__(self):
        return format_judgment(self)


def format_judgment(j: Judgment, unicode: bool = False) -> str:
    env = str(j.env)
    head = f"{env} " if env else ""
    return f"{head}|- {pretty(j.subject, unicode)} : {j.type}"


class _Node:
    __slots__ = ()

    @cached_property
    def judgment(self) -> Judgment:
        return _conclude(self, ())

    @property
    def env(self) -> Environment:
        return self.judgment.env

    @property
    def subject(self) -> Term:
        return self.judgment.subject

    @property
    def type(self) -> PosType:
        return self.judgment.type

    @cached_property
    def size(self) -> int:
        return size(self)

    @cached_property
    def key(self):
        return _dkey(self)


@dataclass(frozen=True)
class Ax(_Node):
    var: str
    type_: PosType = ZERO


@dataclass(frozen=True)
class AppRule(_Node):
    left: Derivation
    right: Derivation


@dataclass(frozen=True)
class LamRule(_Node):
    binder: str
    body: Term
    premises: tuple = ()


Derivation = Union[Ax, AppRule, LamRule]


def _dkey(d):
    if isinstance(d, Ax):
        return (0, d.var, d.type_.key)
    if isinstance(d, AppRule):
        return (1, d.left.key, d.right.key)
    return (2, d.binder, tuple(p.key for p in d.premises))


def lam(binder: str, body: Term, premises: Iterable[Derivation] = ()) -> LamRule:
    """Build a lambda node with premises in canonical order."""
    premises = tuple(premises)
    if len(premises) > 1:
        premises = tuple(sorted(
            premises, key=lambda p: (arrow(p.env[binder], p.type).key, p.key)))
    return LamRule(binder, body, premises)


def _conclude(d, path) -> Judgment:
    if "judgment" in d.__dict__:
        return d.__dict__["judgment"]
    if isinstance(d, Ax):
        j = Judgment(Environment.of({d.var: d.type_}), Var(d.var), d.type_)
    elif isinstance(d, AppRule):
        jl = _conclude(d.left, path + ("left",))
        jr = _conclude(d.right, path + ("right",))
        if len(jl.type) != 1:
            raise RuleViolation(path, f"left premise has type {jl.type}, not a single arrow")
        (neg,) = jl.type.elems
        if neg.dom != jr.type:
            raise RuleViolation(path, f"argument type {jr.type} does not match {neg.dom}")
        j = Judgment(jl.env + jr.env, App(jl.subject, jr.subject), neg.cod)
    elif isinstance(d, LamRule):
        env = Environment()
        arrows = []
        for i, p in enumerate(d.premises):
            jp = _conclude(p, path + (i,))
            if jp.subject != d.body:
                raise RuleViolation(path, f"premise {i} types {pretty(jp.subject)}, "
                                          f"not the body {pretty(d.body)}")
            arrows.append(arrow(jp.env[d.binder], jp.type))
            env = env + jp.env.without(d.binder)
        j = Judgment(env, Abs(d.binder, d.body), PosType(arrows))
    else:
        raise RuleViolation(path, f"unknown node {d!r}")
    d.__dict__["judgment"] = j
    return j


def check(d: Derivation) -> Judgment:
    """Recompute every conclusion bottom-up and return the root judgment."""
    return _conclude(d, ())


def size(d: Derivation) -> int:
    if isinstance(d, Ax):
        return 0
    if isinstance(d, AppRule):
        return 1 + d.left.size + d.right.size
    return sum(p.size for p in d.premises)


# -- values ---------------------------------------------------------------------

def empty_derivation(v: Term) -> Derivation:
    """The unique derivation of ``|- v : 0`` for a value ``v``."""
    if isinstance(v, Var):
        return Ax(v.name, ZERO)
    if isinstance(v, Abs):
        return LamRule(v.binder, v.body, ())
    raise DerivationError(f"{pretty(v)} is not a value")


def decompose_value(d: Derivation, split: Sequence[PosType]) -> list:
    """Split a derivation of ``D |- v : P1 + ... + Pp`` into derivations of each ``Pi``.

    Sizes and environments add up to those of ``d``.
    """
    split = list(split)
    total = sum(split, ZERO)
    if total != d.type:
        raise DerivationError(f"split {', '.join(map(str, split))} does not sum to {d.type}")
    if isinstance(d, Ax):
        return [Ax(d.var, p) for p in split]
    if not isinstance(d, LamRule):
        raise DerivationError("only derivations of values can be decomposed")
    pool = list(d.premises)
    pool_arrows = [arrow(p.env[d.binder], p.type) for p in pool]
    parts = []
    for part in split:
        chosen = []
        for neg in part.elems:
            for i, a in enumerate(pool_arrows):
                if a is not None and a == neg:
                    chosen.append(pool[i])
                    pool_arrows[i] = None
                    break
        parts.append(lam(d.binder, d.body, chosen))
    return parts


def merge_values(ds: Sequence[Derivation], value: Term) -> Derivation:
    """Inverse of :func:`decompose_value`: one derivation of ``value`` typed by the sum."""
    ds = list(ds)
    if not ds:
        return empty_derivation(value)
    if isinstance(value, Var):
        return Ax(value.name, sum((d.type for d in ds), ZERO))
    if not isinstance(value, Abs):
        raise DerivationError(f"{pretty(value)} is not a value")
    binder, body = value.binder, value.body
    premises = []
    for d in ds:
        if not isinstance(d, LamRule):
            raise DerivationError("cannot merge derivations of different values")
        for p in d.premises:
            premises.append(p if d.binder == binder else rename_free(p, d.binder, binder))
    return lam(binder, body, premises)


# -- substitution ------------------------------------------------------------------

def rename_free(d: Derivation, old: str, new: str) -> Derivation:
    """Capture-avoiding renaming of the free variable ``old`` to ``new``."""
    if old == new:
        return d
    return subst_derivation(d, old, Ax(new, d.env[old]))


def _rename_fresh(d, old, new):
    # ``new`` occurs nowhere in ``d``, so a structural renaming cannot capture
    if isinstance(d, Ax):
        return Ax(new, d.type_) if d.var == old else d
    if isinstance(d, AppRule):
        return AppRule(_rename_fresh(d.left, old, new), _rename_fresh(d.right, old, new))
    if d.binder == old:
        return d
    body = subst(d.body, old, Var(new))
    return lam(d.binder, body, [_rename_fresh(p, old, new) for p in d.premises])


def _freshen_binder(d: LamRule, avoid) -> LamRule:
    y = fresh_name(d.binder, set(avoid) | names(d.body) | {d.binder})
    return lam(y, subst(d.body, d.binder, Var(y)),
               [_rename_fresh(p, d.binder, y) for p in d.premises])


def subst_derivation(body: Derivation, x: str, arg: Derivation) -> Derivation:
    """From ``G, x:P |- t : Q`` and ``D |- v : P`` build ``G + D |- t{v/x} : Q``.

    The result has size ``size(body) + size(arg)``.
    """
    if body.env[x] != arg.type:
        raise DerivationError(f"{x} is typed {body.env[x]} but the value has type {arg.type}")
    return _subst_d(body, x, arg, arg.subject)


def _subst_d(d, x, arg, v):
    if isinstance(d, Ax):
        if d.var == x:
            return arg
        return d
    if x not in d.subject.fv:
        return d
    if isinstance(d, AppRule):
        left, right = decompose_value(arg, [d.left.env[x], d.right.env[x]])
        return AppRule(_subst_d(d.left, x, left, v), _subst_d(d.right, x, right, v))
    if d.binder in v.fv:
        d = _freshen_binder(d, v.fv | {x})
    parts = decompose_value(arg, [p.env[x] for p in d.premises])
    return lam(d.binder, subst(d.body, x, v),
               [_subst_d(p, x, part, v) for p, part in zip(d.premises, parts)])


def _anti_subst(d, s, x, v):
    """Split a derivation of ``s{v/x}`` into one of ``s`` and one of ``v``.

    Returns ``(rho, pi_v)`` with ``rho : G, x:P |- s : Q`` and ``pi_v : D |- v : P``
    where ``G + D`` is the environment of ``d`` and the sizes add up.
    """
    if x not in s.fv:
        return d, empty_derivation(v)
    if isinstance(s, Var):
        return Ax(x, d.type), d
    if isinstance(s, App):
        if not isinstance(d, AppRule):
            raise DerivationError("derivation does not match the substituted term")
        rho1, v1 = _anti_subst(d.left, s.fun, x, v)
        rho2, v2 = _anti_subst(d.right, s.arg, x, v)
        return AppRule(rho1, rho2), merge_values([v1, v2], v)
    if not isinstance(d, LamRule):
        raise DerivationError("derivation does not match the substituted term")
    if s.binder in v.fv:
        y = fresh_name(s.binder, v.fv | names(s.body) | {x})
        s = Abs(y, subst(s.body, s.binder, Var(y)))
    if d.binder != s.binder:
        d = _align_binder(d, s.binder)
    rhos, vals = [], []
    for p in d.premises:
        rho, pv = _anti_subst(p, s.body, x, v)
        rhos.append(rho)
        vals.append(pv)
    return lam(s.binder, s.body, rhos), merge_values(vals, v)


def _align_binder(d: LamRule, binder: str) -> LamRule:
    """Alpha-rename the binder of ``d`` (``binder`` must not be free in ``d``'s subject)."""
    if d.binder == binder:
        return d
    body = subst(d.body, d.binder, Var(binder))
    return lam(binder, body, [rename_free(p, d.binder, binder) for p in d.premises])


# -- subject reduction and expansion -----------------------------------------------

def _reduce_root(d, kind):
    if kind is RedexKind.BETA_V:
        fn, pv = d.left, d.right
        (rho,) = fn.premises
        return subst_derivation(rho, fn.binder, pv)
    if kind is RedexKind.SIGMA1:
        inner, ps = d.left, d.right
        fn, pu = inner.left, inner.right
        if fn.binder in ps.subject.fv:
            fn = _freshen_binder(fn, ps.subject.fv)
        (rho,) = fn.premises
        return AppRule(lam(fn.binder, App(fn.body, ps.subject), [AppRule(rho, ps)]), pu)
    pv, inner = d.left, d.right
    fn, pu = inner.left, inner.right
    if fn.binder in pv.subject.fv:
        fn = _freshen_binder(fn, pv.subject.fv)
    (rho,) = fn.premises
    return AppRule(lam(fn.binder, App(pv.subject, fn.body), [AppRule(pv, rho)]), pu)


def subject_reduce(d: Derivation, step: ReductionStep) -> Derivation:
    """Derivation of the reduct with the same environment and type.

    For balanced steps the size drops by exactly one on beta_v and is unchanged
    on sigma steps.  Full steps under an unapplied lambda act on every premise.
    """
    t = check(d).subject
    try:
        t2 = apply_step(t, step)
    except Exception as exc:
        raise DerivationError(f"invalid step on {pretty(t)}: {exc}") from exc
    return _transform(d, t, t2, step.path, lambda node, sub: _reduce_root(node, step.kind))


def _transform(d, t, t2, path, root):
    if not path:
        return root(d, t)
    step, rest = path[0], path[1:]
    if step == FUN:
        return AppRule(_transform(d.left, t.fun, t2.fun, rest, root), d.right)
    if step == ARG:
        return AppRule(d.left, _transform(d.right, t.arg, t2.arg, rest, root))
    if d.binder != t.binder:
        d = _align_binder(d, t.binder)
    premises = [_transform(p, t.body, t2.body, rest, root) for p in d.premises]
    return lam(t.binder, t2.body, premises)


def _expand_root(d, t, kind):
    if kind is RedexKind.BETA_V:
        fn, v = t.fun, t.arg
        rho, pv = _anti_subst(d, fn.body, fn.binder, v)
        return AppRule(lam(fn.binder, fn.body, [rho]), pv)
    if kind is RedexKind.SIGMA1:
        # d : (\x.b s) u
        fn, pu = d.left, d.right
        (kappa,) = fn.premises
        rho, ps = kappa.left, kappa.right
        return AppRule(AppRule(lam(fn.binder, rho.subject, [rho]), pu), ps)
    # d : (\x.v s) u
    fn, pu = d.left, d.right
    (kappa,) = fn.premises
    pv, rho = kappa.left, kappa.right
    return AppRule(pv, AppRule(lam(fn.binder, rho.subject, [rho]), pu))


def subject_expand(d: Derivation, t: Term, step: ReductionStep) -> Derivation:
    """Derivation of ``t`` from a derivation of the reduct of ``t`` by ``step``.

    Environment and type are preserved; on balanced steps the size grows by
    exactly one for beta_v and is unchanged for sigma steps.
    """
    j = check(d)
    try:
        t2 = apply_step(t, step)
    except Exception as exc:
        raise DerivationError(f"invalid step on {pretty(t)}: {exc}") from exc
    if t2 != j.subject:
        raise DerivationError(f"step leads to {pretty(t2)}, derivation types {pretty(j.subject)}")
    return _expand_path(d, t, step.path, step.kind)


def _expand_path(d, t, path, kind):
    if not path:
        return _expand_root(d, t, kind)
    step, rest = path[0], path[1:]
    if step == FUN:
        return AppRule(_expand_path(d.left, t.fun, rest, kind), d.right)
    if step == ARG:
        return AppRule(d.left, _expand_path(d.right, t.arg, rest, kind))
    if d.binder != t.binder:
        d = _align_binder(d, t.binder)
    return lam(t.binder, t.body, [_expand_path(p, t.body, rest, kind) for p in d.premises])


def pull_back(d: Derivation, sequence: ReductionSequence) -> Derivation:
    """Expand a derivation of the last term of ``sequence`` back to its start."""
    terms = sequence.terms
    for i in range(len(sequence.steps) - 1, -1, -1):
        step, _ = sequence.steps[i]
        d = subject_expand(d, terms[i], step)
    return d


# -- commutations -------------------------------------------------------------------

def commute_abstraction(d: Derivation) -> Derivation:
    """``\\y.((\\x.t) v)`` to ``(\\x.\\y.t) v`` (y not free in v).

    With ``k`` premises the size becomes ``size(d) + 1 - k``; in particular an
    empty abstraction gains one ``@`` node.
    """
    t = check(d).subject
    if not (isinstance(t, Abs) and isinstance(t.body, App) and isinstance(t.body.fun, Abs)
            and is_value(t.body.arg)):
        raise DerivationError(f"{pretty(t)} does not have the shape \\y.((\\x.t) v)")
    y, redex = t.binder, t.body
    x, inner, v = redex.fun.binder, redex.fun.body, redex.arg
    if y in v.fv:
        raise DerivationError(f"{y} is free in {pretty(v)}")
    if x == y:
        x2 = fresh_name(x, names(t) | {y})
        inner, x = subst(inner, x, Var(x2)), x2
    taus, nus = [], []
    for rho in d.premises:
        fn = _align_binder(rho.left, x)
        (tau,) = fn.premises
        taus.append(tau)
        nus.append(rho.right)
    body = lam(y, inner, taus)
    return AppRule(lam(x, Abs(y, inner), [body]), merge_values(nus, v))


def commute_application(d: Derivation) -> Derivation:
    """``((\\x.t) v)((\\x.u) v)`` to ``(\\x.t u) v``, removing one ``@`` node."""
    t = check(d).subject
    ok = (isinstance(t, App) and all(
        isinstance(side, App) and isinstance(side.fun, Abs) and is_value(side.arg)
        for side in (t.fun, t.arg)))
    if not ok or t.fun.arg != t.arg.arg or Abs("_", t.fun.arg) != Abs("_", t.arg.arg):
        raise DerivationError(f"{pretty(t)} does not have the shape ((\\x.t) v)((\\x.u) v)")
    v = t.fun.arg
    x = t.fun.fun.binder
    left_fn, nu1 = d.left.left, d.left.right
    right_fn, nu2 = d.right.left, d.right.right
    if right_fn.binder != x:
        if x in Abs(right_fn.binder, right_fn.body).fv:
            x = fresh_name(x, names(t))
            left_fn = _align_binder(left_fn, x)
        right_fn = _align_binder(right_fn, x)
    (tau,) = left_fn.premises
    (mu,) = right_fn.premises
    body = App(left_fn.body, right_fn.body)
    return AppRule(lam(x, body, [AppRule(tau, mu)]), merge_values([nu1, nu2], v))


# -- typing normal forms ---------------------------------------------------------------

def type_normal(t: Term, target: PosType | None = None) -> Derivation:
    """Derivation of a balanced normal form, choosing empty types where allowed.

    Neutral terms accept any target type.  Without a target the result has
    size equal to the balanced size of ``t``.
    """
    if isinstance(t, Var):
        return Ax(t.name, target or ZERO)
    if isinstance(t, Abs):
        if target:
            raise DerivationError(f"abstraction {pretty(t)} is only typed at 0 here")
        return empty_derivation(t)
    if is_neutral(t):
        q = target or ZERO
        if isinstance(t.fun, Var):
            arg = empty_derivation(t.arg) if is_value(t.arg) else type_normal(t.arg)
            return AppRule(Ax(t.fun.name, pos(arrow(ZERO, q))), arg)
        arg = type_normal(t.arg)
        return AppRule(type_normal(t.fun, pos(arrow(arg.type, q))), arg)
    if is_normal_form(t):
        fn = t.fun
        rho = type_normal(fn.body, target)
        return AppRule(lam(fn.binder, fn.body, [rho]), type_normal(t.arg, rho.env[fn.binder]))
    raise DerivationError(f"{pretty(t)} is not a balanced normal form")


def min_derivation_normal(t: Term) -> Derivation:
    """A derivation of minimal size of a balanced normal form."""
    return type_normal(t)


def derive_empty(t: Term, fuel: int = DEFAULT_FUEL) -> Derivation | None:
    """Derivation of ``|- t : 0`` when ``t`` reaches a value within ``fuel`` steps."""
    seq = normalize(t, Mode.BALANCED, fuel)
    if not seq.normal or not is_value(seq.final):
        return None
    return pull_back(empty_derivation(seq.final), seq)


# -- JSON ---------------------------------------------------------------------------------

def to_json(d: Derivation) -> dict:
    if isinstance(d, Ax):
        return {"rule": "ax", "var": d.var, "type": str(d.type_)}
    if isinstance(d, AppRule):
        return {"rule": "app", "left": to_json(d.left), "right": to_json(d.right)}
    return {"rule": "lam", "binder": d.binder, "body": pretty(d.body),
            "premises": [to_json(p) for p in d.premises]}


def from_json(data: dict, _path=()) -> Derivation:
    """Read the JSON format; ``body`` may be omitted when there are premises."""
    try:
        rule = data["rule"]
        if rule == "ax":
            return Ax(data["var"], parse_type(data.get("type", "0")))
        if rule == "app":
            return AppRule(from_json(data["left"], _path + ("left",)),
                           from_json(data["right"], _path + ("right",)))
        if rule == "lam":
            premises = [from_json(p, _path + (i,)) for i, p in enumerate(data.get("premises", []))]
            if "body" in data:
                body = parse(data["body"])
            elif premises:
                body = _conclude(premises[0], _path + (0,)).subject
            else:
                raise RuleViolation(_path, "a lambda node without premises needs a body")
            for i, p in enumerate(premises):
                _conclude(p, _path + (i,))
            return lam(data["binder"], body, premises)
        raise RuleViolation(_path, f"unknown rule {rule!r}")
    except KeyError as exc:
        raise RuleViolation(_path, f"missing field {exc.args[0]!r}") from None
