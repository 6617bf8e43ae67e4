"""
Bounded enumeration of type derivations.

Type inference is undecidable in general, so the search is bounded twice:
every type appearing in a judgment (subject type and environment entries)
has at most ``cap`` arrows, and derivations larger than ``max_size`` are not
produced.  Within those bounds the enumeration is complete, and each
derivation is produced once (lambda premises are kept in canonical order).
"""
from __future__ import annotations

from itertools import combinations_with_replacement, product
from typing import Iterable

from .derivation import AppRule, Ax, Derivation, lam
from .multitypes import Environment, PosType, arrow, pos, types_upto
from .terms import Abs, App, Term, Var

__all__ = ["DEFAULT_CAP", "search_derivations", "find_smaller", "lower_bound"]

DEFAULT_CAP = 6
_UNBOUNDED = 10 ** 9


def lower_bound(t: Term) -> int:
    """Application nodes outside every abstraction: each needs an ``@`` rule."""
    if isinstance(t, App):
        return 1 + lower_bound(t.fun) + lower_bound(t.arg)
    return 0


class _Search:
    def __init__(self, cap: int):
        self.cap = cap
        self.memo = {}

    def env_ok(self, env: Environment) -> bool:
        return all(p.size <= self.cap for _, p in env.items())

    def derive(self, t: Term, target: PosType, budget: int, zero: frozenset) -> list:
        """Derivations of ``t : target`` of size at most ``budget``.

        Variables in ``zero`` must receive the empty type.
        """
        key = (id(t), target, budget, zero)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = list(self._derive(t, target, budget, zero))
        return hit

    def _derive(self, t, target, budget, zero):
        if budget < lower_bound(t):
            return
        if isinstance(t, Var):
            if target and t.name in zero:
                return
            yield Ax(t.name, target)
        elif isinstance(t, App):
            yield from self._app(t, target, budget, zero)
        else:
            yield from self._lam(t, target, budget, zero)

    def _app(self, t, target, budget, zero):
        room = self.cap - 1 - target.size
        rest = budget - 1
        for p in types_upto(room):
            for left in self.derive(t.fun, pos(arrow(p, target)), rest - lower_bound(t.arg), zero):
                for right in self.derive(t.arg, p, rest - left.size, zero):
                    d = AppRule(left, right)
                    if self.env_ok(d.env):
                        yield d

    def _lam(self, t: Abs, target, budget, zero):
        groups = []
        for neg in target.elems:
            if groups and groups[-1][0] == neg:
                groups[-1][1] += 1
            else:
                groups.append([neg, 1])
        n = len(target)
        slack = budget - (n - 1) * lower_bound(t.body) if n else budget
        choices = []
        for neg, count in groups:
            cands = [d for d in self.derive(t.body, neg.cod, slack, zero - {t.binder}) if d.env[t.binder] == neg.dom]
            choices.append([[cands[i] for i in combo]
                            for combo in combinations_with_replacement(range(len(cands)), count)])
        for pick in product(*choices):
            premises = [d for group in pick for d in group]
            if sum(d.size for d in premises) > budget:
                continue
            d = lam(t.binder, t.body, premises)
            if self.env_ok(d.env):
                yield d


def search_derivations(t: Term, target: PosType | None = None, env: Environment | None = None,
                       cap: int = DEFAULT_CAP, max_size: int | None = None) -> list:
    """All derivations of ``t`` within the bounds, optionally with fixed type or environment.

    ``env`` fixes the whole environment: free variables it does not mention
    get the empty type.
    """
    zero_vars = frozenset(x for x in t.fv if env is not None and not env[x])
    search = _Search(cap)
    budget = _UNBOUNDED if max_size is None else max_size
    targets: Iterable[PosType] = types_upto(cap) if target is None else (target,)
    out = []
    for q in targets:
        if q.size > cap:
            continue
        for d in search.derive(t, q, budget, zero_vars):
            if env is None or d.env == env:
                out.append(d)
    return out


def find_smaller(t: Term, bound: int, cap: int = DEFAULT_CAP) -> Derivation | None:
    """Some derivation of ``t`` of size below ``bound``, if one exists within ``cap``."""
    if bound <= 0:
        return None
    found = search_derivations(t, cap=cap, max_size=bound - 1)
    return found[0] if found else None
