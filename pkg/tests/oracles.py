"""
Independent reference implementations used to freeze expected values.

They share no code with the package: terms are converted once to de Bruijn
form and evaluated by a textbook call-by-value machine.
"""
from functools import lru_cache

from shuffling.terms import Abs, Var


def to_debruijn(t, env=()):
    if isinstance(t, Var):
        return ("var", env.index(t.name)) if t.name in env else ("free", t.name)
    if isinstance(t, Abs):
        return ("lam", to_debruijn(t.body, (t.binder,) + env))
    return ("app", to_debruijn(t.fun, env), to_debruijn(t.arg, env))


def _shift(t, d, cutoff=0):
    tag = t[0]
    if tag == "var":
        return ("var", t[1] + d) if t[1] >= cutoff else t
    if tag == "free":
        return t
    if tag == "lam":
        return ("lam", _shift(t[1], d, cutoff + 1))
    return ("app", _shift(t[1], d, cutoff), _shift(t[2], d, cutoff))


def _subst(t, j, s):
    tag = t[0]
    if tag == "var":
        return s if t[1] == j else t
    if tag == "free":
        return t
    if tag == "lam":
        return ("lam", _subst(t[1], j + 1, _shift(s, 1)))
    return ("app", _subst(t[1], j, s), _subst(t[2], j, s))


def beta(body, arg):
    return _shift(_subst(body, 0, _shift(arg, 1)), -1)


def substitute_free(t, name, s):
    """Replace the free variable ``name`` by the closed-over de Bruijn term ``s``."""
    def go(u, depth):
        tag = u[0]
        if tag == "free":
            return _shift(s, depth) if u[1] == name else u
        if tag == "var":
            return u
        if tag == "lam":
            return ("lam", go(u[1], depth + 1))
        return ("app", go(u[1], depth), go(u[2], depth))
    return go(t, 0)


def _is_value(t):
    return t[0] in ("var", "free", "lam")


def cbv_eval(t, fuel=10000):
    """Weak left-to-right call-by-value evaluation; returns (value, beta steps) or None."""
    steps = 0

    def step(u):
        nonlocal steps
        if u[0] != "app":
            return None
        f, a = u[1], u[2]
        if not _is_value(f):
            r = step(f)
            return None if r is None else ("app", r, a)
        if not _is_value(a):
            r = step(a)
            return None if r is None else ("app", f, r)
        if f[0] == "lam":
            steps += 1
            return beta(f[1], a)
        return None

    for _ in range(fuel):
        nxt = step(t)
        if nxt is None:
            return (t, steps) if _is_value(t) else None
        t = nxt
    return None


@lru_cache(maxsize=None)
def count_negative(n):
    """Negative types with ``n`` arrows: one arrow plus two positive types."""
    if n < 1:
        return 0
    return sum(count_positive(i) * count_positive(n - 1 - i) for i in range(n))


@lru_cache(maxsize=None)
def count_positive(n):
    """Multisets of negative types with total size ``n`` (Euler transform)."""
    if n == 0:
        return 1
    total = 0
    for k in range(1, n + 1):
        c = sum(d * count_negative(d) for d in range(1, k + 1) if k % d == 0)
        total += c * count_positive(n - k)
    return total // n
