"""
Lambda terms with named variables.

Terms are immutable and compare up to alpha-conversion: ``==`` and ``hash``
go through a locally-nameless key in which bound occurrences are replaced by
de Bruijn indices while free variables keep their names.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

__all__ = [
    "Term", "Var", "Abs", "App", "ParseError",
    "parse", "pretty", "free_vars", "subst", "alpha_eq", "is_value",
    "fresh_name", "names", "term_size", "I", "DELTA", "CONSTANTS",
]


class _TermBase:
    __slots__ = ()

    def __eq__(self, other):
        if not isinstance(other, _TermBase):
            return NotImplemented
        return self is other or self._key == other._key

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash(self._key)

    @cached_property
    def _key(self):
        return _alpha_key(self, {}, 0)

    @cached_property
    def fv(self) -> frozenset:
        return _free_vars(self)

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True, eq=False)
class Var(_TermBase):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=False)
class Abs(_TermBase):
    binder: str
    body: Term

    def __repr__(self):
        return f"Abs({self.binder!r}, {self.body!r})"


@dataclass(frozen=True, eq=False)
class App(_TermBase):
    fun: Term
    arg: Term

    def __repr__(self):
        return f"App({self.fun!r}, {self.arg!r})"


Term = Union[Var, Abs, App]

I = Abs("x", Var("x"))
DELTA = Abs("x", App(Var("x"), Var("x")))
CONSTANTS = {"I": I, "D": DELTA}


def _alpha_key(t, env, depth):
    # env maps a bound name to the depth of its binder
    if isinstance(t, Var):
        level = env.get(t.name)
        return ("f", t.name) if level is None else ("b", depth - level)
    if isinstance(t, Abs):
        inner = dict(env)
        inner[t.binder] = depth + 1
        return ("l", _alpha_key(t.body, inner, depth + 1))
    return ("a", _alpha_key(t.fun, env, depth), _alpha_key(t.arg, env, depth))


def _free_vars(t) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Abs):
        return t.body.fv - {t.binder}
    return t.fun.fv | t.arg.fv


def free_vars(t: Term) -> frozenset:
    return t.fv


def alpha_eq(t: Term, u: Term) -> bool:
    return t == u


def is_value(t: Term) -> bool:
    return isinstance(t, (Var, Abs))


def names(t: Term) -> set:
    """Every variable name occurring in ``t``, bound or free."""
    out = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, Abs):
            out.add(node.binder)
            stack.append(node.body)
        else:
            stack.extend((node.fun, node.arg))
    return out


def term_size(t: Term) -> int:
    """Number of nodes (variables, abstractions and applications)."""
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + term_size(t.body)
    return 1 + term_size(t.fun) + term_size(t.arg)


_STEM = re.compile(r"^(.*?)[0-9']*$")


def fresh_name(base: str, avoid: Iterable[str]) -> str:
    """Deterministic variant of ``base`` (``x1``, ``x2``, ...) not in ``avoid``."""
    avoid = set(avoid)
    stem = _STEM.match(base).group(1) or base
    i = 1
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def subst(t: Term, x: str, v: Term) -> Term:
    """Capture-avoiding substitution ``t{v/x}`` of the value ``v``."""
    if not is_value(v):
        raise ValueError(f"only values are substituted, got {pretty(v)}")
    return _subst(t, x, v)


def _subst(t, x, v):
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return v
    if isinstance(t, App):
        return App(_subst(t.fun, x, v), _subst(t.arg, x, v))
    y, body = t.binder, t.body
    if y in v.fv:
        y2 = fresh_name(y, v.fv | names(body) | {x})
        body = _subst(body, y, Var(y2))
        y = y2
    return Abs(y, _subst(body, x, v))


# -- printing ---------------------------------------------------------------

def pretty(t: Term, unicode: bool = False) -> str:
    lam = "λ" if unicode else "\\"
    return _pretty(t, lam)


def _pretty(t, lam):
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        return f"{lam}{t.binder}.{_pretty(t.body, lam)}"
    left = _pretty(t.fun, lam)
    if isinstance(t.fun, Abs):
        left = f"({left})"
    right = _pretty(t.arg, lam)
    if not isinstance(t.arg, Var):
        right = f"({right})"
    if left.endswith(")") and right.startswith("("):
        return left + right
    return f"{left} {right}"


# -- parsing ----------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<ident>[a-zA-Z][a-zA-Z0-9'_]*)|(?P<sym>[\\λ.()]))")


def _tokenize(src):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(src, pos)
        if m is None:
            rest = src[pos:]
            if rest.strip():
                offset = pos + len(rest) - len(rest.lstrip())
                raise ParseError(f"unexpected character {src[offset]!r}", *_where(src, offset))
            tokens.append(("eof", None, len(src)))
            return tokens
        kind = "ident" if m.group("ident") else m.group("sym")
        if kind == "λ":
            kind = "\\"
        tokens.append((kind, m.group("ident"), m.start(m.lastgroup)))
        pos = m.end()


def _where(src, offset):
    line = src.count("\n", 0, offset) + 1
    column = offset - (src.rfind("\n", 0, offset) + 1) + 1
    return line, column


class _Parser:
    def __init__(self, src, constants):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0
        self.constants = constants

    def peek(self):
        return self.tokens[self.i][0]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = "end of input" if tok[0] == "eof" else repr(tok[1] or tok[0])
            raise ParseError(f"expected {kind!r}, found {found}", *_where(self.src, tok[2]))
        self.i += 1
        return tok

    def term(self):
        if self.peek() == "\\":
            return self.abstraction()
        return self.application()

    def abstraction(self):
        self.take("\\")
        _, name, offset = self.take("ident")
        if self.constants and name in CONSTANTS:
            raise ParseError(f"constant {name} cannot be bound", *_where(self.src, offset))
        self.take(".")
        return Abs(name, self.term())

    def application(self):
        t = self.atom()
        while self.peek() in ("ident", "("):
            t = App(t, self.atom())
        if self.peek() == "\\":
            # trailing abstraction extends to the right
            t = App(t, self.abstraction())
        return t

    def atom(self):
        if self.peek() == "(":
            self.take("(")
            t = self.term()
            self.take(")")
            return t
        _, name, _ = self.take("ident")
        if self.constants and name in CONSTANTS:
            return CONSTANTS[name]
        return Var(name)


def parse(src: str, constants: bool = False) -> Term:
    """Parse a term; with ``constants`` the names ``I`` and ``D`` denote the
    identity and the self-application combinator."""
    p = _Parser(src, constants)
    t = p.term()
    p.take("eof")
    return t
