"""
Non-idempotent intersection types.

A positive type is a finite multiset of negative types and a negative type is
an arrow between two positive types.  Multisets are kept as tuples sorted by
a total order (size first, then the components recursively), so structural
equality of the tuples is multiset equality.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property, lru_cache, total_ordering
from typing import Iterable, Iterator, Mapping

__all__ = [
    "NegType", "PosType", "ZERO", "arrow", "pos", "Environment", "SemPoint",
    "mset_sum", "env_sum", "type_size", "point_size", "type_depth",
    "parse_type", "TypeSyntaxError", "types_of_size", "types_upto",
    "sub_multisets",
]


@total_ordering
@dataclass(frozen=True, eq=False)
class NegType:
    dom: PosType
    cod: PosType

    @cached_property
    def size(self) -> int:
        return 1 + self.dom.size + self.cod.size

    @cached_property
    def key(self):
        return (self.size, self.dom.key, self.cod.key)

    def __eq__(self, other):
        if not isinstance(other, NegType):
            return NotImplemented
        return self is other or self.key == other.key

    def __lt__(self, other):
        return self.key < other.key

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash(self.key)

    def __str__(self):
        return f"{self.dom}>{self.cod}"

    def __repr__(self):
        return f"NegType({self})"


@total_ordering
@dataclass(frozen=True, eq=False)
class PosType:
    elems: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "elems", tuple(sorted(self.elems)))

    @cached_property
    def size(self) -> int:
        return sum(n.size for n in self.elems)

    @cached_property
    def key(self):
        return (self.size, tuple(n.key for n in self.elems))

    def __eq__(self, other):
        if not isinstance(other, PosType):
            return NotImplemented
        return self is other or self.key == other.key

    def __lt__(self, other):
        return self.key < other.key

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self):
        return hash(self.key)

    def __add__(self, other: PosType) -> PosType:
        if not other.elems:
            return self
        if not self.elems:
            return other
        return PosType(self.elems + other.elems)

    def __bool__(self):
        return bool(self.elems)

    def __len__(self):
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)

    def __str__(self):
        if not self.elems:
            return "0"
        return "[" + ", ".join(map(str, self.elems)) + "]"

    def __repr__(self):
        return f"PosType({self})"


ZERO = PosType(())


def arrow(dom: PosType, cod: PosType) -> NegType:
    return NegType(dom, cod)


def pos(*negs: NegType) -> PosType:
    return PosType(negs)


def mset_sum(p: PosType, q: PosType) -> PosType:
    return p + q


def type_size(p) -> int:
    """Number of arrow constructors in a positive or negative type."""
    return p.size


def type_depth(p: PosType) -> int:
    """Least k such that ``p`` is a finite multiset over the universe U_k."""
    return max((1 + max(type_depth(n.dom), type_depth(n.cod)) for n in p.elems), default=0)


@dataclass(frozen=True)
class Environment:
    """Finite-support map from variables to positive types.

    Bindings to the empty type are never stored.
    """

    bindings: tuple = ()

    @classmethod
    def of(cls, mapping: Mapping[str, PosType] | Iterable = ()) -> Environment:
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(tuple(sorted((x, p) for x, p in items if p)))

    def __getitem__(self, x: str) -> PosType:
        for name, p in self.bindings:
            if name == x:
                return p
        return ZERO

    def get(self, x: str) -> PosType:
        return self[x]

    def domain(self) -> frozenset:
        return frozenset(x for x, _ in self.bindings)

    def items(self):
        return iter(self.bindings)

    def without(self, x: str) -> Environment:
        return Environment(tuple(b for b in self.bindings if b[0] != x))

    def __add__(self, other: Environment) -> Environment:
        if not other.bindings:
            return self
        if not self.bindings:
            return other
        merged = dict(self.bindings)
        for x, p in other.bindings:
            merged[x] = merged[x] + p if x in merged else p
        return Environment.of(merged)

    def __bool__(self):
        return bool(self.bindings)

    def __str__(self):
        return ", ".join(f"{x}:{p}" for x, p in self.bindings)


EMPTY_ENV = Environment()


def env_sum(gamma: Environment, delta: Environment) -> Environment:
    return gamma + delta


@dataclass(frozen=True, order=False)
class SemPoint:
    inputs: tuple
    output: PosType

    @property
    def size(self) -> int:
        return point_size(self)

    def sort_key(self):
        return (self.size, tuple(p.key for p in self.inputs), self.output.key)

    def __str__(self):
        return "(" + ", ".join(map(str, self.inputs)) + f") |- {self.output}"


def point_size(point: SemPoint) -> int:
    return point.output.size + sum(p.size for p in point.inputs)


# -- concrete syntax ----------------------------------------------------------

class TypeSyntaxError(ValueError):
    pass


_TYPE_TOKEN = re.compile(r"\s*([0\[\],>])")


def parse_type(src: str) -> PosType:
    """Parse ``pos := "0" | "[" neg {"," neg} "]"``, ``neg := pos ">" pos``."""
    tokens = []
    pos_ = 0
    while pos_ < len(src):
        if not src[pos_:].strip():
            break
        m = _TYPE_TOKEN.match(src, pos_)
        if m is None:
            raise TypeSyntaxError(f"unexpected {src[pos_:].strip()[0]!r} in type {src!r}")
        tokens.append(m.group(1))
        pos_ = m.end()
    tokens.append("$")
    i = 0

    def expect(tok):
        nonlocal i
        if tokens[i] != tok:
            raise TypeSyntaxError(f"expected {tok!r}, found {tokens[i]!r} in type {src!r}")
        i += 1

    def positive():
        nonlocal i
        if tokens[i] == "0":
            i += 1
            return ZERO
        expect("[")
        if tokens[i] == "]":
            i += 1
            return ZERO
        negs = [negative()]
        while tokens[i] == ",":
            i += 1
            negs.append(negative())
        expect("]")
        return PosType(negs)

    def negative():
        dom = positive()
        expect(">")
        return NegType(dom, positive())

    p = positive()
    expect("$")
    return p


# -- enumeration --------------------------------------------------------------

@lru_cache(maxsize=None)
def _negs_of_size(n: int) -> tuple:
    if n < 1:
        return ()
    out = []
    for i in range(n):
        for dom in types_of_size(i):
            for cod in types_of_size(n - 1 - i):
                out.append(NegType(dom, cod))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _negs_upto(n: int) -> tuple:
    return tuple(neg for k in range(1, n + 1) for neg in _negs_of_size(k))


@lru_cache(maxsize=None)
def types_of_size(n: int) -> tuple:
    """All positive types with exactly ``n`` arrows, in increasing order."""
    if n == 0:
        return (ZERO,)
    negs = _negs_upto(n)
    out = []

    def build(start, remaining, acc):
        if remaining == 0:
            out.append(PosType(acc))
            return
        for j in range(start, len(negs)):
            s = negs[j].size
            if s <= remaining:
                build(j, remaining - s, acc + (negs[j],))

    build(0, n, ())
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def types_upto(n: int) -> tuple:
    return tuple(p for k in range(max(n, -1) + 1) for p in types_of_size(k))


def sub_multisets(p: PosType) -> Iterator[tuple]:
    """Every way to write ``p`` as ``q + r``, yielded as pairs ``(q, r)``."""
    groups = []
    for n in p.elems:
        if groups and groups[-1][0] == n:
            groups[-1][1] += 1
        else:
            groups.append([n, 1])

    def rec(i, left, right):
        if i == len(groups):
            yield PosType(left), PosType(right)
            return
        n, count = groups[i]
        for k in range(count + 1):
            yield from rec(i + 1, left + (n,) * k, right + (n,) * (count - k))

    yield from rec(0, (), ())
