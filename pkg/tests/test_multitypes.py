import pytest
from hypothesis import given

from oracles import count_positive
from strategies import pos_types
from shuffling.multitypes import (
    ZERO, Environment, NegType, PosType, SemPoint, TypeSyntaxError, arrow, parse_type,
    point_size, pos, sub_multisets, type_depth, types_of_size, types_upto,
)

A = arrow(ZERO, ZERO)


def test_zero_and_sizes():
    assert ZERO.size == 0 and not ZERO
    assert pos(A).size == 1
    assert pos(A, A).size == 2
    assert pos(arrow(pos(A), ZERO)).size == 2


def test_multiset_order_is_irrelevant():
    b = arrow(pos(A), ZERO)
    assert pos(A, b) == pos(b, A)
    assert hash(pos(A, b)) == hash(pos(b, A))
    assert pos(A) != pos(A, A)


def test_printing_and_parsing():
    assert str(ZERO) == "0"
    assert str(pos(A)) == "[0>0]"
    assert parse_type("[[0>0]>0, 0>0]") == pos(arrow(pos(A), ZERO), A)
    assert parse_type("[]") == ZERO
    for bad in ["[0]", "[0>0", "0>0", "x"]:
        with pytest.raises(TypeSyntaxError):
            parse_type(bad)


def test_depth():
    assert type_depth(ZERO) == 0
    assert type_depth(pos(A)) == 1
    assert type_depth(pos(arrow(pos(A), ZERO))) == 2


def test_environment_sum_and_lookup():
    g = Environment.of({"x": pos(A), "y": ZERO})
    assert g.domain() == {"x"}
    assert g["y"] == ZERO
    h = g + Environment.of({"x": pos(A), "z": pos(A)})
    assert h["x"] == pos(A, A) and h["z"] == pos(A)
    assert str(h) == "x:[0>0, 0>0], z:[0>0]"
    assert h.without("x").domain() == {"z"}


def test_point_size_and_format():
    p = SemPoint((pos(A),), ZERO)
    assert point_size(p) == 1
    assert str(p) == "([0>0]) |- 0"
    assert str(SemPoint((), ZERO)) == "() |- 0"


def test_type_counts_match_generating_function():
    for n in range(7):
        assert len(types_of_size(n)) == count_positive(n)
        assert all(p.size == n for p in types_of_size(n))
    assert [len(types_of_size(n)) for n in range(5)] == [1, 1, 3, 10, 39]
    assert len(set(types_upto(5))) == len(types_upto(5))


@given(pos_types(), pos_types(), pos_types())
def test_sum_is_commutative_monoid(p, q, r):
    assert p + q == q + p
    assert (p + q) + r == p + (q + r)
    assert p + ZERO == p
    assert (p + q).size == p.size + q.size


@given(pos_types())
def test_parse_print_roundtrip(p):
    assert parse_type(str(p)) == p


@given(pos_types())
def test_sub_multisets_cover_all_splits(p):
    splits = list(sub_multisets(p))
    assert all(q + r == p for q, r in splits)
    assert len(set(splits)) == len(splits)
    assert (ZERO, p) in splits and (p, ZERO) in splits


def test_negtype_ordering_total():
    negs = [NegType(ZERO, ZERO), NegType(pos(A), ZERO), NegType(ZERO, pos(A))]
    assert sorted(negs) == sorted(reversed(negs))
    assert PosType(negs) == PosType(list(reversed(negs)))
