import json

import pytest

from shuffling.derivation import check
from shuffling.multitypes import ZERO, SemPoint, arrow, pos
from shuffling.semantics import (
    InterpretationFragment, No, NonEmpty, SuitableList, Unknown, UnsuitableList, Yes,
    has_empty_point_semi, interpret_bounded, is_nonempty_semi, point_of,
)
from shuffling.terms import I, parse

A = arrow(ZERO, ZERO)


def P(src):
    return parse(src, constants=True)


T_EQ1 = P(r"(\y.D)(z I) D")
U_EQ1 = P(r"D ((\y.D)(z I))")


def test_suitable_lists():
    with pytest.raises(UnsuitableList):
        SuitableList(("x", "x"))
    with pytest.raises(UnsuitableList):
        interpret_bounded(P("x y"), ("x",))
    assert SuitableList.for_term(P("y x")).vars == ("x", "y")


def test_divergent_term_gives_incomplete_empty_fragment():
    frag = interpret_bounded(T_EQ1, ("z",), size_cap=2, fuel=200)
    assert frag.incomplete and not frag.points


def test_identity_points():
    frag = interpret_bounded(I, (), size_cap=1)
    assert frag.points == {SemPoint((), ZERO), SemPoint((), pos(A))}


def test_counterexample_point():
    frag = interpret_bounded(P(r"(\x.x)(y y)"), ("y",), size_cap=1)
    assert SemPoint((pos(A),), ZERO) in frag.points
    assert frag.lines() == ["([0>0]) |- 0"]


def test_witnesses_are_sound():
    t = P("D I")
    frag = interpret_bounded(t, (), size_cap=2)
    assert frag.points
    for pt, d in frag.witnesses.items():
        j = check(d)
        assert j.subject == t
        assert point_of(d, frag.vars) == pt


def test_invariance_under_reduction():
    pairs = [("D I", "I"), (r"(\x.\y.y)(I I)(I I)", "I"), (r"(\y.y')(D (x I)) I",
             r"(\z.(\y.y' I)(z z))(x I)")]
    for a, b in pairs:
        ta, tb = P(a), P(b)
        vars_ = tuple(sorted(ta.fv | tb.fv))
        fa = interpret_bounded(ta, vars_, size_cap=2)
        fb = interpret_bounded(tb, vars_, size_cap=2)
        assert fa.points == fb.points


def test_json_roundtrip():
    frag = interpret_bounded(P(r"(\x.x)(y y)"), ("y",), size_cap=2)
    again = InterpretationFragment.from_json(json.loads(json.dumps(frag.to_json())))
    assert again == frag
    assert set(again.witnesses) == set(frag.witnesses)


def test_nonempty():
    assert isinstance(is_nonempty_semi(P(r"(\y.D)(z I)")), NonEmpty)
    assert isinstance(is_nonempty_semi(P("D D"), fuel=500), Unknown)
    assert isinstance(is_nonempty_semi(T_EQ1, fuel=500), Unknown)
    w = is_nonempty_semi(P("D I")).witness
    assert check(w).subject == P("D I")


def test_empty_point():
    r = has_empty_point_semi(P("D I"))
    assert isinstance(r, Yes) and r.witness.size == 2
    r = has_empty_point_semi(P(r"(\y.D)(z I)"))
    assert isinstance(r, No) and r.normal_form == P(r"(\y.D)(z I)")
    r = has_empty_point_semi(P(r"\x.x x"))
    assert isinstance(r, Yes) and r.witness.size == 0
    assert isinstance(has_empty_point_semi(P("D D"), fuel=100), Unknown)
