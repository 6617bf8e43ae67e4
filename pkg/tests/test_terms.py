import pytest
from hypothesis import given

from oracles import beta, substitute_free, to_debruijn
from strategies import terms, values
from shuffling.terms import (
    DELTA, I, Abs, App, ParseError, Var, fresh_name, free_vars, parse, pretty, subst,
)


def test_parse_application_is_left_associative():
    assert parse("x y z") == App(App(Var("x"), Var("y")), Var("z"))


def test_abstraction_extends_right():
    assert parse(r"\x.x y") == Abs("x", App(Var("x"), Var("y")))
    assert parse(r"x \y.y z") == App(Var("x"), Abs("y", App(Var("y"), Var("z"))))


def test_constants():
    assert parse("I", constants=True) == I
    assert parse("D", constants=True) == DELTA
    assert parse("D") == Var("D")
    with pytest.raises(ParseError):
        parse(r"\I.I", constants=True)


def test_unicode_lambda_and_primes():
    assert parse("λx'.x'") == Abs("x'", Var("x'"))
    assert pretty(parse(r"\x.x"), unicode=True) == "λx.x"


def test_pretty_forms():
    assert pretty(parse(r"(\x.x)(y y)")) == r"(\x.x)(y y)"
    assert pretty(parse("x (y z) w")) == "x (y z) w"
    assert pretty(parse(r"(\x.x) y")) == r"(\x.x) y"


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse("x\n  ( y")
    assert info.value.line == 2
    with pytest.raises(ParseError) as info:
        parse("x # y")
    assert info.value.column == 3


def test_alpha_equality():
    assert parse(r"\x.x") == parse(r"\y.y")
    assert hash(parse(r"\x.\y.x y")) == hash(parse(r"\a.\b.a b"))
    assert parse(r"\x.y") != parse(r"\x.z")
    assert parse(r"\x.\x.x") != parse(r"\x.\y.x")


def test_free_vars():
    assert free_vars(parse(r"\x.x y (\y.y z)")) == {"y", "z"}


def test_subst_avoids_capture():
    t = subst(parse(r"\y.x y"), "x", Var("y"))
    assert t == parse(r"\z.y z")
    assert "y" in t.fv


def test_subst_rejects_non_values():
    with pytest.raises(ValueError):
        subst(Var("x"), "x", parse("y y"))


def test_fresh_name():
    assert fresh_name("x", {"x", "x1"}) == "x2"
    assert fresh_name("x3", set()) == "x1"


@given(terms())
def test_pretty_parse_roundtrip(t):
    assert parse(pretty(t)) == t
    assert parse(pretty(t, unicode=True)) == t


@given(terms())
def test_equality_agrees_with_debruijn(t):
    renamed = Abs("q", t)
    assert (renamed == Abs("r", subst(t, "q", Var("r")))) or "r" in t.fv


@given(terms(), values())
def test_subst_matches_debruijn_oracle(t, v):
    expected = substitute_free(to_debruijn(t), "x", to_debruijn(v))
    assert to_debruijn(subst(t, "x", v)) == expected


@given(terms(), values())
def test_subst_through_binder_matches_beta(t, v):
    lhs = to_debruijn(subst(t, "x", v))
    assert lhs == beta(to_debruijn(Abs("x", t))[1], to_debruijn(v))
