"""Surface syntax: tokens, precedence, sugar, printing, round trips."""

from fractions import Fraction

import pytest

from cbpvdp.surface import ParseError, parse, parse_type_text, print_term
from cbpvdp.syntax import (
    FVUNIT, INT, UNIT, VUNIT,
    App, ArrowT, Force, Ifz, Lambda, NChoice, NumLit, Obs, Pair, PChoice,
    Pifz, Produce, ProducerT, ProdT, Rec, Ret, Seq, Star, Succ, ThunkT, To,
    Var,
    and_then, case_tag, eq0_then, eq1_then, omega, pcase, pif_le, por,
    pswitch, psum,
)
from cbpvdp.harness import GenPolicy, TermGen


def roundtrip(text):
    t = parse(text)
    assert parse(print_term(t)) == t
    return t


# Types -----------------------------------------------------------------------


def test_type_atoms():
    assert parse_type_text("unit") == UNIT
    assert parse_type_text("int") == INT
    assert parse_type_text("V unit") == VUNIT
    assert parse_type_text("F V unit") == FVUNIT
    assert parse_type_text("U F V unit") == ThunkT(FVUNIT)


def test_type_arrow_right_associative():
    ty = parse_type_text("int -> int -> F unit")
    assert ty == ArrowT(INT, ArrowT(INT, ProducerT(UNIT)))


def test_type_product_left_associative():
    ty = parse_type_text("unit * int * unit")
    assert ty == ProdT(ProdT(UNIT, INT), UNIT)


def test_type_kind_mismatches():
    with pytest.raises(ParseError):
        parse_type_text("F (F unit)")
    with pytest.raises(ParseError):
        parse_type_text("V (F unit)")
    with pytest.raises(ParseError):
        parse_type_text("U unit")
    with pytest.raises(ParseError):
        parse_type_text("unit -> int")


# Precedence and association --------------------------------------------------


def test_prefix_takes_one_primary():
    t = parse("\\g : U (int -> F V unit). force g 3")
    assert isinstance(t, Lambda)
    assert isinstance(t.body, App)
    assert isinstance(t.body.fn, Force)
    assert t.body.arg == NumLit(3)


def test_application_left_associative():
    t = parse("\\f : U (int -> int -> F unit). force f 1 2")
    assert t.body == App(App(Force(Var("f", t.var_ty)), NumLit(1)), NumLit(2))


def test_choice_tiers():
    a, b, c = Ret(NumLit(1)), Ret(NumLit(2)), Ret(NumLit(3))
    assert parse("ret 1 (+) ret 2 /\\ ret 3") == NChoice(PChoice(a, b), c)
    assert parse("ret 1 /\\ ret 2 (+) ret 3") == NChoice(a, PChoice(b, c))
    assert parse("ret 1 (+) ret 2 (+) ret 3") == \
        PChoice(PChoice(a, b), c)


def test_trailing_forms_right_greedy():
    t = parse("* ; * ; produce (ret *)")
    assert t == Seq(Star(), Seq(Star(), Produce(Ret(Star()))))
    t2 = parse("produce (ret *) to x : V unit in * ; produce x")
    assert isinstance(t2, To)
    assert isinstance(t2.body, Seq)


def test_ifz_three_primaries():
    t = parse("ifz 0 (succ 1) 2")
    assert t == Ifz(NumLit(0), Succ(NumLit(1)), NumLit(2))
    t2 = parse("pifz 0 (produce (ret 1)) (produce (ret 2))")
    assert isinstance(t2, Pifz)


def test_pairs_and_grouping():
    assert parse("(1, 2)") == Pair(NumLit(1), NumLit(2))
    assert parse("(1)") == NumLit(1)
    assert parse("((1, 2), *)") == Pair(Pair(NumLit(1), NumLit(2)), Star())


def test_binder_scoping_and_shadowing():
    t = parse("\\x : int. \\x : unit. produce x")
    assert t.body.body == Produce(Var("x", UNIT))
    u = parse("\\x : int. produce x")
    assert u.body == Produce(Var("x", INT))


def test_unbound_variable_parses_without_annotation():
    t = parse("produce y")
    assert t == Produce(Var("y", None))


def test_unicode_aliases():
    assert parse("λx : int. produce (ret x)") == \
        parse("\\x : int. produce (ret x)")
    assert parse("ret ∗ ⊕ ret ∗") == parse("ret * (+) ret *")
    assert parse("produce (ret ∗) ⊗ produce (ret ∗)") == \
        parse("produce (ret *) /\\ produce (ret *)")
    assert parse("do x : unit ← ret ∗ in ret x") == \
        parse("do x : unit <- ret * in ret x")
    assert parse_type_text("int → F unit") == parse_type_text("int -> F unit")


def test_comments():
    t = parse("# heading\nproduce (ret *) # tail comment")
    assert t == Produce(Ret(Star()))


# Sugar -----------------------------------------------------------------------


def test_omega_sugar():
    assert parse("omega[V unit]") == omega(VUNIT)
    assert parse("omega[F V unit]") == omega(FVUNIT)
    assert isinstance(parse("omega[F V unit]"), Force)


def test_case_tag_sugar():
    assert parse("[* : 3]") == case_tag(Star(), 3)


def test_por_sugar():
    a = parse("* \\/ *")
    assert a == por(Star(), Star())


def test_and_then_family():
    m = Produce(Ret(Star()))
    assert parse("produce (ret *) & produce (ret *)") == and_then(m, m)
    p = parse("produce 0 eq0& produce (ret *)")
    assert p == eq0_then(Produce(NumLit(0)), m)
    q = parse("produce 1 eq1& produce (ret *)")
    assert q == eq1_then(Produce(NumLit(1)), m)


def test_pif_sugar():
    got = parse("pif[2] 1 (produce (ret 1)) (produce (ret 2))")
    assert got == pif_le(2, NumLit(1),
                         Produce(Ret(NumLit(1))), Produce(Ret(NumLit(2))))


def test_pswitch_sugar():
    got = parse("pswitch[F V unit] 1 {produce (ret *) | produce (ret *)}")
    want = pswitch(NumLit(1),
                   [Produce(Ret(Star())), Produce(Ret(Star()))], FVUNIT)
    assert got == want
    empty = parse("pswitch[F V unit] 1 {}")
    assert empty == pswitch(NumLit(1), [], FVUNIT)


def test_pcase_sugar():
    got = parse("pcase[F V unit] {* -> produce (ret *)}")
    assert got == pcase([(Star(), Produce(Ret(Star())))], FVUNIT)


def test_sum_sugar():
    one = parse("sum{ret 1}")
    assert one == psum([Ret(NumLit(1))])
    two = parse("sum{ret 1 | ret 2}")
    assert two == PChoice(Ret(NumLit(1)), Ret(NumLit(2)))
    four = parse("sum{ret 1 | ret 2 | ret 3 | ret 4}")
    assert four == psum([Ret(NumLit(n)) for n in (1, 2, 3, 4)])


def test_obs_bound_parsing():
    t = parse("obs[1/4] (produce (ret *))")
    assert isinstance(t, Obs)
    assert t.bound == Fraction(1, 4)


# Rejections ------------------------------------------------------------------


def test_parse_errors():
    for bad in [
        "",
        "(produce (ret *)",
        "produce (ret *) extra garbage )",
        "obs[0/1] (produce (ret *))",
        "obs[3/2] (produce (ret *))",
        "obs[1/0] (produce (ret *))",
        "abort[int]",
        "pswitch[unit] 1 {}",
        "sum{ret 1 | ret 2 | ret 3}",
        "sum{}",
        "pcase[F V unit] {}",
        "\\to : int. produce (ret *)",
        "rec x. x",
        "do x <- ret * in ret x",
        "(1, 2",
        "[* : ]",
    ]:
        with pytest.raises(ParseError):
            parse(bad)


def test_parse_error_location():
    try:
        parse("produce (ret *)\n   ; ; produce (ret *)")
    except ParseError as e:
        assert e.line == 2
        assert e.col >= 4
    else:
        raise AssertionError("expected a parse error")


def test_binder_needs_value_type():
    with pytest.raises(ParseError):
        parse("\\x : F unit. produce (ret *)")
    with pytest.raises(ParseError):
        parse("rec x : 3. x")


# Round trips -----------------------------------------------------------------

FIXTURES = [
    "*",
    "42",
    "produce (ret *)",
    "ret * (+) omega[V unit]",
    "produce (ret *) /\\ produce (ret *)",
    "\\x : int. produce (ret (succ x))",
    "(\\x : int. produce (ret x)) 3",
    "rec u : V unit. (ret * (+) u)",
    "do x : unit <- ret * in ret x",
    "produce (ret 2) to x : V int in produce x",
    "ifz 0 (produce (ret 1)) (produce (ret 2))",
    "pifz (rec x : int. x) (produce (ret 1)) (produce (ret 2))",
    "obs[1/4] (produce (ret *)) ; produce (ret *)",
    "abort[F V unit]",
    "pi1 (1, *)",
    "pi2 (1, *)",
    "force (thunk (produce (ret *)))",
    "[* : 2]",
    "pif[1] 0 (produce (ret *)) abort[F V unit]",
    "* \\/ *",
    "produce 0 eq0& produce (ret *)",
]


@pytest.mark.parametrize("text", FIXTURES)
def test_roundtrip_fixtures(text):
    roundtrip(text)


def test_print_is_stable():
    for text in FIXTURES:
        once = print_term(parse(text))
        again = print_term(parse(once))
        assert once == again


def test_roundtrip_generated_corpus():
    gen = TermGen(GenPolicy(seed=11, max_depth=6, rec_probability=0.3,
                            omega_weight=1))
    for _ in range(150):
        t = gen.term(FVUNIT)
        assert parse(print_term(t)) == t
