"""Type synthesis, elaboration of extended notations, context checking."""

from fractions import Fraction

import pytest

from cbpvdp import surface
from cbpvdp.syntax import (
    FVUNIT, INT, UNIT, VUNIT,
    Abort, App, ArrowT, DistT, EvalContext, Lambda, NumLit, Obs, Pifz,
    Produce, ProducerT, ProdT, Ret, Star, To, Var,
    AppArg, IfzFrame, SeqFrame, ToFrame,
    HOLE, PRODUCE_HOLE,
)
from cbpvdp.typecheck import (
    ContextError, TypeCheckError, check, check_context, elaborate, synth,
)


def s(text):
    return surface.parse(text)


def test_basic_types():
    assert synth(s("*")) == UNIT
    assert synth(s("42")) == INT
    assert synth(s("(*, 3)")) == ProdT(UNIT, INT)
    assert synth(s("ret *")) == VUNIT
    assert synth(s("produce (ret *)")) == FVUNIT
    assert synth(s("thunk (produce *)")).comp == ProducerT(UNIT)
    assert synth(s("\\x : int. produce x")) == ArrowT(INT, ProducerT(INT))


def test_binder_scoping():
    assert synth(s("(\\x : int. produce x) 3")) == ProducerT(INT)
    with pytest.raises(TypeCheckError, match="unbound"):
        synth(s("produce x"))


def test_annotation_mismatch_rejected():
    bad = Lambda("x", INT, Produce(Var("x", UNIT)))
    with pytest.raises(TypeCheckError, match="annotated"):
        synth(bad)


def test_arith_and_branches():
    assert synth(s("succ (pred 3)")) == INT
    assert synth(s("ifz 0 * *")) == UNIT
    with pytest.raises(TypeCheckError, match="disagree"):
        synth(s("ifz 0 * 3"))
    with pytest.raises(TypeCheckError, match="must be int"):
        synth(s("ifz * * *"))


def test_choice_typing():
    assert synth(s("ret * (+) ret *")) == VUNIT
    with pytest.raises(TypeCheckError):
        synth(s("* (+) *"))
    assert synth(s("produce * /\\ produce *")) == ProducerT(UNIT)
    with pytest.raises(TypeCheckError):
        synth(s("ret * /\\ ret *"))


def test_do_typing():
    assert synth(s("do x : unit <- ret * in ret x")) == VUNIT
    with pytest.raises(TypeCheckError, match="distribution"):
        synth(s("do x : unit <- ret * in produce x"))


def test_obs_typing():
    assert synth(s("obs[1/4] (produce (ret *))")) == UNIT
    with pytest.raises(TypeCheckError, match="tester argument"):
        synth(s("obs[1/4] (produce *)"))


def test_seq_head_must_be_unit():
    with pytest.raises(TypeCheckError, match="unit"):
        synth(s("3 ; produce *"))


def test_to_at_producer_stays_put():
    core, ty = elaborate(s("produce * to x : unit in produce x"))
    assert isinstance(core, To)
    assert ty == ProducerT(UNIT)


def test_to_at_arrow_eta_expands():
    term = s("produce * to x : unit in \\y : int. produce y")
    core, ty = elaborate(term)
    assert ty == ArrowT(INT, ProducerT(INT))
    # the elaborated form is an abstraction whose body sequences at a
    # producer type
    assert isinstance(core, Lambda)
    assert isinstance(core.body, To)
    assert isinstance(core.body.body, App)
    assert synth(core) == ty


def test_pifz_at_arrow_eta_expands():
    term = s("pifz 0 (\\y : int. produce y) (\\y : int. produce (succ y))")
    core, ty = elaborate(term)
    assert ty == ArrowT(INT, ProducerT(INT))
    assert isinstance(core, Lambda)
    assert isinstance(core.body, Pifz)
    assert synth(core) == ty


def test_abort_at_arrow_eta_expands():
    core, ty = elaborate(Abort(ArrowT(INT, ProducerT(UNIT))))
    assert ty == ArrowT(INT, ProducerT(UNIT))
    assert isinstance(core, Lambda)
    assert isinstance(core.body, Abort)
    assert core.body.cty == ProducerT(UNIT)


def test_nested_arrow_elaboration():
    term = s("produce * to x : unit in \\y : int. \\z : int. produce y")
    core, ty = elaborate(term)
    assert ty == ArrowT(INT, ArrowT(INT, ProducerT(INT)))
    assert synth(core) == ty
    # elaboration pushes the sequencing under both lambdas
    assert isinstance(core, Lambda)
    assert isinstance(core.body, Lambda)
    assert isinstance(core.body.body, To)


def test_rec_typing():
    assert synth(s("rec x : V int. ret 0 (+) x")) == DistT(INT)
    with pytest.raises(TypeCheckError, match="expected"):
        synth(s("rec x : V int. ret *"))


def test_check_context_empty_shapes():
    assert check_context(EvalContext(HOLE, ())) == FVUNIT
    assert check_context(EvalContext(PRODUCE_HOLE, ())) == VUNIT


def test_check_context_frames():
    ctx = EvalContext(HOLE, ()).push(
        ToFrame("x", VUNIT, Produce(Var("x", VUNIT)), FVUNIT))
    assert check_context(ctx) == FVUNIT
    ctx2 = ctx.push(AppArg(NumLit(2), ArrowT(INT, FVUNIT)))
    assert check_context(ctx2) == ArrowT(INT, FVUNIT)


def test_check_context_rejects_result_mismatch():
    ctx = EvalContext(PRODUCE_HOLE, ()).push(
        ToFrame("x", VUNIT, Produce(Var("x", VUNIT)), FVUNIT))
    with pytest.raises(ContextError, match="result type"):
        check_context(ctx)


def test_check_context_rejects_bad_embedded_term():
    ctx = EvalContext(HOLE, ()).push(
        ToFrame("x", VUNIT, Produce(Star()), FVUNIT))
    with pytest.raises(ContextError):
        check_context(ctx)


def test_check_against_expected():
    assert check(s("produce (ret *)"), FVUNIT)
    with pytest.raises(TypeCheckError, match="expected type"):
        check(s("produce *"), FVUNIT)


def test_error_carries_span():
    try:
        synth(s("produce y"))
    except TypeCheckError as e:
        assert e.span is not None
    else:
        raise AssertionError("expected a type error")
