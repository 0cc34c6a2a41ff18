"""Abstract syntax for a call-by-push-value calculus with probabilistic
choice, demonic choice, parallel-if, and statistical termination testers.

Value types classify data, computation types classify machine behavior.
Every binder carries a type annotation, so type synthesis never infers.
Evaluation contexts are flat frame stacks rooted at one of three initial
shapes. All numeric payloads are arbitrary-precision ints or Fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

# ---------------------------------------------------------------------------
# Types

@dataclass(frozen=True)
class UnitT:
    def __str__(self) -> str:
        return "unit"


@dataclass(frozen=True)
class IntT:
    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True)
class ProdT:
    fst: "ValueType"
    snd: "ValueType"

    def __str__(self) -> str:
        return f"({self.fst} * {self.snd})"


@dataclass(frozen=True)
class DistT:
    """Subprobability distributions over values of the element type."""

    elem: "ValueType"

    def __str__(self) -> str:
        return f"V {self.elem}"


@dataclass(frozen=True)
class ThunkT:
    """Suspended computations, embedded as values."""

    comp: "CompType"

    def __str__(self) -> str:
        return f"U {self.comp}"


@dataclass(frozen=True)
class ProducerT:
    """Computations that set out to produce a value of the element type."""

    elem: "ValueType"

    def __str__(self) -> str:
        return f"F {self.elem}"


@dataclass(frozen=True)
class ArrowT:
    arg: "ValueType"
    res: "CompType"

    def __str__(self) -> str:
        return f"({self.arg} -> {self.res})"


ValueType = Union[UnitT, IntT, ProdT, DistT, ThunkT]
CompType = Union[ProducerT, ArrowT]
Type = Union[ValueType, CompType]

UNIT = UnitT()
INT = IntT()
VUNIT = DistT(UNIT)
FVUNIT = ProducerT(VUNIT)


def is_value_type(ty: Type) -> bool:
    return isinstance(ty, (UnitT, IntT, ProdT, DistT, ThunkT))


def is_comp_type(ty: Type) -> bool:
    return isinstance(ty, (ProducerT, ArrowT))


def rank(ty: Type) -> Fraction:
    """Rank 0 for plain value types, 1/2 for distribution types, 1 for
    computation types. Frames never decrease rank from hole to result."""
    if isinstance(ty, DistT):
        return Fraction(1, 2)
    if is_comp_type(ty):
        return Fraction(1)
    if is_value_type(ty):
        return Fraction(0)
    raise TypeError(f"not a type: {ty!r}")


# ---------------------------------------------------------------------------
# Terms
#
# The span field records source positions when a term came from the parser;
# it never participates in equality or hashing.

_SPAN = dict(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    ty: ValueType
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Star:
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class NumLit:
    value: int
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Abort:
    """The demonically empty computation. Core terms only carry producer
    types here; arrow-typed aborts are surface sugar that eta-expands."""

    cty: CompType
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Lambda:
    var: str
    var_ty: ValueType
    body: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Rec:
    """Recursive definition at a value type."""

    var: str
    var_ty: ValueType
    body: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Succ:
    arg: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Pred:
    arg: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Thunk:
    comp: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Force:
    thunk: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Seq:
    first: "Term"
    rest: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Ifz:
    scrut: "Term"
    if_zero: "Term"
    if_nonzero: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Proj1:
    pair: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Proj2:
    pair: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class PChoice:
    """Fair probabilistic choice between two distribution-typed terms."""

    left: "Term"
    right: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Ret:
    value: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Do:
    """Monadic bind for the distribution layer."""

    var: str
    var_ty: ValueType
    source: "Term"
    body: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class NChoice:
    """Demonic choice between two producer-typed terms."""

    left: "Term"
    right: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Produce:
    value: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class To:
    """Sequencing of a producer into a computation body."""

    source: "Term"
    var: str
    var_ty: ValueType
    body: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Pifz:
    """Parallel zero-test: may commit to the branches' agreement before the
    scrutinee converges."""

    scrut: "Term"
    if_zero: "Term"
    if_nonzero: "Term"
    span: Optional[tuple] = field(**_SPAN)


@dataclass(frozen=True)
class Obs:
    """Statistical termination tester: converges iff the argument's
    termination probability strictly exceeds the bound."""

    bound: Fraction
    arg: "Term"
    span: Optional[tuple] = field(**_SPAN)

    def __post_init__(self):
        b = self.bound
        if not isinstance(b, Fraction) or not (0 < b < 1):
            raise ValueError(f"tester bound must be a rational in (0,1), got {b!r}")


Term = Union[
    Var, Star, NumLit, Abort, Lambda, App, Rec, Succ, Pred, Thunk, Force,
    Seq, Ifz, Proj1, Proj2, Pair, PChoice, Ret, Do, NChoice, Produce, To,
    Pifz, Obs,
]

# Binding structure: for each class, (binder field, fields bound by it).
_BINDERS = {
    Lambda: ("var", ("body",)),
    Rec: ("var", ("body",)),
    Do: ("var", ("body",)),
    To: ("var", ("body",)),
}

_CHILD_FIELDS = {
    Var: (), Star: (), NumLit: (), Abort: (),
    Lambda: ("body",),
    App: ("fn", "arg"),
    Rec: ("body",),
    Succ: ("arg",), Pred: ("arg",),
    Thunk: ("comp",), Force: ("thunk",),
    Seq: ("first", "rest"),
    Ifz: ("scrut", "if_zero", "if_nonzero"),
    Proj1: ("pair",), Proj2: ("pair",),
    Pair: ("fst", "snd"),
    PChoice: ("left", "right"),
    Ret: ("value",),
    Do: ("source", "body"),
    NChoice: ("left", "right"),
    Produce: ("value",),
    To: ("source", "body"),
    Pifz: ("scrut", "if_zero", "if_nonzero"),
    Obs: ("arg",),
}


def free_vars(term: Term) -> frozenset:
    """Names occurring free in the term."""
    if isinstance(term, Var):
        return frozenset((term.name,))
    binder = _BINDERS.get(type(term))
    out = frozenset()
    for f in _CHILD_FIELDS[type(term)]:
        sub = free_vars(getattr(term, f))
        if binder is not None and f in binder[1]:
            sub = sub - {getattr(term, binder[0])}
        out |= sub
    return out


def fresh(base: str, avoid) -> str:
    """Deterministic fresh-name supply: the base itself if unused, else the
    first base<k> not in the avoid set."""
    if base not in avoid:
        return base
    k = 1
    while f"{base}{k}" in avoid:
        k += 1
    return f"{base}{k}"


def _rebuild(term: Term, **changes) -> Term:
    fields = {f: getattr(term, f) for f in _CHILD_FIELDS[type(term)]}
    fields.update(changes)
    if isinstance(term, Var):
        return term
    kwargs = {}
    for f in type(term).__dataclass_fields__:
        if f == "span":
            continue
        kwargs[f] = fields.get(f, getattr(term, f))
    return type(term)(**kwargs)


def substitute_parallel(term: Term, mapping: dict) -> Term:
    """Simultaneous capture-avoiding substitution of terms for free names."""
    mapping = {k: v for k, v in mapping.items()}
    return _subst(term, mapping)


def substitute(term: Term, name: str, replacement: Term) -> Term:
    """Capture-avoiding substitution of one term for a free name."""
    return _subst(term, {name: replacement})


def _subst(term: Term, mapping: dict) -> Term:
    if not mapping:
        return term
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    binder = _BINDERS.get(type(term))
    if binder is None:
        changes = {}
        for f in _CHILD_FIELDS[type(term)]:
            changes[f] = _subst(getattr(term, f), mapping)
        return _rebuild(term, **changes)

    bname_field, bound_fields = binder
    bname = getattr(term, bname_field)
    inner = {k: v for k, v in mapping.items() if k != bname}
    live = {k for k in inner if any(k in free_vars(getattr(term, f)) for f in bound_fields)}
    inner = {k: inner[k] for k in live}

    changes = {}
    for f in _CHILD_FIELDS[type(term)]:
        if f not in bound_fields:
            changes[f] = _subst(getattr(term, f), mapping)

    if inner:
        clash = set()
        for v in inner.values():
            clash |= free_vars(v)
        if bname in clash:
            # The binder would capture a free name of a replacement: rename it.
            avoid = set(clash) | set(inner)
            for f in bound_fields:
                avoid |= free_vars(getattr(term, f))
            newname = fresh(bname, avoid)
            var_ty = getattr(term, bname_field.replace("var", "var_ty"))
            rename = {bname: Var(newname, var_ty)}
            for f in bound_fields:
                changes[f] = _subst(_subst(getattr(term, f), rename), inner)
            return _rebuild_binder(term, newname, changes)
        for f in bound_fields:
            changes[f] = _subst(getattr(term, f), inner)
    else:
        for f in bound_fields:
            changes[f] = getattr(term, f)
    return _rebuild(term, **changes)


def _rebuild_binder(term: Term, newname: str, changes: dict) -> Term:
    kwargs = {}
    for f in type(term).__dataclass_fields__:
        if f == "span":
            continue
        if f == _BINDERS[type(term)][0]:
            kwargs[f] = newname
        elif f in changes:
            kwargs[f] = changes[f]
        else:
            kwargs[f] = getattr(term, f)
    return type(term)(**kwargs)


def alpha_equal(a: Term, b: Term) -> bool:
    """Structural equality up to renaming of bound variables. Binder and
    free-variable type annotations must match exactly."""
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Term, b: Term, env_a: dict, env_b: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        ia, ib = env_a.get(a.name), env_b.get(b.name)
        if ia is not None or ib is not None:
            return ia == ib and a.ty == b.ty
        return a.name == b.name and a.ty == b.ty
    if isinstance(a, NumLit):
        return a.value == b.value
    if isinstance(a, Star):
        return True
    if isinstance(a, Abort):
        return a.cty == b.cty
    if isinstance(a, Obs) and a.bound != b.bound:
        return False

    binder = _BINDERS.get(type(a))
    if binder is not None:
        bf, bound_fields = binder
        ty_field = bf.replace("var", "var_ty")
        if getattr(a, ty_field) != getattr(b, ty_field):
            return False
        ea = dict(env_a)
        eb = dict(env_b)
        ea[getattr(a, bf)] = depth
        eb[getattr(b, bf)] = depth
        for f in _CHILD_FIELDS[type(a)]:
            if f in bound_fields:
                if not _alpha(getattr(a, f), getattr(b, f), ea, eb, depth + 1):
                    return False
            else:
                if not _alpha(getattr(a, f), getattr(b, f), env_a, env_b, depth):
                    return False
        return True

    for f in _CHILD_FIELDS[type(a)]:
        if not _alpha(getattr(a, f), getattr(b, f), env_a, env_b, depth):
            return False
    return True


def canon(term: Term) -> str:
    """Deterministic alpha-invariant rendering, used as a hash key for
    configurations. Bound names are replaced by binding depth."""
    parts = []
    _canon(term, {}, 0, parts)
    return "".join(parts)


def _canon(term: Term, env: dict, depth: int, out: list) -> None:
    t = type(term).__name__
    if isinstance(term, Var):
        idx = env.get(term.name)
        if idx is None:
            out.append(f"(v!{term.name}:{term.ty})")
        else:
            out.append(f"(v#{idx})")
        return
    if isinstance(term, NumLit):
        out.append(f"(n{term.value})")
        return
    if isinstance(term, Star):
        out.append("(*)")
        return
    if isinstance(term, Abort):
        out.append(f"(ab:{term.cty})")
        return
    out.append("(")
    out.append(t)
    if isinstance(term, Obs):
        out.append(f"[{term.bound}]")
    binder = _BINDERS.get(type(term))
    if binder is not None:
        bf, bound_fields = binder
        ty_field = bf.replace("var", "var_ty")
        out.append(f"[:{getattr(term, ty_field)}]")
        inner = dict(env)
        inner[getattr(term, bf)] = depth
        for f in _CHILD_FIELDS[type(term)]:
            if f in bound_fields:
                _canon(getattr(term, f), inner, depth + 1, out)
            else:
                _canon(getattr(term, f), env, depth, out)
    else:
        for f in _CHILD_FIELDS[type(term)]:
            _canon(getattr(term, f), env, depth, out)
    out.append(")")


# ---------------------------------------------------------------------------
# Evaluation contexts
#
# A context is an initial shape plus a stack of elementary frames, innermost
# frame last. Each frame stores just enough type annotation to make its hole
# and result types locally computable.


@dataclass(frozen=True)
class AppArg:
    arg: Term
    fn_ty: ArrowT


@dataclass(frozen=True)
class ToFrame:
    var: str
    var_ty: ValueType
    body: Term
    res: ProducerT


@dataclass(frozen=True)
class ForceFrame:
    res: CompType


@dataclass(frozen=True)
class SuccFrame:
    pass


@dataclass(frozen=True)
class PredFrame:
    pass


@dataclass(frozen=True)
class IfzFrame:
    if_zero: Term
    if_nonzero: Term
    res: Type


@dataclass(frozen=True)
class SeqFrame:
    rest: Term
    res: Type


@dataclass(frozen=True)
class Proj1Frame:
    pair_ty: ProdT


@dataclass(frozen=True)
class Proj2Frame:
    pair_ty: ProdT


@dataclass(frozen=True)
class DoFrame:
    var: str
    var_ty: ValueType
    body: Term
    res: DistT


Frame = Union[
    AppArg, ToFrame, ForceFrame, SuccFrame, PredFrame, IfzFrame, SeqFrame,
    Proj1Frame, Proj2Frame, DoFrame,
]

HOLE = "hole"
PRODUCE_HOLE = "produce"
PRODUCE_RET_HOLE = "produce-ret"

_INITIAL_HOLE_TYPES = {
    HOLE: FVUNIT,
    PRODUCE_HOLE: VUNIT,
    PRODUCE_RET_HOLE: UNIT,
}


@dataclass(frozen=True)
class EvalContext:
    """Initial shape plus elementary frames, innermost last. The result
    type is always F V unit."""

    initial: str = HOLE
    frames: tuple = ()

    def push(self, frame: Frame) -> "EvalContext":
        return EvalContext(self.initial, self.frames + (frame,))

    def pop(self) -> tuple:
        return EvalContext(self.initial, self.frames[:-1]), self.frames[-1]


EMPTY_CTX = EvalContext(HOLE, ())


def frame_hole_type(frame: Frame) -> Type:
    if isinstance(frame, AppArg):
        return frame.fn_ty
    if isinstance(frame, ToFrame):
        return ProducerT(frame.var_ty)
    if isinstance(frame, ForceFrame):
        return ThunkT(frame.res)
    if isinstance(frame, (SuccFrame, PredFrame)):
        return INT
    if isinstance(frame, IfzFrame):
        return INT
    if isinstance(frame, SeqFrame):
        return UNIT
    if isinstance(frame, (Proj1Frame, Proj2Frame)):
        return frame.pair_ty
    if isinstance(frame, DoFrame):
        return DistT(frame.var_ty)
    raise TypeError(f"not a frame: {frame!r}")


def frame_result_type(frame: Frame) -> Type:
    if isinstance(frame, AppArg):
        return frame.fn_ty.res
    if isinstance(frame, ToFrame):
        return frame.res
    if isinstance(frame, ForceFrame):
        return frame.res
    if isinstance(frame, (SuccFrame, PredFrame)):
        return INT
    if isinstance(frame, IfzFrame):
        return frame.res
    if isinstance(frame, SeqFrame):
        return frame.res
    if isinstance(frame, Proj1Frame):
        return frame.pair_ty.fst
    if isinstance(frame, Proj2Frame):
        return frame.pair_ty.snd
    if isinstance(frame, DoFrame):
        return frame.res
    raise TypeError(f"not a frame: {frame!r}")


def ctx_hole_type(ctx: EvalContext) -> Type:
    if ctx.frames:
        return frame_hole_type(ctx.frames[-1])
    return _INITIAL_HOLE_TYPES[ctx.initial]


def plug_frame(frame: Frame, term: Term) -> Term:
    if isinstance(frame, AppArg):
        return App(term, frame.arg)
    if isinstance(frame, ToFrame):
        return To(term, frame.var, frame.var_ty, frame.body)
    if isinstance(frame, ForceFrame):
        return Force(term)
    if isinstance(frame, SuccFrame):
        return Succ(term)
    if isinstance(frame, PredFrame):
        return Pred(term)
    if isinstance(frame, IfzFrame):
        return Ifz(term, frame.if_zero, frame.if_nonzero)
    if isinstance(frame, SeqFrame):
        return Seq(term, frame.rest)
    if isinstance(frame, Proj1Frame):
        return Proj1(term)
    if isinstance(frame, Proj2Frame):
        return Proj2(term)
    if isinstance(frame, DoFrame):
        return Do(frame.var, frame.var_ty, term, frame.body)
    raise TypeError(f"not a frame: {frame!r}")


def plug(ctx: EvalContext, term: Term) -> Term:
    """Wrap the term in the context's frames (innermost first), then in the
    initial shape."""
    for frame in reversed(ctx.frames):
        term = plug_frame(frame, term)
    if ctx.initial == PRODUCE_HOLE:
        return Produce(term)
    if ctx.initial == PRODUCE_RET_HOLE:
        return Produce(Ret(term))
    return term


def canon_frame(frame: Frame) -> str:
    parts = [type(frame).__name__]
    if isinstance(frame, (ToFrame, DoFrame)):
        parts.append(f"[{frame.var_ty}]")
        parts.append(canon(Lambda(frame.var, frame.var_ty, frame.body)))
    elif isinstance(frame, AppArg):
        parts.append(canon(frame.arg))
    elif isinstance(frame, IfzFrame):
        parts.append(canon(frame.if_zero))
        parts.append(canon(frame.if_nonzero))
    elif isinstance(frame, SeqFrame):
        parts.append(canon(frame.rest))
    return "".join(parts)


# ---------------------------------------------------------------------------
# Derived forms
#
# All expand eagerly to core terms. Expansions that need a type use the
# explicit annotation supplied at the use site.


def omega(ty: Type) -> Term:
    """The canonical diverging term at any type."""
    if is_value_type(ty):
        v = "x"
        return Rec(v, ty, Var(v, ty))
    if is_comp_type(ty):
        return Force(omega(ThunkT(ty)))
    raise TypeError(f"not a type: {ty!r}")


FUNIT = ProducerT(UNIT)


def eq0_then(probe: Term, rest: Term, rest_ty: CompType = None) -> Term:
    """Run an int producer; continue iff it produced 0, else hang. rest_ty
    names the continuation's type so the hang branch can match it; it
    defaults to the tester-argument type F V unit."""
    rest_ty = rest_ty if rest_ty is not None else FVUNIT
    x = fresh("x", free_vars(rest))
    return To(probe, x, INT, Ifz(Var(x, INT), rest, omega(rest_ty)))


def eq1_then(probe: Term, rest: Term, rest_ty: CompType = None) -> Term:
    """Run an int producer; continue iff it produced 1, else hang."""
    rest_ty = rest_ty if rest_ty is not None else FVUNIT
    x = fresh("x", free_vars(rest))
    return To(probe, x, INT, Ifz(Pred(Var(x, INT)), rest, omega(rest_ty)))


def and_then(first: Term, rest: Term) -> Term:
    """Run a unit producer for its convergence behavior, discard the result,
    then run the rest."""
    x = fresh("x", free_vars(rest))
    return To(first, x, UNIT, rest)


def pred_n(term: Term, n: int) -> Term:
    for _ in range(n):
        term = Pred(term)
    return term


def pif_le(n: int, scrut: Term, if_le: Term, if_gt: Term) -> Term:
    """Parallel threshold test: first branch when the scrutinee is at most
    n, second when it exceeds n. Subtraction is truncated, so zero cannot
    be told apart from values below the threshold."""
    if n < 0:
        raise ValueError("pif threshold must be a natural number")
    return Pifz(pred_n(scrut, n), if_le, if_gt)


def pswitch(scrut: Term, branches, res_cty: CompType) -> Term:
    """Parallel dispatch on the literals 1..n: thresholds are tested low to
    high, so branch i runs for scrutinee i, and anything above n falls
    through to abort. Scrutinee 0 is conflated with 1 by the truncated
    test; dispatch sources are expected to emit tags from 1 up. Zero
    branches expand to abort alone."""
    acc: Term = Abort(res_cty)
    for i, branch in reversed(list(enumerate(branches, start=1))):
        acc = pif_le(i, scrut, branch, acc)
    return acc


def por(left: Term, right: Term) -> Term:
    """Parallel disjunction of two unit-typed terms."""
    probe = Pifz(Seq(left, NumLit(0)), Produce(Ret(Star())), Produce(Ret(right)))
    return Obs(Fraction(1, 2), probe)


def case_tag(guard: Term, tag: int) -> Term:
    """Produce the tag iff the unit-typed guard hangs; fail if it converges."""
    return Pifz(Seq(guard, NumLit(0)), Abort(ProducerT(INT)), Produce(NumLit(tag)))


def pcase(branches, res_cty: CompType) -> Term:
    """Demonic parallel case: run the branch of every guard that hangs.
    Takes (guard, body) pairs, at least one."""
    branches = list(branches)
    if not branches:
        raise ValueError("pcase needs at least one branch")
    chain: Term = case_tag(branches[0][0], 1)
    for i, (guard, _) in enumerate(branches[1:], start=2):
        chain = NChoice(chain, case_tag(guard, i))
    y = "y"
    avoid = set()
    for _, body in branches:
        avoid |= free_vars(body)
    y = fresh(y, avoid)
    return To(chain, y, INT, pswitch(Var(y, INT), [b for _, b in branches], res_cty))


def psum(terms) -> Term:
    """Uniform probabilistic choice over exactly 2**n terms, splitting the
    list in half recursively."""
    terms = list(terms)
    n = len(terms)
    if n == 0 or (n & (n - 1)) != 0:
        raise ValueError("uniform sum needs a power-of-two term count")
    if n == 1:
        return terms[0]
    return PChoice(psum(terms[: n // 2]), psum(terms[n // 2:]))


DERIVED_FORMS = {
    "omega": omega,
    "eq0&": eq0_then,
    "eq1&": eq1_then,
    "&": and_then,
    "pif": pif_le,
    "pswitch": pswitch,
    "\\/": por,
    "case-tag": case_tag,
    "pcase": pcase,
    "sum": psum,
}


def derived_form(name: str, *args) -> Term:
    """Expand a derived form by registry name."""
    try:
        builder = DERIVED_FORMS[name]
    except KeyError:
        raise ValueError(f"unknown derived form: {name}") from None
    return builder(*args)
