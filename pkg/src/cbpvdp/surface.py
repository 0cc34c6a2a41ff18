"""Surface grammar: lexer, recursive-descent parser, and printer.

Terms
    binder forms    \\x : T. M        rec x : T. M
                    do x : T <- M in N
    trailing forms  M to x : T in N   M ; N    M & N    M eq0& N    M eq1& N
    infix           M \\/ N   (parallel or, loosest)
                    M /\\ N   (demonic choice)
                    M (+) N  (fair coin)
    application     juxtaposition, left associative
    primaries       *   numerals   variables   (M)   (M, N)   [M : n]
                    thunk P   force P   produce P   ret P   succ P   pred P
                    pi1 P   pi2 P   obs[p/q] P   ifz P P P   pifz P P P
                    pif[n] P P P   omega[T]   abort[T]
                    pswitch[T] P {M | ... | M}   (branch list may be empty)
                    pcase[T] {M -> N | ... | M -> N}
                    sum{M | ... | M}   (count must be a power of two)

Types
    atoms           unit   int   U A   F A   V A   (T)
    products        A * A ...       (left associative)
    arrows          T -> T          (right associative)

Comments run from # to end of line. Unicode aliases: λ for \\, ∗ for *,
⊕ for (+), ⊓ and ⊗ for /\\, → for ->, ← for <-.

Binder types resolve variable occurrences during parsing, so parsed
variables carry their annotations. Printing emits fully parenthesized
surface syntax; parsing a printed term reproduces it exactly, spans aside.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .syntax import (
    Abort, App, ArrowT, DistT, Do, Force, Ifz, IntT, Lambda, NChoice, NumLit,
    Obs, Pair, PChoice, Pifz, Pred, Proj1, Proj2, Produce, ProducerT, ProdT,
    Rec, Ret, Seq, Star, Succ, Term, Thunk, ThunkT, To, Type, UnitT, Var,
    and_then, case_tag, eq0_then, eq1_then, is_comp_type, is_value_type,
    omega, pcase, pif_le, por, pswitch, psum,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"parse error at line {line}, column {col}: {message}")


KEYWORDS = {
    "thunk", "force", "produce", "ret", "rec", "to", "in", "do", "ifz",
    "pifz", "abort", "succ", "pred", "pi1", "pi2", "obs", "omega", "pif",
    "pswitch", "pcase", "sum", "unit", "int", "U", "F", "V",
}

_PREFIX_ONE = {"thunk", "force", "produce", "ret", "succ", "pred", "pi1", "pi2"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int

    @property
    def span(self):
        return (self.line, self.col)


_ALIAS = {
    "λ": "\\", "∗": "*", "⊕": "(+)", "⊓": "/\\", "⊗": "/\\",
    "→": "->", "←": "<-",
}


def tokenize(text: str) -> list:
    out = []
    i, line, col = 0, 1, 1
    n = len(text)

    def push(kind, s, ln, cl):
        out.append(Token(kind, s, ln, cl))

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c in _ALIAS:
            alias = _ALIAS[c]
            ln, cl = line, col
            i += 1
            col += 1
            if alias == "\\":
                push("op", "\\", ln, cl)
            else:
                push("op", alias, ln, cl)
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            push("num", text[i:j], line, col)
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            ln, cl = line, col
            col += j - i
            i = j
            if word in ("eq0", "eq1") and i < n and text[i] == "&":
                push("op", word + "&", ln, cl)
                i += 1
                col += 1
            elif word in KEYWORDS:
                push("kw", word, ln, cl)
            else:
                push("name", word, ln, cl)
            continue
        two = text[i:i + 2]
        three = text[i:i + 3]
        if three == "(+)":
            push("op", "(+)", line, col)
            i += 3
            col += 3
            continue
        if two in ("/\\", "\\/", "->", "<-"):
            push("op", two, line, col)
            i += 2
            col += 2
            continue
        if c in "()[]{}|;:,.*&/\\":
            push("op", c, line, col)
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    push("eof", "", line, col)
    return out


class Parser:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0
        self.scopes = []

    # Token plumbing ---------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        t = self.cur
        return t.kind == kind and (text is None or t.text == text)

    def at_op(self, text: str) -> bool:
        return self.at("op", text)

    def at_kw(self, text: str) -> bool:
        return self.at("kw", text)

    def advance(self) -> Token:
        t = self.cur
        self.pos += 1
        return t

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        if not self.at(kind, text):
            want = text if text is not None else kind
            got = self.cur.text or self.cur.kind
            raise ParseError(f"expected {want!r}, found {got!r}",
                             self.cur.line, self.cur.col)
        return self.advance()

    def fail(self, message: str):
        raise ParseError(message, self.cur.line, self.cur.col)

    # Scopes -----------------------------------------------------------

    def lookup(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def with_binding(self, name: str, ty):
        self.scopes.append({name: ty})

    def drop_binding(self):
        self.scopes.pop()

    # Types ------------------------------------------------------------

    def parse_type(self) -> Type:
        left = self.parse_type_prod()
        if self.at_op("->"):
            tok = self.advance()
            if not is_value_type(left):
                raise ParseError("arrow argument must be a value type",
                                 tok.line, tok.col)
            res = self.parse_type()
            if not is_comp_type(res):
                raise ParseError("arrow result must be a computation type",
                                 tok.line, tok.col)
            return ArrowT(left, res)
        return left

    def parse_type_prod(self) -> Type:
        left = self.parse_type_atom()
        while self.at_op("*"):
            tok = self.advance()
            right = self.parse_type_atom()
            if not (is_value_type(left) and is_value_type(right)):
                raise ParseError("product components must be value types",
                                 tok.line, tok.col)
            left = ProdT(left, right)
        return left

    def parse_type_atom(self) -> Type:
        t = self.cur
        if self.at_kw("unit"):
            self.advance()
            return UnitT()
        if self.at_kw("int"):
            self.advance()
            return IntT()
        if self.at_kw("U"):
            self.advance()
            inner = self.parse_type_atom()
            if not is_comp_type(inner):
                raise ParseError("U needs a computation type", t.line, t.col)
            return ThunkT(inner)
        if self.at_kw("F"):
            self.advance()
            inner = self.parse_type_atom()
            if not is_value_type(inner):
                raise ParseError("F needs a value type", t.line, t.col)
            return ProducerT(inner)
        if self.at_kw("V"):
            self.advance()
            inner = self.parse_type_atom()
            if not is_value_type(inner):
                raise ParseError("V needs a value type", t.line, t.col)
            return DistT(inner)
        if self.at_op("("):
            self.advance()
            inner = self.parse_type()
            self.expect("op", ")")
            return inner
        self.fail(f"expected a type, found {t.text or t.kind!r}")

    # Terms ------------------------------------------------------------

    def parse_term(self) -> Term:
        if self.at_op("\\"):
            tok = self.advance()
            name = self.expect("name").text
            self.expect("op", ":")
            ty = self.parse_value_type()
            self.expect("op", ".")
            self.with_binding(name, ty)
            try:
                body = self.parse_term()
            finally:
                self.drop_binding()
            return Lambda(name, ty, body, span=tok.span)

        if self.at_kw("rec"):
            tok = self.advance()
            name = self.expect("name").text
            self.expect("op", ":")
            ty = self.parse_value_type()
            self.expect("op", ".")
            self.with_binding(name, ty)
            try:
                body = self.parse_term()
            finally:
                self.drop_binding()
            return Rec(name, ty, body, span=tok.span)

        if self.at_kw("do"):
            tok = self.advance()
            name = self.expect("name").text
            self.expect("op", ":")
            ty = self.parse_value_type()
            self.expect("op", "<-")
            source = self.parse_term()
            self.expect("kw", "in")
            self.with_binding(name, ty)
            try:
                body = self.parse_term()
            finally:
                self.drop_binding()
            return Do(name, ty, source, body, span=tok.span)

        left = self.parse_por()

        if self.at_kw("to"):
            tok = self.advance()
            name = self.expect("name").text
            self.expect("op", ":")
            ty = self.parse_value_type()
            self.expect("kw", "in")
            self.with_binding(name, ty)
            try:
                body = self.parse_term()
            finally:
                self.drop_binding()
            return To(left, name, ty, body, span=tok.span)
        if self.at_op(";"):
            tok = self.advance()
            return Seq(left, self.parse_term(), span=tok.span)
        if self.at_op("&"):
            self.advance()
            return and_then(left, self.parse_term())
        if self.at_op("eq0&"):
            self.advance()
            return eq0_then(left, self.parse_term())
        if self.at_op("eq1&"):
            self.advance()
            return eq1_then(left, self.parse_term())
        return left

    def parse_value_type(self) -> Type:
        tok = self.cur
        ty = self.parse_type()
        if not is_value_type(ty):
            raise ParseError(f"binder needs a value type, found {ty}",
                             tok.line, tok.col)
        return ty

    def parse_por(self) -> Term:
        left = self.parse_nchoice()
        while self.at_op("\\/"):
            self.advance()
            left = por(left, self.parse_nchoice())
        return left

    def parse_nchoice(self) -> Term:
        left = self.parse_pchoice()
        while self.at_op("/\\"):
            tok = self.advance()
            left = NChoice(left, self.parse_pchoice(), span=tok.span)
        return left

    def parse_pchoice(self) -> Term:
        left = self.parse_app()
        while self.at_op("(+)"):
            tok = self.advance()
            left = PChoice(left, self.parse_app(), span=tok.span)
        return left

    def _starts_primary(self) -> bool:
        t = self.cur
        if t.kind in ("num", "name"):
            return True
        if t.kind == "op" and t.text in ("*", "(", "["):
            return True
        if t.kind == "kw" and (t.text in _PREFIX_ONE or t.text in (
                "ifz", "pifz", "obs", "omega", "abort", "pif", "pswitch",
                "pcase", "sum")):
            return True
        return False

    def parse_app(self) -> Term:
        left = self.parse_primary()
        while self._starts_primary():
            arg = self.parse_primary()
            left = App(left, arg, span=getattr(left, "span", None))
        return left

    def parse_primary(self) -> Term:
        t = self.cur

        if t.kind == "num":
            self.advance()
            return NumLit(int(t.text), span=t.span)

        if self.at_op("*"):
            self.advance()
            return Star(span=t.span)

        if t.kind == "name":
            self.advance()
            return Var(t.text, self.lookup(t.text), span=t.span)

        if self.at_op("("):
            self.advance()
            first = self.parse_term()
            if self.at_op(","):
                self.advance()
                second = self.parse_term()
                self.expect("op", ")")
                return Pair(first, second, span=t.span)
            self.expect("op", ")")
            return first

        if self.at_op("["):
            self.advance()
            guard = self.parse_term()
            self.expect("op", ":")
            tag = int(self.expect("num").text)
            self.expect("op", "]")
            return case_tag(guard, tag)

        if t.kind == "kw":
            word = t.text
            if word in _PREFIX_ONE:
                self.advance()
                arg = self.parse_primary()
                ctor = {
                    "thunk": Thunk, "force": Force, "produce": Produce,
                    "ret": Ret, "succ": Succ, "pred": Pred,
                    "pi1": Proj1, "pi2": Proj2,
                }[word]
                return ctor(arg, span=t.span)
            if word in ("ifz", "pifz"):
                self.advance()
                scrut = self.parse_primary()
                if_zero = self.parse_primary()
                if_nonzero = self.parse_primary()
                ctor = Ifz if word == "ifz" else Pifz
                return ctor(scrut, if_zero, if_nonzero, span=t.span)
            if word == "obs":
                self.advance()
                self.expect("op", "[")
                num = int(self.expect("num").text)
                self.expect("op", "/")
                den = int(self.expect("num").text)
                self.expect("op", "]")
                if den == 0:
                    raise ParseError("tester bound has zero denominator",
                                     t.line, t.col)
                bound = Fraction(num, den)
                if not (0 < bound < 1):
                    raise ParseError(
                        f"tester bound must lie strictly between 0 and 1, "
                        f"got {bound}", t.line, t.col)
                arg = self.parse_primary()
                return Obs(bound, arg, span=t.span)
            if word == "omega":
                self.advance()
                self.expect("op", "[")
                ty = self.parse_type()
                self.expect("op", "]")
                return omega(ty)
            if word == "abort":
                self.advance()
                self.expect("op", "[")
                ty = self.parse_type()
                self.expect("op", "]")
                if not is_comp_type(ty):
                    raise ParseError("abort needs a computation type",
                                     t.line, t.col)
                return Abort(ty, span=t.span)
            if word == "pif":
                self.advance()
                self.expect("op", "[")
                n = int(self.expect("num").text)
                self.expect("op", "]")
                scrut = self.parse_primary()
                if_le = self.parse_primary()
                if_gt = self.parse_primary()
                return pif_le(n, scrut, if_le, if_gt)
            if word == "pswitch":
                self.advance()
                self.expect("op", "[")
                ty = self.parse_type()
                self.expect("op", "]")
                if not is_comp_type(ty):
                    raise ParseError("pswitch needs a computation type",
                                     t.line, t.col)
                scrut = self.parse_primary()
                branches = self.parse_branch_list(allow_empty=True)
                return pswitch(scrut, branches, ty)
            if word == "pcase":
                self.advance()
                self.expect("op", "[")
                ty = self.parse_type()
                self.expect("op", "]")
                if not is_comp_type(ty):
                    raise ParseError("pcase needs a computation type",
                                     t.line, t.col)
                self.expect("op", "{")
                branches = []
                while True:
                    guard = self.parse_term()
                    self.expect("op", "->")
                    body = self.parse_term()
                    branches.append((guard, body))
                    if self.at_op("|"):
                        self.advance()
                        continue
                    break
                self.expect("op", "}")
                return pcase(branches, ty)
            if word == "sum":
                self.advance()
                terms = self.parse_branch_list(allow_empty=False)
                if len(terms) & (len(terms) - 1):
                    raise ParseError(
                        f"sum needs a power-of-two branch count, got "
                        f"{len(terms)}", t.line, t.col)
                return psum(terms)

        self.fail(f"expected a term, found {t.text or t.kind!r}")

    def parse_branch_list(self, allow_empty: bool) -> list:
        self.expect("op", "{")
        branches = []
        if self.at_op("}"):
            if not allow_empty:
                self.fail("branch list may not be empty")
            self.advance()
            return branches
        while True:
            branches.append(self.parse_term())
            if self.at_op("|"):
                self.advance()
                continue
            break
        self.expect("op", "}")
        return branches


def parse(text: str) -> Term:
    """Parse a single term; the whole input must be consumed."""
    p = Parser(tokenize(text))
    term = p.parse_term()
    if not p.at("eof"):
        p.fail(f"trailing input {p.cur.text!r}")
    return term


def parse_type_text(text: str) -> Type:
    p = Parser(tokenize(text))
    ty = p.parse_type()
    if not p.at("eof"):
        p.fail(f"trailing input {p.cur.text!r}")
    return ty


# Printing --------------------------------------------------------------------


def print_term(term: Term) -> str:
    """Fully parenthesized surface form; parses back to an equal term."""
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Star):
        return "*"
    if isinstance(term, NumLit):
        return str(term.value)
    if isinstance(term, Pair):
        return f"({print_term(term.fst)}, {print_term(term.snd)})"
    if isinstance(term, App):
        return f"({print_term(term.fn)} {print_term(term.arg)})"
    if isinstance(term, Lambda):
        return f"(\\{term.var} : {term.var_ty}. {print_term(term.body)})"
    if isinstance(term, Rec):
        return f"(rec {term.var} : {term.var_ty}. {print_term(term.body)})"
    if isinstance(term, To):
        return (f"({print_term(term.source)} to {term.var} : {term.var_ty} "
                f"in {print_term(term.body)})")
    if isinstance(term, Do):
        return (f"(do {term.var} : {term.var_ty} <- {print_term(term.source)} "
                f"in {print_term(term.body)})")
    if isinstance(term, Seq):
        return f"({print_term(term.first)} ; {print_term(term.rest)})"
    if isinstance(term, Ifz):
        return (f"(ifz {print_term(term.scrut)} {print_term(term.if_zero)} "
                f"{print_term(term.if_nonzero)})")
    if isinstance(term, Pifz):
        return (f"(pifz {print_term(term.scrut)} {print_term(term.if_zero)} "
                f"{print_term(term.if_nonzero)})")
    if isinstance(term, Succ):
        return f"(succ {print_term(term.arg)})"
    if isinstance(term, Pred):
        return f"(pred {print_term(term.arg)})"
    if isinstance(term, Thunk):
        return f"(thunk {print_term(term.comp)})"
    if isinstance(term, Force):
        return f"(force {print_term(term.thunk)})"
    if isinstance(term, Produce):
        return f"(produce {print_term(term.value)})"
    if isinstance(term, Ret):
        return f"(ret {print_term(term.value)})"
    if isinstance(term, Proj1):
        return f"(pi1 {print_term(term.pair)})"
    if isinstance(term, Proj2):
        return f"(pi2 {print_term(term.pair)})"
    if isinstance(term, PChoice):
        return f"({print_term(term.left)} (+) {print_term(term.right)})"
    if isinstance(term, NChoice):
        return f"({print_term(term.left)} /\\ {print_term(term.right)})"
    if isinstance(term, Abort):
        return f"(abort[{term.cty}])"
    if isinstance(term, Obs):
        b = term.bound
        return f"(obs[{b.numerator}/{b.denominator}] {print_term(term.arg)})"
    raise ValueError(f"cannot print {term!r}")
