"""Surface syntax: an s-expression reader and printer for GTLC programs.

Types::

    T ::= Int | Nat | Bool | Unit | Dyn | (-> T T) | (* T T) | (+ T T)

Terms::

    e ::= 3 | +3 | -3 | true | false | unit | not | inc | neg | add | iszero
        | x | (lam (x : T) e) | (e e)@L | (if e e e)@L | (cons e e)
        | (fst e)@L | (snd e)@L | (inl T e) | (inr T e)
        | (case e ((x : T) e) ((x : T) e))@L

Labels are positive integers.  A ``;`` starts a comment that runs to the
end of the line.
"""

from __future__ import annotations

import re

from . import gtlc as g
from .errors import ParseError
from .gradual import BASE_NAMES, DYN, Base, Fun, Pair, Sum, Type

KEYWORDS = {"lam", "if", "cons", "fst", "snd", "inl", "inr", "case",
            "true", "false", "unit"} | set(g.PRIMS)

_TOKEN = re.compile(r"\s+|;[^\n]*|(?P<tok>[()@:]|[^\s()@:;]+)")
_NAT = re.compile(r"[0-9]+")
_INT = re.compile(r"[+-][0-9]+")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_'\-]*")
_TYPE_CTORS = {"->": Fun, "*": Pair, "+": Sum}


def tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r} at offset {pos}")
        if m.group("tok"):
            out.append((m.group("tok"), pos))
        pos = m.end()
    return out


class _Reader:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def next(self):
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of input")
        tok = self.toks[self.i][0]
        self.i += 1
        return tok

    def expect(self, want):
        pos = self.toks[self.i][1] if self.i < len(self.toks) else "end"
        got = self.next()
        if got != want:
            raise ParseError(f"expected {want!r} but found {got!r} at offset {pos}")

    def label(self):
        self.expect("@")
        tok = self.next()
        if not _NAT.fullmatch(tok) or int(tok) == 0:
            raise ParseError(f"blame labels are positive integers, found {tok!r}")
        return int(tok)

    def type(self) -> Type:
        tok = self.next()
        if tok == "Dyn":
            return DYN
        if tok in BASE_NAMES:
            return Base(tok)
        if tok == "(":
            ctor = _TYPE_CTORS.get(self.next())
            if ctor is None:
                raise ParseError(f"unknown type constructor {self.toks[self.i - 1][0]!r}")
            A = self.type()
            B = self.type()
            self.expect(")")
            return ctor(A, B)
        raise ParseError(f"expected a type, found {tok!r}")

    def binder(self):
        self.expect("(")
        name = self.next()
        if not _IDENT.fullmatch(name) or name in KEYWORDS:
            raise ParseError(f"bad variable name {name!r}")
        self.expect(":")
        A = self.type()
        self.expect(")")
        return name, A

    def term(self, env: tuple):
        tok = self.next()
        if tok != "(":
            return self.atom(tok, env)
        head = self.peek()
        if head == "lam":
            self.next()
            x, A = self.binder()
            body = self.term(env + (x,))
            self.expect(")")
            return g.Lam(A, body)
        if head == "if":
            self.next()
            parts = [self.term(env) for _ in range(3)]
            self.expect(")")
            return g.If(*parts, self.label())
        if head == "cons":
            self.next()
            a, b = self.term(env), self.term(env)
            self.expect(")")
            return g.Cons(a, b)
        if head in ("fst", "snd"):
            self.next()
            e = self.term(env)
            self.expect(")")
            return g.Proj(1 if head == "fst" else 2, e, self.label())
        if head in ("inl", "inr"):
            self.next()
            A = self.type()
            e = self.term(env)
            self.expect(")")
            return (g.Inl if head == "inl" else g.Inr)(A, e)
        if head == "case":
            self.next()
            scrut = self.term(env)
            branches = []
            for _ in range(2):
                self.expect("(")
                x, A = self.binder()
                branches.append((A, self.term(env + (x,))))
                self.expect(")")
            self.expect(")")
            (B1, N1), (C1, N2) = branches
            return g.Case(scrut, B1, C1, N1, N2, self.label())
        fn = self.term(env)
        arg = self.term(env)
        self.expect(")")
        return g.App(fn, arg, self.label())

    def atom(self, tok, env):
        if _NAT.fullmatch(tok):
            return g.nat(int(tok))
        if _INT.fullmatch(tok):
            return g.integer(int(tok))
        if tok in ("true", "false"):
            return g.boolean(tok == "true")
        if tok == "unit":
            return g.UNIT_CONST
        if tok in g.PRIMS:
            return g.prim(tok)
        if _IDENT.fullmatch(tok) and tok not in KEYWORDS:
            for i, name in enumerate(reversed(env)):
                if name == tok:
                    return g.Var(i)
            raise ParseError(f"unbound variable {tok!r}")
        raise ParseError(f"unexpected token {tok!r}")


def parse_program(text: str):
    r = _Reader(text)
    M = r.term(())
    if r.peek() is not None:
        raise ParseError(f"trailing input starting at {r.peek()!r}")
    return M


def parse_type(text: str) -> Type:
    r = _Reader(text)
    A = r.type()
    if r.peek() is not None:
        raise ParseError(f"trailing input starting at {r.peek()!r}")
    return A


def print_program(M, depth: int = 0) -> str:
    """Render a GTLC term; binders are named by their depth."""
    def var(k):
        return f"x{k}"

    match M:
        case g.Const():
            return str(M)
        case g.Var(i):
            if i >= depth:
                raise ParseError(f"cannot print free variable {i}")
            return var(depth - 1 - i)
        case g.Lam(A, N):
            return f"(lam ({var(depth)} : {A}) {print_program(N, depth + 1)})"
        case g.App(L, N, lab):
            return f"({print_program(L, depth)} {print_program(N, depth)})@{lab}"
        case g.If(L, N1, N2, lab):
            parts = " ".join(print_program(x, depth) for x in (L, N1, N2))
            return f"(if {parts})@{lab}"
        case g.Cons(N1, N2):
            return f"(cons {print_program(N1, depth)} {print_program(N2, depth)})"
        case g.Proj(i, N, lab):
            return f"({'fst' if i == 1 else 'snd'} {print_program(N, depth)})@{lab}"
        case g.Inl(B, N):
            return f"(inl {B} {print_program(N, depth)})"
        case g.Inr(A, N):
            return f"(inr {A} {print_program(N, depth)})"
        case g.Case(L, B1, C1, N1, N2, lab):
            x = var(depth)
            return (f"(case {print_program(L, depth)} "
                    f"(({x} : {B1}) {print_program(N1, depth + 1)}) "
                    f"(({x} : {C1}) {print_program(N2, depth + 1)}))@{lab}")
    raise ParseError(f"not a GTLC term: {M!r}")
