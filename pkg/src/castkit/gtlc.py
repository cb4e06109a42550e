"""The gradually typed lambda calculus: constants, terms, typing, precision."""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Callable, Union

from .errors import ContractViolation, GradualTypeError
from .gradual import (BOOL, INT, NAT, UNIT, Base, Fun, Pair, Sum, Type,
                      consistent, join, match_head, type_precision)


@dataclass(frozen=True, slots=True)
class Prim:
    """A primitive function, possibly partially applied."""
    name: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.name
        return "(" + " ".join([self.name, *map(render_value, self.args)]) + ")"


@dataclass(frozen=True)
class PrimInfo:
    type: Type
    arity: int
    fn: Callable


PRIMS = {
    "not": PrimInfo(Fun(BOOL, BOOL), 1, operator.not_),
    "inc": PrimInfo(Fun(NAT, NAT), 1, lambda n: n + 1),
    "neg": PrimInfo(Fun(INT, INT), 1, operator.neg),
    "add": PrimInfo(Fun(NAT, Fun(NAT, NAT)), 2, operator.add),
    "iszero": PrimInfo(Fun(NAT, BOOL), 1, lambda n: n == 0),
}


def is_prim_type(A: Type) -> bool:
    if isinstance(A, Base):
        return True
    return isinstance(A, Fun) and isinstance(A.dom, Base) and is_prim_type(A.cod)


def prim_type(p: Prim) -> Type:
    A = PRIMS[p.name].type
    for _ in p.args:
        A = A.cod
    return A


def value_fits(value, A: Type) -> bool:
    if isinstance(A, Fun):
        return (isinstance(value, Prim) and value.name in PRIMS
                and len(value.args) < PRIMS[value.name].arity
                and prim_type(value) == A)
    match A.name:
        case "Nat":
            return type(value) is int and value >= 0
        case "Int":
            return type(value) is int
        case "Bool":
            return type(value) is bool
        case "Unit":
            return value is None
    return False


def render_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "unit"
    return str(value)


@dataclass(frozen=True, slots=True)
class Const:
    value: object
    type: Type

    def __post_init__(self):
        if not is_prim_type(self.type):
            raise ContractViolation(f"constant type {self.type} is not a primitive type")
        if not value_fits(self.value, self.type):
            raise ContractViolation(f"{self.value!r} does not have type {self.type}")

    def __str__(self):
        if self.type == INT:
            return f"{self.value:+d}"
        return render_value(self.value)


def nat(n: int) -> Const:
    return Const(n, NAT)


def integer(z: int) -> Const:
    return Const(z, INT)


def boolean(b: bool) -> Const:
    return Const(b, BOOL)


UNIT_CONST = Const(None, UNIT)


def prim(name: str) -> Const:
    return Const(Prim(name), PRIMS[name].type)


def delta(k: Const, arg: Const) -> Const:
    """The meaning of applying one constant to another."""
    p = k.value
    if not isinstance(p, Prim) or not value_fits(arg.value, k.type.dom):
        raise ContractViolation(f"cannot apply {k} to {arg}")
    info = PRIMS[p.name]
    args = p.args + (arg.value,)
    if len(args) == info.arity:
        return Const(info.fn(*args), k.type.cod)
    return Const(Prim(p.name, args), k.type.cod)


@dataclass(frozen=True, slots=True)
class Var:
    index: int


@dataclass(frozen=True, slots=True)
class Lam:
    annot: Type
    body: "GTerm"


@dataclass(frozen=True, slots=True)
class App:
    fn: "GTerm"
    arg: "GTerm"
    label: int


@dataclass(frozen=True, slots=True)
class If:
    cond: "GTerm"
    thn: "GTerm"
    els: "GTerm"
    label: int


@dataclass(frozen=True, slots=True)
class Cons:
    fst: "GTerm"
    snd: "GTerm"


@dataclass(frozen=True, slots=True)
class Proj:
    index: int
    expr: "GTerm"
    label: int


@dataclass(frozen=True, slots=True)
class Inl:
    annot: Type  # the right summand
    expr: "GTerm"

    def __hash__(self):
        return hash(("Inl", self.annot, self.expr))


@dataclass(frozen=True, slots=True)
class Inr:
    annot: Type  # the left summand
    expr: "GTerm"

    def __hash__(self):
        return hash(("Inr", self.annot, self.expr))


@dataclass(frozen=True, slots=True)
class Case:
    scrut: "GTerm"
    lannot: Type
    rannot: Type
    lbody: "GTerm"
    rbody: "GTerm"
    label: int


GTerm = Union[Const, Var, Lam, App, If, Cons, Proj, Inl, Inr, Case]


def lookup(ctx: tuple, index: int, path=()) -> Type:
    if not 0 <= index < len(ctx):
        raise GradualTypeError(f"unbound variable {index}", path)
    return ctx[-1 - index]


def typecheck_gtlc(ctx, M: GTerm, path=()) -> Type:
    """The type of M under ctx (innermost binding last)."""
    ctx = tuple(ctx)
    match M:
        case Const(_, A):
            return A
        case Var(i):
            return lookup(ctx, i, path)
        case Lam(A, N):
            return Fun(A, typecheck_gtlc(ctx + (A,), N, path + ("lam",)))
        case App(L, N, _):
            A = typecheck_gtlc(ctx, L, path + ("fn",))
            B = typecheck_gtlc(ctx, N, path + ("arg",))
            m = match_head(A, "fun")
            if m is None:
                raise GradualTypeError(f"{A} does not match a function type", path)
            if consistent(m[0], B) is None:
                raise GradualTypeError(f"argument type {B} is inconsistent with {m[0]}", path)
            return m[1]
        case If(L, N1, N2, _):
            A = typecheck_gtlc(ctx, L, path + ("cond",))
            if consistent(A, BOOL) is None:
                raise GradualTypeError(f"condition type {A} is inconsistent with Bool", path)
            return _join_or_fail(typecheck_gtlc(ctx, N1, path + ("then",)),
                                 typecheck_gtlc(ctx, N2, path + ("else",)), path)
        case Cons(N1, N2):
            return Pair(typecheck_gtlc(ctx, N1, path + ("fst",)),
                        typecheck_gtlc(ctx, N2, path + ("snd",)))
        case Proj(i, N, _):
            A = typecheck_gtlc(ctx, N, path + (f"proj{i}",))
            m = match_head(A, "pair")
            if m is None:
                raise GradualTypeError(f"{A} does not match a pair type", path)
            return m[i - 1]
        case Inl(B, N):
            return Sum(typecheck_gtlc(ctx, N, path + ("inl",)), B)
        case Inr(A, N):
            return Sum(A, typecheck_gtlc(ctx, N, path + ("inr",)))
        case Case(L, B1, C1, N1, N2, _):
            A = typecheck_gtlc(ctx, L, path + ("scrut",))
            m = match_head(A, "sum")
            if m is None:
                raise GradualTypeError(f"{A} does not match a sum type", path)
            if consistent(Sum(*m), Sum(B1, C1)) is None:
                raise GradualTypeError(f"{A} is inconsistent with {Sum(B1, C1)}", path)
            B2 = typecheck_gtlc(ctx + (B1,), N1, path + ("left",))
            C2 = typecheck_gtlc(ctx + (C1,), N2, path + ("right",))
            return _join_or_fail(B2, C2, path)
    raise GradualTypeError(f"not a GTLC term: {M!r}", path)


def _join_or_fail(A, B, path):
    p = consistent(A, B)
    if p is None:
        raise GradualTypeError(f"branch types {A} and {B} are inconsistent", path)
    return join(p)


def gterm_precision(M: GTerm, N: GTerm) -> bool:
    """M is less precise than N; blame labels are ignored."""
    match M, N:
        case Const(), Const():
            return M == N
        case Var(i), Var(j):
            return i == j
        case Lam(A, M1), Lam(B, N1):
            return type_precision(A, B) and gterm_precision(M1, N1)
        case App(L, M1, _), App(L2, N1, _):
            return gterm_precision(L, L2) and gterm_precision(M1, N1)
        case If(L, M1, M2, _), If(L2, N1, N2, _):
            return all(map(gterm_precision, (L, M1, M2), (L2, N1, N2)))
        case Cons(M1, M2), Cons(N1, N2):
            return gterm_precision(M1, N1) and gterm_precision(M2, N2)
        case Proj(i, M1, _), Proj(j, N1, _):
            return i == j and gterm_precision(M1, N1)
        case Inl(A, M1), Inl(B, N1):
            return type_precision(A, B) and gterm_precision(M1, N1)
        case Inr(A, M1), Inr(B, N1):
            return type_precision(A, B) and gterm_precision(M1, N1)
        case Case(L, A1, A2, M1, M2, _), Case(L2, B1, B2, N1, N2, _):
            return (type_precision(A1, B1) and type_precision(A2, B2)
                    and all(map(gterm_precision, (L, M1, M2), (L2, N1, N2))))
    return False


def gterm_depth(M: GTerm) -> int:
    subs = gterm_children(M)
    return 1 + max(map(gterm_depth, subs), default=0)


def gterm_children(M: GTerm) -> tuple:
    match M:
        case Lam(_, N):
            return (N,)
        case App(L, N, _):
            return (L, N)
        case If(L, N1, N2, _):
            return (L, N1, N2)
        case Cons(N1, N2):
            return (N1, N2)
        case Proj(_, N, _) | Inl(_, N) | Inr(_, N):
            return (N,)
        case Case(L, _, _, N1, N2, _):
            return (L, N1, N2)
    return ()


def labels_of(M: GTerm) -> set:
    out = set()
    if isinstance(M, (App, If, Proj, Case)):
        out.add(M.label)
    for N in gterm_children(M):
        out |= labels_of(N)
    return out
