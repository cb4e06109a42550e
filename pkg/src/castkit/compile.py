"""Cast insertion from the GTLC into CC or CC'."""

from __future__ import annotations

from dataclasses import dataclass

from . import cc
from . import gtlc as g
from .discipline import Discipline, Mode
from .errors import ContractViolation, GradualTypeError
from .gradual import BOOL, Fun, Pair, Sum, Type, consistent, join, match_head


@dataclass(frozen=True)
class CompileOutput:
    term: object
    type: Type
    mode: Mode


def compile_term(M, d: Discipline, mode: Mode = Mode.CC, ctx=()) -> CompileOutput:
    try:
        term, A = _compile(tuple(ctx), M, d, mode)
    except GradualTypeError as e:
        raise ContractViolation(f"compiling an ill-typed term: {e}") from e
    return CompileOutput(term, A, mode)


def _compile(ctx, M, d, mode):
    mk = d.make_cast
    match M:
        case g.Const(_, A):
            return M, A
        case g.Var(i):
            return M, g.lookup(ctx, i)
        case g.Lam(A, N):
            body, B = _compile(ctx + (A,), N, d, mode)
            return cc.Lam(A, body), Fun(A, B)
        case g.App(L, N, label):
            fn, A = _compile(ctx, L, d, mode)
            arg, B = _compile(ctx, N, d, mode)
            A1, A2 = _matched(A, "fun")
            _consistent(A1, B)
            return cc.App(cc.Cast(fn, mk(A, Fun(A1, A2), label)),
                          cc.Cast(arg, mk(B, A1, label))), A2
        case g.If(L, N1, N2, label):
            cond, A = _compile(ctx, L, d, mode)
            thn, B = _compile(ctx, N1, d, mode)
            els, C = _compile(ctx, N2, d, mode)
            _consistent(A, BOOL)
            J = join(_consistent(B, C))
            return cc.If(cc.Cast(cond, mk(A, BOOL, label)),
                         cc.Cast(thn, mk(B, J, label)),
                         cc.Cast(els, mk(C, J, label))), J
        case g.Cons(N1, N2):
            a, A = _compile(ctx, N1, d, mode)
            b, B = _compile(ctx, N2, d, mode)
            return cc.Cons(a, b), Pair(A, B)
        case g.Proj(i, N, label):
            e, A = _compile(ctx, N, d, mode)
            A1, A2 = _matched(A, "pair")
            return cc.Proj(i, cc.Cast(e, mk(A, Pair(A1, A2), label))), (A1, A2)[i - 1]
        case g.Inl(B, N):
            e, A = _compile(ctx, N, d, mode)
            return cc.Inl(B, e), Sum(A, B)
        case g.Inr(A, N):
            e, B = _compile(ctx, N, d, mode)
            return cc.Inr(A, e), Sum(A, B)
        case g.Case(L, B1, C1, N1, N2, label):
            scrut, A = _compile(ctx, L, d, mode)
            A1, A2 = _matched(A, "sum")
            _consistent(Sum(A1, A2), Sum(B1, C1))
            left, B2 = _compile(ctx + (B1,), N1, d, mode)
            right, C2 = _compile(ctx + (C1,), N2, d, mode)
            J = join(_consistent(B2, C2))
            scrut = cc.Cast(scrut, mk(A, Sum(B1, C1), label))
            left = cc.Cast(left, mk(B2, J, label))
            right = cc.Cast(right, mk(C2, J, label))
            if mode is Mode.CCP:
                return cc.CaseBind(scrut, B1, C1, left, right), J
            return cc.CaseFn(scrut, cc.Lam(B1, left), cc.Lam(C1, right)), J
    raise ContractViolation(f"not a GTLC term: {M!r}")


def _matched(A, h):
    m = match_head(A, h)
    if m is None:
        raise GradualTypeError(f"{A} does not match a {h} type")
    return m


def _consistent(A, B):
    p = consistent(A, B)
    if p is None:
        raise GradualTypeError(f"{A} and {B} are inconsistent")
    return p
