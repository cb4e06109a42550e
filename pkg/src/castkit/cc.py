"""The parameterized cast calculus CC and its variant CC'.

Terms use de Bruijn indices.  One AST serves both modes: CC uses
``CaseFn`` and never ``Wrap``; CC' uses ``CaseBind`` and ``Wrap``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .discipline import Discipline, Mode
from .errors import ContractViolation, GradualTypeError, InvariantViolation
from .gradual import (BOOL, DYN, Fun, Pair, Sum, Type, Unknown, head,
                      type_precision)
from .gtlc import Const, Var, delta, lookup

__all__ = [
    "Const", "Var", "Lam", "App", "If", "Cons", "Proj", "Inl", "Inr",
    "CaseFn", "CaseBind", "Cast", "Wrap", "Blame",
]


@dataclass(frozen=True, slots=True)
class Lam:
    annot: Type
    body: "CTerm"


@dataclass(frozen=True, slots=True)
class App:
    fn: "CTerm"
    arg: "CTerm"


@dataclass(frozen=True, slots=True)
class If:
    cond: "CTerm"
    thn: "CTerm"
    els: "CTerm"


@dataclass(frozen=True, slots=True)
class Cons:
    fst: "CTerm"
    snd: "CTerm"


@dataclass(frozen=True, slots=True)
class Proj:
    index: int
    expr: "CTerm"


@dataclass(frozen=True, slots=True)
class Inl:
    annot: Type
    expr: "CTerm"

    def __hash__(self):
        return hash(("Inl", self.annot, self.expr))


@dataclass(frozen=True, slots=True)
class Inr:
    annot: Type
    expr: "CTerm"

    def __hash__(self):
        return hash(("Inr", self.annot, self.expr))


@dataclass(frozen=True, slots=True)
class CaseFn:
    scrut: "CTerm"
    lfn: "CTerm"
    rfn: "CTerm"


@dataclass(frozen=True, slots=True)
class CaseBind:
    scrut: "CTerm"
    lannot: Type
    rannot: Type
    lbody: "CTerm"
    rbody: "CTerm"


@dataclass(frozen=True, slots=True)
class Cast:
    expr: "CTerm"
    cast: object


@dataclass(frozen=True, slots=True)
class Wrap:
    expr: "CTerm"
    cast: object


@dataclass(frozen=True, slots=True)
class Blame:
    label: int
    type: Type


CTerm = Union[Const, Var, Lam, App, If, Cons, Proj, Inl, Inr, CaseFn,
              CaseBind, Cast, Wrap, Blame]


# rendering

def render(M: CTerm) -> str:
    match M:
        case Const():
            return str(M)
        case Var(i):
            return f"#{i}"
        case Lam(A, N):
            return f"(lam {A} {render(N)})"
        case App(L, N):
            return f"({render(L)} {render(N)})"
        case If(L, N1, N2):
            return f"(if {render(L)} {render(N1)} {render(N2)})"
        case Cons(N1, N2):
            return f"(cons {render(N1)} {render(N2)})"
        case Proj(i, N):
            return f"({'fst' if i == 1 else 'snd'} {render(N)})"
        case Inl(B, N):
            return f"(inl {B} {render(N)})"
        case Inr(A, N):
            return f"(inr {A} {render(N)})"
        case CaseFn(L, N1, N2):
            return f"(case {render(L)} {render(N1)} {render(N2)})"
        case CaseBind(L, A, B, N1, N2):
            return f"(case {render(L)} ({A} {render(N1)}) ({B} {render(N2)}))"
        case Cast(N, c):
            return f"(cast {render(N)} {c})"
        case Wrap(N, c):
            return f"(wrap {render(N)} {c})"
        case Blame(lab, A):
            return f"(blame {lab} {A})"
    raise ContractViolation(f"not a cast calculus term: {M!r}")


def observe(V: CTerm) -> str:
    """Printable observation of a value: casts and wraps are stripped."""
    match V:
        case Cast(N, _) | Wrap(N, _):
            return observe(N)
        case Const():
            return str(V)
        case Lam():
            return "<fun>"
        case Cons(N1, N2):
            return f"(cons {observe(N1)} {observe(N2)})"
        case Inl(_, N):
            return f"(inl {observe(N)})"
        case Inr(_, N):
            return f"(inr {observe(N)})"
    return render(V)


# generic traversal

def children(M: CTerm) -> tuple:
    match M:
        case Lam(_, N) | Proj(_, N) | Inl(_, N) | Inr(_, N) | Cast(N, _) | Wrap(N, _):
            return (N,)
        case App(L, N) | Cons(L, N):
            return (L, N)
        case If(L, N1, N2) | CaseFn(L, N1, N2) | CaseBind(L, _, _, N1, N2):
            return (L, N1, N2)
    return ()


def casts_of(M: CTerm):
    """Every cast object occurring in M."""
    stack = [M]
    while stack:
        N = stack.pop()
        if isinstance(N, (Cast, Wrap)):
            yield N.cast
        stack.extend(children(N))


# typing

def typecheck_cc(ctx, M: CTerm, d: Discipline, mode: Mode = Mode.CC, path=()) -> Type:
    ctx = tuple(ctx)

    def tc(g, N, step):
        return typecheck_cc(g, N, d, mode, path + (step,))

    def fail(msg):
        raise GradualTypeError(msg, path)

    match M:
        case Const(_, A):
            return A
        case Var(i):
            return lookup(ctx, i, path)
        case Lam(A, N):
            return Fun(A, tc(ctx + (A,), N, "lam"))
        case App(L, N):
            A = tc(ctx, L, "fn")
            B = tc(ctx, N, "arg")
            if not isinstance(A, Fun):
                fail(f"applying a term of type {A}")
            if A.dom != B:
                fail(f"argument type {B} differs from {A.dom}")
            return A.cod
        case If(L, N1, N2):
            if tc(ctx, L, "cond") != BOOL:
                fail("condition is not Bool")
            A = tc(ctx, N1, "then")
            if tc(ctx, N2, "else") != A:
                fail("branches differ")
            return A
        case Cons(N1, N2):
            return Pair(tc(ctx, N1, "fst"), tc(ctx, N2, "snd"))
        case Proj(i, N):
            A = tc(ctx, N, f"proj{i}")
            if not isinstance(A, Pair) or i not in (1, 2):
                fail(f"projecting from {A}")
            return A.fst if i == 1 else A.snd
        case Inl(B, N):
            return Sum(tc(ctx, N, "inl"), B)
        case Inr(A, N):
            return Sum(A, tc(ctx, N, "inr"))
        case CaseFn(L, N1, N2):
            if mode is not Mode.CC:
                fail("function-style case in CC'")
            A = tc(ctx, L, "scrut")
            F1 = tc(ctx, N1, "left")
            F2 = tc(ctx, N2, "right")
            if not (isinstance(A, Sum) and isinstance(F1, Fun) and isinstance(F2, Fun)):
                fail("ill-formed case")
            if F1.dom != A.left or F2.dom != A.right or F1.cod != F2.cod:
                fail("case branches do not fit the scrutinee")
            return F1.cod
        case CaseBind(L, A1, A2, N1, N2):
            if mode is not Mode.CCP:
                fail("binding case in CC")
            A = tc(ctx, L, "scrut")
            if A != Sum(A1, A2):
                fail(f"scrutinee type {A} differs from {Sum(A1, A2)}")
            B = tc(ctx + (A1,), N1, "left")
            if tc(ctx + (A2,), N2, "right") != B:
                fail("branches differ")
            return B
        case Cast(N, c):
            A = tc(ctx, N, "cast")
            if A != c.src:
                fail(f"cast source {c.src} differs from {A}")
            return c.tgt
        case Wrap(N, c):
            if mode is not Mode.CCP:
                fail("wrap in CC")
            A = tc(ctx, N, "wrap")
            if A != c.src:
                fail(f"wrap source {c.src} differs from {A}")
            if not d.is_inert(c):
                fail("wrapped cast is not inert")
            return c.tgt
        case Blame(_, A):
            return A
    fail(f"not a cast calculus term: {M!r}")


def type_of(M: CTerm, d: Discipline, mode: Mode = Mode.CC) -> Type:
    return typecheck_cc((), M, d, mode)


# values

def is_value(M: CTerm, d: Discipline, mode: Mode = Mode.CC) -> bool:
    match M:
        case Lam() | Const():
            return True
        case Cons(N1, N2):
            return is_value(N1, d, mode) and is_value(N2, d, mode)
        case Inl(_, N) | Inr(_, N):
            return is_value(N, d, mode)
        case Cast(N, c):
            return mode is Mode.CC and d.is_inert(c) and is_value(N, d, mode)
        case Wrap(N, _):
            return mode is Mode.CCP and is_value(N, d, mode)
    return False


# substitution

def shift(x: int) -> int:
    return x + 1


def ext(rho: Callable[[int], int]) -> Callable[[int], int]:
    return lambda x: 0 if x == 0 else rho(x - 1) + 1


def rename(rho: Callable[[int], int], M: CTerm) -> CTerm:
    match M:
        case Var(i):
            return Var(rho(i))
        case Const() | Blame():
            return M
        case Lam(A, N):
            return Lam(A, rename(ext(rho), N))
        case App(L, N):
            return App(rename(rho, L), rename(rho, N))
        case If(L, N1, N2):
            return If(rename(rho, L), rename(rho, N1), rename(rho, N2))
        case Cons(N1, N2):
            return Cons(rename(rho, N1), rename(rho, N2))
        case Proj(i, N):
            return Proj(i, rename(rho, N))
        case Inl(B, N):
            return Inl(B, rename(rho, N))
        case Inr(A, N):
            return Inr(A, rename(rho, N))
        case CaseFn(L, N1, N2):
            return CaseFn(rename(rho, L), rename(rho, N1), rename(rho, N2))
        case CaseBind(L, A1, A2, N1, N2):
            r = ext(rho)
            return CaseBind(rename(rho, L), A1, A2, rename(r, N1), rename(r, N2))
        case Cast(N, c):
            return Cast(rename(rho, N), c)
        case Wrap(N, c):
            return Wrap(rename(rho, N), c)
    raise ContractViolation(f"not a cast calculus term: {M!r}")


def exts(sigma: Callable[[int], CTerm]) -> Callable[[int], CTerm]:
    return lambda x: Var(0) if x == 0 else rename(shift, sigma(x - 1))


def subst(sigma: Callable[[int], CTerm], M: CTerm) -> CTerm:
    match M:
        case Var(i):
            return sigma(i)
        case Const() | Blame():
            return M
        case Lam(A, N):
            return Lam(A, subst(exts(sigma), N))
        case App(L, N):
            return App(subst(sigma, L), subst(sigma, N))
        case If(L, N1, N2):
            return If(subst(sigma, L), subst(sigma, N1), subst(sigma, N2))
        case Cons(N1, N2):
            return Cons(subst(sigma, N1), subst(sigma, N2))
        case Proj(i, N):
            return Proj(i, subst(sigma, N))
        case Inl(B, N):
            return Inl(B, subst(sigma, N))
        case Inr(A, N):
            return Inr(A, subst(sigma, N))
        case CaseFn(L, N1, N2):
            return CaseFn(subst(sigma, L), subst(sigma, N1), subst(sigma, N2))
        case CaseBind(L, A1, A2, N1, N2):
            s = exts(sigma)
            return CaseBind(subst(sigma, L), A1, A2, subst(s, N1), subst(s, N2))
        case Cast(N, c):
            return Cast(subst(sigma, N), c)
        case Wrap(N, c):
            return Wrap(subst(sigma, N), c)
    raise ContractViolation(f"not a cast calculus term: {M!r}")


def subst_zero(N: CTerm) -> Callable[[int], CTerm]:
    return lambda x: N if x == 0 else Var(x - 1)


def beta(M: CTerm, N: CTerm) -> CTerm:
    """M[N]: replace variable 0 of M by N."""
    return subst(subst_zero(N), M)


# frames

@dataclass(frozen=True, slots=True)
class AppHole:
    arg: CTerm


@dataclass(frozen=True, slots=True)
class HoleApp:
    fn: CTerm


@dataclass(frozen=True, slots=True)
class IfHole:
    thn: CTerm
    els: CTerm


@dataclass(frozen=True, slots=True)
class ConsHole1:
    snd: CTerm


@dataclass(frozen=True, slots=True)
class ConsHole2:
    fst: CTerm


@dataclass(frozen=True, slots=True)
class ProjHole:
    index: int


@dataclass(frozen=True, slots=True)
class InlHole:
    annot: Type


@dataclass(frozen=True, slots=True)
class InrHole:
    annot: Type


@dataclass(frozen=True, slots=True)
class CaseFnHole:
    lfn: CTerm
    rfn: CTerm


@dataclass(frozen=True, slots=True)
class CaseBindHole:
    lannot: Type
    rannot: Type
    lbody: CTerm
    rbody: CTerm


@dataclass(frozen=True, slots=True)
class CastHole:
    cast: object


Frame = Union[AppHole, HoleApp, IfHole, ConsHole1, ConsHole2, ProjHole, InlHole,
              InrHole, CaseFnHole, CaseBindHole, CastHole]

FRAME_NAMES = {
    AppHole: "app-fn", HoleApp: "app-arg", IfHole: "if", ConsHole1: "cons-fst",
    ConsHole2: "cons-snd", ProjHole: "proj", InlHole: "inl", InrHole: "inr",
    CaseFnHole: "case", CaseBindHole: "case", CastHole: "cast",
}


def plug(M: CTerm, F: Frame) -> CTerm:
    match F:
        case AppHole(N):
            return App(M, N)
        case HoleApp(L):
            return App(L, M)
        case IfHole(N1, N2):
            return If(M, N1, N2)
        case ConsHole1(N):
            return Cons(M, N)
        case ConsHole2(L):
            return Cons(L, M)
        case ProjHole(i):
            return Proj(i, M)
        case InlHole(B):
            return Inl(B, M)
        case InrHole(A):
            return Inr(A, M)
        case CaseFnHole(N1, N2):
            return CaseFn(M, N1, N2)
        case CaseBindHole(A1, A2, N1, N2):
            return CaseBind(M, A1, A2, N1, N2)
        case CastHole(c):
            return Cast(M, c)
    raise ContractViolation(f"not a frame: {F!r}")


def focus(M: CTerm, value: Callable[[CTerm], bool]) -> Optional[tuple]:
    """Split M into a frame and the subterm in its hole, if that subterm
    still needs evaluating.  ``None`` means every evaluation position of M
    already holds a value."""
    match M:
        case App(L, N):
            if not value(L):
                return AppHole(N), L
            if not value(N):
                return HoleApp(L), N
        case If(L, N1, N2):
            if not value(L):
                return IfHole(N1, N2), L
        case Cons(N1, N2):
            if not value(N1):
                return ConsHole1(N2), N1
            if not value(N2):
                return ConsHole2(N1), N2
        case Proj(i, N):
            if not value(N):
                return ProjHole(i), N
        case Inl(B, N):
            if not value(N):
                return InlHole(B), N
        case Inr(A, N):
            if not value(N):
                return InrHole(A), N
        case CaseFn(L, N1, N2):
            if not value(L):
                return CaseFnHole(N1, N2), L
        case CaseBind(L, A1, A2, N1, N2):
            if not value(L):
                return CaseBindHole(A1, A2, N1, N2), L
        case Cast(N, c):
            if not value(N):
                return CastHole(c), N
    return None


# eta expansion of cross casts

def eta_fun(M: CTerm, c, d: Discipline, mode: Mode = Mode.CC) -> CTerm:
    C = c.tgt.dom
    return Lam(C, Cast(App(rename(shift, M), Cast(Var(0), d.decompose(c, "dom"))),
                       d.decompose(c, "cod")))


def eta_pair(M: CTerm, c, d: Discipline, mode: Mode = Mode.CC) -> CTerm:
    return Cons(Cast(Proj(1, M), d.decompose(c, "fst")),
                Cast(Proj(2, M), d.decompose(c, "snd")))


def eta_sum(M: CTerm, c, d: Discipline, mode: Mode = Mode.CC) -> CTerm:
    A, B = c.src.left, c.src.right
    C, D = c.tgt.left, c.tgt.right
    left = Inl(D, Cast(Var(0), d.decompose(c, "inl")))
    right = Inr(C, Cast(Var(0), d.decompose(c, "inr")))
    if mode is Mode.CCP:
        return CaseBind(M, A, B, left, right)
    return CaseFn(M, Lam(A, left), Lam(B, right))


def eta(M: CTerm, c, d: Discipline, mode: Mode = Mode.CC) -> CTerm:
    h = head(c.src)
    if h != head(c.tgt) or not d.is_cross(c):
        raise ContractViolation(f"eta expansion needs a cross cast, got {c}")
    return {"fun": eta_fun, "pair": eta_pair, "sum": eta_sum}[h](M, c, d, mode)


# reduction

@dataclass(frozen=True)
class Stepped:
    term: CTerm
    rule: str
    path: tuple = ()


@dataclass(frozen=True)
class IsValue:
    term: CTerm


@dataclass(frozen=True)
class IsBlame:
    label: int


StepResult = Union[Stepped, IsValue, IsBlame]


def step_cc(M: CTerm, d: Discipline, mode: Mode = Mode.CC) -> StepResult:
    if isinstance(M, Blame):
        return IsBlame(M.label)
    if is_value(M, d, mode):
        return IsValue(M)
    term, rule, path = _reduce(M, d, mode)
    return Stepped(term, rule, path)


def _reduce(M, d, mode):
    split = focus(M, lambda N: is_value(N, d, mode))
    if split is None:
        term, rule = _contract(M, d, mode)
        return term, rule, ()
    F, N = split
    name = FRAME_NAMES[type(F)]
    if isinstance(N, Blame):
        return Blame(N.label, type_of(M, d, mode)), "ξ-blame", (name,)
    term, rule, path = _reduce(N, d, mode)
    return plug(term, F), rule, (name,) + path


def _cast_value(V, mode):
    """The inert cast carried by a cast value, or None."""
    if mode is Mode.CC and isinstance(V, Cast):
        return V.cast
    if mode is Mode.CCP and isinstance(V, Wrap):
        return V.cast
    return None


def check_canonical_dyn(V, d, mode):
    """A value of type Dyn must be an injection."""
    c = _cast_value(V, mode)
    if c is None or not d.is_inert(c) or not isinstance(c.tgt, Unknown):
        raise InvariantViolation(f"value of type Dyn is not an injection: {render(V)}")


def _contract(M, d, mode):
    match M:
        case App(L, W):
            if isinstance(L, Lam):
                return beta(L.body, W), "β"
            if isinstance(L, Const) and isinstance(W, Const):
                return delta(L, W), "δ"
            c = _cast_value(L, mode)
            if c is not None:
                return (Cast(App(L.expr, Cast(W, d.decompose(c, "dom"))),
                             d.decompose(c, "cod")), "fun-cast")
        case If(Const(b), N1, N2):
            return (N1, "β-true") if b else (N2, "β-false")
        case Proj(i, V):
            if isinstance(V, Cons):
                return (V.fst, "β-fst") if i == 1 else (V.snd, "β-snd")
            c = _cast_value(V, mode)
            if c is not None:
                field_ = "fst" if i == 1 else "snd"
                return Cast(Proj(i, V.expr), d.decompose(c, field_)), f"{field_}-cast"
        case CaseFn(V, N1, N2):
            if isinstance(V, Inl):
                return App(N1, V.expr), "β-caseL"
            if isinstance(V, Inr):
                return App(N2, V.expr), "β-caseR"
            c = _cast_value(V, mode)
            if c is not None:
                A1, A2 = c.src.left, c.src.right
                left = Lam(A1, App(rename(shift, N1), Cast(Var(0), d.decompose(c, "inl"))))
                right = Lam(A2, App(rename(shift, N2), Cast(Var(0), d.decompose(c, "inr"))))
                return CaseFn(V.expr, left, right), "case-cast"
        case CaseBind(V, _, _, N1, N2):
            if isinstance(V, Inl):
                return beta(N1, V.expr), "β-caseL"
            if isinstance(V, Inr):
                return beta(N2, V.expr), "β-caseR"
            c = _cast_value(V, mode)
            if c is not None:
                A1, A2 = c.src.left, c.src.right
                left = beta(rename(ext(shift), N1), Cast(Var(0), d.decompose(c, "inl")))
                right = beta(rename(ext(shift), N2), Cast(Var(0), d.decompose(c, "inr")))
                return CaseBind(V.expr, A1, A2, left, right), "case-cast-alt"
        case Cast(V, c):
            if d.is_active(c):
                if isinstance(c.src, Unknown):
                    check_canonical_dyn(V, d, mode)
                return d.apply_cast(V, c, mode), "cast"
            if mode is Mode.CCP:
                return Wrap(V, c), "wrap"
    raise InvariantViolation(f"stuck term: {render(M)}")


# evaluation

@dataclass(frozen=True)
class Outcome:
    kind: str  # "value", "blame" or "timeout"
    term: Optional[CTerm]
    label: Optional[int] = None
    steps: int = 0

    def describe(self) -> str:
        if self.kind == "value":
            return f"value {observe(self.term)}"
        if self.kind == "blame":
            return f"blame {self.label}"
        return "timeout"


@dataclass(frozen=True)
class TraceStep:
    index: int
    rule: str
    path: tuple
    term: CTerm
    size_before: int
    size_after: int


def term_size(M: CTerm) -> int:
    return 1 + sum(map(term_size, children(M)))


def eval_cc(M: CTerm, d: Discipline, mode: Mode = Mode.CC, fuel: int = 10_000,
            check: bool = True, on_step: Optional[Callable] = None) -> Outcome:
    """Run M for at most ``fuel`` steps, asserting preservation each step."""
    A = type_of(M, d, mode) if check else None
    for i in range(fuel + 1):
        r = step_cc(M, d, mode)
        if isinstance(r, IsValue):
            return Outcome("value", M, steps=i)
        if isinstance(r, IsBlame):
            return Outcome("blame", M, r.label, steps=i)
        if i == fuel:
            break
        if check:
            try:
                B = type_of(r.term, d, mode)
            except GradualTypeError as e:
                raise InvariantViolation(f"step {r.rule} produced an ill-typed term: {e}") from e
            if B != A:
                raise InvariantViolation(f"step {r.rule} changed the type from {A} to {B}")
        if on_step is not None:
            on_step(TraceStep(i + 1, r.rule, r.path, r.term, term_size(M), term_size(r.term)))
        M = r.term
    return Outcome("timeout", M, steps=fuel)


# blame safety

def safe_for(M: CTerm, label: int, d: Discipline) -> bool:
    if isinstance(M, Blame):
        return M.label != label
    if isinstance(M, (Cast, Wrap)) and not d.cast_blame_safe(M.cast, label):
        return False
    return all(safe_for(N, label, d) for N in children(M))


def labels_in(M: CTerm, d: Discipline) -> set:
    out = set()
    stack = [M]
    while stack:
        N = stack.pop()
        if isinstance(N, Blame):
            out.add(N.label)
        if isinstance(N, (Cast, Wrap)):
            out |= d.cast_labels(N.cast)
        stack.extend(children(N))
    return out


# term precision

def cterm_precision(M: CTerm, M2: CTerm, d: Discipline, mode: Mode = Mode.CCP,
                    ctx=(), ctx2=()) -> bool:
    """Decide M ⊑ M2 for closed (or context-typed) terms."""
    memo = {}

    def ty(g, N):
        return typecheck_cc(g, N, d, mode)

    def prec(g, g2, N, N2):
        key = (g, g2, N, N2)
        if key not in memo:
            memo[key] = False
            memo[key] = _prec(g, g2, N, N2)
        return memo[key]

    def _prec(g, g2, N, N2):
        if isinstance(N2, Blame):
            return type_precision(ty(g, N), N2.type)
        if _structural(g, g2, N, N2):
            return True
        if isinstance(N, Cast) and isinstance(N2, Cast):
            c, c2 = N.cast, N2.cast
            if (type_precision(c.src, c2.src) and type_precision(c.tgt, c2.tgt)
                    and prec(g, g2, N.expr, N2.expr)):
                return True
        if isinstance(N, Cast):
            A2 = ty(g2, N2)
            c = N.cast
            if (type_precision(c.src, A2) and type_precision(c.tgt, A2)
                    and prec(g, g2, N.expr, N2)):
                return True
        if isinstance(N2, Cast):
            A = ty(g, N)
            c2 = N2.cast
            if (type_precision(A, c2.src) and type_precision(A, c2.tgt)
                    and prec(g, g2, N, N2.expr)):
                return True
        if isinstance(N, Wrap) and isinstance(N2, Wrap):
            c, c2 = N.cast, N2.cast
            if (d.prec_ii(c, c2) and (not isinstance(c.tgt, Unknown) or isinstance(c2.tgt, Unknown))
                    and prec(g, g2, N.expr, N2.expr)):
                return True
        if isinstance(N, Wrap):
            if d.prec_it(N.cast, ty(g2, N2)) and prec(g, g2, N.expr, N2):
                return True
        if isinstance(N2, Wrap):
            A = ty(g, N)
            if (not isinstance(A, Unknown) and d.prec_ti(A, N2.cast)
                    and prec(g, g2, N, N2.expr)):
                return True
        return False

    def _structural(g, g2, N, N2):
        match N, N2:
            case Const(), Const():
                return N == N2
            case Var(i), Var(j):
                return i == j
            case Lam(A, B1), Lam(A2, B2):
                return type_precision(A, A2) and prec(g + (A,), g2 + (A2,), B1, B2)
            case App(L, R), App(L2, R2):
                return prec(g, g2, L, L2) and prec(g, g2, R, R2)
            case If(L, P, Q), If(L2, P2, Q2):
                return prec(g, g2, L, L2) and prec(g, g2, P, P2) and prec(g, g2, Q, Q2)
            case Cons(P, Q), Cons(P2, Q2):
                return prec(g, g2, P, P2) and prec(g, g2, Q, Q2)
            case Proj(i, P), Proj(j, P2):
                return i == j and prec(g, g2, P, P2)
            case Inl(B, P), Inl(B2, P2):
                return type_precision(B, B2) and prec(g, g2, P, P2)
            case Inr(A, P), Inr(A2, P2):
                return type_precision(A, A2) and prec(g, g2, P, P2)
            case CaseFn(L, P, Q), CaseFn(L2, P2, Q2):
                return prec(g, g2, L, L2) and prec(g, g2, P, P2) and prec(g, g2, Q, Q2)
            case CaseBind(L, A1, A2, P, Q), CaseBind(L2, B1, B2, P2, Q2):
                return (type_precision(A1, B1) and type_precision(A2, B2)
                        and prec(g, g2, L, L2)
                        and prec(g + (A1,), g2 + (B1,), P, P2)
                        and prec(g + (A2,), g2 + (B2,), Q, Q2))
            case Blame(_, A), Blame(_, A2):
                return type_precision(A, A2)
        return False

    return prec(tuple(ctx), tuple(ctx2), M, M2)
