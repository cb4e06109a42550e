"""The space-efficient cast calculus SC and its size instrumentation.

SC shares the CC term syntax (with function-style case) but stratifies
values: a value is a simple value under at most one inert cast.  Adjacent
casts are merged with the discipline's composition operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .cc import (FRAME_NAMES, App, Blame, CaseBind, CaseFn, Cast, Cons, Const,
                 If, Inl, Inr, IsBlame, IsValue, Lam, Outcome, Proj, Stepped,
                 TraceStep, Var, Wrap, beta, children, focus, plug, rename,
                 shift, type_of)
from .discipline import Discipline, Mode
from .errors import ContractViolation, GradualTypeError, InvariantViolation, Unsupported
from .gtlc import delta

K2 = 9  # size(c) + 5 <= 9 * 2^height(c) for both λS and hypercoercions


def is_simple(M, d: Discipline) -> bool:
    match M:
        case Lam() | Const():
            return True
        case Cons(N1, N2):
            return is_value_sc(N1, d) and is_value_sc(N2, d)
        case Inl(_, N) | Inr(_, N):
            return is_value_sc(N, d)
    return False


def is_value_sc(M, d: Discipline) -> bool:
    if isinstance(M, Cast):
        return d.is_inert(M.cast) and is_simple(M.expr, d)
    return is_simple(M, d)


def step_sc(M, d: Discipline, compose: bool = True):
    """One step of the SC driver.

    With ``compose=False`` the driver evaluates the expression under a cast
    first and only merges two casts once the inner one sits on a value.
    Tests use that strategy as an independent reference.
    """
    if isinstance(M, Blame):
        return IsBlame(M.label)
    if is_value_sc(M, d):
        return IsValue(M)
    term, rule, path = _reduce(M, d, compose)
    return Stepped(term, rule, path)


def _reduce(M, d, compose):
    if isinstance(M, Cast):
        N, c = M.expr, M.cast
        if isinstance(N, Blame):
            return Blame(N.label, c.tgt), "ξ-cast-blame", ()
        if isinstance(N, Cast) and (compose or is_value_sc(N, d)):
            return Cast(N.expr, d.compose(N.cast, c)), "compose", ()
        if is_simple(N, d):
            if d.is_inert(c):
                raise InvariantViolation("a simple value under an inert cast is a value")
            return d.apply_cast(N, c, Mode.CC), "cast", ()
        term, rule, path = _reduce(N, d, compose)
        return Cast(term, c), rule, ("cast",) + path
    split = focus(M, lambda N: is_value_sc(N, d))
    if split is None:
        term, rule = _contract(M, d)
        return term, rule, ()
    F, N = split
    name = FRAME_NAMES[type(F)]
    if isinstance(N, Blame):
        return Blame(N.label, type_of(M, d)), "ξ-blame", (name,)
    term, rule, path = _reduce(N, d, compose)
    return plug(term, F), rule, (name,) + path


def _cast_value(V, d):
    if isinstance(V, Cast) and d.is_cross(V.cast):
        return V.cast
    return None


def _contract(M, d):
    match M:
        case App(L, W):
            if isinstance(L, Lam):
                return beta(L.body, W), "β"
            if isinstance(L, Const) and isinstance(W, Const):
                return delta(L, W), "δ"
            c = _cast_value(L, d)
            if c is not None:
                return (Cast(App(L.expr, Cast(W, d.decompose(c, "dom"))),
                             d.decompose(c, "cod")), "fun-cast")
        case If(Const(b), N1, N2):
            return (N1, "β-true") if b else (N2, "β-false")
        case Proj(i, V):
            if isinstance(V, Cons):
                return (V.fst, "β-fst") if i == 1 else (V.snd, "β-snd")
            c = _cast_value(V, d)
            if c is not None:
                field_ = "fst" if i == 1 else "snd"
                return Cast(Proj(i, V.expr), d.decompose(c, field_)), f"{field_}-cast"
        case CaseFn(V, N1, N2):
            if isinstance(V, Inl):
                return App(N1, V.expr), "β-caseL"
            if isinstance(V, Inr):
                return App(N2, V.expr), "β-caseR"
            c = _cast_value(V, d)
            if c is not None:
                A1, A2 = c.src.left, c.src.right
                left = Lam(A1, App(rename(shift, N1), Cast(Var(0), d.decompose(c, "inl"))))
                right = Lam(A2, App(rename(shift, N2), Cast(Var(0), d.decompose(c, "inr"))))
                return CaseFn(V.expr, left, right), "case-cast"
    raise InvariantViolation(f"stuck term in SC: {M!r}")


# size metrics

def size(M) -> int:
    return 1 + sum(map(size, children(M)))


def ideal_size(M) -> int:
    if isinstance(M, (Cast, Wrap)):
        return ideal_size(M.expr)
    return 1 + sum(map(ideal_size, children(M)))


def cast_size(c, d: Discipline) -> int:
    try:
        return d.size(c)
    except Unsupported:
        return 1


def real_size(M, d: Discipline) -> int:
    if isinstance(M, (Cast, Wrap)):
        return cast_size(M.cast, d) + real_size(M.expr, d)
    return 1 + sum(real_size(N, d) for N in children(M))


def c_height(M, d: Discipline) -> int:
    best = 0
    stack = [M]
    while stack:
        N = stack.pop()
        if isinstance(N, (Cast, Wrap)):
            best = max(best, d.height(N.cast))
        stack.extend(children(N))
    return best


def adjacency(M) -> int:
    """Length of the longest chain of directly nested casts."""
    def chain(N):
        n = 0
        while isinstance(N, (Cast, Wrap)):
            n += 1
            N = N.expr
        return n

    best = 0
    stack = [M]
    while stack:
        N = stack.pop()
        best = max(best, chain(N))
        stack.extend(children(N))
    return best


def size_ok(M, delayed: bool = False) -> Optional[int]:
    """The unique n with n ⊢ delayed M, or None when no n exists."""
    match M:
        case Cast(N, _) | Wrap(N, _):
            n = size_ok(N, delayed)
            if n is None or n > (1 if delayed else 2):
                return None
            return n + 1
        case Var():
            return 1
        case Const() | Blame():
            return 0
        case Lam(_, N):
            return 0 if size_ok(N, True) is not None else None
        case If(L, N1, N2) | CaseFn(L, N1, N2) | CaseBind(L, _, _, N1, N2):
            ok = (size_ok(L, delayed) is not None and size_ok(N1, True) is not None
                  and size_ok(N2, True) is not None)
            return 0 if ok else None
    if all(size_ok(N, delayed) is not None for N in children(M)):
        return 0
    return None


@dataclass(frozen=True)
class SizeReport:
    step: int
    rule: str
    size: int
    ideal_size: int
    real_size: int
    c_height: int
    adjacency: int
    ok_index: Optional[int]

    def record(self) -> dict:
        return {
            "step": self.step, "rule": self.rule, "size": self.size,
            "ideal": self.ideal_size, "real": self.real_size,
            "height": self.c_height, "adjacency": self.adjacency,
            "ok": self.ok_index,
        }


def _cast_metrics(c, d: Discipline, memo: dict) -> tuple:
    key = id(c)
    if key not in memo:
        try:
            h = d.height(c)
        except Unsupported:
            h = 0
        memo[key] = (cast_size(c, d), h, c)
    return memo[key]


def report(M, d: Discipline, step: int = 0, rule: str = "start") -> SizeReport:
    """All the size metrics of M, gathered in one walk.

    Agrees with size, ideal_size, real_size, c_height and adjacency.
    """
    n = ideal = real = height = adj = 0
    memo = {}
    stack = [(M, 0)]
    while stack:
        N, run = stack.pop()
        n += 1
        if isinstance(N, (Cast, Wrap)):
            cs, ch, _ = _cast_metrics(N.cast, d, memo)
            real += cs
            height = max(height, ch)
            run += 1
            adj = max(adj, run)
            stack.append((N.expr, run))
            continue
        ideal += 1
        real += 1
        stack.extend((K, 0) for K in children(N))
    return SizeReport(step, rule, n, ideal, real, height, adj, size_ok(M, False))


@dataclass
class SpaceMonitor:
    """Checks the space-efficiency lemmas on each reported state."""

    discipline: Discipline
    initial_height: Optional[int] = None
    violations: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    keep: bool = True

    def bound(self) -> int:
        return 13 * K2 * 2 ** self.initial_height

    def observe(self, r: SizeReport):
        if self.initial_height is None:
            self.initial_height = r.c_height
            self.last_height = r.c_height
        if self.keep:
            self.reports.append(r)
        where = f"step {r.step} ({r.rule})"
        if r.ok_index is None:
            self.violations.append(f"{where}: size predicate fails")
        else:
            if r.ok_index > 3:
                self.violations.append(f"{where}: size index {r.ok_index} exceeds 3")
            if r.size > 10 * r.ideal_size + 3:
                self.violations.append(f"{where}: size {r.size} exceeds 10*{r.ideal_size}+3")
        if r.adjacency > 3:
            self.violations.append(f"{where}: {r.adjacency} adjacent casts")
        if r.c_height > self.last_height:
            self.violations.append(f"{where}: cast height grew to {r.c_height}")
        if r.real_size > K2 * 2 ** r.c_height * r.size:
            self.violations.append(f"{where}: real size {r.real_size} exceeds k2*2^h*size")
        if r.real_size > self.bound() * r.ideal_size:
            self.violations.append(f"{where}: real size {r.real_size} exceeds "
                                   f"{self.bound()}*{r.ideal_size}")
        self.last_height = r.c_height


def eval_sc(M, d: Discipline, fuel: int = 10_000, check: bool = True,
            compose: bool = True, on_step: Optional[Callable] = None,
            on_report: Optional[Callable] = None) -> Outcome:
    """Run M under SC for at most ``fuel`` steps.

    ``on_report`` receives a SizeReport for the initial term and after
    every step.
    """
    if not d.composable:
        raise ContractViolation(f"{d.name} does not compose casts")
    A = type_of(M, d) if check else None
    if on_report is not None:
        on_report(report(M, d))
    for i in range(fuel + 1):
        r = step_sc(M, d, compose)
        if isinstance(r, IsValue):
            return Outcome("value", M, steps=i)
        if isinstance(r, IsBlame):
            return Outcome("blame", M, r.label, steps=i)
        if i == fuel:
            break
        if check:
            try:
                B = type_of(r.term, d)
            except GradualTypeError as e:
                raise InvariantViolation(f"step {r.rule} produced an ill-typed term: {e}") from e
            if B != A:
                raise InvariantViolation(f"step {r.rule} changed the type from {A} to {B}")
        if on_step is not None:
            on_step(TraceStep(i + 1, r.rule, r.path, r.term, size(M), size(r.term)))
        if on_report is not None:
            on_report(report(r.term, d, i + 1, r.rule))
        M = r.term
    return Outcome("timeout", M, steps=fuel)
