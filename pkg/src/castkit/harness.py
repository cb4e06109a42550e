"""Program generation, differential runs, simulation checks and space campaigns."""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional

from . import gtlc as g
from . import registry
from .cc import (Outcome, cterm_precision, eval_cc, labels_in, observe, render,
                 safe_for)
from .compile import compile_term
from .discipline import Discipline, Mode
from .errors import GradualTypeError, InvariantViolation
from .gradual import (BOOL, DYN, INT, NAT, Base, Fun, Pair, Sum, Type, Unknown, complement,
                      components, consistent, gnd, head, is_consistent,
                      is_ground, join, match_head, rebuild, type_depth)
from .sc import SpaceMonitor, eval_sc, report
from .syntax import parse_program


# running a GTLC program under a calculus

def compile_for(M, flag: str, variant: str = "cc"):
    """The cast-calculus term that ``execute`` runs for M."""
    d = registry.get(flag)
    mode = Mode.CC if d.composable else Mode(variant)
    return compile_term(M, d, mode).term


def execute(M, flag: str, variant: str = "cc", fuel: Optional[int] = None,
            on_step=None, on_report=None, check: bool = True) -> Outcome:
    """Compile a checked GTLC term under a calculus and run it.

    Composable calculi run in SC and ignore ``variant``.
    """
    d = registry.get(flag)
    fuel = 10_000 if fuel is None else fuel
    # cast chains in the non-composable calculi get deep; the walkers recurse
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    term = compile_for(M, flag, variant)
    if d.composable:
        return eval_sc(term, d, fuel, check=check, on_step=on_step, on_report=on_report)
    return eval_cc(term, d, Mode(variant), fuel, check=check, on_step=on_step)


# random generation

@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 4
    type_depth: int = 2
    dyn_bias: float = 0.0
    goal: Optional[Type] = None


class _DeadEnd(Exception):
    pass


GEN_BASES = (NAT, BOOL, INT)
_CONSTS = {
    "Nat": lambda r: g.nat(r.randint(0, 5)),
    "Bool": lambda r: g.boolean(r.random() < 0.5),
    "Int": lambda r: g.integer(r.randint(-3, 3)),
    "Unit": lambda r: g.UNIT_CONST,
}


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.r = rng
        self.next_label = 1

    def label(self):
        self.next_label += 1
        return self.next_label - 1

    def rand_type(self, depth=None, bias=None) -> Type:
        depth = self.cfg.type_depth if depth is None else depth
        bias = self.cfg.dyn_bias if bias is None else bias
        if self.r.random() < bias * 0.5:
            return DYN
        if depth == 0 or self.r.random() < 0.5:
            return self.r.choice(GEN_BASES)
        ctor = self.r.choice((Fun, Fun, Pair, Sum))
        return ctor(self.rand_type(depth - 1, bias), self.rand_type(depth - 1, bias))

    def static(self, A):
        """A itself, or a random type when A is Dyn."""
        return self.rand_type() if isinstance(A, Unknown) else A

    def leaf(self, ctx, A):
        opts = [i for i, B in enumerate(reversed(ctx)) if is_consistent(B, A)]
        r = self.r
        if opts and r.random() < 0.6:
            i = r.choice(opts)
            return g.Var(i), ctx[-1 - i]
        if isinstance(A, Unknown):
            if r.random() < 0.2:
                p = g.prim(r.choice(sorted(g.PRIMS)))
                return p, p.type
            k = _CONSTS[r.choice(GEN_BASES).name](r)
            return k, k.type
        if isinstance(A, Base):
            k = _CONSTS[A.name](r)
            return k, k.type
        prims = [g.prim(p) for p in sorted(g.PRIMS) if is_consistent(g.PRIMS[p].type, A)]
        if prims and r.random() < 0.5:
            p = r.choice(prims)
            return p, p.type
        return None

    def gen(self, ctx, A, depth):
        if depth <= 1:
            got = self.leaf(ctx, A)
            if got is None or not is_consistent(A, got[1]):
                raise _DeadEnd
            return got
        for _ in range(3):
            try:
                M, B = self.pick(ctx, A, depth)
            except _DeadEnd:
                continue
            if is_consistent(A, B):
                return M, B
        raise _DeadEnd

    def intro(self, ctx, A, depth):
        """Build A with its introduction form."""
        A = self.static(A)
        match A:
            case Base():
                k = _CONSTS[A.name](self.r)
                return k, k.type
            case Fun(A1, A2):
                A1 = self.static(A1)
                body, B = self.gen(ctx + (A1,), A2, depth - 1)
                return g.Lam(A1, body), Fun(A1, B)
            case Pair(A1, A2):
                M1, B1 = self.gen(ctx, A1, depth - 1)
                M2, B2 = self.gen(ctx, A2, depth - 1)
                return g.Cons(M1, M2), Pair(B1, B2)
            case Sum(A1, A2):
                if self.r.random() < 0.5:
                    M, B = self.gen(ctx, A1, depth - 1)
                    ann = self.static(A2)
                    return g.Inl(ann, M), Sum(B, ann)
                M, B = self.gen(ctx, A2, depth - 1)
                ann = self.static(A1)
                return g.Inr(ann, M), Sum(ann, B)
        raise _DeadEnd

    def pick(self, ctx, A, depth):
        r = self.r
        forms = ["leaf", "app", "app", "app", "if", "proj", "case"]
        if isinstance(A, Unknown) or head(A) is not None:
            forms += ["intro", "intro", "intro"]
        form = r.choice(forms)
        d = depth - 1
        if form == "leaf":
            got = self.leaf(ctx, A)
            return got if got is not None else self.intro(ctx, A, depth)
        if form == "intro":
            return self.intro(ctx, A, depth)
        if form == "app":
            B = self.rand_type(1)
            fn, F = self.gen(ctx, Fun(B, A), d)
            F1, F2 = match_head(F, "fun")
            arg, _ = self.gen(ctx, F1, d)
            return g.App(fn, arg, self.label()), F2
        if form == "if":
            cond, _ = self.gen(ctx, BOOL, d)
            thn, T1 = self.gen(ctx, A, d)
            els, T2 = self.gen(ctx, T1, d)
            return g.If(cond, thn, els, self.label()), join(consistent(T1, T2))
        if form == "proj":
            B = self.rand_type(1)
            i = r.choice((1, 2))
            goal = Pair(A, B) if i == 1 else Pair(B, A)
            e, T = self.gen(ctx, goal, d)
            return g.Proj(i, e, self.label()), match_head(T, "pair")[i - 1]
        B, C = self.rand_type(1), self.rand_type(1)
        scrut, S = self.gen(ctx, Sum(B, C), d)
        S1, S2 = match_head(S, "sum")
        B1, C1 = self.static(S1), self.static(S2)
        if not is_consistent(Sum(S1, S2), Sum(B1, C1)):
            raise _DeadEnd
        left, T1 = self.gen(ctx + (B1,), A, d)
        right, T2 = self.gen(ctx + (C1,), T1, d)
        return g.Case(scrut, B1, C1, left, right, self.label()), join(consistent(T1, T2))


def loosen_type(A: Type, rng: random.Random, bias: float) -> Type:
    if isinstance(A, Unknown) or rng.random() < bias:
        return DYN
    if isinstance(A, Base):
        return A
    a, b = components(A)
    return rebuild(head(A), loosen_type(a, rng, bias), loosen_type(b, rng, bias))


def loosen(M, rng: random.Random, bias: float):
    """Replace parts of every annotation with Dyn, each with probability ``bias``."""
    def ty(A):
        return loosen_type(A, rng, bias)

    match M:
        case g.Lam(A, N):
            return g.Lam(ty(A), loosen(N, rng, bias))
        case g.App(L, N, lab):
            return g.App(loosen(L, rng, bias), loosen(N, rng, bias), lab)
        case g.If(L, N1, N2, lab):
            return g.If(*(loosen(x, rng, bias) for x in (L, N1, N2)), lab)
        case g.Cons(N1, N2):
            return g.Cons(loosen(N1, rng, bias), loosen(N2, rng, bias))
        case g.Proj(i, N, lab):
            return g.Proj(i, loosen(N, rng, bias), lab)
        case g.Inl(B, N):
            return g.Inl(ty(B), loosen(N, rng, bias))
        case g.Inr(A, N):
            return g.Inr(ty(A), loosen(N, rng, bias))
        case g.Case(L, B, C, N1, N2, lab):
            return g.Case(loosen(L, rng, bias), ty(B), ty(C),
                          loosen(N1, rng, bias), loosen(N2, rng, bias), lab)
    return M


def annotations(M) -> list:
    """Every type annotation of M in pre-order."""
    out = []
    match M:
        case g.Lam(A, _) | g.Inl(A, _) | g.Inr(A, _):
            out.append(A)
        case g.Case(_, B, C, _, _, _):
            out += [B, C]
    for N in g.gterm_children(M):
        out += annotations(N)
    return out


def gen_typed_program(cfg: GenConfig):
    """A closed, well-typed GTLC term, deterministic in ``cfg.seed``."""
    rng = random.Random(cfg.seed)
    for _ in range(1000):
        gen = _Gen(cfg, rng)
        goal = cfg.goal if cfg.goal is not None else gen.rand_type(bias=0.0)
        try:
            M, _ = gen.gen((), goal, cfg.max_depth)
        except _DeadEnd:
            continue
        if g.gterm_depth(M) > max(cfg.max_depth, 1):
            continue
        try:
            g.typecheck_gtlc((), M)
        except GradualTypeError:
            continue
        if cfg.dyn_bias:
            M = loosen(M, rng, cfg.dyn_bias)
            g.typecheck_gtlc((), M)  # the static gradual guarantee says this holds
        return M
    raise InvariantViolation(f"no program found for {cfg}")


# differential execution

def agree(a: Outcome, b: Outcome) -> bool:
    if a.kind != b.kind:
        return False
    if a.kind == "value":
        return observe(a.term) == observe(b.term)
    if a.kind == "blame":
        return a.label == b.label
    return True


@dataclass
class DiffReport:
    outcomes: dict
    matrix: dict
    first_divergence: Optional[int] = None

    @property
    def all_agree(self) -> bool:
        return all(self.matrix.values())

    def rows(self) -> list:
        return [(k, o.describe()) for k, o in self.outcomes.items()]

    def table(self) -> str:
        width = max(len(k) for k in self.outcomes)
        lines = [f"{k:<{width}}  {desc}" for k, desc in self.rows()]
        lines.append("all agree" if self.all_agree else "disagreement")
        return "\n".join(lines)


def run_differential(M, disciplines: list, fuel: int = 10_000, variant: str = "cc",
                     traced: bool = False) -> DiffReport:
    """Run M under each calculus and compare outcomes pairwise.

    With ``traced`` the report also gives the first step at which the
    rendered terms of any two runs differ.
    """
    outcomes, traces = {}, {}
    for flag in disciplines:
        lines = []
        hook = (lambda s, lines=lines: lines.append(render(s.term))) if traced else None
        outcomes[flag] = execute(M, flag, variant, fuel, on_step=hook)
        traces[flag] = lines
    matrix = {(a, b): agree(outcomes[a], outcomes[b])
              for a in outcomes for b in outcomes}
    first = None
    if traced:
        runs = list(traces.values())
        longest = max(map(len, runs), default=0)
        for i in range(longest):
            if len({t[i] if i < len(t) else None for t in runs}) > 1:
                first = i + 1
                break
    return DiffReport(outcomes, matrix, first)


# enumeration of small GTLC terms

@dataclass(frozen=True)
class Vocab:
    consts: tuple = (g.nat(1), g.boolean(True))
    annots: tuple = (NAT, BOOL)
    forms: frozenset = frozenset({"lam", "app", "if"})


def enumerate_gtlc(max_depth: int, vocab: Vocab = Vocab(), ctx=()) -> list:
    """Every well-typed term of depth at most ``max_depth`` over ``vocab``.

    Labels are left at 0; ``relabel`` numbers them.
    """
    memo = {}

    def terms(ctx, d):
        key = (ctx, d)
        if key in memo:
            return memo[key]
        out = [(k, k.type) for k in vocab.consts]
        out += [(g.Var(i), ctx[-1 - i]) for i in range(len(ctx))]
        if d >= 2:
            sub = terms(ctx, d - 1)
            if "lam" in vocab.forms:
                for A in vocab.annots:
                    out += [(g.Lam(A, N), Fun(A, B)) for N, B in terms(ctx + (A,), d - 1)]
            if "app" in vocab.forms:
                for L, F in sub:
                    m = match_head(F, "fun")
                    if m is None:
                        continue
                    out += [(g.App(L, N, 0), m[1]) for N, B in sub if is_consistent(m[0], B)]
            if "if" in vocab.forms:
                conds = [L for L, A in sub if is_consistent(A, BOOL)]
                for (N1, B1), (N2, B2) in product(sub, repeat=2):
                    p = consistent(B1, B2)
                    if p is not None:
                        out += [(g.If(L, N1, N2, 0), join(p)) for L in conds]
            if "cons" in vocab.forms:
                out += [(g.Cons(N1, N2), Pair(B1, B2)) for (N1, B1), (N2, B2) in product(sub, repeat=2)]
            if "proj" in vocab.forms:
                for N, B in sub:
                    m = match_head(B, "pair")
                    if m is not None:
                        out += [(g.Proj(1, N, 0), m[0]), (g.Proj(2, N, 0), m[1])]
        memo[key] = out
        return out

    return [M for M, _ in terms(tuple(ctx), max_depth)]


def relabel(M, start: int = 1):
    """Number the labels of M in pre-order starting from ``start``."""
    counter = [start]

    def go(N):
        match N:
            case g.Lam(A, B):
                return g.Lam(A, go(B))
            case g.App(L, R, _):
                lab = fresh()
                return g.App(go(L), go(R), lab)
            case g.If(L, N1, N2, _):
                lab = fresh()
                return g.If(go(L), go(N1), go(N2), lab)
            case g.Cons(N1, N2):
                return g.Cons(go(N1), go(N2))
            case g.Proj(i, P, _):
                lab = fresh()
                return g.Proj(i, go(P), lab)
            case g.Inl(B, P):
                return g.Inl(B, go(P))
            case g.Inr(A, P):
                return g.Inr(A, go(P))
            case g.Case(L, B, C, N1, N2, _):
                lab = fresh()
                return g.Case(go(L), B, C, go(N1), go(N2), lab)
        return N

    def fresh():
        counter[0] += 1
        return counter[0] - 1

    return go(M)


def less_precise(A: Type) -> list:
    """Every type B with B ⊑ A."""
    if isinstance(A, Unknown):
        return [DYN]
    if isinstance(A, Base):
        return [DYN, A]
    a, b = components(A)
    return [DYN] + [rebuild(head(A), x, y) for x in less_precise(a) for y in less_precise(b)]


def loosenings(M) -> list:
    """Every term obtained by replacing annotations with less precise types."""
    match M:
        case g.Lam(A, N):
            return [g.Lam(B, N2) for B in less_precise(A) for N2 in loosenings(N)]
        case g.App(L, N, lab):
            return [g.App(a, b, lab) for a in loosenings(L) for b in loosenings(N)]
        case g.If(L, N1, N2, lab):
            return [g.If(a, b, c, lab) for a in loosenings(L)
                    for b in loosenings(N1) for c in loosenings(N2)]
        case g.Cons(N1, N2):
            return [g.Cons(a, b) for a in loosenings(N1) for b in loosenings(N2)]
        case g.Proj(i, N, lab):
            return [g.Proj(i, a, lab) for a in loosenings(N)]
        case g.Inl(B, N):
            return [g.Inl(B2, a) for B2 in less_precise(B) for a in loosenings(N)]
        case g.Inr(A, N):
            return [g.Inr(A2, a) for A2 in less_precise(A) for a in loosenings(N)]
        case g.Case(L, B, C, N1, N2, lab):
            return [g.Case(a, B2, C2, b, c, lab) for a in loosenings(L)
                    for B2 in less_precise(B) for C2 in less_precise(C)
                    for b in loosenings(N1) for c in loosenings(N2)]
    return [M]


def precision_pairs(max_depth: int, vocab: Vocab = Vocab()) -> Iterator[tuple]:
    """Pairs (M, M2) with M ⊑ M2: each enumerated M2 against each loosening."""
    for M2 in enumerate_gtlc(max_depth, vocab):
        M2 = relabel(M2)
        for M in loosenings(M2):
            yield M, M2


# the dynamic gradual guarantee, checked on one pair

@dataclass(frozen=True)
class SimResult:
    ok: bool
    less: str
    more: str
    clause: Optional[int] = None
    detail: str = ""


def _run_lb(M, d: Discipline, fuel: int) -> Outcome:
    term = compile_term(M, d, Mode.CCP).term
    return eval_cc(term, d, Mode.CCP, fuel, check=False)


def check_simulation(M, M2, fuel: int = 10_000, flag: str = "lambda-b1",
                     retry_factor: int = 10) -> SimResult:
    """Check the four clauses of the dynamic gradual guarantee on M ⊑ M2.

    M is the less precise program.  When a clause fails only because one
    side ran out of fuel, that side is rerun once with ``retry_factor``
    times the fuel before the failure is reported.
    """
    d = registry.get(flag)
    o1, o2 = _run_lb(M, d, fuel), _run_lb(M2, d, fuel)
    if o1.kind == "timeout" and o2.kind == "value":
        o1 = _run_lb(M, d, fuel * retry_factor)
    if o2.kind == "timeout" and o1.kind in ("value", "blame"):
        o2 = _run_lb(M2, d, fuel * retry_factor)
    a, b = o1.describe(), o2.describe()

    def fail(clause, detail):
        return SimResult(False, a, b, clause, detail)

    if o2.kind == "value":
        if o1.kind != "value":
            return fail(1, "the more precise program reached a value but the other did not")
        if not cterm_precision(o1.term, o2.term, d, Mode.CCP):
            return fail(1, f"{render(o1.term)} is not below {render(o2.term)}")
    if o2.kind == "timeout" and o1.kind != "timeout":
        return fail(2, "the more precise program diverged but the other did not")
    if o1.kind == "value" and o2.kind not in ("value", "blame"):
        return fail(3, "the less precise program reached a value but the other did not")
    if o1.kind == "timeout" and o2.kind not in ("timeout", "blame"):
        return fail(4, "the less precise program diverged but the other did not")
    return SimResult(True, a, b)


# blame safety campaigns

@dataclass(frozen=True)
class SafetyResult:
    outcome: str
    safe_labels: frozenset
    violations: tuple


def check_blame_safety(M, flag: str, fuel: int = 10_000) -> SafetyResult:
    """Run M in CC' and check that no label it is safe for is ever blamed.

    Safety is re-checked on every intermediate term, so a step that breaks
    it is reported even if the run later ends well.
    """
    d = registry.get(flag)
    term = compile_term(M, d, Mode.CCP).term
    candidates = set(g.labels_of(M)) | labels_in(term, d)
    candidates |= {complement(lab) for lab in candidates}
    safe = frozenset(lab for lab in candidates if safe_for(term, lab, d))
    bad = []

    def on_step(s):
        for lab in safe:
            if not safe_for(s.term, lab, d):
                bad.append(f"step {s.index} ({s.rule}) lost safety for {lab}")

    out = eval_cc(term, d, Mode.CCP, fuel, on_step=on_step)
    if out.kind == "blame" and out.label in safe:
        bad.append(f"blamed {out.label} although the program was safe for it")
    return SafetyResult(out.describe(), safe, tuple(bad))


# space measurements

@dataclass(frozen=True)
class SpaceResult:
    outcome: str
    steps: int
    bound_factor: int
    max_real_size: int
    max_ideal_size: int
    max_height: int
    violations: tuple


def measure_space(M, flag: str = "lambda-s", fuel: int = 10_000,
                  strict: bool = True) -> SpaceResult:
    """Run M in SC and check the space lemmas at every step."""
    d = registry.get(flag)
    monitor = SpaceMonitor(d, keep=False)
    peaks = {"real": 0, "ideal": 0, "height": 0}

    def observe_report(r):
        monitor.observe(r)
        peaks["real"] = max(peaks["real"], r.real_size)
        peaks["ideal"] = max(peaks["ideal"], r.ideal_size)
        peaks["height"] = max(peaks["height"], r.c_height)

    out = execute(M, flag, fuel=fuel, on_report=observe_report)
    result = SpaceResult(out.describe(), out.steps, monitor.bound(), peaks["real"],
                         peaks["ideal"], peaks["height"], tuple(monitor.violations))
    if strict and monitor.violations:
        raise InvariantViolation(f"space bound violated: {monitor.violations[0]}")
    return result


def measure_growth(M, flag: str = "edi", variant: str = "cc", fuel: int = 10_000) -> list:
    """A SizeReport after every step of a run, without checking any bound.

    Meant for the non-composable calculi, whose cast chains are unbounded.
    """
    d = registry.get(flag)
    reports = []
    execute(M, flag, variant, fuel, check=False,
            on_step=lambda s: reports.append(report(s.term, d, s.index, s.rule)))
    return reports


def stress_source(n: int) -> str:
    """A function passed n times through alternating ?-typed positions.

    ``fa`` takes it at Dyn -> Bool and ``fb`` at Bool -> Dyn, and both are
    bound at Dyn, so every crossing adds casts on the function value while
    the value itself stays the same.
    """
    fa = "(lam (k : (-> Dyn Bool)) k)"
    fb = "(lam (k : (-> Bool Dyn)) k)"
    body = "k0"
    label = 100
    for i in range(n):
        body = f"({'fa' if i % 2 == 0 else 'fb'} {body})@{label}"
        label += 1
    loop = f"(lam (fa : Dyn) (lam (fb : Dyn) (lam (k0 : Dyn) {body})))"
    k0 = "(lam (x : Bool) (not x)@1)"
    return f"(((({loop} {fa})@4 {fb})@5 {k0})@6 true)@7"


def stress_program(n: int):
    return parse_program(stress_source(n))


# coercion enumeration for the space-efficient calculi

@dataclass(frozen=True)
class CoercionUniverse:
    bases: tuple = (NAT, BOOL)
    labels: tuple = (1,)
    fail_targets: tuple = (NAT,)
    max_type_depth: int = 3

    def grounds(self):
        return [*self.bases, Fun(DYN, DYN), Pair(DYN, DYN), Sum(DYN, DYN)]

    def fits(self, c) -> bool:
        return (type_depth(c.src) <= self.max_type_depth
                and type_depth(c.tgt) <= self.max_type_depth)


def _lambda_s_by_height(max_height, u: CoercionUniverse):
    from .efficient import lambda_s as S

    tops = []
    for h in range(max_height + 1):
        if h == 0:
            grounds = [S.SIdBase(b) for b in u.bases]
        else:
            top_sets = [set(t) for t in tops]
            below = [c for t in tops for c in t]
            grounds = []
            for s, t in product(below, repeat=2):
                if s in top_sets[h - 1] or t in top_sets[h - 1]:
                    grounds += [ctor(s, t) for ctor in (S.SFun, S.SPair, S.SSum)]
            grounds = [x for x in grounds if u.fits(x)]
        inters = [S.SGrd(x) for x in grounds]
        inters += [S.SInj(x, x.tgt) for x in grounds if is_ground(x.tgt)]
        if h == 0:
            inters += [S.SFail(lab, G, B) for lab in u.labels
                       for G in u.grounds() for B in u.fail_targets]
        level = [S.ID_DYN] if h == 0 else []
        level += [S.SProj(i.src, lab, i) for i in inters for lab in u.labels
                  if is_ground(i.src)]
        level += [S.SMid(i) for i in inters]
        tops.append([c for c in level if u.fits(c)])
    return tops


def _hyper_by_height(max_height, u: CoercionUniverse):
    from .efficient import hyper as H

    tops = []
    for h in range(max_height + 1):
        if h == 0:
            mids = [H.IdM(b) for b in u.bases]
        else:
            top_sets = [set(t) for t in tops]
            below = [c for t in tops for c in t]
            mids = []
            for s, t in product(below, repeat=2):
                if s in top_sets[h - 1] or t in top_sets[h - 1]:
                    mids += [ctor(s, t) for ctor in (H.HFun, H.HPair, H.HSum)]
        level = [H.ID_DYN] if h == 0 else []
        for m in mids:
            ps = [H.IdP()] + ([H.ProjP(m.src, lab) for lab in u.labels] if is_ground(m.src) else [])
            ends = [H.IdE()] + ([H.InjE(m.tgt)] if is_ground(m.tgt) else [])
            ends += [H.FailE(lab, B) for lab in u.labels for B in u.fail_targets]
            level += [H.Triple(p, m, i) for p in ps for i in ends]
        tops.append([c for c in level if u.fits(c)])
    return tops


def enumerate_coercions(discipline, max_height: int,
                        universe: CoercionUniverse = CoercionUniverse()) -> Iterator:
    """Every well-formed coercion of height at most ``max_height``, once each."""
    flag = discipline if isinstance(discipline, str) else discipline.flag
    if max_height > 4:
        raise ValueError("max_height is capped at 4")
    build = {"lambda-s": _lambda_s_by_height, "hyper": _hyper_by_height}[flag]
    for level in build(max_height, universe):
        yield from level


def recount_coercions(discipline, max_height: int, types: list,
                      universe: CoercionUniverse = CoercionUniverse()) -> set:
    """A second, type-directed generator used to cross-check the counts.

    Returns all coercions between any two of ``types`` whose height is at
    most ``max_height``.  Failures connect inconsistent types too, so every
    pair is visited.
    """
    from .efficient import hyper as H
    from .efficient import lambda_s as S

    flag = discipline if isinstance(discipline, str) else discipline.flag
    grounds = universe.grounds()
    memo = {}

    if flag == "lambda-s":
        def top(A, B, h):
            key = (A, B, h)
            if key not in memo:
                out = []
                if isinstance(A, Unknown):
                    if isinstance(B, Unknown):
                        out.append(S.ID_DYN)
                    for G in grounds:
                        out += [S.SProj(G, lab, i) for lab in universe.labels
                                for i in inter(G, B, h)]
                else:
                    out += [S.SMid(i) for i in inter(A, B, h)]
                memo[key] = out
            return memo[key]

        def inter(A, B, h):
            out = []
            if isinstance(B, Unknown):
                out += [S.SInj(x, G) for G in grounds for x in ground(A, G, h)]
            else:
                out += [S.SGrd(x) for x in ground(A, B, h)]
            if A in grounds and B in universe.fail_targets:
                out += [S.SFail(lab, A, B) for lab in universe.labels]
            return out

        def ground(A, B, h):
            if isinstance(A, Base) or isinstance(B, Base):
                return [S.SIdBase(A)] if A == B else []
            if h == 0 or head(A) is None or head(A) != head(B):
                return []
            (a1, a2), (b1, b2) = components(A), components(B)
            ctor = {"fun": S.SFun, "pair": S.SPair, "sum": S.SSum}[head(A)]
            if head(A) == "fun":
                return [ctor(x, y) for x in top(b1, a1, h - 1) for y in top(a2, b2, h - 1)]
            return [ctor(x, y) for x in top(a1, b1, h - 1) for y in top(a2, b2, h - 1)]
    else:
        def top(A, B, h):
            key = (A, B, h)
            if key not in memo:
                out = []
                if isinstance(A, Unknown) and isinstance(B, Unknown):
                    out.append(H.ID_DYN)
                starts = grounds if isinstance(A, Unknown) else [A]
                for A1 in starts:
                    ps = [H.ProjP(A1, lab) for lab in universe.labels] \
                        if isinstance(A, Unknown) else [H.IdP()]
                    ends = grounds if isinstance(B, Unknown) else [B]
                    for B1 in ends:
                        i = H.InjE(B1) if isinstance(B, Unknown) else H.IdE()
                        out += [H.Triple(p, m, i) for m in mid(A1, B1, h) for p in ps]
                    # a failure ends the middle anywhere and produces B
                    if B in universe.fail_targets:
                        mids = [m for B1 in types for m in mid(A1, B1, h)]
                        out += [H.Triple(p, m, H.FailE(lab, B)) for m in mids for p in ps
                                for lab in universe.labels]
                memo[key] = out
            return memo[key]

        def mid(A, B, h):
            if isinstance(A, Base) or isinstance(B, Base):
                return [H.IdM(A)] if A == B else []
            if h == 0 or isinstance(A, Unknown) or isinstance(B, Unknown):
                return []
            if head(A) != head(B):
                return []
            (a1, a2), (b1, b2) = components(A), components(B)
            ctor = {"fun": H.HFun, "pair": H.HPair, "sum": H.HSum}[head(A)]
            if head(A) == "fun":
                return [ctor(x, y) for x in top(b1, a1, h - 1) for y in top(a2, b2, h - 1)]
            return [ctor(x, y) for x in top(a1, b1, h - 1) for y in top(a2, b2, h - 1)]

    found = set()
    for A in types:
        for B in types:
            found.update(c for c in top(A, B, max_height) if universe.fits(c))
    return found


# counting coercions without building them

def _type_class(kind, ground=False, depth=0):
    return (kind, ground, depth)


_DYN_CLASS = _type_class("dyn")


def _composite_class(h, a, b):
    return _type_class(h, a == _DYN_CLASS and b == _DYN_CLASS, 1 + max(a[2], b[2]))


def _is_ground_class(k):
    return k[0] not in ("dyn",) and (k[1] or k[0].startswith("base:"))


@dataclass(frozen=True)
class LevelStats:
    """Number of coercions and their largest size, per (source, target) class."""
    count: int
    max_size: int


def _merge(table, key, count, size):
    old = table.get(key)
    if old is None:
        table[key] = LevelStats(count, size)
    else:
        table[key] = LevelStats(old.count + count, max(old.max_size, size))


def coercion_census(discipline, max_height: int,
                    universe: CoercionUniverse = CoercionUniverse()) -> dict:
    """Exact counts and maximum sizes of coercions, by height and grammar level.

    Coercions are grouped by the shape of their source and target types
    (Dyn, a base, or a head with its depth and whether it is ground), which
    is all the grammar's side conditions and the type-depth limit look at.
    Returns ``{height: {level: {(src, tgt): LevelStats}}}``.
    """
    flag = discipline if isinstance(discipline, str) else discipline.flag
    bases = [_type_class("base:" + b.name) for b in universe.bases]
    grounds = bases + [_type_class(h, True, 1) for h in ("fun", "pair", "sum")]
    nlab = len(universe.labels)
    fail_tgts = [_class_of(B) for B in universe.fail_targets]
    D = universe.max_type_depth

    def fits(k):
        return k[2] <= D

    out = {}
    tops_below = {}  # (src, tgt) -> (count, max size) over all lower heights, by exact height
    history = []
    for h in range(max_height + 1):
        inner = {}
        if h == 0:
            for b in bases:
                _merge(inner, (b, b), 1, 0)
        else:
            for (s1, t1), x in _union(history).items():
                for (s2, t2), y in _union(history).items():
                    if not _touches(history, h - 1, (s1, t1), (s2, t2)):
                        continue
                    cnt, big = _pair_stats(history, h - 1, (s1, t1), (s2, t2))
                    if cnt == 0:
                        continue
                    for name in ("fun", "pair", "sum"):
                        if name == "fun":
                            src, tgt = _composite_class(name, t1, s2), _composite_class(name, s1, t2)
                        else:
                            src, tgt = _composite_class(name, s1, s2), _composite_class(name, t1, t2)
                        if fits(src) and fits(tgt):
                            _merge(inner, (src, tgt), cnt, 1 + big)
        if flag == "lambda-s":
            inter = {}
            for (s, t), x in inner.items():
                _merge(inter, (s, t), x.count, x.max_size)
                if _is_ground_class(t):
                    _merge(inter, (s, _DYN_CLASS), x.count, 2 + x.max_size)
            if h == 0:
                for G in grounds:
                    for B in fail_tgts:
                        _merge(inter, (G, B), nlab, 0)
            top = {}
            if h == 0:
                _merge(top, (_DYN_CLASS, _DYN_CLASS), 1, 0)
            for (s, t), x in inter.items():
                _merge(top, (s, t), x.count, x.max_size)
                if _is_ground_class(s):
                    _merge(top, (_DYN_CLASS, t), nlab * x.count, 2 + x.max_size)
            out[h] = {"ground": inner, "intermediate": inter, "top": top}
        else:
            top = {}
            if h == 0:
                _merge(top, (_DYN_CLASS, _DYN_CLASS), 1, 0)
            for (s, t), x in inner.items():
                starts = [(s, 1, 0)] + ([(_DYN_CLASS, nlab, 1)] if _is_ground_class(s) else [])
                ends = [(t, 1, 0)] + ([(_DYN_CLASS, 1, 1)] if _is_ground_class(t) else [])
                ends += [(B, nlab, 0) for B in fail_tgts]
                for src, n1, z1 in starts:
                    for tgt, n2, z2 in ends:
                        if fits(src) and fits(tgt):
                            _merge(top, (src, tgt), x.count * n1 * n2, 2 + z1 + x.max_size + z2)
            out[h] = {"middle": inner, "top": top}
        history.append({k: v for k, v in out[h]["top"].items() if fits(k[0]) and fits(k[1])})
    return out


def _class_of(A: Type):
    if isinstance(A, Unknown):
        return _DYN_CLASS
    if isinstance(A, Base):
        return _type_class("base:" + A.name)
    a, b = components(A)
    return _composite_class(head(A), _class_of(a), _class_of(b))


def _union(history):
    keys = {}
    for level in history:
        for k, v in level.items():
            _merge(keys, k, v.count, v.max_size)
    return keys


def _touches(history, top, k1, k2):
    return k1 in history[top] or k2 in history[top]


def _pair_stats(history, top, k1, k2):
    """Pairs (s, t) with keys k1, k2 where at least one has height exactly ``top``."""
    def total(k, upto):
        cnt, big = 0, -1
        for level in history[:upto]:
            if k in level:
                cnt += level[k].count
                big = max(big, level[k].max_size)
        return cnt, big

    a_all, a_big = total(k1, top + 1)
    b_all, b_big = total(k2, top + 1)
    a_low, _ = total(k1, top)
    b_low, _ = total(k2, top)
    count = a_all * b_all - a_low * b_low
    return count, a_big + b_big


def census_total(census: dict, level: str = "top") -> int:
    return sum(x.count for h in census for x in census[h][level].values())


# coercion lemmas: size-height, compose-height, decomposition-height

SIZE_HEIGHT_SLACK = {
    "lambda-s": {"top": 5, "intermediate": 7, "ground": 9},
    "hyper": {"top": 5, "middle": 9},
}


def _flag(discipline) -> str:
    return discipline if isinstance(discipline, str) else discipline.flag


def _parts(flag, c):
    """(level, coercion) for c and every coercion nested inside it."""
    if flag == "lambda-s":
        from .efficient import lambda_s as S

        out = [(S.level(c), c)]
        match c:
            case S.SProj(_, _, x) | S.SMid(x) | S.SInj(x, _) | S.SGrd(x):
                out += _parts(flag, x)
            case S.SFun(a, b) | S.SPair(a, b) | S.SSum(a, b):
                out += _parts(flag, a) + _parts(flag, b)
        return out
    from .efficient import hyper as H

    match c:
        case H.Triple(_, m, _):
            return [("top", c)] + _parts(flag, m)
        case H.HFun(a, b) | H.HPair(a, b) | H.HSum(a, b):
            return [("middle", c)] + _parts(flag, a) + _parts(flag, b)
        case H.IdM():
            return [("middle", c)]
    return [("top", c)]


def coercion_violations(discipline, c) -> list:
    """Check the unary lemmas on c and everything nested in it."""
    from .efficient import hyper as H

    flag = _flag(discipline)
    d = registry.get(flag)
    slack = SIZE_HEIGHT_SLACK[flag]
    out = []
    for lvl, x in _parts(flag, c):
        h, s = d.height(x), d.size(x)
        if s + slack[lvl] > 9 * 2 ** h:
            out.append(f"size-height ({lvl}): size {s} + {slack[lvl]} > 9*2^{h} for {x}")
        if isinstance(x, H.Triple):
            if H.size_h(x.p) > 1 or H.size_h(x.i) > 1:
                out.append(f"projection/injection part larger than 1 in {x}")
        if lvl == "top" and d.is_cross(x):
            for fld in DECOMPOSE_FIELDS[head(x.src)]:
                part = d.decompose(x, fld)
                if d.height(part) > h:
                    out.append(f"{fld}-height: {d.height(part)} > {h} for {x}")
    return out


DECOMPOSE_FIELDS = {"fun": ("dom", "cod"), "pair": ("fst", "snd"), "sum": ("inl", "inr")}


def compose_violations(discipline, c, e) -> list:
    """Check compose-height and endpoints for one composable pair."""
    d = registry.get(_flag(discipline))
    r = d.compose(c, e)
    out = []
    if r.src != c.src or r.tgt != e.tgt:
        out.append(f"compose endpoints: {c} ; {e} gave {r.src} => {r.tgt}")
    if d.height(r) > max(d.height(c), d.height(e)):
        out.append(f"compose-height: {d.height(r)} > max({d.height(c)}, {d.height(e)}) "
                   f"for {c} ; {e}")
    return out + coercion_violations(d, r)


def composable_pairs(coercions) -> Iterator[tuple]:
    by_src = {}
    for c in coercions:
        by_src.setdefault(c.src, []).append(c)
    for c in coercions:
        for e in by_src.get(c.tgt, ()):
            yield c, e


def census_violations(discipline, census: dict) -> list:
    """Size-height inequalities over a census, using each class's largest size."""
    slack = SIZE_HEIGHT_SLACK[_flag(discipline)]
    out = []
    for h, levels in census.items():
        for lvl, table in levels.items():
            for key, st in table.items():
                if st.max_size + slack[lvl] > 9 * 2 ** h:
                    out.append(f"height {h} {lvl} {key}: size {st.max_size} + {slack[lvl]} "
                               f"> 9*2^{h}")
    return out


def random_consistent(A: Type, rng: random.Random, depth: int, bases=(NAT, BOOL),
                      bias: float = 0.3) -> Type:
    """A random type of depth at most ``depth`` that is consistent with A."""
    if rng.random() < bias:
        return DYN
    if isinstance(A, Unknown):
        if depth == 0 or rng.random() < 0.4:
            return rng.choice(bases)
        h = rng.choice(("fun", "pair", "sum"))
        return rebuild(h, random_consistent(DYN, rng, depth - 1, bases, bias),
                       random_consistent(DYN, rng, depth - 1, bases, bias))
    if isinstance(A, Base):
        return A
    a, b = components(A)
    return rebuild(head(A), random_consistent(a, rng, depth - 1, bases, bias),
                   random_consistent(b, rng, depth - 1, bases, bias))


def random_coercion_chain(discipline, rng: random.Random, length: int,
                          type_depth: int = 3, labels=(1, 2)) -> list:
    """Coercions c1 .. cn along a random walk of consistent types.

    Composing a run of them gives coercions that no single coerce call
    produces, such as failures buried under function coercions.
    """
    d = registry.get(_flag(discipline))
    A = random_consistent(DYN, rng, type_depth, bias=0.2)
    out = []
    for _ in range(length):
        B = random_consistent(A, rng, type_depth)
        out.append(d.make_cast(A, B, rng.choice(labels)))
        A = B
    return out


def sampled_compose_check(discipline, seed: int, samples: int, max_height: int = 3) -> tuple:
    """Compose random pairs built from coercion chains.

    Returns (pairs checked, violations).
    """
    d = registry.get(_flag(discipline))
    rng = random.Random(seed)
    checked, bad = 0, []
    while checked < samples:
        chain = random_coercion_chain(d, rng, rng.randint(2, 6))
        j = rng.randint(1, len(chain) - 1)
        c, e = chain[0], chain[j]
        for x in chain[1:j]:
            c = d.compose(c, x)
        for x in chain[j + 1:]:
            e = d.compose(e, x)
        if max(d.height(c), d.height(e)) > max_height:
            continue
        bad += coercion_violations(d, c) + coercion_violations(d, e)
        bad += compose_violations(d, c, e)
        checked += 1
    return checked, bad
