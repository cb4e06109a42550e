"""Acceptance campaigns, one test (or group) per criterion.

Each campaign records a PASS/FAIL line that the terminal summary prints.
"""

import random
import subprocess
import sys
import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from castkit import gtlc as g
from castkit import registry
from castkit.cc import App, Cast, Lam, render
from castkit.cli import main
from castkit.compile import compile_term
from castkit.discipline import Mode
from castkit.errors import GradualTypeError
from castkit.gradual import (BOOL, DYN, INT, NAT, Base, all_types, consistent,
                             is_consistent, join, type_precision)
from castkit.gtlc import Var, integer, typecheck_gtlc
from castkit.harness import (CoercionUniverse, GenConfig, Vocab, agree,
                             census_total, census_violations, check_blame_safety,
                             check_simulation, coercion_census, coercion_violations,
                             compile_for, composable_pairs, compose_violations,
                             enumerate_coercions, enumerate_gtlc, execute,
                             gen_typed_program, loosen, loosenings, measure_growth,
                             measure_space, precision_pairs, relabel,
                             sampled_compose_check, stress_program)
from castkit.sc import eval_sc, size_ok

GOLDEN = Path(__file__).parent / "golden"


# 1. type safety

def test_c1_type_safety(verdicts):
    n = 1000
    with verdicts.criterion(1, f"{n} programs x {len(registry.CALCULI)} calculi"):
        start = time.time()
        kinds = {}
        for s in range(n):
            cfg = GenConfig(seed=s, max_depth=6, dyn_bias=(0.0, 0.5, 1.0)[s % 3])
            M = gen_typed_program(cfg)
            assert g.gterm_depth(M) <= 6
            for flag in registry.CALCULI:
                # check=True re-typechecks every step; a stuck term raises
                out = execute(M, flag, fuel=2_000, check=True)
                kinds[out.kind] = kinds.get(out.kind, 0) + 1
        elapsed = time.time() - start
        assert kinds.get("blame", 0) > 0 and kinds.get("value", 0) > 0
        assert elapsed <= 180, f"took {elapsed:.0f}s"
    verdicts.note(1, "PASS", f"{n} programs x {len(registry.CALCULI)} calculi, "
                             f"outcomes {kinds}, {elapsed:.0f}s")


def test_c1_type_safety_primed(verdicts):
    """The same check in the primed variant, on a smaller sample."""
    for s in range(200):
        M = gen_typed_program(GenConfig(seed=5000 + s, max_depth=6,
                                        dyn_bias=(0.0, 0.5, 1.0)[s % 3]))
        for flag in registry.PLAIN:
            execute(M, flag, "cc-prime", fuel=2_000, check=True)


# 2. blame safety

def test_c2_blame_subtyping(verdicts):
    n = 500
    with verdicts.criterion(2, f"{n} programs x {len(registry.PLAIN)} primed calculi"):
        violations, blamed = [], 0
        for s in range(n):
            M = gen_typed_program(GenConfig(seed=20_000 + s, max_depth=5, dyn_bias=0.5))
            for flag in registry.PLAIN:
                r = check_blame_safety(M, flag, fuel=10_000)
                blamed += r.outcome.startswith("blame")
                violations += [f"seed {20_000 + s} {flag}: {v}" for v in r.violations]
        assert not violations, violations[:5]
        assert blamed > 0


# 3. dynamic gradual guarantee

DGG_VOCAB = Vocab(consts=(g.nat(1), g.boolean(True), g.prim("inc")),
                  annots=(NAT, BOOL), forms=frozenset({"lam", "app"}))


def fuzzed_pairs(count):
    for s in range(count):
        M2 = gen_typed_program(GenConfig(seed=10_000 + s, max_depth=5,
                                         dyn_bias=0.3 if s % 2 else 0.0))
        yield loosen(M2, random.Random(s), 0.5), M2


@pytest.mark.parametrize("flag", ["lambda-b1", "lambda-b2"])
def test_c3_dynamic_gradual_guarantee(verdicts, flag):
    with verdicts.criterion(f"3 ({flag})", "depth-4 precision pairs + 200 fuzzed pairs"):
        pairs = list(precision_pairs(4, DGG_VOCAB))
        assert len(pairs) > 1000
        bad = []
        for M, M2 in pairs + list(fuzzed_pairs(200)):
            assert g.gterm_precision(M, M2)
            r = check_simulation(M, M2, fuel=10_000, flag=flag)
            if not r.ok:
                bad.append((M, M2, r))
        assert not bad, bad[:3]
    verdicts.note(f"3 ({flag})", "PASS", f"{len(pairs)} enumerated + 200 fuzzed pairs")


# 4. space bounds

@pytest.mark.parametrize("flag", ["lambda-s", "hyper"])
def test_c4_space_bound(verdicts, flag):
    with verdicts.criterion(f"4 ({flag})", "stress depths 10/50/200"):
        start = time.time()
        ratios = []
        for n in (10, 50, 200):
            r = measure_space(stress_program(n), flag, fuel=100_000, strict=False)
            assert r.outcome == "value false", r.outcome
            assert not r.violations, r.violations[:3]
            ratios.append(r.max_real_size / r.max_ideal_size)
        # real size per unit of ideal size levels off as the loop deepens
        assert ratios[2] <= 1.05 * ratios[1], ratios
        assert max(ratios) <= r.bound_factor
        assert time.time() - start <= 60


def test_c4_contrast_without_composition():
    """Without composition the same programs pile up casts."""
    def peak(n):
        reports = measure_growth(stress_program(n), "edi", fuel=100_000)
        return (max(r.real_size / r.ideal_size for r in reports),
                max(r.adjacency for r in reports))
    (r10, a10), (r50, a50) = peak(10), peak(50)
    assert r50 > 2 * r10
    assert a50 > a10 and a50 > 3


# 5. coercion lemmas

UNIT_UNIVERSE = CoercionUniverse()


@pytest.mark.parametrize("flag", ["lambda-s", "hyper"])
def test_c5_census_height_3(verdicts, flag):
    """Size-height over every coercion class of height <= 3, type depth <= 3."""
    with verdicts.criterion(f"5a ({flag})", "census size-height at height<=3"):
        census = coercion_census(flag, 3, CoercionUniverse(max_type_depth=3))
        assert census_total(census) > 10**12
        assert census_violations(flag, census) == []


@pytest.mark.parametrize("flag", ["lambda-s", "hyper"])
def test_c5_census_matches_enumeration(flag):
    """The census agrees with explicit enumeration where both are feasible."""
    census = coercion_census(flag, 1, UNIT_UNIVERSE)
    cs = list(enumerate_coercions(flag, 1, UNIT_UNIVERSE))
    d = registry.get(flag)
    for h in (0, 1):
        mine = [c for c in cs if d.height(c) == h]
        assert len(mine) == sum(x.count for x in census[h]["top"].values())
        assert max(d.size(c) for c in mine) == max(x.max_size for x in census[h]["top"].values())


@pytest.mark.parametrize("flag", ["lambda-s", "hyper"])
def test_c5_exhaustive_height_1(verdicts, flag):
    with verdicts.criterion(f"5b ({flag})", "exhaustive unary + compose at height<=1"):
        start = time.time()
        cs = list(enumerate_coercions(flag, 1, UNIT_UNIVERSE))
        bad = [v for c in cs for v in coercion_violations(flag, c)]
        pairs = 0
        for c, e in composable_pairs(cs):
            bad += compose_violations(flag, c, e)
            pairs += 1
        assert not bad, bad[:5]
        assert pairs > 60_000
        assert time.time() - start <= 120
    verdicts.note(f"5b ({flag})", "PASS", f"{len(cs)} coercions, {pairs} composable pairs")


@pytest.mark.parametrize("flag", ["lambda-s", "hyper"])
def test_c5_sampled_height_3(verdicts, flag):
    with verdicts.criterion(f"5c ({flag})", "5000 sampled pairs up to height 3"):
        checked, bad = sampled_compose_check(flag, seed=7, samples=5000, max_height=3)
        assert checked == 5000
        assert not bad, bad[:5]


ENUMERATION_BUDGET = 10**9


@pytest.mark.xfail(strict=True, reason="literal enumeration at height 3 is out of reach")
@pytest.mark.parametrize("flag", ["lambda-s", "hyper"])
def test_c5_literal_enumeration_at_height_3_is_feasible(verdicts, flag):
    total = census_total(coercion_census(flag, 3, CoercionUniverse(max_type_depth=3)))
    verdicts.note(f"5d ({flag})", "FAIL",
                  f"literal enumeration infeasible: {total:.2e} coercions at height<=3 "
                  "(covered by 5a-5c instead)")
    assert total <= ENUMERATION_BUDGET


# 6. oracles

def base_programs(depth, vocab):
    progs = set()
    for M2 in enumerate_gtlc(depth, vocab):
        progs.update(loosenings(relabel(M2)))
    return [M for M in progs if isinstance(typecheck_gtlc((), M), Base)]


ORACLE_VOCABS = [
    (3, Vocab(consts=(g.nat(1), g.boolean(True), g.prim("inc"), g.prim("not")),
              annots=(NAT, BOOL, DYN),
              forms=frozenset({"lam", "app", "if", "cons", "proj"}))),
    (4, Vocab(consts=(g.nat(1), g.boolean(True), g.prim("inc")),
              annots=(NAT, DYN), forms=frozenset({"lam", "app"}))),
]


@pytest.mark.parametrize("flag", ["lambda-s", "hyper"])
def test_c6_compose_vs_sequential(verdicts, flag):
    with verdicts.criterion(f"6a ({flag})", "composition vs one cast at a time"):
        d = registry.get(flag)
        kinds, bad = {}, []
        for depth, vocab in ORACLE_VOCABS:
            for M in base_programs(depth, vocab):
                term = compile_for(M, flag)
                a = eval_sc(term, d, 1_000)
                b = eval_sc(term, d, 1_000, compose=False)
                c = execute(M, "lambda-c", fuel=1_000)
                kinds[a.kind] = kinds.get(a.kind, 0) + 1
                if not (agree(a, b) and agree(a, c)):
                    bad.append((M, a.describe(), b.describe(), c.describe()))
        assert not bad, bad[:3]
        assert kinds.get("blame", 0) > 0
    verdicts.note(f"6a ({flag})", "PASS", f"outcomes {kinds}")


def test_c6_cast_insertion_size(verdicts):
    with verdicts.criterion("6b", "size predicate index <= 1 after compilation"):
        for s in range(1000):
            M = gen_typed_program(GenConfig(seed=30_000 + s, max_depth=6,
                                            dyn_bias=(0.0, 0.5, 1.0)[s % 3]))
            for flag in registry.CALCULI:
                n = size_ok(compile_for(M, flag))
                assert n is not None and n <= 1, (flag, M, n)


def test_c6_join_is_least(verdicts):
    with verdicts.criterion("6c", "join leastness: A, B of depth <= 1, bounds of depth <= 2"):
        small, types = list(all_types(1)), list(all_types(2))
        for A in small:
            for B in small:
                p = consistent(A, B)
                if p is None:
                    continue
                J = join(p)
                assert type_precision(A, J) and type_precision(B, J)
                for C in types:
                    if type_precision(A, C) and type_precision(B, C):
                        assert type_precision(J, C), (A, B, J, C)


def test_c6_static_gradual_guarantee(verdicts):
    with verdicts.criterion("6d", "static gradual guarantee over enumerated pairs"):
        count = 0
        for depth, vocab in ORACLE_VOCABS:
            for M, M2 in precision_pairs(depth, vocab):
                A2 = typecheck_gtlc((), M2)
                A = typecheck_gtlc((), M)
                assert type_precision(A, A2), (M, M2)
                count += 1
        assert count > 1000


# 7. golden traces

def golden_cases():
    rows = []
    for line in (GOLDEN / "MANIFEST").read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            name, calculus, variant = line.split()[:3]
            rows.append(pytest.param(name, calculus, variant, id=name))
    return rows


@pytest.mark.parametrize("name,calculus,variant", golden_cases())
def test_c7_golden_trace(verdicts, name, calculus, variant):
    with verdicts.criterion(f"7 ({name})", f"{calculus} {variant}"):
        expected = (GOLDEN / f"{name}.out").read_text()
        r = CliRunner().invoke(main, ["run", "--calculus", calculus, "--variant", variant,
                                      "--trace", str(GOLDEN / f"{name}.gtlc")])
        assert r.output == expected
        assert r.exit_code == (3 if expected.rstrip().splitlines()[-1].startswith("blame")
                               else 0)


def test_c7_golden_count():
    assert len(golden_cases()) == 10


def test_c7_triple_cast_trace(verdicts):
    """An injection, a projection and an injection meet after one β step."""
    with verdicts.criterion("7 (triple cast)", "direct SC trace"):
        d = registry.get("lambda-s")
        inj, prj = d.make_cast(INT, DYN, 9), d.make_cast(DYN, INT, 7)
        M = Cast(App(Lam(DYN, Cast(Var(0), prj)), Cast(integer(1), inj)), inj)
        lines = []
        out = eval_sc(M, d, 100, on_step=lambda s: lines.append(f"{s.index} {s.rule} "
                                                                  f"{render(s.term)}"))
        assert lines == [
            "1 β (cast (cast (cast +1 (id ; Int!)) (Int?7 ; id)) (id ; Int!))",
            "2 compose (cast (cast +1 (id ; Int!)) (Int?7 ; (id ; Int!)))",
            "3 compose (cast +1 (id ; Int!))",
        ]
        assert out.describe() == "value +1"


def test_c7_cli_subprocess():
    """The installed entry point prints the same trace as the in-process runner."""
    path = GOLDEN / "g01-identity.gtlc"
    r = subprocess.run([sys.executable, "-m", "castkit.cli", "run", "--calculus", "eda",
                        "--trace", str(path)], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout == (GOLDEN / "g01-identity.out").read_text()
