import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from castkit import gtlc as g
from castkit import registry
from castkit.cc import App, Cast, Cons, Lam, Proj, Var, render
from castkit.compile import compile_term
from castkit.discipline import Mode
from castkit.errors import ContractViolation, GradualTypeError, ParseError
from castkit.gradual import DYN, NAT, Fun, Pair, type_precision
from castkit.harness import GenConfig, annotations, gen_typed_program, loosen
from castkit.sc import size_ok
from castkit.syntax import parse_program, parse_type, print_program

eda = registry.get("eda")

programs = st.builds(lambda s, b: gen_typed_program(GenConfig(seed=s, max_depth=5,
                                                              dyn_bias=b)),
                     st.integers(0, 10**6), st.sampled_from([0.0, 0.3, 1.0]))


# typing

def test_typing_examples():
    assert g.typecheck_gtlc((), parse_program("(cons 2 3)")) == Pair(NAT, NAT)
    # λ[?] Z has type ? -> ?, so the application rule gives ?
    assert g.typecheck_gtlc((), parse_program("((lam (x : Dyn) x) 4)@1")) == DYN
    case = "(case (inr Bool true) ((x : Bool) x) ((y : Dyn) (not y)@3))@2"
    assert g.typecheck_gtlc((), parse_program(case)) == g.BOOL
    # the body is Var 0 at Dyn; applying Nat-typed inc afterwards gives Nat
    assert g.typecheck_gtlc((), parse_program("(inc ((lam (x : Dyn) x) 4)@1)@2")) == NAT
    with pytest.raises(GradualTypeError):
        g.typecheck_gtlc((), parse_program("(true 1)@1"))


def test_term_precision_examples():
    M = parse_program("((lam (x : Dyn) x) 42)@1")
    M2 = parse_program("((lam (x : Nat) x) 42)@2")
    assert g.gterm_precision(M, M2)
    assert not g.gterm_precision(M2, M)
    assert g.gterm_precision(M, M)
    assert not g.gterm_precision(g.nat(1), g.nat(2))


def test_delta():
    assert g.delta(g.prim("inc"), g.nat(1)) == g.nat(2)
    assert g.delta(g.prim("not"), g.boolean(True)) == g.boolean(False)


# syntax

def test_parse_errors():
    for bad in ["(lam (x : Nat) y)", "((lam (x : Nat) x) 1)", "(1 2", "(cons 1)@", "#"]:
        with pytest.raises(ParseError):
            parse_program(bad)


def test_parse_types_and_comments():
    assert parse_type("(-> Nat (* Dyn Bool))") == Fun(NAT, Pair(DYN, g.BOOL))
    assert parse_program("; a comment\n(inc 1)@3 ; another") == g.App(g.prim("inc"), g.nat(1), 3)


@settings(max_examples=100, deadline=None)
@given(programs)
def test_print_parse_round_trip(M):
    assert parse_program(print_program(M)) == M


# generator

def test_generator_examples():
    M = gen_typed_program(GenConfig(seed=1, max_depth=0, goal=NAT))
    assert isinstance(M, g.Const) and M.type == NAT
    all_dyn = gen_typed_program(GenConfig(seed=3, max_depth=5, dyn_bias=1.0))
    assert all(A == DYN for A in annotations(all_dyn))
    assert gen_typed_program(GenConfig(seed=9)) == gen_typed_program(GenConfig(seed=9))


@settings(max_examples=100, deadline=None)
@given(programs, st.integers(0, 1000))
def test_loosening_is_less_precise_and_well_typed(M, seed):
    import random
    N = loosen(M, random.Random(seed), 0.5)
    assert g.gterm_precision(N, M)
    assert type_precision(g.typecheck_gtlc((), N), g.typecheck_gtlc((), M))


# compilation

def test_compile_examples():
    assert compile_term(parse_program("(cons 2 3)"), eda).term == Cons(g.nat(2), g.nat(3))
    out = compile_term(parse_program("((lam (x : Dyn) x) 4)@1"), eda).term
    assert out == App(Cast(Lam(DYN, Var(0)), eda.make_cast(Fun(DYN, DYN), Fun(DYN, DYN), 1)),
                      Cast(g.nat(4), eda.make_cast(NAT, DYN, 1)))
    proj = compile_term(parse_program("(lam (p : Dyn) (fst p)@2)"), eda).term
    assert proj == Lam(DYN, Proj(1, Cast(Var(0), eda.make_cast(DYN, Pair(DYN, DYN), 2))))


def test_compile_rejects_ill_typed_input():
    with pytest.raises(ContractViolation):
        compile_term(g.App(g.boolean(True), g.nat(1), 1), eda)


@settings(max_examples=60, deadline=None)
@given(programs, st.sampled_from(list(registry.CALCULI)), st.sampled_from(list(Mode)))
def test_compilation_preserves_types_and_size(M, flag, mode):
    from castkit.cc import typecheck_cc
    d = registry.get(flag)
    out = compile_term(M, d, mode)
    assert out.type == g.typecheck_gtlc((), M)
    assert typecheck_cc((), out.term, d, mode) == out.type
    n = size_ok(out.term)
    assert n is not None and n <= 1
