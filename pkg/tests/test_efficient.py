import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from castkit import registry
from castkit.cc import Blame, Cast, Cons
from castkit.discipline import Mode
from castkit.efficient import hyper as H
from castkit.efficient import lambda_s as S
from castkit.gradual import BOOL, DYN, INT, NAT, Fun, Pair
from castkit.gtlc import integer, nat
from castkit.harness import coercion_violations, random_coercion_chain

ls = registry.get("lambda-s")
hy = registry.get("hyper")


# λS

def test_coerce_s_examples():
    assert S.coerce_s(DYN, DYN, 1) == S.ID_DYN
    assert S.coerce_s(NAT, DYN, 1) == S.SMid(S.SInj(S.SIdBase(NAT), NAT))
    assert S.coerce_s(DYN, NAT, 1) == S.SProj(NAT, 1, S.SGrd(S.SIdBase(NAT)))


def test_coerce_s_factors_function_injections_through_ground():
    c = S.coerce_s(Fun(NAT, BOOL), DYN, 1)
    assert c == S.SMid(S.SInj(S.SFun(S.coerce_s(DYN, NAT, 1), S.coerce_s(BOOL, DYN, 1)),
                              Fun(DYN, DYN)))


def test_compose_s_examples():
    p = S.coerce_s(DYN, NAT, 1)
    assert S.compose_s(S.ID_DYN, p) == p
    i = S.coerce_s(NAT, DYN, 1)
    assert S.compose_s(i, S.ID_DYN) == i
    # an Int injection meets a Bool projection
    assert S.compose_s(S.coerce_s(INT, DYN, 1), S.coerce_s(DYN, BOOL, 2)) == \
        S.SMid(S.SFail(2, INT, BOOL))
    # and an Int projection
    assert S.compose_s(S.coerce_s(INT, DYN, 1), S.coerce_s(DYN, INT, 2)) == \
        S.SMid(S.SGrd(S.SIdBase(INT)))


def test_apply_cast_s():
    c = S.coerce_s(Pair(NAT, NAT), Pair(DYN, NAT), 1)
    assert ls.apply_cast(Cons(nat(1), nat(2)), c, Mode.CC) == \
        Cons(Cast(nat(1), S.coerce_s(NAT, DYN, 1)), Cast(nat(2), S.coerce_s(NAT, NAT, 1)))
    assert ls.apply_cast(nat(1), S.SMid(S.SFail(3, NAT, BOOL)), Mode.CC) == Blame(3, BOOL)


def test_height_and_size_s():
    assert S.height_s(S.ID_DYN) == 0
    i = S.SGrd(S.SIdBase(NAT))
    assert S.size_s(S.SProj(NAT, 1, i)) == 2 + S.size_s(i)
    f = S.coerce_s(Fun(NAT, BOOL), Fun(DYN, DYN), 1)
    assert S.height_s(f) == 1


def test_lambda_s_blame_safety_is_unsupported():
    with pytest.raises(NotImplementedError):
        ls.cast_blame_safe(S.ID_DYN, 1)


# hypercoercions

def test_coerce_h_examples():
    assert H.coerce_h(DYN, INT, 1) == H.Triple(H.ProjP(INT, 1), H.IdM(INT), H.IdE())
    assert H.coerce_h(DYN, DYN, 1) == H.ID_DYN


def test_compose_h_mismatch_and_absorption():
    r = H.compose_h(H.coerce_h(INT, DYN, 1), H.coerce_h(DYN, BOOL, 2))
    assert r == H.Triple(H.IdP(), H.IdM(INT), H.FailE(2, BOOL))
    # a failure absorbs whatever comes after it
    after = H.compose_h(r, H.coerce_h(BOOL, DYN, 3))
    assert after == H.Triple(H.IdP(), H.IdM(INT), H.FailE(2, DYN))


def test_apply_cast_h_projection_composes():
    M = Cast(integer(1), H.coerce_h(INT, DYN, 1))
    assert hy.apply_cast(M, H.coerce_h(DYN, INT, 2), Mode.CC) == \
        Cast(integer(1), H.Triple(H.IdP(), H.IdM(INT), H.IdE()))


def test_height_h_and_decompose():
    t = H.coerce_h(Fun(DYN, NAT), Fun(NAT, DYN), 1)
    assert H.height_h(t) == 1 + max(H.height_h(t.m.c), H.height_h(t.m.d))
    p = H.coerce_h(Pair(NAT, DYN), Pair(DYN, DYN), 1)
    assert hy.decompose(p, "fst") == p.m.c


# properties shared by both

chains = st.tuples(st.sampled_from(["lambda-s", "hyper"]), st.integers(0, 10**6),
                   st.integers(2, 6))


@settings(max_examples=200, deadline=None)
@given(chains)
def test_composition_is_associative(args):
    flag, seed, n = args
    d = registry.get(flag)
    cs = random_coercion_chain(d, random.Random(seed), max(n, 3))
    a, b, c = cs[0], cs[1], cs[2]
    assert d.compose(d.compose(a, b), c) == d.compose(a, d.compose(b, c))


@settings(max_examples=200, deadline=None)
@given(chains)
def test_composition_respects_identity_and_lemmas(args):
    flag, seed, n = args
    d = registry.get(flag)
    cs = random_coercion_chain(d, random.Random(seed), n)
    acc = cs[0]
    for c in cs[1:]:
        acc = d.compose(acc, c)
    assert acc.src == cs[0].src and acc.tgt == cs[-1].tgt
    assert d.compose(acc, d.make_cast(acc.tgt, acc.tgt, 9)) == acc
    assert d.compose(d.make_cast(acc.src, acc.src, 9), acc) == acc
    assert coercion_violations(d, acc) == []
