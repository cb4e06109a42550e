"""Gradual types, consistency, join, matching and precision."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Union

from .errors import ContractViolation

BASE_NAMES = ("Nat", "Int", "Bool", "Unit", "Bot")


@dataclass(frozen=True, slots=True)
class Unknown:
    def __str__(self):
        return "Dyn"


@dataclass(frozen=True, slots=True)
class Base:
    name: str

    def __post_init__(self):
        if self.name not in BASE_NAMES:
            raise ContractViolation(f"unknown base type {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Fun:
    dom: "Type"
    cod: "Type"

    def __hash__(self):
        return hash(("Fun", self.dom, self.cod))

    def __str__(self):
        return f"(-> {self.dom} {self.cod})"


@dataclass(frozen=True, slots=True)
class Pair:
    fst: "Type"
    snd: "Type"

    def __hash__(self):
        return hash(("Pair", self.fst, self.snd))

    def __str__(self):
        return f"(* {self.fst} {self.snd})"


@dataclass(frozen=True, slots=True)
class Sum:
    left: "Type"
    right: "Type"

    def __hash__(self):
        return hash(("Sum", self.left, self.right))

    def __str__(self):
        return f"(+ {self.left} {self.right})"


Type = Union[Unknown, Base, Fun, Pair, Sum]

DYN = Unknown()
NAT = Base("Nat")
INT = Base("Int")
BOOL = Base("Bool")
UNIT = Base("Unit")
BOT = Base("Bot")

HEADS = {"fun": Fun, "pair": Pair, "sum": Sum}


def complement(label: int) -> int:
    if label == 0:
        raise ContractViolation("blame labels are nonzero")
    return -label


def is_atomic(A: Type) -> bool:
    return isinstance(A, (Unknown, Base))


def head(A: Type) -> Optional[str]:
    """Name of the type constructor of A, or None for atomic types."""
    if isinstance(A, Fun):
        return "fun"
    if isinstance(A, Pair):
        return "pair"
    if isinstance(A, Sum):
        return "sum"
    return None


def components(A: Type) -> tuple:
    match A:
        case Fun(a, b) | Pair(a, b) | Sum(a, b):
            return (a, b)
    return ()


def rebuild(h: str, a: Type, b: Type) -> Type:
    return HEADS[h](a, b)


def is_ground(A: Type) -> bool:
    if isinstance(A, Base):
        return True
    return head(A) is not None and components(A) == (DYN, DYN)


def gnd(A: Type) -> Type:
    if isinstance(A, Unknown):
        raise ContractViolation("gnd is undefined on Dyn")
    if isinstance(A, Base):
        return A
    return rebuild(head(A), DYN, DYN)


def type_depth(A: Type) -> int:
    if is_atomic(A):
        return 0
    a, b = components(A)
    return 1 + max(type_depth(a), type_depth(b))


# consistency proofs


@dataclass(frozen=True, slots=True)
class UnkR:
    """A ~ Dyn."""
    type: Type


@dataclass(frozen=True, slots=True)
class UnkL:
    """Dyn ~ B."""
    type: Type


@dataclass(frozen=True, slots=True)
class BaseC:
    base: Base


@dataclass(frozen=True, slots=True)
class FunC:
    # d1 relates the domains flipped: A' ~ A for A -> B ~ A' -> B'
    d1: "Consistency"
    d2: "Consistency"


@dataclass(frozen=True, slots=True)
class PairC:
    d1: "Consistency"
    d2: "Consistency"


@dataclass(frozen=True, slots=True)
class SumC:
    d1: "Consistency"
    d2: "Consistency"


Consistency = Union[UnkR, UnkL, BaseC, FunC, PairC, SumC]


def consistent(A: Type, B: Type) -> Optional[Consistency]:
    if isinstance(B, Unknown):
        return UnkR(A)
    if isinstance(A, Unknown):
        return UnkL(B)
    match A, B:
        case Base(x), Base(y):
            return BaseC(A) if x == y else None
        case Fun(a1, b1), Fun(a2, b2):
            d1 = consistent(a2, a1)
            d2 = consistent(b1, b2)
            return FunC(d1, d2) if d1 and d2 else None
        case Pair(a1, b1), Pair(a2, b2):
            d1 = consistent(a1, a2)
            d2 = consistent(b1, b2)
            return PairC(d1, d2) if d1 and d2 else None
        case Sum(a1, b1), Sum(a2, b2):
            d1 = consistent(a1, a2)
            d2 = consistent(b1, b2)
            return SumC(d1, d2) if d1 and d2 else None
    return None


def is_consistent(A: Type, B: Type) -> bool:
    return consistent(A, B) is not None


def endpoints(p: Consistency) -> tuple:
    match p:
        case UnkR(A):
            return (A, DYN)
        case UnkL(B):
            return (DYN, B)
        case BaseC(b):
            return (b, b)
        case FunC(d1, d2):
            c, a = endpoints(d1)
            b, d = endpoints(d2)
            return (Fun(a, b), Fun(c, d))
        case PairC(d1, d2):
            a, c = endpoints(d1)
            b, d = endpoints(d2)
            return (Pair(a, b), Pair(c, d))
        case SumC(d1, d2):
            a, c = endpoints(d1)
            b, d = endpoints(d2)
            return (Sum(a, b), Sum(c, d))
    raise ContractViolation(f"not a consistency proof: {p!r}")


def join(p: Consistency) -> Type:
    match p:
        case UnkR(A):
            return A
        case UnkL(B):
            return B
        case BaseC(b):
            return b
        case FunC(d1, d2):
            return Fun(join(d1), join(d2))
        case PairC(d1, d2):
            return Pair(join(d1), join(d2))
        case SumC(d1, d2):
            return Sum(join(d1), join(d2))
    raise ContractViolation(f"not a consistency proof: {p!r}")


def match_head(A: Type, h: str) -> Optional[tuple]:
    if isinstance(A, Unknown):
        return (DYN, DYN)
    if head(A) == h:
        return components(A)
    return None


def type_precision(A: Type, B: Type) -> bool:
    """A is less precise than (or equal to) B."""
    if isinstance(A, Unknown):
        return True
    if isinstance(A, Base):
        return A == B
    if head(A) != head(B):
        return False
    (a1, a2), (b1, b2) = components(A), components(B)
    return type_precision(a1, b1) and type_precision(a2, b2)


def ctx_precision(G1, G2) -> bool:
    return len(G1) == len(G2) and all(map(type_precision, G1, G2))


def shallow_consistent(A: Type, B: Type) -> bool:
    if isinstance(A, Unknown) or isinstance(B, Unknown):
        return True
    if isinstance(A, Base) or isinstance(B, Base):
        return A == B
    return head(A) == head(B)


def subtype(A: Type, B: Type, flavor: str) -> bool:
    """D or UD subtyping used by the blame-safety predicates."""
    if flavor not in ("D", "UD"):
        raise ContractViolation(f"unknown subtyping flavor {flavor!r}")
    if isinstance(B, Unknown):
        if flavor == "D" or isinstance(A, Unknown):
            return True
        return subtype(A, gnd(A), flavor)
    if isinstance(A, Unknown):
        return False
    if isinstance(A, Base):
        return A == B
    if head(A) != head(B):
        return False
    (a1, a2), (b1, b2) = components(A), components(B)
    if isinstance(A, Fun):
        return subtype(b1, a1, flavor) and subtype(a2, b2, flavor)
    return subtype(a1, b1, flavor) and subtype(a2, b2, flavor)


def all_types(depth: int, bases=(NAT, BOOL)) -> Iterator[Type]:
    """Every type of constructor depth at most ``depth`` over the given bases."""
    yield from _types_upto(depth, tuple(bases))


def _types_upto(depth, bases):
    level = [DYN, *bases]
    seen = list(level)
    for _ in range(depth):
        new = list(level)
        for ctor in (Fun, Pair, Sum):
            for a, b in product(seen, repeat=2):
                new.append(ctor(a, b))
        seen = new
    return seen


def ground_types(bases=(NAT, BOOL)) -> list:
    return [*bases, Fun(DYN, DYN), Pair(DYN, DYN), Sum(DYN, DYN)]
