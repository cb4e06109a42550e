"""Coercion-based disciplines: EDC, LDC and λC."""

from __future__ import annotations

from dataclasses import dataclass

from ..cc import Blame, Cast, eta
from ..discipline import Discipline
from ..errors import ContractViolation
from ..gradual import (DYN, BaseC, Fun, FunC, Pair, PairC, Sum, SumC, Type,
                       UnkL, UnkR, Unknown, complement, components,
                       consistent, gnd, head, is_atomic, is_ground,
                       shallow_consistent)


@dataclass(frozen=True, slots=True)
class CId:
    type: Type

    def __post_init__(self):
        if not is_atomic(self.type):
            raise ContractViolation(f"identity coercion at non-atomic type {self.type}")

    @property
    def src(self):
        return self.type

    @property
    def tgt(self):
        return self.type

    def __str__(self):
        return "id"


@dataclass(frozen=True, slots=True)
class CInj:
    type: Type

    def __post_init__(self):
        if isinstance(self.type, Unknown):
            raise ContractViolation("injection from Dyn")

    @property
    def src(self):
        return self.type

    @property
    def tgt(self):
        return DYN

    def __str__(self):
        return f"{self.type}!"


@dataclass(frozen=True, slots=True)
class CProj:
    type: Type
    label: int

    def __post_init__(self):
        if isinstance(self.type, Unknown):
            raise ContractViolation("projection to Dyn")

    @property
    def src(self):
        return DYN

    @property
    def tgt(self):
        return self.type

    def __str__(self):
        return f"{self.type}?{self.label}"


@dataclass(frozen=True, slots=True)
class CFun:
    # c coerces the domains contravariantly
    c: object
    d: object

    def __hash__(self):
        return hash(("CFun", self.c, self.d))

    @property
    def src(self):
        return Fun(self.c.tgt, self.d.src)

    @property
    def tgt(self):
        return Fun(self.c.src, self.d.tgt)

    def __str__(self):
        return f"({self.c} -> {self.d})"


@dataclass(frozen=True, slots=True)
class CPair:
    c: object
    d: object

    def __hash__(self):
        return hash(("CPair", self.c, self.d))

    @property
    def src(self):
        return Pair(self.c.src, self.d.src)

    @property
    def tgt(self):
        return Pair(self.c.tgt, self.d.tgt)

    def __str__(self):
        return f"({self.c} * {self.d})"


@dataclass(frozen=True, slots=True)
class CSum:
    c: object
    d: object

    def __hash__(self):
        return hash(("CSum", self.c, self.d))

    @property
    def src(self):
        return Sum(self.c.src, self.d.src)

    @property
    def tgt(self):
        return Sum(self.c.tgt, self.d.tgt)

    def __str__(self):
        return f"({self.c} + {self.d})"


@dataclass(frozen=True, slots=True)
class CFail:
    label: int
    src: Type
    tgt: Type

    def __str__(self):
        return f"fail{self.label}"


@dataclass(frozen=True, slots=True)
class CSeq:
    c: object
    d: object

    def __post_init__(self):
        if self.c.tgt != self.d.src:
            raise ContractViolation(f"sequence {self.c} ; {self.d} does not chain")

    @property
    def src(self):
        return self.c.src

    @property
    def tgt(self):
        return self.d.tgt

    def __str__(self):
        return f"({self.c} ; {self.d})"


CROSS = (CFun, CPair, CSum)
FIELDS = {"dom": "c", "cod": "d", "fst": "c", "snd": "d", "inl": "c", "inr": "d"}


def cross_of(h: str):
    return {"fun": CFun, "pair": CPair, "sum": CSum}[h]


class CoercionDiscipline(Discipline):
    complement_domain = True

    def is_cross(self, c):
        return isinstance(c, CROSS)

    def component(self, c, field):
        return getattr(c, FIELDS[field])

    def _same(self, a, b):
        # Domain labels are complemented, so a projection carrying -l
        # originates from the same source location as l.
        return abs(a) == abs(b) if self.complement_domain else a == b

    def cast_blame_safe(self, c, label):
        match c:
            case CId() | CInj():
                return True
            case CProj(_, lab) | CFail(lab, _, _):
                return not self._same(lab, label)
            case CFun(a, b) | CPair(a, b) | CSum(a, b) | CSeq(a, b):
                return self.cast_blame_safe(a, label) and self.cast_blame_safe(b, label)
        raise ContractViolation(f"not a coercion: {c!r}")

    def cast_labels(self, c):
        match c:
            case CProj(_, lab) | CFail(lab, _, _):
                return {lab}
            case CFun(a, b) | CPair(a, b) | CSum(a, b) | CSeq(a, b):
                return self.cast_labels(a) | self.cast_labels(b)
        return set()


def coerce_edc(p, label: int):
    match p:
        case UnkL(B):
            return CId(DYN) if isinstance(B, Unknown) else CProj(B, label)
        case UnkR(A):
            return CId(DYN) if isinstance(A, Unknown) else CInj(A)
        case BaseC(b):
            return CId(b)
        case FunC(d1, d2):
            return CFun(coerce_edc(d1, complement(label)), coerce_edc(d2, label))
        case PairC(d1, d2):
            return CPair(coerce_edc(d1, label), coerce_edc(d2, label))
        case SumC(d1, d2):
            return CSum(coerce_edc(d1, label), coerce_edc(d2, label))
    raise ContractViolation(f"not a consistency proof: {p!r}")


class EDC(CoercionDiscipline):
    name = "EDC"
    flag = "edc"

    def make_cast(self, A, B, label):
        p = consistent(A, B)
        if p is None:
            raise ContractViolation(f"cast between inconsistent types {A} and {B}")
        return coerce_edc(p, label)

    def is_inert(self, c):
        return isinstance(c, CInj)

    def apply_cast(self, V, c, mode):
        match c:
            case CId():
                return V
            case CProj(B, label):
                p = consistent(V.cast.src, B)
                if p is None:
                    return Blame(label, B)
                return Cast(V.expr, coerce_edc(p, label))
            case CFun() | CPair() | CSum():
                return eta(V, c, self, mode)
        raise ContractViolation(f"{c} is not active in {self.name}")


def coerce_ldc(A: Type, B: Type, label: int):
    if not shallow_consistent(A, B):
        return CFail(label, A, B)
    if isinstance(B, Unknown):
        return CId(DYN) if isinstance(A, Unknown) else CInj(A)
    if isinstance(A, Unknown):
        return CProj(B, label)
    if is_atomic(A):
        return CId(A)
    (a1, a2), (b1, b2) = components(A), components(B)
    if isinstance(A, Fun):
        return CFun(coerce_ldc(b1, a1, complement(label)), coerce_ldc(a2, b2, label))
    return cross_of(head(A))(coerce_ldc(a1, b1, label), coerce_ldc(a2, b2, label))


class LDC(CoercionDiscipline):
    name = "LDC"
    flag = "ldc"

    def make_cast(self, A, B, label):
        return coerce_ldc(A, B, label)

    def is_inert(self, c):
        return isinstance(c, CInj)

    def apply_cast(self, V, c, mode):
        match c:
            case CId():
                return V
            case CProj(B, label):
                return Cast(V.expr, coerce_ldc(V.cast.src, B, label))
            case CFail(label, _, B):
                return Blame(label, B)
            case CFun() | CPair() | CSum():
                return eta(V, c, self, mode)
        raise ContractViolation(f"{c} is not active in {self.name}")


def coerce_lc(A: Type, B: Type, label: int):
    if consistent(A, B) is None:
        raise ContractViolation(f"cast between inconsistent types {A} and {B}")
    if A == B and is_atomic(A):
        return CId(A)
    if isinstance(B, Unknown):
        if is_ground(A):
            return CInj(A)
        G = gnd(A)
        return CSeq(coerce_lc(A, G, label), CInj(G))
    if isinstance(A, Unknown):
        if is_ground(B):
            return CProj(B, label)
        H = gnd(B)
        return CSeq(CProj(H, label), coerce_lc(H, B, label))
    (a1, a2), (b1, b2) = components(A), components(B)
    if isinstance(A, Fun):
        return CFun(coerce_lc(b1, a1, label), coerce_lc(a2, b2, label))
    return cross_of(head(A))(coerce_lc(a1, b1, label), coerce_lc(a2, b2, label))


class LambdaC(CoercionDiscipline):
    name = "λC"
    flag = "lambda-c"
    complement_domain = False

    def make_cast(self, A, B, label):
        return coerce_lc(A, B, label)

    def is_inert(self, c):
        return isinstance(c, (CInj, CFun))

    def apply_cast(self, V, c, mode):
        match c:
            case CId():
                return V
            case CProj(H, label):
                G = V.cast.type
                return V.expr if G == H else Blame(label, H)
            case CSeq(c1, c2):
                return Cast(Cast(V, c1), c2)
            case CPair() | CSum():
                return eta(V, c, self, mode)
        raise ContractViolation(f"{c} is not active in {self.name}")
