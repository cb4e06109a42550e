"""Hypercoercions: a projection part, a middle, and an injection part."""

from __future__ import annotations

from dataclasses import dataclass

from ..cc import Blame, Cast, Cons, Inl, Inr
from ..discipline import Discipline
from ..errors import ContractViolation
from ..gradual import (DYN, Base, Fun, Pair, Sum, Type, Unknown, components,
                       consistent, gnd, head, is_ground)


@dataclass(frozen=True, slots=True)
class HIdDyn:
    src = DYN
    tgt = DYN

    def __str__(self):
        return "id"


@dataclass(frozen=True, slots=True)
class IdP:
    def __str__(self):
        return "id"


@dataclass(frozen=True, slots=True)
class ProjP:
    ground: Type
    label: int

    def __str__(self):
        return f"{self.ground}?{self.label}"


@dataclass(frozen=True, slots=True)
class IdM:
    base: Base

    @property
    def src(self):
        return self.base

    @property
    def tgt(self):
        return self.base

    def __str__(self):
        return "id"


@dataclass(frozen=True, slots=True)
class HFun:
    c: object  # contravariant
    d: object

    def __hash__(self):
        return hash(("HFun", self.c, self.d))

    @property
    def src(self):
        return Fun(self.c.tgt, self.d.src)

    @property
    def tgt(self):
        return Fun(self.c.src, self.d.tgt)

    def __str__(self):
        return f"({self.c} -> {self.d})"


@dataclass(frozen=True, slots=True)
class HPair:
    c: object
    d: object

    def __hash__(self):
        return hash(("HPair", self.c, self.d))

    @property
    def src(self):
        return Pair(self.c.src, self.d.src)

    @property
    def tgt(self):
        return Pair(self.c.tgt, self.d.tgt)

    def __str__(self):
        return f"({self.c} * {self.d})"


@dataclass(frozen=True, slots=True)
class HSum:
    c: object
    d: object

    def __hash__(self):
        return hash(("HSum", self.c, self.d))

    @property
    def src(self):
        return Sum(self.c.src, self.d.src)

    @property
    def tgt(self):
        return Sum(self.c.tgt, self.d.tgt)

    def __str__(self):
        return f"({self.c} + {self.d})"


@dataclass(frozen=True, slots=True)
class IdE:
    def __str__(self):
        return "id"


@dataclass(frozen=True, slots=True)
class InjE:
    ground: Type

    def __str__(self):
        return f"{self.ground}!"


@dataclass(frozen=True, slots=True)
class FailE:
    label: int
    tgt: Type

    def __str__(self):
        return f"fail{self.label}"


@dataclass(frozen=True, slots=True)
class Triple:
    p: object
    m: object
    i: object

    def __post_init__(self):
        if isinstance(self.p, ProjP) and self.p.ground != self.m.src:
            raise ContractViolation(f"projection {self.p} does not meet {self.m.src}")
        if isinstance(self.i, InjE) and self.i.ground != self.m.tgt:
            raise ContractViolation(f"injection {self.i} does not meet {self.m.tgt}")

    @property
    def src(self):
        return DYN if isinstance(self.p, ProjP) else self.m.src

    @property
    def tgt(self):
        match self.i:
            case IdE():
                return self.m.tgt
            case InjE():
                return DYN
        return self.i.tgt

    def __str__(self):
        return f"({self.p} ; {self.m} ; {self.i})"


ID_DYN = HIdDyn()
MID_CROSS = {"fun": HFun, "pair": HPair, "sum": HSum}
FIELDS = {"dom": "c", "cod": "d", "fst": "c", "snd": "d", "inl": "c", "inr": "d"}


def coerce_h(A: Type, B: Type, label: int):
    if consistent(A, B) is None:
        raise ContractViolation(f"cast between inconsistent types {A} and {B}")
    if isinstance(A, Unknown) and isinstance(B, Unknown):
        return ID_DYN
    if isinstance(B, Unknown):
        G = gnd(A)
        return Triple(IdP(), coerce_mid(A, G, label), InjE(G))
    if isinstance(A, Unknown):
        H = gnd(B)
        return Triple(ProjP(H, label), coerce_mid(H, B, label), IdE())
    return Triple(IdP(), coerce_mid(A, B, label), IdE())


def coerce_mid(A: Type, B: Type, label: int):
    if isinstance(A, Base):
        return IdM(A)
    (a1, a2), (b1, b2) = components(A), components(B)
    if isinstance(A, Fun):
        return HFun(coerce_h(b1, a1, label), coerce_h(a2, b2, label))
    return MID_CROSS[head(A)](coerce_h(a1, b1, label), coerce_h(a2, b2, label))


def compose_h(c, d):
    if c.tgt != d.src:
        raise ContractViolation(f"cannot compose {c} : {c.src} => {c.tgt} with {d} : {d.src} => {d.tgt}")
    return _compose(c, d)


def _compose(c, d):
    if isinstance(d, HIdDyn):
        return c
    if isinstance(c, HIdDyn):
        return d
    p1, m1, i1 = c.p, c.m, c.i
    match i1, d.p:
        case IdE(), IdP():
            return Triple(p1, _compose_mid(m1, d.m), d.i)
        case InjE(G), ProjP(H, label):
            if G == H:
                return Triple(p1, _compose_mid(m1, d.m), d.i)
            return Triple(p1, m1, FailE(label, d.tgt))
        case FailE(label, _), _:
            return Triple(p1, m1, FailE(label, d.tgt))
    raise ContractViolation(f"cannot compose {c!r} with {d!r}")


def _compose_mid(m1, m2):
    match m1, m2:
        case IdM(), IdM():
            return m1
        case HFun(c1, d1), HFun(c2, d2):
            return HFun(_compose(c2, c1), _compose(d1, d2))
        case HPair(c1, d1), HPair(c2, d2):
            return HPair(_compose(c1, c2), _compose(d1, d2))
        case HSum(c1, d1), HSum(c2, d2):
            return HSum(_compose(c1, c2), _compose(d1, d2))
    raise ContractViolation(f"cannot compose middles {m1!r} and {m2!r}")


def height_h(c) -> int:
    match c:
        case HIdDyn() | IdM():
            return 0
        case Triple(_, m, _):
            return height_h(m)
        case HFun(a, b) | HPair(a, b) | HSum(a, b):
            return 1 + max(height_h(a), height_h(b))
    raise ContractViolation(f"not a hypercoercion: {c!r}")


def size_h(c) -> int:
    match c:
        case HIdDyn() | IdP() | IdM() | IdE() | FailE():
            return 0
        case ProjP() | InjE():
            return 1
        case Triple(p, m, i):
            return 2 + size_h(p) + size_h(m) + size_h(i)
        case HFun(a, b) | HPair(a, b) | HSum(a, b):
            return 1 + size_h(a) + size_h(b)
    raise ContractViolation(f"not a hypercoercion: {c!r}")


class Hyper(Discipline):
    name = "hyper"
    flag = "hyper"
    composable = True

    def make_cast(self, A, B, label):
        return coerce_h(A, B, label)

    def is_inert(self, c):
        if not isinstance(c, Triple) or not isinstance(c.p, IdP):
            return False
        return isinstance(c.i, InjE) or (isinstance(c.i, IdE) and isinstance(c.m, HFun))

    def is_cross(self, c):
        return (isinstance(c, Triple) and isinstance(c.p, IdP) and isinstance(c.i, IdE)
                and isinstance(c.m, (HFun, HPair, HSum)))

    def component(self, c, field):
        return getattr(c.m, FIELDS[field])

    def apply_cast(self, V, c, mode=None):
        if isinstance(c, HIdDyn):
            return V
        if isinstance(c.p, ProjP):
            if isinstance(V, Cast):
                return Cast(V.expr, compose_h(V.cast, c))
        elif isinstance(c.i, FailE):
            return Blame(c.i.label, c.tgt)
        elif isinstance(c.i, IdE):
            match c.m, V:
                case IdM(), _:
                    return V
                case HPair(c1, d1), Cons(V1, V2):
                    return Cons(Cast(V1, c1), Cast(V2, d1))
                case HSum(c1, d1), Inl(_, W):
                    return Inl(d1.tgt, Cast(W, c1))
                case HSum(c1, d1), Inr(_, W):
                    return Inr(c1.tgt, Cast(W, d1))
        raise ContractViolation(f"cannot apply {c} to this value")

    def cast_blame_safe(self, c, label):
        raise NotImplementedError("blame safety is not defined for hypercoercions")

    def cast_labels(self, c):
        match c:
            case Triple(p, m, i):
                out = self.cast_labels(m)
                if isinstance(p, ProjP):
                    out.add(p.label)
                if isinstance(i, FailE):
                    out.add(i.label)
                return out
            case HFun(a, b) | HPair(a, b) | HSum(a, b):
                return self.cast_labels(a) | self.cast_labels(b)
        return set()

    def compose(self, c, d):
        return compose_h(c, d)

    def height(self, c):
        return height_h(c)

    def size(self, c):
        return size_h(c)
