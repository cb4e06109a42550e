"""λS: three-level normal-form coercions closed under composition.

Top-level coercions are ``SIdDyn``, ``SProj`` and ``SMid``; intermediate
ones are ``SInj``, ``SGrd`` and ``SFail``; ground ones are ``SIdBase``,
``SFun``, ``SPair`` and ``SSum``.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..cc import Blame, Cast, Cons, Inl, Inr
from ..discipline import Discipline
from ..errors import ContractViolation
from ..gradual import (DYN, Base, Fun, Pair, Sum, Type, Unknown, components,
                       consistent, gnd, head, is_ground)


@dataclass(frozen=True, slots=True)
class SIdDyn:
    src = DYN
    tgt = DYN

    def __str__(self):
        return "id"


@dataclass(frozen=True, slots=True)
class SProj:
    ground: Type
    label: int
    rest: object  # intermediate, from ground

    def __post_init__(self):
        if not is_ground(self.ground) or self.rest.src != self.ground:
            raise ContractViolation(f"ill-formed projection {self}")

    @property
    def src(self):
        return DYN

    @property
    def tgt(self):
        return self.rest.tgt

    def __str__(self):
        return f"({self.ground}?{self.label} ; {self.rest})"


@dataclass(frozen=True, slots=True)
class SMid:
    rest: object  # intermediate

    @property
    def src(self):
        return self.rest.src

    @property
    def tgt(self):
        return self.rest.tgt

    def __str__(self):
        return str(self.rest)


@dataclass(frozen=True, slots=True)
class SInj:
    g: object
    ground: Type

    def __post_init__(self):
        if not is_ground(self.ground) or self.g.tgt != self.ground:
            raise ContractViolation(f"ill-formed injection {self}")

    @property
    def src(self):
        return self.g.src

    @property
    def tgt(self):
        return DYN

    def __str__(self):
        return f"({self.g} ; {self.ground}!)"


@dataclass(frozen=True, slots=True)
class SGrd:
    g: object

    @property
    def src(self):
        return self.g.src

    @property
    def tgt(self):
        return self.g.tgt

    def __str__(self):
        return str(self.g)


@dataclass(frozen=True, slots=True)
class SFail:
    label: int
    src: Type
    tgt: Type

    def __post_init__(self):
        if isinstance(self.src, Unknown):
            raise ContractViolation("failure coercion from Dyn")

    def __str__(self):
        return f"fail{self.label}"


@dataclass(frozen=True, slots=True)
class SIdBase:
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
class SFun:
    c: object  # contravariant
    d: object

    def __hash__(self):
        return hash(("SFun", self.c, self.d))

    @property
    def src(self):
        return Fun(self.c.tgt, self.d.src)

    @property
    def tgt(self):
        return Fun(self.c.src, self.d.tgt)

    def __str__(self):
        return f"({self.c} -> {self.d})"


@dataclass(frozen=True, slots=True)
class SPair:
    c: object
    d: object

    def __hash__(self):
        return hash(("SPair", self.c, self.d))

    @property
    def src(self):
        return Pair(self.c.src, self.d.src)

    @property
    def tgt(self):
        return Pair(self.c.tgt, self.d.tgt)

    def __str__(self):
        return f"({self.c} * {self.d})"


@dataclass(frozen=True, slots=True)
class SSum:
    c: object
    d: object

    def __hash__(self):
        return hash(("SSum", self.c, self.d))

    @property
    def src(self):
        return Sum(self.c.src, self.d.src)

    @property
    def tgt(self):
        return Sum(self.c.tgt, self.d.tgt)

    def __str__(self):
        return f"({self.c} + {self.d})"


ID_DYN = SIdDyn()
GROUND_CROSS = {"fun": SFun, "pair": SPair, "sum": SSum}
FIELDS = {"dom": "c", "cod": "d", "fst": "c", "snd": "d", "inl": "c", "inr": "d"}


def coerce_s(A: Type, B: Type, label: int):
    if consistent(A, B) is None:
        raise ContractViolation(f"cast between inconsistent types {A} and {B}")
    if isinstance(A, Unknown) and isinstance(B, Unknown):
        return ID_DYN
    if isinstance(B, Unknown):
        G = gnd(A)
        return SMid(SInj(coerce_ground(A, G, label), G))
    if isinstance(A, Unknown):
        H = gnd(B)
        return SProj(H, label, SGrd(coerce_ground(H, B, label)))
    return SMid(SGrd(coerce_ground(A, B, label)))


def coerce_ground(A: Type, B: Type, label: int):
    if isinstance(A, Base):
        return SIdBase(A)
    (a1, a2), (b1, b2) = components(A), components(B)
    if isinstance(A, Fun):
        return SFun(coerce_s(b1, a1, label), coerce_s(a2, b2, label))
    return GROUND_CROSS[head(A)](coerce_s(a1, b1, label), coerce_s(a2, b2, label))


def compose_s(c, d):
    if c.tgt != d.src:
        raise ContractViolation(f"cannot compose {c} : {c.src} => {c.tgt} with {d} : {d.src} => {d.tgt}")
    return _compose_top(c, d)


def _compose_top(c, d):
    match c:
        case SIdDyn():
            return d
        case SProj(G, label, i):
            return SProj(G, label, _compose_mid(i, d))
        case SMid(i):
            return SMid(_compose_mid(i, d))
    raise ContractViolation(f"not a top-level coercion: {c!r}")


def _compose_mid(i, d):
    """Intermediate coercion i followed by top-level coercion d."""
    match i, d:
        case SFail(label, A, _), _:
            return SFail(label, A, d.tgt)
        case SInj(), SIdDyn():
            return i
        case SInj(g, G), SProj(H, label, i2):
            if G == H:
                return _compose_mid(SGrd(g), SMid(i2))
            return SFail(label, i.src, d.tgt)
        case SGrd(g), SMid(SInj(h, H)):
            return SInj(_compose_ground(g, h), H)
        case SGrd(g), SMid(SGrd(h)):
            return SGrd(_compose_ground(g, h))
        case SGrd(g), SMid(SFail(label, _, B)):
            return SFail(label, g.src, B)
    raise ContractViolation(f"cannot compose {i!r} with {d!r}")


def _compose_ground(g, h):
    match g, h:
        case SIdBase(), SIdBase():
            return g
        case SFun(c1, d1), SFun(c2, d2):
            return SFun(_compose_top(c2, c1), _compose_top(d1, d2))
        case SPair(c1, d1), SPair(c2, d2):
            return SPair(_compose_top(c1, c2), _compose_top(d1, d2))
        case SSum(c1, d1), SSum(c2, d2):
            return SSum(_compose_top(c1, c2), _compose_top(d1, d2))
    raise ContractViolation(f"cannot compose ground coercions {g!r} and {h!r}")


def height_s(c) -> int:
    match c:
        case SIdDyn() | SIdBase() | SFail():
            return 0
        case SProj(_, _, i) | SMid(i):
            return height_s(i)
        case SInj(g, _) | SGrd(g):
            return height_s(g)
        case SFun(a, b) | SPair(a, b) | SSum(a, b):
            return 1 + max(height_s(a), height_s(b))
    raise ContractViolation(f"not a λS coercion: {c!r}")


def size_s(c) -> int:
    match c:
        case SIdDyn() | SIdBase() | SFail():
            return 0
        case SProj(_, _, i):
            return 2 + size_s(i)
        case SInj(g, _):
            return 2 + size_s(g)
        case SMid(i):
            return size_s(i)
        case SGrd(g):
            return size_s(g)
        case SFun(a, b) | SPair(a, b) | SSum(a, b):
            return 1 + size_s(a) + size_s(b)
    raise ContractViolation(f"not a λS coercion: {c!r}")


def level(c) -> str:
    """Which grammar level a λS coercion belongs to."""
    if isinstance(c, (SIdDyn, SProj, SMid)):
        return "top"
    if isinstance(c, (SInj, SGrd, SFail)):
        return "intermediate"
    return "ground"


class LambdaS(Discipline):
    name = "λS"
    flag = "lambda-s"
    composable = True

    def make_cast(self, A, B, label):
        return coerce_s(A, B, label)

    def is_inert(self, c):
        match c:
            case SMid(SInj()):
                return True
            case SMid(SGrd(SFun())):
                return True
        return False

    def is_cross(self, c):
        return isinstance(c, SMid) and isinstance(c.rest, SGrd) and \
            isinstance(c.rest.g, (SFun, SPair, SSum))

    def component(self, c, field):
        return getattr(c.rest.g, FIELDS[field])

    def apply_cast(self, V, c, mode=None):
        match c:
            case SIdDyn():
                return V
            case SProj():
                if isinstance(V, Cast):
                    return Cast(V.expr, compose_s(V.cast, c))
            case SMid(SFail(label, _, B)):
                return Blame(label, B)
            case SMid(SGrd(SIdBase())):
                return V
            case SMid(SGrd(SPair(c1, d1))):
                if isinstance(V, Cons):
                    return Cons(Cast(V.fst, c1), Cast(V.snd, d1))
            case SMid(SGrd(SSum(c1, d1))):
                if isinstance(V, Inl):
                    return Inl(d1.tgt, Cast(V.expr, c1))
                if isinstance(V, Inr):
                    return Inr(c1.tgt, Cast(V.expr, d1))
        raise ContractViolation(f"cannot apply {c} to this value")

    def cast_blame_safe(self, c, label):
        raise NotImplementedError("blame safety is not defined for λS")

    def cast_labels(self, c):
        match c:
            case SProj(_, lab, i):
                return {lab} | self.cast_labels(i)
            case SFail(lab, _, _):
                return {lab}
            case SMid(i):
                return self.cast_labels(i)
            case SInj(g, _) | SGrd(g):
                return self.cast_labels(g)
            case SFun(a, b) | SPair(a, b) | SSum(a, b):
                return self.cast_labels(a) | self.cast_labels(b)
        return set()

    def compose(self, c, d):
        return compose_s(c, d)

    def height(self, c):
        return height_s(c)

    def size(self, c):
        return size_s(c)
