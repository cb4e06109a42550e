"""Disciplines whose casts are labeled pairs of types: EDA, EDI and λB."""

from __future__ import annotations

from dataclasses import dataclass

from ..cc import Blame, Cast, eta
from ..discipline import Discipline
from ..errors import ContractViolation
from ..gradual import (DYN, Type, Unknown, components, gnd, head, is_atomic,
                       is_consistent, is_ground, subtype,
                       type_precision)


@dataclass(frozen=True, slots=True)
class TCast:
    src: Type
    tgt: Type
    label: int

    def __post_init__(self):
        if not is_consistent(self.src, self.tgt):
            raise ContractViolation(f"cast between inconsistent types {self.src} and {self.tgt}")

    def __str__(self):
        return f"[{self.src} =>{self.label} {self.tgt}]"


def is_identity(c: TCast) -> bool:
    return c.src == c.tgt and is_atomic(c.src)


def is_injection(c: TCast) -> bool:
    return isinstance(c.tgt, Unknown) and not isinstance(c.src, Unknown)


def is_projection(c: TCast) -> bool:
    return isinstance(c.src, Unknown) and not isinstance(c.tgt, Unknown)


def is_cross(c: TCast) -> bool:
    return head(c.src) is not None and head(c.src) == head(c.tgt)


def _component(c: TCast, field: str) -> TCast:
    (a, b), (a2, b2) = components(c.src), components(c.tgt)
    if field == "dom":
        return TCast(a2, a, c.label)
    if field in ("cod", "snd", "inr"):
        return TCast(b, b2, c.label)
    return TCast(a, a2, c.label)


class TypeBased(Discipline):
    flavor = "D"

    def make_cast(self, A, B, label):
        return TCast(A, B, label)

    def is_cross(self, c):
        return is_cross(c)

    def component(self, c, field):
        return _component(c, field)

    def cast_blame_safe(self, c, label):
        return subtype(c.src, c.tgt, self.flavor) or c.label != label

    def cast_labels(self, c):
        return {c.label}


class EDA(TypeBased):
    """Eager error detection; function casts expand eagerly."""

    name = "EDA"
    flag = "eda"

    def is_inert(self, c):
        return is_injection(c)

    def apply_cast(self, V, c, mode):
        if is_identity(c):
            return V
        if is_projection(c):
            inner = V.cast
            if is_consistent(inner.src, c.tgt):
                return Cast(V.expr, TCast(inner.src, c.tgt, c.label))
            return Blame(c.label, c.tgt)
        if is_cross(c):
            return eta(V, c, self, mode)
        raise ContractViolation(f"{c} is not active in {self.name}")


class EDI(EDA):
    """Like EDA, but cross casts are inert and wrap values."""

    name = "EDI"
    flag = "edi"

    def is_inert(self, c):
        return is_injection(c) or is_cross(c)

    def apply_cast(self, V, c, mode):
        if is_identity(c) or is_projection(c):
            return super().apply_cast(V, c, mode)
        raise ContractViolation(f"{c} is not active in {self.name}")


class LambdaB(TypeBased):
    """Injections and projections factor through ground types."""

    flavor = "UD"
    has_precision = True

    def __init__(self, variant: int = 1):
        if variant not in (1, 2):
            raise ContractViolation("λB variants are 1 and 2")
        self.variant = variant
        self.name = f"λB{variant}"
        self.flag = f"lambda-b{variant}"

    def _inert_cross(self, c):
        return is_cross(c) and (self.variant == 1 or head(c.src) == "fun")

    def is_inert(self, c):
        return (is_ground(c.src) and isinstance(c.tgt, Unknown)) or self._inert_cross(c)

    def apply_cast(self, V, c, mode):
        if is_identity(c):
            return V
        if is_injection(c):
            G = gnd(c.src)
            return Cast(Cast(V, TCast(c.src, G, c.label)), TCast(G, DYN, c.label))
        if is_projection(c):
            G = V.cast.src
            B = c.tgt
            if is_ground(B):
                return V.expr if B == G else Blame(c.label, B)
            H = gnd(B)
            return Cast(Cast(V, TCast(DYN, H, c.label)), TCast(H, B, c.label))
        if is_cross(c):
            return eta(V, c, self, mode)
        raise ContractViolation(f"{c} is not active in {self.name}")

    # precision between inert casts and types

    def _cross_ok(self, c):
        return is_cross(c) and (self.variant == 1 or head(c.src) == "fun")

    def prec_ii(self, c, c2):
        if is_injection(c) and is_injection(c2):
            return c.src == c2.src and is_ground(c.src)
        if self._cross_ok(c) and self._cross_ok(c2) and head(c.src) == head(c2.src):
            return type_precision(c.src, c2.src) and type_precision(c.tgt, c2.tgt)
        return False

    def prec_it(self, c, A):
        if is_injection(c) and is_ground(c.src):
            return type_precision(c.src, A)
        if self._cross_ok(c) and head(A) == head(c.src):
            return type_precision(c.src, A) and type_precision(c.tgt, A)
        return False

    def prec_ti(self, A, c):
        if self._cross_ok(c) and head(A) == head(c.src):
            return type_precision(A, c.src) and type_precision(A, c.tgt)
        return False

