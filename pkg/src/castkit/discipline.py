"""The interface every cast representation implements."""

from __future__ import annotations

from enum import Enum

from .errors import ContractViolation, Unsupported
from .gradual import Type, head

DECOMPOSITIONS = {
    "dom": "fun", "cod": "fun",
    "fst": "pair", "snd": "pair",
    "inl": "sum", "inr": "sum",
}


class Mode(str, Enum):
    CC = "cc"
    CCP = "cc-prime"


class Kind(str, Enum):
    ACTIVE = "active"
    INERT = "inert"


class Discipline:
    """Base class for cast disciplines.

    Subclasses supply ``make_cast``, ``is_inert``, ``is_cross``,
    ``component``, ``apply_cast`` and ``cast_blame_safe``.  Every cast
    object exposes ``src`` and ``tgt``.
    """

    name = "abstract"
    flag = "abstract"
    composable = False
    has_precision = False

    # construction and classification

    def make_cast(self, A: Type, B: Type, label: int):
        raise NotImplementedError

    def is_inert(self, c) -> bool:
        raise NotImplementedError

    def is_cross(self, c) -> bool:
        raise NotImplementedError

    def classify(self, c) -> Kind:
        return Kind.INERT if self.is_inert(c) else Kind.ACTIVE

    def is_active(self, c) -> bool:
        return not self.is_inert(c)

    def decompose(self, c, field: str):
        h = DECOMPOSITIONS.get(field)
        if h is None:
            raise ContractViolation(f"unknown decomposition {field!r}")
        if not self.is_cross(c) or head(c.src) != h or head(c.tgt) != h:
            raise ContractViolation(f"{field} needs a cross cast at {h}, got {self.render(c)}")
        return self.component(c, field)

    def component(self, c, field: str):
        raise NotImplementedError

    def apply_cast(self, V, c, mode: Mode):
        raise NotImplementedError

    def cast_blame_safe(self, c, label: int) -> bool:
        raise NotImplementedError

    def render(self, c) -> str:
        return str(c)

    def cast_labels(self, c) -> set:
        return set()

    # optional members

    def prec_ii(self, c, c2) -> bool:
        raise Unsupported(f"{self.name} has no cast precision")

    def prec_it(self, c, A: Type) -> bool:
        raise Unsupported(f"{self.name} has no cast precision")

    def prec_ti(self, A: Type, c) -> bool:
        raise Unsupported(f"{self.name} has no cast precision")

    def compose(self, c, d):
        raise Unsupported(f"{self.name} does not compose casts")

    def height(self, c) -> int:
        raise Unsupported(f"{self.name} has no cast height")

    def size(self, c) -> int:
        raise Unsupported(f"{self.name} has no cast size")

    def __repr__(self):
        return f"<discipline {self.flag}>"
