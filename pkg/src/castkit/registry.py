"""Lookup of disciplines by their command-line name."""

from .calculi import EDA, EDI, EDC, LDC, LambdaB, LambdaC
from .efficient import Hyper, LambdaS
from .errors import ContractViolation

_FACTORIES = {
    "eda": EDA,
    "edi": EDI,
    "lambda-b1": lambda: LambdaB(1),
    "lambda-b2": lambda: LambdaB(2),
    "edc": EDC,
    "ldc": LDC,
    "lambda-c": LambdaC,
    "lambda-s": LambdaS,
    "hyper": Hyper,
}

CALCULI = tuple(_FACTORIES)
PLAIN = CALCULI[:7]
EFFICIENT = CALCULI[7:]


def get(flag: str):
    try:
        return _FACTORIES[flag]()
    except KeyError:
        raise ContractViolation(f"unknown calculus {flag!r}") from None


def all_disciplines():
    return [get(f) for f in CALCULI]
