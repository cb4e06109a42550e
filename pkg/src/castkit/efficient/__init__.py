"""Disciplines whose casts compose: λS and hypercoercions."""

from .hyper import Hyper, coerce_h, compose_h
from .lambda_s import LambdaS, coerce_s, compose_s

__all__ = ["LambdaS", "Hyper", "coerce_s", "compose_s", "coerce_h", "compose_h"]
