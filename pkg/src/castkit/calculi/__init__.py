"""The plain cast disciplines."""

from .coercions import EDC, LDC, LambdaC, coerce_edc, coerce_ldc, coerce_lc
from .typebased import EDA, EDI, LambdaB, TCast

__all__ = ["EDA", "EDI", "LambdaB", "EDC", "LDC", "LambdaC", "TCast",
           "coerce_edc", "coerce_ldc", "coerce_lc"]
