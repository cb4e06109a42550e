"""castkit: a gradual typing workbench.

The package covers the gradually typed lambda calculus, a cast calculus
parameterized by the cast representation (in a plain and a space-efficient
flavor), nine concrete cast disciplines, and harnesses that check the
calculi's metatheory at run time.
"""

from .discipline import Discipline, Mode
from .registry import CALCULI, get

__all__ = ["Discipline", "Mode", "CALCULI", "get"]
__version__ = "0.1.0"
