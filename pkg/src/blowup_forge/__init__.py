"""blowup-forge: exact commutative algebra for blowup algebras.

Groebner/syzygy kernel, symmetric and Rees algebra presentations, torsion,
canonical modules, duality verification, Morley forms, and the Pfaffian /
determinantal example families, with a CLI front end.
"""

from .ring import RingSpec, Polynomial, Field, parse, render, ParseError, RingError
from .kernel import ResourceAbort
from .groebner import IdealGB

__version__ = "0.1.0"

__all__ = [
    "RingSpec", "Polynomial", "Field", "parse", "render",
    "ParseError", "RingError", "ResourceAbort", "IdealGB",
]
