"""Real division algebras: Hurwitz algebras, identity checking, structure and normal forms."""

from .algebra import (
    Algebra,
    ConvergenceError,
    SingularOperatorError,
    ZeroDivisorError,
    find_idempotent,
    isotope,
    left_divide,
    left_mul,
    multiply,
    right_divide,
    right_mul,
    star_product,
)
from .hurwitz import hurwitz, invinv_algebra

__version__ = "0.1.0"
