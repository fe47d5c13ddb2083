"""Exact symbolic engine for the q-deformed cotangent bundle T*G_q of SL(2).

Two tiers: scalar relations between matrix entries (``freealg``,
``heisenberg``, ``star``) and whole-matrix words with an equational prover
(``matword``).  ``verify`` runs the acceptance suite; ``cli`` is the
command-line frontend.
"""

from .errors import (
    BadDimension,
    BudgetExceeded,
    CompletionDiverged,
    ExprSyntaxError,
    NoImage,
    NoQuadraticRelation,
    NotAUnit,
    NotInvertible,
    NotOrientable,
    NotProved,
    QCotangentError,
    SingularMatrix,
    UnknownGenerator,
)
from .scalars import I, LAM, ONE, Q, ZERO, QScalar, qpow

__version__ = "0.1.0"

__all__ = [
    "QScalar", "ZERO", "ONE", "Q", "I", "LAM", "qpow",
    "QCotangentError", "NotAUnit", "BudgetExceeded", "NotOrientable", "CompletionDiverged", "BadDimension",
    "SingularMatrix", "NoQuadraticRelation", "NotInvertible", "NoImage", "NotProved", "ExprSyntaxError",
    "UnknownGenerator",
]
