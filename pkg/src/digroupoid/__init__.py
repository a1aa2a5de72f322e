"""Regular digraphs, 1-factorizations, spanning factorizations and groupoids."""

from .digraph import Digraph, diameter, validate
from .factorize import Factorization, one_factorization, verify_factorization
from .spanfact import (
    SpanningFactorization,
    Status,
    WordSet,
    find_spanning_factorization,
    is_spanning,
    is_vertex_transitive,
    tree_wordset,
    walk,
)

__all__ = [
    "Digraph",
    "Factorization",
    "SpanningFactorization",
    "Status",
    "WordSet",
    "diameter",
    "find_spanning_factorization",
    "is_spanning",
    "is_vertex_transitive",
    "one_factorization",
    "tree_wordset",
    "validate",
    "verify_factorization",
    "walk",
]
