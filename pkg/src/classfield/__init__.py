"""Verification-grade engine for the group theory of abstract class field
theory over finite models: transfer maps, cohomological Mackey functors,
abstract ramification with Frobenius lifts, reciprocity morphisms, and
higher-rank discrete valuations on truncated Laurent-series fields.
"""

from .abelian import AbHom, FgAbGroup, group_order, smith_decompose
from .groups import FiniteGroup, Subgroup, Transversal
from .ramification import RamificationDatum, SupernaturalNumber

__all__ = [
    "AbHom", "FgAbGroup", "FiniteGroup", "RamificationDatum", "Subgroup",
    "SupernaturalNumber", "Transversal", "group_order", "smith_decompose",
]

__version__ = "0.1.0"
