"""Branching-bisimilarity and regularity checking for normed BPA processes."""

from .grammar import BpaSystem, parse_system
from .regularity import decide_regularity
from .search import decide_equivalence

__all__ = ["BpaSystem", "parse_system", "decide_equivalence", "decide_regularity"]
