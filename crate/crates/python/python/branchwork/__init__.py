"""Exact computation in spinal groups acting on rooted trees."""

from ._native import BudgetExceeded, Engine, GroupSpec, Vertex, Word, check_names

__all__ = ["BudgetExceeded", "Engine", "GroupSpec", "Vertex", "Word", "check_names"]
