"""Homological invariants of finite graded algebras over F_p and growth
estimates for the grading twist on their stable module categories."""

__version__ = "0.1.0"
