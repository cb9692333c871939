"""Dimension bounds and Groebner bases for sparse factor analysis models."""

__version__ = "0.1.0"
