"""Exact reals, codes for continuous functions, and desk-scale searches."""

__version__ = "0.1.0"
