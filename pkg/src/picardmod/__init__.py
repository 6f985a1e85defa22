"""Exact-arithmetic presentations of the Euclidean Picard modular groups."""

__version__ = "0.1.0"
