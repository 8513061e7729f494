"""Exact construction and certification of disjoint plane curve families."""

__version__ = "0.1.0"
