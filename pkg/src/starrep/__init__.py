"""Exact computations with star-product algebras and their representations."""

__version__ = "0.1.0"
