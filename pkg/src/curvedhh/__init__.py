"""Exact computer algebra for curved algebras, matrix factorizations and Hochschild complexes."""

__version__ = "0.1.0"
