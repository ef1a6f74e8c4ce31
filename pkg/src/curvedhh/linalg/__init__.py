"""Exact linear algebra: sparse elimination plus dense modular kernels."""

from .exact import Echelon, SparseMatrix, in_span, independent_subset, nullspace, rank, solve
from .kernels import LARGE_PRIME, active_backend, rank_modp, rref_modp

__all__ = ["Echelon", "SparseMatrix", "in_span", "independent_subset", "nullspace", "rank", "solve",
           "LARGE_PRIME", "active_backend", "rank_modp", "rref_modp"]
