"""Independent brute-force oracles used by the test suite."""

from __future__ import annotations

import itertools

import numpy as np


def monomials(nvars: int, max_degree: int, min_degree: int = 0) -> list[tuple]:
    return [e for d in range(min_degree, max_degree + 1)
            for e in itertools.product(range(d + 1), repeat=nvars) if sum(e) == d]


def _divisible(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def monomial_ideals(nvars: int, max_degree: int):
    """Every monomial ideal whose minimal generators have degree 1..max_degree (as antichains)."""
    ms = monomials(nvars, max_degree, 1)

    def rec(i, chosen):
        yield tuple(chosen)
        for j in range(i, len(ms)):
            m = ms[j]
            if any(_divisible(c, m) or _divisible(m, c) for c in chosen):
                continue
            chosen.append(m)
            yield from rec(j + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


class Staircase:
    """Count standard monomials of a monomial ideal by direct enumeration up to a degree bound."""

    def __init__(self, nvars: int, bound: int):
        self.exps = np.array(monomials(nvars, bound), dtype=np.int64).reshape(-1, nvars)
        self.deg = self.exps.sum(axis=1)
        self.bound = bound
        self._multiples: dict = {}

    def multiples(self, g) -> np.ndarray:
        """Mask of the enumerated monomials divisible by g (cached per generator)."""
        g = tuple(g)
        m = self._multiples.get(g)
        if m is None:
            m = self._multiples[g] = (self.exps >= np.array(g, dtype=np.int64)).all(axis=1)
        return m

    def standard_mask(self, gens) -> np.ndarray:
        divisible = np.zeros(len(self.exps), dtype=bool)
        for g in gens:
            divisible |= self.multiples(g)
        return ~divisible

    def hilbert(self, gens) -> dict:
        """degree -> number of standard monomials, for degrees 0..bound."""
        counts = np.bincount(self.deg[self.standard_mask(gens)], minlength=self.bound + 1)
        return {d: int(c) for d, c in enumerate(counts)}


def staircase_rank(M, p: int | None = None) -> int:
    """Rank by plain Gaussian elimination over Fractions (or mod p)."""
    from fractions import Fraction
    A = [[(Fraction(v) if p is None else v % p) for v in row] for row in M]
    r = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = (1 / A[r][c]) if p is None else pow(A[r][c], -1, p)
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c] * inv
                A[i] = [(x - f * y) if p is None else (x - f * y) % p for x, y in zip(A[i], A[r])]
        r += 1
    return r
