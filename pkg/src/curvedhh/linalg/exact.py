"""Exact sparse linear algebra over QQ, F_p and F_p(s).

Matrices are :class:`SparseMatrix` objects holding one ``{column: value}``
dictionary per row.  Elimination is incremental and semi-echelon: a pivot row
stored under column c has no entries left of c.  Over QQ rows are scaled to
primitive integer vectors and reduced fraction-free; over F_p entries are
plain residues; over F_p(s) the field elements divide exactly.

Ranks of dense-enough integer matrices are screened first with the modular
kernel: a rank mod p that equals min(rows, cols) is already the rank over QQ.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable

import numpy as np

from ..exactalg.scalars import Field, Mod, PrimeField, RationalField
from . import kernels

DENSE_LIMIT = 4_000_000


@dataclass
class SparseMatrix:
    nrows: int
    ncols: int
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if not self.rows:
            self.rows = [dict() for _ in range(self.nrows)]

    @classmethod
    def from_columns(cls, nrows: int, columns: list[dict]) -> "SparseMatrix":
        M = cls(nrows, len(columns))
        for j, col in enumerate(columns):
            for i, v in col.items():
                if v:
                    M.rows[i][j] = v
        return M

    @classmethod
    def from_dense(cls, dense) -> "SparseMatrix":
        dense = [list(r) for r in dense]
        ncols = len(dense[0]) if dense else 0
        M = cls(len(dense), ncols)
        for i, r in enumerate(dense):
            for j, v in enumerate(r):
                if v:
                    M.rows[i][j] = v
        return M

    def set(self, i: int, j: int, v):
        if v:
            self.rows[i][j] = v
        else:
            self.rows[i].pop(j, None)

    def add(self, i: int, j: int, v):
        if not v:
            return
        r = self.rows[i]
        s = r.get(j)
        s = v if s is None else s + v
        if s:
            r[j] = s
        else:
            r.pop(j, None)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)

    def transpose(self) -> "SparseMatrix":
        T = SparseMatrix(self.ncols, self.nrows)
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                T.rows[j][i] = v
        return T

    def matvec(self, x: dict) -> dict:
        out = {}
        for i, r in enumerate(self.rows):
            s = None
            for j, v in r.items():
                xv = x.get(j)
                if xv:
                    s = v * xv if s is None else s + v * xv
            if s:
                out[i] = s
        return out

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        out = SparseMatrix(self.nrows, other.ncols)
        for i, r in enumerate(self.rows):
            acc: dict = {}
            for k, v in r.items():
                for j, w in other.rows[k].items():
                    s = acc.get(j)
                    acc[j] = v * w if s is None else s + v * w
            out.rows[i] = {j: v for j, v in acc.items() if v}
        return out

    def to_dense(self, zero=0) -> list[list]:
        return [[r.get(j, zero) for j in range(self.ncols)] for r in self.rows]


# ---------------------------------------------------------------- helpers

def _kind(F: Field) -> str:
    if isinstance(F, RationalField):
        return "int"
    if isinstance(F, PrimeField):
        return "modp"
    return "generic"


def _int_row(row: dict) -> dict:
    """Scale a row of Fractions/ints to a primitive integer row."""
    den = 1
    for v in row.values():
        if isinstance(v, Fraction) and v.denominator != 1:
            den = lcm(den, v.denominator)
    out = {k: int(v * den) for k, v in row.items() if v}
    g = 0
    for v in out.values():
        g = gcd(g, v)
    if g > 1:
        out = {k: v // g for k, v in out.items()}
    return out


def _modp_row(row: dict, p: int) -> dict:
    out = {}
    for k, v in row.items():
        x = v.v if isinstance(v, Mod) else int(v) % p
        if x:
            out[k] = x
    return out


class Echelon:
    """Incremental semi-echelon basis of a row space."""

    def __init__(self, F: Field):
        self.F = F
        self.kind = _kind(F)
        self.p = F.characteristic
        self.piv: dict[int, dict] = {}

    def prepare(self, row: dict) -> dict:
        if self.kind == "int":
            return _int_row(row)
        if self.kind == "modp":
            return _modp_row(row, self.p)
        return {k: v for k, v in row.items() if v}

    def reduce(self, row: dict):
        """Reduce a prepared row in place; returns (row, leading column or None)."""
        heap = list(row)
        heapq.heapify(heap)
        piv = self.piv
        kind = self.kind
        p = self.p
        while heap:
            c = heapq.heappop(heap)
            a = row.get(c)
            if not a:
                continue
            P = piv.get(c)
            if P is None:
                return row, c
            if kind == "modp":
                for k, v in P.items():
                    old = row.get(k)
                    if old is None:
                        heapq.heappush(heap, k)
                        nv = (-a * v) % p
                    else:
                        nv = (old - a * v) % p
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
            elif kind == "int":
                pc = P[c]
                g = gcd(a, pc)
                s, t = pc // g, a // g
                if s != 1:
                    for k in row:
                        row[k] *= s
                for k, v in P.items():
                    old = row.get(k)
                    if old is None:
                        heapq.heappush(heap, k)
                        row[k] = -t * v
                    else:
                        nv = old - t * v
                        if nv:
                            row[k] = nv
                        else:
                            del row[k]
            else:
                for k, v in P.items():
                    old = row.get(k)
                    if old is None:
                        heapq.heappush(heap, k)
                        nv = -(a * v)
                    else:
                        nv = old - a * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        return row, None

    def _store(self, row: dict, c: int):
        if self.kind == "modp":
            inv = pow(row[c], -1, self.p)
            row = {k: v * inv % self.p for k, v in row.items()}
        elif self.kind == "int":
            g = 0
            for v in row.values():
                g = gcd(g, v)
            if row[c] < 0:
                g = -g
            if g != 1:
                row = {k: v // g for k, v in row.items()}
        else:
            inv = self.F.one / row[c]
            row = {k: v * inv for k, v in row.items()}
        self.piv[c] = row

    def add(self, row: dict) -> bool:
        """Insert a row; True if it was independent of the rows so far."""
        r, c = self.reduce(self.prepare(row))
        if c is None:
            return False
        self._store(r, c)
        return True

    @property
    def rank(self) -> int:
        return len(self.piv)

    def back_substitute(self, fixed: dict, ncols: int) -> dict:
        """Values of pivot variables given values of free variables (exact field scalars)."""
        F = self.F
        x = {k: F(v) for k, v in fixed.items() if v}
        for c in sorted(self.piv, reverse=True):
            P = self.piv[c]
            s = F.zero
            for k, v in P.items():
                if k != c and k < ncols:
                    xv = x.get(k)
                    if xv:
                        s = s + self._scalar(v) * xv
            rhs = P.get(ncols)
            total = (self._scalar(rhs) if rhs is not None else F.zero) - s
            val = total / self._scalar(P[c])
            if val:
                x[c] = val
            else:
                x.pop(c, None)
        return x

    def _scalar(self, v):
        if self.kind == "int":
            return Fraction(v)
        if self.kind == "modp":
            return Mod(v, self.p)
        return v


# ---------------------------------------------------------------- public API

def _dense_int(M: SparseMatrix, p: int):
    A = np.zeros((M.nrows, M.ncols), dtype=np.int64)
    for i, r in enumerate(M.rows):
        for j, v in r.items():
            A[i, j] = v % p
    return A


def rank(M: SparseMatrix, F: Field) -> int:
    """Exact rank of M over F."""
    if M.nrows == 0 or M.ncols == 0:
        return 0
    rows = [r for r in M.rows if r]
    if not rows:
        return 0
    kind = _kind(F)
    small = len(rows) * M.ncols <= DENSE_LIMIT
    if kind == "modp" and small:
        Mp = SparseMatrix(len(rows), M.ncols, [_modp_row(r, F.characteristic) for r in rows])
        return kernels.rank_modp(_dense_int(Mp, F.characteristic), F.characteristic)
    if kind == "int" and small and len(rows) > 8:
        ints = [_int_row(r) for r in rows]
        p = kernels.LARGE_PRIME
        rp = kernels.rank_modp(_dense_int(SparseMatrix(len(ints), M.ncols, ints), p), p)
        if rp == min(len(ints), M.ncols):
            return rp
        E = Echelon(F)
        for r in ints:
            rr, c = E.reduce(dict(r))
            if c is not None:
                E._store(rr, c)
        return E.rank
    # eliminate along the smaller dimension
    if M.ncols < len(rows):
        M = M.transpose()
        rows = [r for r in M.rows if r]
    # sparse rows first: less fill-in during elimination
    rows.sort(key=len)
    E = Echelon(F)
    for r in rows:
        E.add(r)
    return E.rank


def solve(M: SparseMatrix, b: dict, F: Field) -> dict | None:
    """A solution x of M x = b (dict col -> scalar), or None if inconsistent."""
    n = M.ncols
    E = Echelon(F)
    for i, r in enumerate(M.rows):
        row = dict(r)
        if b.get(i):
            row[n] = b[i]
        if not row:
            continue
        rr, c = E.reduce(E.prepare(row))
        if c is None:
            continue
        if c == n:
            return None
        E._store(rr, c)
    return E.back_substitute({}, n)


def nullspace(M: SparseMatrix, F: Field) -> list[dict]:
    """Basis of {x : M x = 0}, one vector per free column."""
    n = M.ncols
    E = Echelon(F)
    for r in M.rows:
        if r:
            E.add(r)
    free = [j for j in range(n) if j not in E.piv]
    return [E.back_substitute({j: 1}, n) for j in free]


def independent_subset(span: Iterable[dict], candidates: Iterable[dict], F: Field) -> list[int]:
    """Indices of candidates that extend the span of ``span`` (greedy, in order)."""
    E = Echelon(F)
    for v in span:
        if v:
            E.add(v)
    out = []
    for i, v in enumerate(candidates):
        if v and E.add(v):
            out.append(i)
    return out


def in_span(vectors: Iterable[dict], target: dict, F: Field) -> bool:
    E = Echelon(F)
    for v in vectors:
        if v:
            E.add(v)
    r, c = E.reduce(E.prepare(dict(target)))
    return c is None


__all__ = ["SparseMatrix", "Echelon", "rank", "solve", "nullspace", "independent_subset", "in_span"]
