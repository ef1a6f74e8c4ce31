"""Dense modular elimination kernels.

The kernels run under numba when it is importable and not disabled with the
environment variable ``CURVEDHH_NUMBA=0``; otherwise a vectorised numpy
implementation with identical results is used.  Entries are int64 residues
modulo a prime below 2**31, so every product fits in 63 bits.
"""

from __future__ import annotations

import os

import numpy as np

LARGE_PRIME = 2147483647  # 2**31 - 1


def _numba_requested() -> bool:
    return os.environ.get("CURVEDHH_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


try:
    if not _numba_requested():
        raise ImportError("numba disabled by CURVEDHH_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised with the env flag
    HAVE_NUMBA = False


def _inv_py(a: int, p: int) -> int:
    return pow(int(a), -1, int(p))


# ---------------------------------------------------------------- numpy path

def rref_modp_numpy(A: np.ndarray, p: int):
    """Reduced row echelon form in place; returns (rank, pivot columns)."""
    m, n = A.shape
    A %= p
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r, c:] = (A[r, c:] * _inv_py(A[r, c], p)) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            A[rows, c:] = (A[rows, c:] - np.outer(col[rows], A[r, c:])) % p
        pivots.append(c)
        r += 1
    return r, np.array(pivots, dtype=np.int64)


def rank_modp_numpy(A: np.ndarray, p: int) -> int:
    m, n = A.shape
    A %= p
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r, c:] = (A[r, c:] * _inv_py(A[r, c], p)) % p
        below = A[r + 1:, c]
        rows = np.nonzero(below)[0] + r + 1
        if rows.size:
            A[rows, c:] = (A[rows, c:] - np.outer(A[rows, c], A[r, c:])) % p
        r += 1
    return r


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:
    @njit(cache=True)
    def _inv_nb(a, p):
        t, newt = 0, 1
        r, newr = p, a % p
        while newr != 0:
            q = r // newr
            t, newt = newt, t - q * newt
            r, newr = newr, r - q * newr
        if t < 0:
            t += p
        return t

    @njit(cache=True)
    def _rank_modp_nb(A, p):
        m, n = A.shape
        for i in range(m):
            for j in range(n):
                A[i, j] %= p
        r = 0
        for c in range(n):
            if r == m:
                break
            piv = -1
            for i in range(r, m):
                if A[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, n):
                    tmp = A[r, j]
                    A[r, j] = A[piv, j]
                    A[piv, j] = tmp
            inv = _inv_nb(A[r, c], p)
            for j in range(c, n):
                A[r, j] = A[r, j] * inv % p
            for i in range(r + 1, m):
                f = A[i, c]
                if f != 0:
                    for j in range(c, n):
                        A[i, j] = (A[i, j] - f * A[r, j]) % p
            r += 1
        return r

    @njit(cache=True)
    def _rref_modp_nb(A, p):
        m, n = A.shape
        for i in range(m):
            for j in range(n):
                A[i, j] %= p
        pivots = np.empty(min(m, n), dtype=np.int64)
        r = 0
        for c in range(n):
            if r == m:
                break
            piv = -1
            for i in range(r, m):
                if A[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, n):
                    tmp = A[r, j]
                    A[r, j] = A[piv, j]
                    A[piv, j] = tmp
            inv = _inv_nb(A[r, c], p)
            for j in range(c, n):
                A[r, j] = A[r, j] * inv % p
            for i in range(m):
                if i != r:
                    f = A[i, c]
                    if f != 0:
                        for j in range(c, n):
                            A[i, j] = (A[i, j] - f * A[r, j]) % p
            pivots[r] = c
            r += 1
        return r, pivots[:r].copy()


def rank_modp(A: np.ndarray, p: int = LARGE_PRIME, backend: str | None = None) -> int:
    """Rank of an integer matrix modulo a prime p < 2**31 (A is not modified)."""
    A = np.array(A, dtype=np.int64, copy=True)
    if A.size == 0:
        return 0
    use_nb = HAVE_NUMBA if backend is None else backend == "numba"
    if use_nb:
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return int(_rank_modp_nb(A, np.int64(p)))
    return rank_modp_numpy(A, p)


def rref_modp(A: np.ndarray, p: int, backend: str | None = None):
    """Reduced row echelon form mod p; returns (R, rank, pivots) with R a new array."""
    A = np.array(A, dtype=np.int64, copy=True)
    if A.size == 0:
        return A, 0, np.zeros(0, dtype=np.int64)
    use_nb = HAVE_NUMBA if backend is None else backend == "numba"
    if use_nb:
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        r, piv = _rref_modp_nb(A, np.int64(p))
        return A, int(r), piv
    r, piv = rref_modp_numpy(A, p)
    return A, r, piv


def active_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
