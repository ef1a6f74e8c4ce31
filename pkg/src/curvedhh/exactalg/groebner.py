"""Buchberger's algorithm and the ideal operations built on it.

Everything here is deterministic: S-pairs are processed by the normal
strategy (smallest lcm degree, then lexicographically smallest pair index)
and reduced bases are returned monic and sorted by decreasing leading term.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from ..errors import (InfiniteSlice, LaurentVariablePresent, MixedAmbient, UnknownVariable,
                      ZeroDivisorInput)
from .poly import Poly, PolyRing, exp_divides, exp_lcm, exp_sub


@dataclass(frozen=True)
class IdealBasis:
    """Generators of an ideal in a fixed ambient ring (zeros and duplicates dropped)."""

    ring: PolyRing
    gens: tuple

    def __init__(self, ring: PolyRing, gens: Iterable = ()):
        clean = []
        seen = set()
        for g in gens:
            g = ring(g)
            if g and g not in seen:
                seen.add(g)
                clean.append(g)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "gens", tuple(clean))

    def __iter__(self):
        return iter(self.gens)

    def __len__(self):
        return len(self.gens)

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.gens) + ")" if self.gens else "(0)"

    def strings(self) -> list[str]:
        return [str(g) for g in self.gens]


@dataclass(frozen=True)
class GroebnerBasis:
    ring: PolyRing
    order: object
    basis: tuple
    staircase: tuple = field(default=())

    def __iter__(self):
        return iter(self.basis)

    def __len__(self):
        return len(self.basis)

    @property
    def is_unit(self) -> bool:
        return len(self.basis) == 1 and self.basis[0].is_constant()

    @property
    def is_zero(self) -> bool:
        return not self.basis

    def ideal(self) -> IdealBasis:
        return IdealBasis(self.ring, self.basis)

    def strings(self) -> list[str]:
        return [str(g) for g in self.basis]

    def contains(self, f: Poly) -> bool:
        return normal_form(f, self).is_zero()

    def __str__(self):
        return "(" + ", ".join(self.strings()) + ")" if self.basis else "(0)"


# ---------------------------------------------------------------- division

def _reduce(f: Poly, G: Sequence[Poly], lms: Sequence, track: Sequence | None = None,
            full: bool = True):
    """Divide f by G.  Returns (remainder, quotients) where quotients is a dict
    index -> Poly when tracking is requested."""
    ring = f.ring
    key = ring.key
    p = dict(f.terms)
    rem = {}
    quots = {} if track is not None else None
    while p:
        e = max(p, key=key)
        c = p[e]
        for i, m in enumerate(lms):
            if exp_divides(m, e):
                g = G[i]
                shift = exp_sub(e, m)
                factor = c / g.terms[m]
                for ge, gc in g.terms.items():
                    te = tuple(a + b for a, b in zip(ge, shift))
                    v = p.get(te)
                    nv = (-factor * gc) if v is None else v - factor * gc
                    if nv:
                        p[te] = nv
                    else:
                        p.pop(te, None)
                if quots is not None:
                    q = quots.get(i)
                    term = Poly(ring, {shift: factor})
                    quots[i] = term if q is None else q + term
                break
        else:
            rem[e] = c
            del p[e]
            if not full:
                rem.update(p)
                break
    return Poly(ring, rem), quots


def _combine(cofs: Sequence[Sequence[Poly]], quots: dict, ring: PolyRing, n: int) -> list[Poly]:
    out = [ring.zero() for _ in range(n)]
    for i, q in quots.items():
        for j in range(n):
            if cofs[i][j]:
                out[j] = out[j] + q * cofs[i][j]
    return out


def _prepare(gens, order):
    if not gens:
        return None, []
    ring = gens[0].ring
    for g in gens:
        if g.ring.ambient != ring.ambient:
            raise MixedAmbient(f"{g.ring!r} vs {ring!r}")
        if g.mentions(ring.laurent):
            raise LaurentVariablePresent(f"{g} mentions a Laurent variable; strip it first")
    ring = ring.with_order(order)
    return ring, [ring(g) for g in gens if g]


def _buchberger_core(gens: list[Poly], ring: PolyRing, track: bool):
    """Plain Buchberger with the normal strategy, optionally tracking cofactors
    with respect to the input generators."""
    n = len(gens)
    G: list[Poly] = []
    cofs: list[list[Poly]] = []
    lms: list = []
    pairs: set = set()
    queue: list = []      # (deg lcm, i, j): normal strategy, ties broken by index

    def add(g: Poly, cof):
        idx = len(G)
        inv = ring.field.one / g.lc()
        g = g * inv
        if cof is not None:
            cof = [c * inv for c in cof]
        G.append(g)
        cofs.append(cof)
        m = g.lm()
        lms.append(m)
        for j in range(idx):
            pairs.add((j, idx))
            heapq.heappush(queue, (sum(exp_lcm(lms[j], m)), j, idx))

    for k, g in enumerate(gens):
        cof = None
        if track:
            cof = [ring.zero() for _ in range(n)]
            cof[k] = ring.one()
        add(g, cof)

    while queue:
        _, i, j = heapq.heappop(queue)
        pairs.discard((i, j))
        # two monomials have S-polynomial 0; product criterion: coprime leading monomials
        if len(G[i].terms) == 1 and len(G[j].terms) == 1:
            continue
        if all(a == 0 or b == 0 for a, b in zip(lms[i], lms[j])):
            continue
        L = exp_lcm(lms[i], lms[j])
        # chain criterion
        skip = False
        for k in range(len(G)):
            if k in (i, j) or not exp_divides(lms[k], L):
                continue
            a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
            if a not in pairs and b not in pairs:
                skip = True
                break
        if skip:
            continue
        ui, uj = exp_sub(L, lms[i]), exp_sub(L, lms[j])
        s = G[i].mul_term(ui, ring.field.one) - G[j].mul_term(uj, ring.field.one)
        scof = None
        if track:
            mi, mj = Poly(ring, {ui: ring.field.one}), Poly(ring, {uj: ring.field.one})
            scof = [mi * a - mj * b for a, b in zip(cofs[i], cofs[j])]
        r, quots = _reduce(s, G, lms, track=cofs if track else None)
        if r:
            rcof = None
            if track:
                sub = _combine(cofs, quots, ring, n)
                rcof = [a - b for a, b in zip(scof, sub)]
            add(r, rcof)
    return G, cofs


def _interreduce(G: list[Poly], cofs, ring: PolyRing, track: bool, n: int):
    # minimalize
    order = sorted(range(len(G)), key=lambda i: ring.key(G[i].lm()))
    keep = []
    for i in order:
        if not any(exp_divides(G[k].lm(), G[i].lm()) for k in keep):
            keep.append(i)
    Gm = [G[i] for i in keep]
    Cm = [cofs[i] for i in keep] if track else None
    out, outc = [], []
    for idx in range(len(Gm)):
        others = Gm[:idx] + Gm[idx + 1:]
        olms = [g.lm() for g in others]
        ocofs = (Cm[:idx] + Cm[idx + 1:]) if track else None
        r, quots = _reduce(Gm[idx], others, olms, track=ocofs if track else None)
        inv = ring.field.one / r.lc()
        out.append(r * inv)
        if track:
            sub = _combine(ocofs, quots, ring, n)
            outc.append([(a - b) * inv for a, b in zip(Cm[idx], sub)])
    perm = sorted(range(len(out)), key=lambda i: ring.key(out[i].lm()), reverse=True)
    out = [out[i] for i in perm]
    outc = [outc[i] for i in perm] if track else None
    return out, outc


def buchberger(ideal, order="grevlex") -> GroebnerBasis:
    """Reduced Gröbner basis of an ideal (IdealBasis or iterable of polynomials)."""
    gens = list(ideal.gens if isinstance(ideal, IdealBasis) else ideal)
    base_ring = ideal.ring if isinstance(ideal, IdealBasis) else (gens[0].ring if gens else None)
    ring, gens = _prepare(gens, order)
    if ring is None:
        r = base_ring.with_order(order) if base_ring is not None else None
        return GroebnerBasis(r, order, (), ())
    if not gens:
        return GroebnerBasis(ring, order, (), ())
    if all(len(g.terms) == 1 for g in gens):
        G = _monomial_basis(gens, ring)
    else:
        G, cofs = _buchberger_core(gens, ring, False)
        G, _ = _interreduce(G, cofs, ring, False, len(gens))
    return GroebnerBasis(ring, order, tuple(G), tuple(g.lm() for g in G))


def _monomial_basis(gens: list[Poly], ring: PolyRing) -> list[Poly]:
    """Reduced basis of a monomial ideal: its minimal monomial generators."""
    lms = sorted({g.lm() for g in gens}, key=sum)    # a divisor never has larger total degree
    keep: list = []
    for m in lms:
        if not any(exp_divides(k, m) for k in keep):
            keep.append(m)
    one = ring.field.one
    return [Poly(ring, {m: one}) for m in sorted(keep, key=ring.key, reverse=True)]


def groebner_with_cofactors(gens: Sequence[Poly], order="grevlex"):
    """Reduced basis together with a matrix expressing each element in the inputs."""
    ring, clean = _prepare(list(gens), order)
    if ring is None or not clean:
        return GroebnerBasis(ring, order, (), ()), []
    index = [i for i, g in enumerate(gens) if g]
    G, cofs = _buchberger_core(clean, ring, True)
    G, cofs = _interreduce(G, cofs, ring, True, len(clean))
    full = []
    for row in cofs:
        r = [ring.zero() for _ in gens]
        for k, i in enumerate(index):
            r[i] = row[k]
        full.append(r)
    return GroebnerBasis(ring, order, tuple(G), tuple(g.lm() for g in G)), full


def normal_form(f: Poly, gb: GroebnerBasis) -> Poly:
    """Remainder of f on division by the Gröbner basis (zero iff f lies in the ideal)."""
    if gb.ring is None:
        return f
    if f.ring.ambient != gb.ring.ambient:
        raise MixedAmbient(f"{f.ring!r} vs {gb.ring!r}")
    f = gb.ring(f)
    r, _ = _reduce(f, gb.basis, gb.staircase)
    return r


def lift(f: Poly, gens: Sequence[Poly], order="grevlex") -> list[Poly] | None:
    """Cofactors c with f = sum c_i gens_i, or None when f is not in the ideal."""
    if not gens:
        return None if f else []
    gb, cofs = groebner_with_cofactors(gens, order)
    if not gb.basis:
        return None if f else [f.ring.zero() for _ in gens]
    f = gb.ring(f)
    r, quots = _reduce(f, gb.basis, gb.staircase, track=cofs)
    if r:
        return None
    out = [f.ring.zero() for _ in gens]
    for i, q in quots.items():
        for j in range(len(gens)):
            if cofs[i][j]:
                out[j] = out[j] + q * cofs[i][j]
    return [gens[j].ring(o) for j, o in enumerate(out)]


# ---------------------------------------------------------------- quotient dimension

@dataclass(frozen=True)
class QuotientDimension:
    finite: bool
    dimension: int | None
    hilbert: dict
    window: tuple | None = None
    basis: tuple = ()

    def to_json(self) -> dict:
        return {"finite": self.finite, "dimension": self.dimension,
                "hilbert": {str(k): v for k, v in sorted(self.hilbert.items())},
                "window": list(self.window) if self.window else None}


def monomials_of_weight(ring: PolyRing, weight: int, exclude: Iterable[int] = ()):
    """All exponent vectors of the given weight (variables in ``exclude`` set to zero)."""
    return list(_monomials_of_weight(ring, ring.order, weight, frozenset(exclude)))


@lru_cache(maxsize=4096)
def _monomials_of_weight(ring: PolyRing, order, weight: int, exclude: frozenset) -> tuple:
    skip = set(exclude) | {ring.index(v) for v in ring.laurent}
    idx = [i for i in range(ring.nvars) if i not in skip]
    ws = [ring.weights[i] for i in idx]
    bad = [ring.variables[i] for i, w in zip(idx, ws) if w <= 0]
    if bad:
        raise InfiniteSlice(f"variables {bad} have non-positive weight; weight slices are infinite")
    out = []

    def rec(k, remaining, cur):
        if k == len(idx):
            if remaining == 0:
                e = [0] * ring.nvars
                for i, a in zip(idx, cur):
                    e[i] = a
                out.append(tuple(e))
            return
        w = ws[k]
        for a in range(remaining // w + 1):
            cur.append(a)
            rec(k + 1, remaining - a * w, cur)
            cur.pop()

    if weight >= 0:
        rec(0, weight, [])
    return tuple(sorted(out, key=ring.key, reverse=True))


def standard_monomials(gb: GroebnerBasis):
    """Finite staircase complement, or None if it is infinite."""
    arr = _standard_array(gb)
    if arr is None:
        return None
    return sorted((tuple(int(a) for a in e) for e in arr), key=gb.ring.key)


def _standard_array(gb: GroebnerBasis):
    """Exponent array of the finite staircase complement (unsorted), or None if it is infinite."""
    ring = gb.ring
    n = ring.nvars
    lms = gb.staircase
    if any(not any(m) for m in lms):
        return np.zeros((0, n), dtype=np.int64)
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if m[i] > 0 and all(m[j] == 0 for j in range(n) if j != i)]
        if not pure:
            return None
        bounds.append(min(pure))
    box = np.array(list(itertools.product(*(range(b) for b in bounds))), dtype=np.int64).reshape(-1, n)
    lead = np.array(lms, dtype=np.int64).reshape(-1, n)
    keep = ~(box[None, :, :] >= lead[:, None, :]).all(axis=2).any(axis=0)
    return box[keep]


def quotient_dimension(gb: GroebnerBasis, window: tuple | None = None) -> QuotientDimension:
    """Dimension of R/I from the staircase; per-weight counts inside ``window`` if infinite."""
    ring = gb.ring
    arr = _standard_array(gb)
    if arr is not None:
        wts, counts = np.unique(arr @ np.array(ring.weights, dtype=np.int64), return_counts=True)
        hilbert = {int(w): int(c) for w, c in zip(wts, counts)}
        std = sorted((tuple(int(a) for a in e) for e in arr), key=ring.key)
        return QuotientDimension(True, len(std), hilbert, None, tuple(std))
    hilbert = {}
    if window is not None:
        lo, hi = window
        E, wts = _window_monomials(ring, lo, hi)
        divisible = np.zeros(len(E), dtype=bool)
        for m in gb.staircase:
            divisible |= _window_multiples(ring, lo, hi, m)
        counts = np.bincount(wts[~divisible] - lo, minlength=hi - lo + 1) if len(E) else np.zeros(hi - lo + 1)
        hilbert = {w: int(counts[w - lo]) for w in range(lo, hi + 1)}
    return QuotientDimension(False, None, hilbert, tuple(window) if window else None)


@lru_cache(maxsize=65536)
def _window_multiples(ring: PolyRing, lo: int, hi: int, m: tuple) -> np.ndarray:
    """Mask of the window monomials divisible by m."""
    E, _ = _window_monomials(ring, lo, hi)
    return (E >= np.array(m, dtype=np.int64)).all(axis=1)


@lru_cache(maxsize=256)
def _window_monomials(ring: PolyRing, lo: int, hi: int):
    """Exponent array of all monomials with weight in [lo, hi] and the matching weights."""
    mons, wts = [], []
    for w in range(max(lo, 0), hi + 1):
        ms = _monomials_of_weight(ring, ring.order, w, frozenset())
        mons.extend(ms)
        wts.extend([w] * len(ms))
    return (np.array(mons, dtype=np.int64).reshape(-1, ring.nvars), np.array(wts, dtype=np.int64))


# ---------------------------------------------------------------- ideal operations

def saturate(ideal: IdealBasis, f: Poly) -> IdealBasis:
    """(I : f^inf) via an extra variable z: eliminate z from I + (z f - 1)."""
    if not f:
        raise ZeroDivisorInput("cannot saturate by the zero polynomial")
    ring = ideal.ring
    if f.mentions(ring.laurent) or any(g.mentions(ring.laurent) for g in ideal.gens):
        raise LaurentVariablePresent("strip Laurent variables before saturating")
    if not ideal.gens:
        return IdealBasis(ring, ())
    zname = "_z"
    while zname in ring.variables:
        zname += "_"
    big = PolyRing(ring.field, (zname,) + ring.variables, (0,) + ring.weights, ring.laurent,
                   ("elim", 1))
    shift = {i: i + 1 for i in range(ring.nvars)}
    gens = [g.map_to(big, shift) for g in ideal.gens]
    z = big.gen(zname)
    gens.append(z * f.map_to(big, shift) - 1)
    gb = buchberger(gens, ("elim", 1))
    kept = [g for g in gb.basis if all(e[0] == 0 for e in g.terms)]
    back = {i + 1: i for i in range(ring.nvars)}
    res = [g.map_to(ring, back) for g in kept]
    red = buchberger(IdealBasis(ring, res), ring.order)
    return IdealBasis(ring, red.basis)


def ideal_is_unit(ideal: IdealBasis) -> bool:
    return buchberger(ideal).is_unit


def ideals_equal(a: IdealBasis, b: IdealBasis) -> bool:
    return buchberger(a).basis == buchberger(b).basis


def ideal_sum(*ideals: IdealBasis) -> IdealBasis:
    ring = ideals[0].ring
    return IdealBasis(ring, [g for I in ideals for g in I.gens])


def jacobian_ideal(w: Poly, relative_vars: Iterable[str]) -> IdealBasis:
    """Ideal of formal partial derivatives of w in the listed variables."""
    rel = list(relative_vars)
    for v in rel:
        if v not in w.ring.variables:
            raise UnknownVariable(f"unknown variable {v!r}")
    return IdealBasis(w.ring, [w.diff(v) for v in rel])


__all__ = ["IdealBasis", "GroebnerBasis", "QuotientDimension", "buchberger", "normal_form",
           "quotient_dimension", "saturate", "jacobian_ideal", "lift", "groebner_with_cofactors",
           "monomials_of_weight", "standard_monomials", "ideal_is_unit", "ideals_equal", "ideal_sum"]
