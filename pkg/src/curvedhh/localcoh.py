"""Local cohomology along principal and finitely generated supports.

Cohomology is presented position by position as direct sums of cyclic
modules Q/I·e with e of a given generator weight.  For the principal support
Z = V(f), RΓ_Z(M) = Σ⁻¹ cone(M → M[1/f]), so

* if f acts nilpotently on every piece ((I : f^∞) = (1)) nothing changes;
* over F[x] with I = 0 and f = c·x^k the cokernel F[x, 1/x]/F[x] appears one
  position higher, one dimension per weight below the generator;
* anything else is reported as undetermined, with the saturations found.

The Koszul-limit probe computes Kos*(g^l) ⊗ L directly for l = 1..l_max, with
Kos*(g^l) = ⊗_i (A --g_i^l--> A) placed in degrees 0 and 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .curved import CurvedAlgebra
from .derham import TwistedDeRham, twisted_cohomology
from .errors import (ImperfectGroundField, NonCyclicPresentation, NotRegularSequence, UnitInput,
                     ZeroDivisorInput)
from .exactalg.groebner import (IdealBasis, buchberger, jacobian_ideal, lift, normal_form,
                                quotient_dimension, saturate)
from .exactalg.poly import Poly, PolyRing
from .homcx import (Z, Z2, CohomologyTable, FiniteComplex, FreeGradedModule, ModuleMap,
                    cohomology_window, tensor)

FG, NOT_FG, UNDETERMINED = "finitely_generated", "not_finitely_generated", "undetermined"


# ---------------------------------------------------------------- presentations

@dataclass(frozen=True)
class CyclicPiece:
    """Q/I placed at a position, generated in the given weight."""

    position: int
    ideal: IdealBasis
    gen_weight: int = 0

    def to_json(self) -> dict:
        return {"position": self.position, "ideal": [str(g) for g in self.ideal.gens],
                "gen_weight": self.gen_weight}


@dataclass
class Presentation:
    ring: PolyRing
    pieces: list
    mode: str = Z2

    def dims(self, window: tuple) -> dict:
        lo, hi = window
        out: dict = {}
        for pc in self.pieces:
            gb = buchberger(pc.ideal) if pc.ideal.gens else None
            qd = quotient_dimension(gb, (lo - pc.gen_weight, hi - pc.gen_weight)) if gb else None
            for w in range(lo, hi + 1):
                if gb is None:
                    from .exactalg.groebner import monomials_of_weight
                    c = len(monomials_of_weight(self.ring, w - pc.gen_weight))
                else:
                    c = qd.hilbert.get(w - pc.gen_weight, 0)
                out[(pc.position, w)] = out.get((pc.position, w), 0) + c
        return out


def presentation_from_derham(tdr: TwistedDeRham) -> Presentation:
    """Cyclic pieces for the twisted de Rham cohomology, when it is known to be cyclic.

    Two cases are exact: the partials form a regular sequence (H = Q/J in top
    degree) or dw = 0 (H = Ω itself, one free piece per dx_I).
    """
    Q = tdr.alg.Q
    n = tdr.n
    if not tdr.dw:
        pieces = [CyclicPiece(tdr.position_of(len(I)), IdealBasis(Q, ()), tdr.gen_weight[I])
                  for q in range(n + 1) for I in tdr.basis[q]]
        return Presentation(Q, pieces, tdr.mode)
    try:
        _, md = twisted_cohomology(tdr, "regular_sequence")
    except NotRegularSequence as exc:
        raise NonCyclicPresentation(f"no cyclic presentation of the cohomology is known: {exc}") from None
    J = IdealBasis(Q, md.groebner.basis)
    return Presentation(Q, [CyclicPiece(md.position, J, md.weight_offset)], tdr.mode)


# ---------------------------------------------------------------- RΓ tables

@dataclass
class RGammaTable:
    dims: dict | None           # (position, weight) -> dim; None when undetermined
    window: tuple
    verdict: str
    path: str
    saturations: list = field(default_factory=list)
    witness: dict | None = None
    mode: str = Z2

    def get(self, p: int, w: int) -> int:
        return self.dims.get((p, w), 0)

    def total(self, p: int | None = None) -> int:
        return sum(v for (q, _), v in self.dims.items() if p is None or q == p)

    def nonzero(self) -> dict:
        return {k: v for k, v in sorted(self.dims.items()) if v}

    def as_table(self) -> CohomologyTable:
        return CohomologyTable(dict(self.dims), self.window, self.mode, True,
                               tuple(sorted({p for p, _ in self.dims})))

    def to_json(self) -> dict:
        dims = None
        if self.dims is not None:
            dims = {}
            for (p, w), v in sorted(self.dims.items()):
                dims.setdefault(str(p), {})[str(w)] = v
        return {"verdict": self.verdict, "path": self.path, "window": list(self.window),
                "dims": dims, "saturations": self.saturations, "witness": self.witness}


def _next(mode: str, p: int) -> int:
    return (p + 1) % 2 if mode == Z2 else p + 1


def _univariate_monomial(f: Poly):
    """(variable index, k) if f = c·x^k in a one-variable ring with k >= 1."""
    ring = f.ring
    if ring.nvars != 1 or len(f.terms) != 1:
        return None
    (e, _), = f.terms.items()
    return (0, e[0]) if e[0] >= 1 else None


def rgamma_principal(H, f, window: tuple) -> RGammaTable:
    """RΓ_{V(f)} of a cohomology given as cyclic pieces (or a twisted de Rham complex)."""
    pres = presentation_from_derham(H) if isinstance(H, TwistedDeRham) else H
    if not isinstance(pres, Presentation):
        raise NonCyclicPresentation("expected cyclic pieces Q/I per position")
    ring = pres.ring
    f = ring(f) if not isinstance(f, Poly) else f
    if f.ring.laurent:
        from .exactalg.poly import strip_laurent
        f = strip_laurent(f)[0]
    if not f:
        raise ZeroDivisorInput("f must be nonzero")
    lo, hi = window
    mode = pres.mode
    if f.is_constant():
        dims = {(p, w): 0 for p in sorted({pc.position for pc in pres.pieces} | {0, 1})
                for w in range(lo, hi + 1)}
        return RGammaTable(dims, (lo, hi), FG, "unit", [], {"reason": "f is a unit: cone of an isomorphism"}, mode)
    sats = []
    unit, free = [], []
    for pc in pres.pieces:
        S = saturate(pc.ideal, f) if pc.ideal.gens else IdealBasis(ring, ())
        gb = buchberger(S) if S.gens else None
        sats.append({"position": pc.position, "ideal": [str(g) for g in pc.ideal.gens],
                     "saturation": gb.strings() if gb else ["0"]})
        if gb is not None and gb.is_unit:
            unit.append(pc)
        else:
            free.append((pc, gb))
    positions = sorted({pc.position for pc in pres.pieces} | ({0, 1} if mode == Z2 else set()))
    if not free:
        dims = Presentation(ring, unit, mode).dims((lo, hi))
        dims = {(p, w): dims.get((p, w), 0) for p in positions for w in range(lo, hi + 1)}
        return RGammaTable(dims, (lo, hi), FG, "a", sats, None, mode)
    mono = _univariate_monomial(f)
    if mono is not None and all(not pc.ideal.gens for pc, _ in free):
        a = ring.weights[0]
        dims = Presentation(ring, unit, mode).dims((lo, hi))
        family = []
        for pc, _ in free:
            q = _next(mode, pc.position)
            positions = sorted(set(positions) | {q})
            # F[x, 1/x]/F[x]·e has one basis vector x^{-j} e in weight gen_weight - j·a, j >= 1
            for w in range(lo, hi + 1):
                j, r = divmod(pc.gen_weight - w, a)
                if r == 0 and j >= 1:
                    dims[(q, w)] = dims.get((q, w), 0) + 1
            family.append({"position": q, "weights": f"{pc.gen_weight} - {a}*j for j >= 1"})
        dims = {(p, w): dims.get((p, w), 0) for p in positions for w in range(lo, hi + 1)}
        witness = {"infinite_family": family,
                   "nonunit_saturations": [s for s in sats if s["saturation"] != ["1"]]}
        return RGammaTable(dims, (lo, hi), NOT_FG, "b", sats, witness, mode)
    return RGammaTable(None, (lo, hi), UNDETERMINED, "c", sats, None, mode)


# ---------------------------------------------------------------- support tests

@dataclass
class SupportVerdict:
    value: bool
    certificate: list          # saturation ideal (strings)
    generator: str | None = None

    def __bool__(self):
        return self.value

    def to_json(self) -> dict:
        return {"value": self.value, "certificate": self.certificate, "generator": self.generator}


def not_supported_on_V(I: IdealBasis, Zgens) -> SupportVerdict:
    """Q/I is not supported on V(Z) iff (I : g^∞) ≠ (1) for some generator g of Z."""
    gens = [Zgens] if isinstance(Zgens, Poly) else list(Zgens)
    gens = [I.ring(g) for g in gens]
    if buchberger(I).is_unit:
        return SupportVerdict(False, ["1"], None)
    last = ["1"]
    for g in gens:
        S = saturate(I, g)
        gb = buchberger(S)
        if not gb.is_unit:
            return SupportVerdict(True, gb.strings(), str(g))
        last = gb.strings()
    return SupportVerdict(False, last, None)


@dataclass
class SmoothnessVerdict:
    value: bool
    jacobian: list
    saturation: list                   # generators of (J : f^∞)
    ideal: list                        # generators of (J : f^∞) + (f)
    one: list | None = None            # cofactors with Σ c_i·ideal_i = 1
    memberships: list | None = None    # per saturation generator k: m and cofactors of f^m·k in J
    failing: list | None = None        # reduced basis of the ideal when it is proper

    def __bool__(self):
        return self.value

    def verify(self, f: Poly) -> bool:
        if not self.value:
            return True
        ring = f.ring
        K = [ring(g) for g in self.ideal]
        total = ring.zero()
        for c, g in zip(self.one, K):
            total = total + ring(c) * g
        if total != ring.one():
            return False
        J = [ring(g) for g in self.jacobian]
        for entry in self.memberships:
            k = ring(entry["element"])
            lhs = f ** entry["m"] * k
            rhs = ring.zero()
            for c, g in zip(entry["cofactors"], J):
                rhs = rhs + ring(c) * g
            if lhs != rhs:
                return False
        return True

    def to_json(self) -> dict:
        return {"value": self.value, "jacobian": self.jacobian, "saturation": self.saturation,
                "ideal": self.ideal, "one": self.one, "memberships": self.memberships,
                "failing": self.failing}


def smoothness_check(ring: PolyRing, f, max_power: int = 32) -> SmoothnessVerdict:
    """Decide 1 ∈ (J : f^∞) + (f), with an explicit membership certificate."""
    f = ring(f)
    if not ring.field.is_perfect:
        raise ImperfectGroundField(f"{ring.field!r} is not perfect")
    if not f:
        raise ZeroDivisorInput("f must be nonzero")
    if f.is_constant():
        raise UnitInput("f is a unit")
    J = jacobian_ideal(f, ring.variables)
    Jgens = [g for g in J.gens if g]
    S = saturate(IdealBasis(ring, Jgens), f) if Jgens else IdealBasis(ring, ())
    sat = list(buchberger(S).basis) if S.gens else []
    K = sat + [f]
    gbK = buchberger(IdealBasis(ring, K))
    jac = [str(g) for g in Jgens]
    if not gbK.is_unit:
        return SmoothnessVerdict(False, jac, [str(g) for g in sat] or ["0"], [str(g) for g in K],
                                 failing=gbK.strings())
    one = lift(ring.one(), K)
    memberships = []
    for k in sat:
        for m in range(0, max_power + 1):
            cof = lift(f ** m * k, Jgens)
            if cof is not None:
                memberships.append({"element": str(k), "m": m, "cofactors": [str(c) for c in cof]})
                break
        else:
            raise AssertionError("internal error: saturation element without a power certificate")
    v = SmoothnessVerdict(True, jac, [str(g) for g in sat], [str(g) for g in K],
                          [str(c) for c in one], memberships)
    if not v.verify(f):
        raise AssertionError("internal error: smoothness certificate failed verification")
    return v


# ---------------------------------------------------------------- Čech and Koszul limits

@dataclass
class CechComplex:
    gens: tuple
    positions: dict            # p -> list of index subsets S (localize at Π_{i∈S} g_i)

    def to_json(self) -> dict:
        return {"gens": [str(g) for g in self.gens],
                "positions": {str(p): ["*".join(str(self.gens[i]) for i in S) or "1" for S in subs]
                              for p, subs in self.positions.items()}}


def cech_complex(gens: Sequence[Poly]) -> CechComplex:
    gens = tuple(gens)
    if any(not g for g in gens):
        raise ZeroDivisorInput("Čech generators must be nonzero")
    c = len(gens)
    return CechComplex(gens, {p: list(combinations(range(c), p)) for p in range(c + 1)})


def koszul_dual(ring: PolyRing, gens: Sequence[Poly], l: int, mode: str = Z, shift: int = 0) -> FiniteComplex:
    """Kos*(g^l) = ⊗_i (A --g_i^l--> A), A in degree 0."""
    out = None
    for g in gens:
        gl = g ** l
        wt = gl.weight() if gl else 0
        M0 = FreeGradedModule([0], mode)
        M1 = FreeGradedModule([shift - wt], mode)
        if mode == Z2:
            cx = FiniteComplex(ring, {0: M0, 1: M1},
                               {0: ModuleMap(ring, M0, M1, [[gl]], shift),
                                1: ModuleMap(ring, M1, M0, None, shift)}, Z2)
        else:
            cx = FiniteComplex(ring, {0: M0, 1: M1}, {0: ModuleMap(ring, M0, M1, [[gl]], shift)}, Z)
        out = cx if out is None else tensor(out, cx)
    return out


@dataclass
class KoszulLimitReport:
    window: tuple
    per_level: dict            # l -> {(p, w): dim}
    stabilized: dict           # (p, w) -> bool
    values: dict               # (p, w) -> dim at the last level

    @property
    def all_stabilized(self) -> bool:
        return all(self.stabilized.values())

    def to_json(self) -> dict:
        def enc(d):
            out: dict = {}
            for (p, w), v in sorted(d.items()):
                out.setdefault(str(p), {})[str(w)] = v
            return out
        return {"window": list(self.window),
                "per_level": {str(l): enc(d) for l, d in sorted(self.per_level.items())},
                "stabilized": enc(self.stabilized), "values": enc(self.values),
                "all_stabilized": self.all_stabilized}


def rgamma_koszul_limit(L: FiniteComplex, gens: Sequence, l_max: int, window: tuple,
                        positions: Sequence[int] | None = None) -> KoszulLimitReport:
    """Per-slice cohomology of Kos*(g^l) ⊗ L for l = 1..l_max.

    A slice is flagged stabilized when the last two levels agree. This is a
    heuristic: choose l_max so that Kos*(g^l) already reaches the lowest weight
    of the window before the last two levels, otherwise early levels can agree
    by accident.
    """
    ring = L.ring
    gens = [ring(g) if not isinstance(g, Poly) else g for g in gens]
    if any(not g for g in gens):
        raise ZeroDivisorInput("Koszul generators must be nonzero")
    shifts = {d.shift for d in L.diffs.values()}
    shift = shifts.pop() if len(shifts) == 1 else 0
    per_level = {}
    for l in range(1, l_max + 1):
        K = koszul_dual(ring, gens, l, L.mode, shift)
        T = tensor(K, L)
        pos = positions if positions is not None else T.positions
        per_level[l] = cohomology_window(T, window, pos).dims
    last = per_level[l_max]
    prev = per_level.get(l_max - 1)
    stabilized = {k: prev is not None and prev.get(k, 0) == v for k, v in last.items()}
    return KoszulLimitReport(tuple(window), per_level, stabilized, dict(last))


__all__ = [
    "FG", "NOT_FG", "UNDETERMINED", "CyclicPiece", "Presentation", "presentation_from_derham",
    "RGammaTable", "rgamma_principal", "SupportVerdict", "not_supported_on_V", "SmoothnessVerdict",
    "smoothness_check", "CechComplex", "cech_complex", "koszul_dual", "KoszulLimitReport",
    "rgamma_koszul_limit",
]
