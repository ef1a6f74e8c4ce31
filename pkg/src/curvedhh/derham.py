"""Kähler forms, the twisted de Rham complex (Ω·, dw∧) and Milnor data.

Forms are dictionaries ``{I: coefficient}`` where ``I`` is a sorted tuple of
indices into the relative variables.  Two weight conventions place the
generators dx_I of the twisted complex (W is the weight of the curvature):

* ``"top"`` – gen(I) = Σ_{i∉I} (W − wt x_i).  The differential preserves
  weight and the top forms sit at their polynomial weight, so the cohomology
  of an isolated singularity is literally the Milnor ring with its grading.
* ``"chern"`` – gen(I) = Σ_{i∈I} (wt x_i − W/2) with odd maps raising weight
  by W/2.  This is the grading in which the Chern character from Hochschild
  chains preserves weight.

Over a Laurent ground ring the complex is Z/2-folded (parity = form degree
mod 2); over a field or F[t_1..t_c] it is Z-graded with Ω^q at position q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

from .curved import LAURENT, POLY, FIELD, CurvedAlgebra
from .errors import (ImperfectGroundField, NonzeroWeightInput, NotRegularSequence, WeightError,
                     ZeroCurvature)
from .exactalg.groebner import (GroebnerBasis, IdealBasis, buchberger, jacobian_ideal,
                                quotient_dimension)
from .exactalg.poly import Poly, PolyRing
from .homcx import (Z, Z2, CohomologyTable, FiniteComplex, FreeGradedModule, ModuleMap,
                    check_complex, cohomology_window, fold_Z2)

TOP, CHERN = "top", "chern"


# ---------------------------------------------------------------- forms

def _wedge_index(i: int, I: tuple):
    """dx_i ∧ dx_I = sign · dx_J, or (0, None) when i ∈ I."""
    if i in I:
        return 0, None
    before = sum(1 for j in I if j < i)
    return (-1 if before % 2 else 1), tuple(sorted(I + (i,)))


@dataclass
class DifferentialForms:
    """A differential form Σ f_I dx_I in the relative variables."""

    ring: PolyRing
    rel: tuple
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {tuple(I): c for I, c in self.terms.items() if c}

    @classmethod
    def function(cls, f: Poly, rel) -> "DifferentialForms":
        return cls(f.ring, tuple(rel), {(): f})

    def _idx(self, name: str) -> int:
        return self.rel.index(name)

    @property
    def degrees(self) -> set:
        return {len(I) for I in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, DifferentialForms) and self.rel == other.rel and self.terms == other.terms

    def __add__(self, other: "DifferentialForms") -> "DifferentialForms":
        out = dict(self.terms)
        for I, c in other.terms.items():
            out[I] = out[I] + c if I in out else c
        return DifferentialForms(self.ring, self.rel, out)

    def __neg__(self):
        return DifferentialForms(self.ring, self.rel, {I: -c for I, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DifferentialForms":
        return DifferentialForms(self.ring, self.rel, {I: v * c for I, v in self.terms.items()})

    def wedge(self, other: "DifferentialForms") -> "DifferentialForms":
        out: dict = {}
        for I, a in self.terms.items():
            for J, b in other.terms.items():
                if set(I) & set(J):
                    continue
                merged = I + J
                inv = sum(1 for x in range(len(merged)) for y in range(x + 1, len(merged))
                          if merged[x] > merged[y])
                K = tuple(sorted(merged))
                v = a * b * (-1 if inv % 2 else 1)
                out[K] = out[K] + v if K in out else v
        return DifferentialForms(self.ring, self.rel, out)

    def weight(self) -> set:
        """Internal weights: polynomial weight plus Σ wt(x_i) over dx_i."""
        ws = set()
        for I, c in self.terms.items():
            g = sum(self.ring.weights[self.ring.index(self.rel[i])] for i in I)
            ws |= {w + g for w in c.weights()}
        return ws

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for I in sorted(self.terms, key=lambda I: (len(I), I)):
            c = self.terms[I]
            dx = "^".join("d" + self.rel[i] for i in I)
            if not I:
                parts.append(str(c))
            elif c == 1:
                parts.append(dx)
            else:
                cs = str(c)
                parts.append(f"({cs})*{dx}" if len(c) > 1 else f"{cs}*{dx}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"^".join(self.rel[i] for i in I) or "1": str(c) for I, c in sorted(self.terms.items())}


def one_form(f: Poly, rel) -> DifferentialForms:
    """df in the relative variables (the ground variables contribute nothing)."""
    rel = tuple(rel)
    return DifferentialForms(f.ring, rel, {(i,): f.diff(v) for i, v in enumerate(rel)})


def derham_d(form: DifferentialForms) -> DifferentialForms:
    """Exterior derivative d(f dx_I) = Σ_i ∂_i f dx_i ∧ dx_I."""
    out: dict = {}
    for I, c in form.terms.items():
        for i, v in enumerate(form.rel):
            sign, J = _wedge_index(i, I)
            if not sign:
                continue
            p = c.diff(v)
            if not p:
                continue
            p = p * sign
            out[J] = out[J] + p if J in out else p
    return DifferentialForms(form.ring, form.rel, out)


# ---------------------------------------------------------------- twisted de Rham

@dataclass
class TwistedDeRham:
    alg: CurvedAlgebra
    rel: tuple
    dw: DifferentialForms
    complex: FiniteComplex
    basis: dict                 # position q (Z) -> list of index sets I
    convention: str
    gen_weight: dict            # I -> generator weight

    @property
    def n(self) -> int:
        return len(self.rel)

    @property
    def mode(self) -> str:
        return self.complex.mode

    def position_of(self, q: int) -> int:
        return q % 2 if self.mode == Z2 else q

    def form_to_coords(self, form: DifferentialForms) -> dict:
        """(position, generator index) -> coefficient."""
        out = {}
        for I, c in form.terms.items():
            q = len(I)
            p = self.position_of(q)
            k = self._gen_index[p][I]
            out[(p, k)] = c
        return out

    def apply(self, form: DifferentialForms) -> DifferentialForms:
        """dw ∧ form."""
        return self.dw.wedge(form)

    def to_json(self) -> dict:
        d = self.complex.to_json()
        d["dw"] = str(self.dw)
        d["convention"] = self.convention
        return d


def _generator_weights(alg: CurvedAlgebra, rel: tuple, convention: str) -> tuple[dict, int]:
    Q = alg.Q
    wt = [Q.weights[Q.index(v)] for v in rel]
    n = len(rel)
    subsets = [I for q in range(n + 1) for I in combinations(range(n), q)]
    W = alg.W
    if alg.mode == Z2:
        if W is None:
            return {I: sum(wt[i] for i in I) for I in subsets}, 0
        if convention == TOP:
            return {I: sum(W - wt[i] for i in range(n) if i not in I) for I in subsets}, 0
        if convention == CHERN:
            h = alg.half
            return {I: sum(wt[i] - h for i in I) for I in subsets}, h
        raise ValueError(f"unknown convention {convention!r}")
    if W is None:
        return {I: sum(wt[i] for i in I) for I in subsets}, 0
    return {I: sum(wt[i] for i in I) - len(I) * W for I in subsets}, 0


def twisted_derham(alg: CurvedAlgebra, convention: str = TOP) -> TwistedDeRham:
    """(Ω·_{A/k}, dw∧) as a complex of free modules over the t-free ring."""
    Q = alg.Q
    rel = alg.relative_vars
    n = len(rel)
    dw = one_form(alg.f, rel) if alg.f else DifferentialForms(Q, rel, {})
    if alg.graded:
        gw, s = _generator_weights(alg, rel, convention)
    else:
        gw, s = {I: 0 for q in range(n + 1) for I in combinations(range(n), q)}, 0
    zmode = Z2 if alg.mode == Z2 else Z
    # assemble the Z-graded complex Ω^0 -> Ω^1 -> ... -> Ω^n, then fold if periodic
    basis = {q: list(combinations(range(n), q)) for q in range(n + 1)}
    modules = {q: FreeGradedModule([gw[I] for I in basis[q]], Z) for q in range(n + 1)}
    index = {q: {I: k for k, I in enumerate(basis[q])} for q in range(n + 1)}
    diffs = {}
    for q in range(n):
        rows = [[Q.zero() for _ in basis[q]] for _ in basis[q + 1]]
        for c, I in enumerate(basis[q]):
            for i in range(n):
                sign, J = _wedge_index(i, I)
                if not sign:
                    continue
                coeff = dw.terms.get((i,))
                if coeff:
                    rows[index[q + 1][J]][c] = rows[index[q + 1][J]][c] + coeff * sign
        diffs[q] = ModuleMap(Q, modules[q], modules[q + 1], rows, s, check=alg.graded)
    zcx = FiniteComplex(Q, modules, diffs, Z)
    if zmode == Z2:
        cx = fold_Z2(zcx)
        # record where each I landed inside the folded modules
        gindex: dict = {0: {}, 1: {}}
        counters = {0: 0, 1: 0}
        for q in range(n + 1):
            for I in basis[q]:
                gindex[q % 2][I] = counters[q % 2]
                counters[q % 2] += 1
    else:
        cx = zcx
        gindex = {q: dict(index[q]) for q in range(n + 1)}
    rep = check_complex(cx)
    if not rep.ok:
        raise AssertionError(f"internal error: (dw∧)² ≠ 0: {rep.offending}")
    tdr = TwistedDeRham(alg, rel, dw, cx, basis, convention, gw)
    tdr._gen_index = gindex
    return tdr


# ---------------------------------------------------------------- Milnor data and cohomology

@dataclass
class MilnorData:
    jacobian: list
    groebner: GroebnerBasis
    dimension: int | None
    hilbert: dict
    regular_sequence: bool
    position: int | None = None
    weight_offset: int = 0

    def to_json(self) -> dict:
        return {"jacobian": list(self.jacobian), "dim": self.dimension,
                "hilbert": {str(k): v for k, v in sorted(self.hilbert.items())},
                "regular_sequence": self.regular_sequence}


def milnor_data(alg: CurvedAlgebra, window: tuple | None = None) -> MilnorData:
    J = jacobian_ideal(alg.f, alg.relative_vars)
    gb = buchberger(J)
    qd = quotient_dimension(gb, window)
    return MilnorData([str(g) for g in J.gens], gb, qd.dimension, dict(qd.hilbert), qd.finite)


def twisted_cohomology(tdr: TwistedDeRham, mode: str = "regular_sequence",
                       weights: tuple | None = None):
    """Cohomology of (Ω·, dw∧): Milnor fast path or windowed elimination.

    Returns (CohomologyTable, MilnorData or None).
    """
    alg = tdr.alg
    n = tdr.n
    if mode == "regular_sequence":
        if not alg.f:
            raise NotRegularSequence("w = 0: the partial derivatives vanish")
        md = milnor_data(alg)
        if not md.regular_sequence:
            raise NotRegularSequence(
                "the Jacobian quotient is not finite-dimensional; the regular-sequence test is "
                "inconclusive (use window mode)")
        top = tuple(range(n))
        offset = tdr.gen_weight[top]
        pos = tdr.position_of(n)
        dims = {(pos, w + offset): c for w, c in md.hilbert.items()}
        md.position = pos
        md.weight_offset = offset
        lo = min((w for _, w in dims), default=0)
        hi = max((w for _, w in dims), default=0)
        if weights is not None:
            lo, hi = weights
            dims = {k: v for k, v in dims.items() if lo <= k[1] <= hi}
        positions = tdr.complex.positions
        full = {(p, w): dims.get((p, w), 0) for p in positions for w in range(lo, hi + 1)}
        return CohomologyTable(full, (lo, hi), tdr.mode, True, tuple(positions)), md
    if mode == "window":
        if weights is None:
            raise ValueError("window mode needs an explicit weight window")
        table = cohomology_window(tdr.complex, weights)
        md = milnor_data(alg, weights) if alg.f else None
        return table, md
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------- loci

def sing_locus(alg: CurvedAlgebra) -> IdealBasis:
    """Jacobian ideal of the t-free curvature in the relative variables."""
    return jacobian_ideal(alg.f, alg.relative_vars)


def nonreg_locus(alg: CurvedAlgebra) -> IdealBasis:
    """(w) + J(w), valid when w is a non-zero-divisor and the ground field is perfect."""
    if not alg.field.is_perfect:
        raise ImperfectGroundField(
            f"{alg.field!r} is not perfect; Nonreg is not cut out by (w) + J(w) here")
    if not alg.f:
        raise ZeroCurvature("w = 0 is a zero divisor")
    J = sing_locus(alg)
    gb = buchberger(IdealBasis(alg.Q, [alg.f] + list(J.gens)))
    return IdealBasis(alg.Q, gb.basis)


def in_nonreg_at_point(alg: CurvedAlgebra, point: Mapping[str, object]) -> bool:
    """Pointwise test at a rational point p: w ∈ m_p², i.e. w(p) = 0 and dw(p) = 0."""
    vals = {v: point[v] for v in alg.Q.variables}
    if alg.f.evaluate(vals):
        return False
    return all(not alg.f.diff(v).evaluate(vals) for v in alg.relative_vars)


# ---------------------------------------------------------------- tilde construction

def tilde_construction(field_, variables, weights, f_list, base: str = FIELD,
                       t_names=None) -> CurvedAlgebra:
    """(Q[t_1..t_c], Σ f_i t_i); over base F[t] the t_i are ground variables."""
    if not f_list:
        raise ValueError("at least one f_i is required")
    c = len(f_list)
    t_names = list(t_names) if t_names else (["t"] if c == 1 else [f"t{i + 1}" for i in range(c)])
    Q = PolyRing(field_, variables, weights)
    fs = []
    for f in f_list:
        try:
            p = Q(f)
        except Exception as exc:
            raise NonzeroWeightInput(f"{f!r} is not an element of Q: {exc}") from None
        if not p or not p.is_homogeneous():
            raise NonzeroWeightInput(f"{p} is not a nonzero weight-homogeneous element of Q")
        fs.append(p)
    W = max(p.weight() for p in fs) + 2
    tw = [W - p.weight() for p in fs]
    ring = PolyRing(field_, list(variables) + t_names, list(weights) + tw)
    w = ring.zero()
    for p, t in zip(fs, t_names):
        w = w + p.map_to(ring) * ring.gen(t)
    if base == FIELD:
        return CurvedAlgebra(ring, w, FIELD)
    if base == POLY:
        return CurvedAlgebra(ring, w, POLY, t_names)
    raise ValueError(f"unknown base {base!r}")


__all__ = [
    "TOP", "CHERN", "DifferentialForms", "TwistedDeRham", "MilnorData", "one_form", "derham_d",
    "twisted_derham", "twisted_cohomology", "milnor_data", "sing_locus", "nonreg_locus",
    "in_nonreg_at_point", "tilde_construction",
]
