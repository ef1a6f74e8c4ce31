"""Bounded complexes of free weighted modules over a polynomial ring.

Cohomology is computed one (position, weight) slice at a time: every free
module is expanded against the monomials of the right weight, and the two
differentials touching the slice become exact scalar matrices.

Sign conventions (used throughout the package):

* suspension: (Σⁿ C)^p = C^{p+n} with differential (-1)^n d_C;
* cone of f: M -> N is N ⊕ ΣM with d(n, m) = (d_N n + f m, -d_M m);
* tensor: d(a ⊗ b) = d a ⊗ b + (-1)^{|a|} a ⊗ d b;
* Hom: ∂g = d_N g - (-1)^{|g|} g d_M.

In Z/2 mode positions are parities 0 and 1 and every differential may carry
a weight shift (the twisted periodic grading); generator weights are the
weights of the generators themselves, so a map's entry from source generator c
to target generator r has weight w_source[c] - w_target[r] + shift.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Mapping, Sequence

from .errors import AmbientMismatch, InfiniteSlice, NotACycle, NotChainMap, WeightError
from .exactalg.groebner import monomials_of_weight
from .exactalg.poly import Poly, PolyRing
from .linalg import SparseMatrix, nullspace, rank, solve

Z, Z2 = "Z", "Z2"


# ---------------------------------------------------------------- modules and maps

@dataclass(frozen=True)
class FreeGradedModule:
    weights: tuple
    mode: str = Z

    def __init__(self, weights: Sequence[int] = (), mode: str = Z):
        object.__setattr__(self, "weights", tuple(int(w) for w in weights))
        object.__setattr__(self, "mode", mode)

    @property
    def rank(self) -> int:
        return len(self.weights)

    def __add__(self, other: "FreeGradedModule") -> "FreeGradedModule":
        return FreeGradedModule(self.weights + other.weights, self.mode)


def _zero_matrix(ring: PolyRing, rows: int, cols: int):
    z = ring.zero()
    return tuple(tuple(z for _ in range(cols)) for _ in range(rows))


def _as_matrix(ring: PolyRing, matrix, rows: int, cols: int):
    if matrix is None:
        return _zero_matrix(ring, rows, cols)
    out = tuple(tuple(ring(e) for e in row) for row in matrix)
    if len(out) != rows or any(len(r) != cols for r in out):
        raise ValueError(f"matrix shape mismatch: expected {rows}x{cols}")
    return out


@dataclass(frozen=True)
class ModuleMap:
    """Matrix of polynomials; entry (r, c) is the image of source generator c on target generator r."""

    ring: PolyRing
    source: FreeGradedModule
    target: FreeGradedModule
    matrix: tuple
    shift: int = 0

    def __init__(self, ring: PolyRing, source: FreeGradedModule, target: FreeGradedModule,
                 matrix=None, shift: int = 0, check: bool = True):
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", _as_matrix(ring, matrix, target.rank, source.rank))
        object.__setattr__(self, "shift", int(shift))
        if check:
            self.check_homogeneous()

    def check_homogeneous(self):
        for r, row in enumerate(self.matrix):
            for c, e in enumerate(row):
                if e:
                    want = self.source.weights[c] - self.target.weights[r] + self.shift
                    if e.weights() != {want}:
                        raise WeightError(
                            f"entry ({r},{c}) = {e} should have weight {want}, has {sorted(e.weights())}")

    def is_zero(self) -> bool:
        return all(not e for row in self.matrix for e in row)

    def entry(self, r: int, c: int) -> Poly:
        return self.matrix[r][c]

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self ∘ other."""
        if other.target.weights != self.source.weights:
            raise AmbientMismatch("composition of incompatible maps")
        z = self.ring.zero()
        rows = []
        for r in range(self.target.rank):
            row = []
            for c in range(other.source.rank):
                s = z
                for k in range(self.source.rank):
                    a, b = self.matrix[r][k], other.matrix[k][c]
                    if a and b:
                        s = s + a * b
                row.append(s)
            rows.append(row)
        return ModuleMap(self.ring, other.source, self.target, rows, self.shift + other.shift,
                         check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        rows = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.matrix, other.matrix)]
        return ModuleMap(self.ring, self.source, self.target, rows, self.shift, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        rows = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.matrix, other.matrix)]
        return ModuleMap(self.ring, self.source, self.target, rows, self.shift, check=False)

    def scale(self, c) -> "ModuleMap":
        rows = [[e * c for e in row] for row in self.matrix]
        return ModuleMap(self.ring, self.source, self.target, rows, self.shift, check=False)

    def to_json(self) -> dict:
        return {"shift": self.shift, "source": list(self.source.weights),
                "target": list(self.target.weights),
                "matrix": [[str(e) for e in row] for row in self.matrix]}


def identity_map(ring: PolyRing, M: FreeGradedModule, scalar: Poly | None = None) -> ModuleMap:
    s = ring.one() if scalar is None else scalar
    sw = 0 if not s else s.weight()
    rows = [[s if r == c else ring.zero() for c in range(M.rank)] for r in range(M.rank)]
    return ModuleMap(ring, M, M, rows, sw)


# ---------------------------------------------------------------- complexes

@dataclass
class FiniteComplex:
    """A bounded Z-graded complex, or a Z/2-graded one with positions 0 and 1.

    ``diffs[p]`` maps position p to p+1 (to 0 from 1 in Z/2 mode).  Curved
    objects (matrix factorizations) set ``curved=True`` so that d∘d = 0 is not
    demanded.
    """

    ring: PolyRing
    modules: dict
    diffs: dict
    mode: str = Z
    curved: bool = False

    def __post_init__(self):
        self.modules = {int(p): m for p, m in self.modules.items()}
        if self.mode == Z2:
            for p in (0, 1):
                self.modules.setdefault(p, FreeGradedModule((), Z2))
        for p in list(self.diffs):
            d = self.diffs[p]
            q = self.next(p)
            if d.source.weights != self.module(p).weights or d.target.weights != self.module(q).weights:
                raise AmbientMismatch(f"differential at {p} does not match the modules")

    # -- positions
    def next(self, p: int) -> int:
        return (p + 1) % 2 if self.mode == Z2 else p + 1

    def prev(self, p: int) -> int:
        return (p - 1) % 2 if self.mode == Z2 else p - 1

    @property
    def positions(self) -> list[int]:
        if self.mode == Z2:
            return [0, 1]
        return sorted(p for p, m in self.modules.items())

    def module(self, p: int) -> FreeGradedModule:
        if self.mode == Z2:
            p %= 2
        return self.modules.get(p, FreeGradedModule((), self.mode))

    def diff(self, p: int) -> ModuleMap:
        if self.mode == Z2:
            p %= 2
        d = self.diffs.get(p)
        if d is None:
            d = ModuleMap(self.ring, self.module(p), self.module(self.next(p)), None,
                          self.default_shift(p))
        return d

    def default_shift(self, p: int) -> int:
        for d in self.diffs.values():
            return d.shift
        return 0

    def shift_at(self, p: int) -> int:
        return self.diff(p).shift

    # -- slices
    def slice_basis(self, p: int, weight: int) -> list[tuple[int, tuple]]:
        M = self.module(p)
        out = []
        for j, w in enumerate(M.weights):
            for e in _monomials(self.ring, weight - w):
                out.append((j, e))
        return out

    def slice_matrix(self, p: int, weight: int) -> tuple[SparseMatrix, list, list]:
        """Scalar matrix of the differential from slice (p, weight) to (p+1, weight+shift)."""
        d = self.diff(p)
        src = self.slice_basis(p, weight)
        tgt = self.slice_basis(self.next(p), weight + d.shift)
        return expand_map(d, src, tgt), src, tgt

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "curved": self.curved,
            "variables": list(self.ring.variables),
            "weights": list(self.ring.weights),
            "field": repr(self.ring.field),
            "modules": {str(p): list(self.module(p).weights) for p in self.positions},
            "differentials": {str(p): self.diff(p).to_json() for p in self.positions
                              if self.mode == Z2 or self.next(p) in self.modules},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


@lru_cache(maxsize=4096)
def _monomials_cached(ambient, order, weight):
    field_, variables, weights, laurent = ambient
    ring = PolyRing(field_, variables, weights, laurent, order)
    return tuple(monomials_of_weight(ring, weight))


def _monomials(ring: PolyRing, weight: int):
    return _monomials_cached(ring.ambient, ring.order, weight)


def expand_map(d: ModuleMap, src: list, tgt: list) -> SparseMatrix:
    index = {b: i for i, b in enumerate(tgt)}
    M = SparseMatrix(len(tgt), len(src))
    for col, (j, e) in enumerate(src):
        for r in range(d.target.rank):
            entry = d.matrix[r][j]
            if not entry:
                continue
            for f, c in entry.terms.items():
                key = (r, tuple(a + b for a, b in zip(e, f)))
                row = index.get(key)
                if row is None:
                    raise WeightError("map is not homogeneous on this slice")
                M.add(row, col, c)
    return M


def complex_from_maps(ring: PolyRing, maps: Sequence[ModuleMap], start: int = 0, mode: str = Z,
                      curved: bool = False) -> FiniteComplex:
    """Z-graded complex M_start -> M_{start+1} -> ... from consecutive maps."""
    modules = {start: maps[0].source}
    diffs = {}
    for k, m in enumerate(maps):
        modules[start + k + 1] = m.target
        diffs[start + k] = m
    return FiniteComplex(ring, modules, diffs, mode, curved)


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    ok: bool
    offending: dict | None = None

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "offending": self.offending}


def check_complex(cx: FiniteComplex) -> ValidationReport:
    """Verify d∘d = 0 entrywise, reporting the first nonzero composite entry."""
    for p in cx.positions:
        q = cx.next(p)
        if cx.mode == Z and (q not in cx.modules or cx.next(q) not in cx.modules):
            continue
        comp = cx.diff(q).compose(cx.diff(p))
        for r, row in enumerate(comp.matrix):
            for c, e in enumerate(row):
                if e:
                    return ValidationReport(False, {"position": p, "row": r, "col": c, "value": str(e)})
    return ValidationReport(True)


# ---------------------------------------------------------------- cohomology

@dataclass
class CohomologyTable:
    dims: dict
    window: tuple
    mode: str = Z
    complete: bool = True
    positions: tuple = ()

    def get(self, p: int, w: int) -> int:
        return self.dims.get((p, w), 0)

    def total(self, p: int | None = None) -> int:
        return sum(v for (q, _), v in self.dims.items() if p is None or q == p)

    def nonzero(self) -> dict:
        return {k: v for k, v in sorted(self.dims.items()) if v}

    def weights_at(self, p: int) -> list[int]:
        return sorted(w for (q, w), v in self.dims.items() if q == p and v)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["position", "weight", "dim"])
        for (p, w), v in sorted(self.dims.items()):
            wr.writerow([p, w, v])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, window: tuple, mode: str = Z) -> "CohomologyTable":
        rd = csv.DictReader(io.StringIO(text))
        dims = {(int(r["position"]), int(r["weight"])): int(r["dim"]) for r in rd}
        return cls(dims, tuple(window), mode, True, tuple(sorted({p for p, _ in dims})))

    def to_json(self) -> dict:
        by_pos: dict = {}
        for (p, w), v in sorted(self.dims.items()):
            by_pos.setdefault(str(p), {})[str(w)] = v
        return {"mode": self.mode, "window": list(self.window), "complete": self.complete,
                "dims": by_pos}


def _slice_ranks(cx: FiniteComplex, p: int, weight: int):
    """(dim of slice, rank of outgoing d, rank of incoming d)."""
    F = cx.ring.field
    basis = cx.slice_basis(p, weight)
    n = len(basis)
    if n == 0:
        return 0, 0, 0
    out_rank = 0
    has_out = cx.mode == Z2 or cx.next(p) in cx.modules
    if has_out:
        M, _, _ = cx.slice_matrix(p, weight)
        out_rank = rank(M, F)
    in_rank = 0
    q = cx.prev(p)
    if cx.mode == Z2 or q in cx.modules:
        s = cx.shift_at(q)
        M, _, _ = cx.slice_matrix(q, weight - s)
        in_rank = rank(M, F)
    return n, out_rank, in_rank


def cohomology_window(cx: FiniteComplex, weights: tuple, positions: Sequence[int] | None = None,
                      jobs: int = 1) -> CohomologyTable:
    """Per-slice dimensions dim ker - dim im for every position and weight in the window."""
    if weights is None:
        raise ValueError("an explicit weight window is required")
    lo, hi = weights
    pos = list(positions) if positions is not None else cx.positions
    tasks = [(p, w) for p in pos for w in range(lo, hi + 1)]

    def work(pw):
        p, w = pw
        n, ro, ri = _slice_ranks(cx, p, w)
        return pw, n - ro - ri

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as ex:
            results = list(ex.map(work, tasks))
    else:
        results = [work(t) for t in tasks]
    dims = dict(results)
    return CohomologyTable(dims, (lo, hi), cx.mode, True, tuple(pos))


def strand(cx: FiniteComplex, weight: int) -> list[tuple[int, int]]:
    """The slices (p, w_p) joined by the differential, starting at weight at the lowest position."""
    if cx.mode == Z2:
        if any(not d.is_zero() and d.shift for d in cx.diffs.values()):
            raise WeightError("a Z/2 strand with nonzero weight shift does not close up")
        return [(p, weight) for p in cx.positions]
    out, w = [], weight
    for p in cx.positions:
        out.append((p, w))
        w += cx.shift_at(p)
    return out


def euler_characteristic(cx: FiniteComplex, weight: int) -> int:
    """Alternating sum of slice dimensions along the strand through ``weight`` at the lowest position."""
    return sum((-1) ** (p % 2) * len(cx.slice_basis(p, w)) for p, w in strand(cx, weight))


# ---------------------------------------------------------------- constructions

@dataclass
class ChainMap:
    """Degree-zero map of complexes given per position."""

    source: FiniteComplex
    target: FiniteComplex
    components: dict

    def component(self, p: int) -> ModuleMap:
        c = self.components.get(p)
        if c is None:
            ring = self.source.ring
            c = ModuleMap(ring, self.source.module(p), self.target.module(p), None, 0)
        return c

    def check(self):
        S, T = self.source, self.target
        for p in sorted(set(S.positions) | set(T.positions)):
            q = S.next(p)
            lhs = T.diff(p).compose(self.component(p)) if (S.mode == Z2 or q in T.modules) else None
            rhs = self.component(q).compose(S.diff(p)) if (S.mode == Z2 or q in S.modules) else None
            if lhs is None and rhs is None:
                continue
            diff_rows = _matrix_sub(lhs, rhs, T.module(q).rank, S.module(p).rank, S.ring)
            if any(e for row in diff_rows for e in row):
                raise NotChainMap(f"d f != f d at position {p}")


def _matrix_sub(a, b, rows, cols, ring):
    z = ring.zero()
    am = a.matrix if a is not None else [[z] * cols for _ in range(rows)]
    bm = b.matrix if b is not None else [[z] * cols for _ in range(rows)]
    return [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(am, bm)]


def _block(ring, blocks, row_mods, col_mods, shift, check=True):
    """Assemble a block matrix; blocks[(i, j)] is a ModuleMap or None."""
    rows = []
    for i, rm in enumerate(row_mods):
        for r in range(rm.rank):
            row = []
            for j, cm in enumerate(col_mods):
                b = blocks.get((i, j))
                for c in range(cm.rank):
                    row.append(b.matrix[r][c] if b is not None else ring.zero())
            rows.append(row)
    src = FreeGradedModule(sum((m.weights for m in col_mods), ()), col_mods[0].mode if col_mods else Z)
    tgt = FreeGradedModule(sum((m.weights for m in row_mods), ()), row_mods[0].mode if row_mods else Z)
    return ModuleMap(ring, src, tgt, rows, shift, check=check)


def cone(f: ChainMap) -> FiniteComplex:
    """Mapping cone N ⊕ ΣM of f: M -> N.

    When the differentials carry a weight shift s, the generators of the ΣM
    summand are lowered by s, so the slice (p, w) of ΣM is the slice
    (p + 1, w + s) of M.
    """
    f.check()
    M, N = f.source, f.target
    ring = M.ring
    if M.mode == Z2:
        positions = [0, 1]
    else:
        lo = min(min(N.positions, default=0), min(M.positions, default=0) - 1)
        hi = max(max(N.positions, default=0), max(M.positions, default=0) - 1)
        positions = list(range(lo, hi + 1))
    s = _common_shift(M, N)

    def sm(p):
        # the suspended copy of M is regraded by -s so that f becomes a component of d
        m = M.module(p)
        return FreeGradedModule([w - s for w in m.weights], m.mode)

    def lift(d: ModuleMap, src, tgt, sign=1):
        return ModuleMap(ring, src, tgt, d.scale(sign).matrix, s)

    modules, diffs = {}, {}
    for p in positions:
        modules[p] = N.module(p) + sm(M.next(p))
    for p in positions:
        q = M.next(p)
        if M.mode == Z and q not in modules:
            continue
        r = M.next(q)
        blocks = {(0, 0): N.diff(p), (0, 1): lift(f.component(q), sm(q), N.module(q)),
                  (1, 1): lift(M.diff(q), sm(q), sm(r), -1)}
        diffs[p] = _block(ring, blocks, [N.module(q), sm(r)], [N.module(p), sm(q)], s)
    return FiniteComplex(ring, modules, diffs, M.mode, M.curved or N.curved)


def shift(cx: FiniteComplex, n: int) -> FiniteComplex:
    """Σⁿ cx: position p holds cx^{p+n}, differential multiplied by (-1)^n."""
    sign = -1 if n % 2 else 1
    if cx.mode == Z2:
        if n % 2 == 0:
            return cx
        modules = {p: cx.module(p + 1) for p in (0, 1)}
        diffs = {p: cx.diff(p + 1).scale(sign) for p in (0, 1)}
        return FiniteComplex(cx.ring, modules, diffs, Z2, cx.curved)
    modules = {p - n: m for p, m in cx.modules.items()}
    diffs = {p - n: d.scale(sign) for p, d in cx.diffs.items()}
    return FiniteComplex(cx.ring, modules, diffs, Z, cx.curved)


def fold_Z2(cx: FiniteComplex) -> FiniteComplex:
    """Collapse a Z-graded complex to parities, keeping the weight grading."""
    if cx.mode != Z:
        raise ValueError("fold_Z2 expects a Z-graded complex")
    pos = cx.positions
    even = [p for p in pos if p % 2 == 0]
    odd = [p for p in pos if p % 2 == 1]
    shifts = {d.shift for d in cx.diffs.values() if not d.is_zero()}
    if len(shifts) > 1:
        raise WeightError("folding needs a single weight shift for all differentials")
    s = shifts.pop() if shifts else 0
    groups = {0: even, 1: odd}
    mods = {e: [cx.module(p) for p in groups[e]] for e in (0, 1)}
    modules = {e: FreeGradedModule(sum((m.weights for m in mods[e]), ()), Z2) for e in (0, 1)}
    diffs = {}
    for e in (0, 1):
        blocks = {}
        for j, p in enumerate(groups[e]):
            if p + 1 in cx.modules:
                i = groups[1 - e].index(p + 1)
                d = cx.diff(p)
                blocks[(i, j)] = ModuleMap(cx.ring, FreeGradedModule(d.source.weights, Z2),
                                           FreeGradedModule(d.target.weights, Z2), d.matrix, s,
                                           check=False)
        rows = [FreeGradedModule(m.weights, Z2) for m in mods[1 - e]] or [FreeGradedModule((), Z2)]
        cols = [FreeGradedModule(m.weights, Z2) for m in mods[e]] or [FreeGradedModule((), Z2)]
        # the blocks were validated when the Z-graded complex was built
        diffs[e] = _block(cx.ring, blocks, rows, cols, s, check=False)
    return FiniteComplex(cx.ring, modules, diffs, Z2, cx.curved)


def _check_same_ring(a: FiniteComplex, b: FiniteComplex):
    if a.ring != b.ring:
        raise AmbientMismatch("complexes live over different rings")
    if a.mode != b.mode:
        raise AmbientMismatch("cannot mix Z and Z/2 complexes")


def _common_shift(a: FiniteComplex, b: FiniteComplex) -> int:
    shifts = {d.shift for d in list(a.diffs.values()) + list(b.diffs.values()) if not d.is_zero()}
    if len(shifts) > 1:
        raise WeightError("differentials carry different weight shifts")
    if shifts:
        return shifts.pop()
    ds = [d.shift for d in list(a.diffs.values()) + list(b.diffs.values())]
    return ds[0] if ds else 0


def tensor(A: FiniteComplex, B: FiniteComplex) -> FiniteComplex:
    """Total complex of A ⊗ B with d(a⊗b) = da⊗b + (-1)^{|a|} a⊗db."""
    _check_same_ring(A, B)
    ring = A.ring
    s = _common_shift(A, B)
    if A.mode == Z2:
        total_pos = [0, 1]
        pairs = {n: [(p, (n - p) % 2) for p in (0, 1)] for n in (0, 1)}
    else:
        total_pos = sorted({p + q for p in A.positions for q in B.positions})
        pairs = {n: [(p, n - p) for p in A.positions if n - p in B.modules] for n in total_pos}
    modules, index = {}, {}
    for n in total_pos:
        ws, idx = [], {}
        for p, q in pairs[n]:
            for i, wa in enumerate(A.module(p).weights):
                for j, wb in enumerate(B.module(q).weights):
                    idx[(p, q, i, j)] = len(ws)
                    ws.append(wa + wb)
        modules[n] = FreeGradedModule(ws, A.mode)
        index[n] = idx
    diffs = {}
    for n in total_pos:
        m = A.next(n)
        if A.mode == Z and m not in modules:
            continue
        rows = [[ring.zero() for _ in range(modules[n].rank)] for _ in range(modules[m].rank)]
        for (p, q, i, j), col in index[n].items():
            pa = A.next(p)
            if A.mode == Z2 or pa in A.modules:
                dA = A.diff(p)
                for r in range(dA.target.rank):
                    e = dA.matrix[r][i]
                    if e:
                        rows[index[m][(pa, q, r, j)]][col] += e
            qb = B.next(q)
            if B.mode == Z2 or qb in B.modules:
                dB = B.diff(q)
                sign = -1 if p % 2 else 1
                for r in range(dB.target.rank):
                    e = dB.matrix[r][j]
                    if e:
                        rows[index[m][(p, qb, i, r)]][col] += e * sign
        diffs[n] = ModuleMap(ring, modules[n], modules[m], rows, s)
    return FiniteComplex(ring, modules, diffs, A.mode, A.curved or B.curved)


@dataclass
class HomComplex(FiniteComplex):
    """Hom(M, N) with generators (p, c, r): source gen c at position p to target gen r."""

    labels: dict = field(default_factory=dict)


def hom_complex(M: FiniteComplex, N: FiniteComplex) -> HomComplex:
    """Hom(M, N) with ∂g = d_N g - (-1)^{|g|} g d_M."""
    _check_same_ring(M, N)
    ring = M.ring
    s = _common_shift(M, N)
    if M.mode == Z2:
        degrees = [0, 1]
        pairs = {n: [(p, (p + n) % 2) for p in (0, 1)] for n in (0, 1)}
    else:
        degrees = sorted({q - p for p in M.positions for q in N.positions})
        pairs = {n: [(p, p + n) for p in M.positions if p + n in N.modules] for n in degrees}
    modules, labels = {}, {}
    for n in degrees:
        ws, lab = [], []
        for p, q in pairs[n]:
            for c, wc in enumerate(M.module(p).weights):
                for r, wr in enumerate(N.module(q).weights):
                    lab.append((p, c, r))
                    ws.append(wr - wc)
        modules[n] = FreeGradedModule(ws, M.mode)
        labels[n] = lab
    index = {n: {lab: i for i, lab in enumerate(labels[n])} for n in degrees}
    diffs = {}
    for n in degrees:
        m = M.next(n)
        if M.mode == Z and m not in modules:
            continue
        sign = -1 if n % 2 else 1
        rows = [[ring.zero() for _ in range(modules[n].rank)] for _ in range(modules[m].rank)]
        for col, (p, c, r) in enumerate(labels[n]):
            q = N.next(p + n) if M.mode == Z else (p + n + 1) % 2
            # d_N ∘ E
            if M.mode == Z2 or (p + n + 1) in N.modules:
                dN = N.diff(p + n)
                for r2 in range(dN.target.rank):
                    e = dN.matrix[r2][r]
                    if e:
                        rows[index[m][(p, c, r2)]][col] += e
            # -(-1)^n E ∘ d_M : needs d_M from position p-1 to p
            pm = M.prev(p)
            if M.mode == Z2 or pm in M.modules:
                dM = M.diff(pm)
                for c2 in range(dM.source.rank):
                    e = dM.matrix[c][c2]
                    if e:
                        rows[index[m][(pm, c2, r)]][col] -= e * sign
            del q
        diffs[n] = ModuleMap(ring, modules[n], modules[m], rows, s)
    return HomComplex(ring, modules, diffs, M.mode, False, labels)


def hom_element(H: HomComplex, degree: int, maps: Mapping[int, ModuleMap]) -> dict:
    """Coordinates in Hom^degree of a family of maps M^p -> N^{p+degree}."""
    out = {}
    for i, (p, c, r) in enumerate(H.labels[degree]):
        f = maps.get(p)
        if f is not None and f.matrix[r][c]:
            out[i] = f.matrix[r][c]
    return out


def apply_hom_differential(H: HomComplex, degree: int, coords: Mapping[int, Poly]) -> dict:
    d = H.diff(degree)
    out: dict = {}
    for col, val in coords.items():
        for r in range(d.target.rank):
            e = d.matrix[r][col]
            if e:
                out[r] = out.get(r, H.ring.zero()) + e * val
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------- homotopies

class Infeasible:
    """No solution within the given bounds (not a proof that none exists)."""

    def __init__(self, reason: str = "no solution within the degree bound"):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Infeasible({self.reason!r})"


@dataclass
class Homotopy:
    components: dict   # position p -> ModuleMap cx^p -> cx^{p-1}
    degree_bound: int

    def to_json(self) -> dict:
        return {"degree_bound": self.degree_bound,
                "components": {str(p): m.to_json() for p, m in sorted(self.components.items())}}


def _endo_is_cycle(cx: FiniteComplex, target: Mapping[int, ModuleMap]) -> bool:
    for p in cx.positions:
        q = cx.next(p)
        if cx.mode == Z and q not in cx.modules:
            continue
        t_p = target.get(p)
        t_q = target.get(q)
        lhs = cx.diff(p).compose(t_p) if t_p is not None else None
        rhs = t_q.compose(cx.diff(p)) if t_q is not None else None
        rows = _matrix_sub(lhs, rhs, cx.module(q).rank, cx.module(p).rank, cx.ring)
        if any(e for row in rows for e in row):
            return False
    return True


def find_null_homotopy(cx: FiniteComplex, target: Mapping[int, ModuleMap], degree_bound: int,
                       graded: bool = True):
    """Solve d∘h + h∘d = target for h of degree -1 with entry degrees <= degree_bound.

    With ``graded=False`` the generator weights are ignored and every monomial of
    total degree <= degree_bound is allowed in every entry.
    """
    ring = cx.ring
    F = ring.field
    if not _endo_is_cycle(cx, target):
        raise NotACycle("target does not commute with the differential")
    tshift = None
    for t in target.values():
        if not t.is_zero():
            tshift = t.shift
    if tshift is None:
        return Homotopy({}, degree_bound)
    positions = cx.positions
    all_exps = [] if graded else [e for e in product(range(degree_bound + 1), repeat=ring.nvars)
                                  if sum(e) <= degree_bound]
    unknowns = []   # (p, r, c, e): entry (r, c) of h_p : cx^p -> cx^{p-1}, monomial e
    hshift = {}
    for p in positions:
        q = cx.prev(p)
        if cx.mode == Z and q not in cx.modules:
            continue
        s = tshift - cx.shift_at(q)
        hshift[p] = s
        src, tgt = cx.module(p), cx.module(q)
        for r, wr in enumerate(tgt.weights):
            for c, wc in enumerate(src.weights):
                if not graded:
                    unknowns.extend((p, r, c, e) for e in all_exps)
                    continue
                w = wc - wr + s
                if w < 0:
                    continue
                for e in _monomials(ring, w):
                    if sum(e) <= degree_bound:
                        unknowns.append((p, r, c, e))
    eqs: dict = {}
    cols: list[dict] = []
    for (p, r, c, e) in unknowns:
        col: dict = {}
        q = cx.prev(p)
        # d_q ∘ h_p : cx^p -> cx^p
        dq = cx.diff(q)
        for r2 in range(dq.target.rank):
            a = dq.matrix[r2][r]
            for f, v in a.terms.items():
                key = (p, r2, c, tuple(x + y for x, y in zip(e, f)))
                col[key] = col.get(key, F.zero) + v
        # h_p ∘ d_q : cx^q -> cx^q
        if cx.mode == Z2 or cx.prev(q) in cx.modules or q in cx.modules:
            dq_in = cx.diff(q)
            for c2 in range(dq_in.source.rank):
                a = dq_in.matrix[c][c2]
                for f, v in a.terms.items():
                    key = (q, r, c2, tuple(x + y for x, y in zip(e, f)))
                    col[key] = col.get(key, F.zero) + v
        cols.append(col)
    rhs: dict = {}
    for p, t in target.items():
        for r, row in enumerate(t.matrix):
            for c, ent in enumerate(row):
                for f, v in ent.terms.items():
                    rhs[(p, r, c, f)] = v
    keys = {}
    for col in cols:
        for k in col:
            keys.setdefault(k, len(keys))
    for k in rhs:
        if k not in keys:
            keys[k] = len(keys)
    M = SparseMatrix(len(keys), len(unknowns))
    for j, col in enumerate(cols):
        for k, v in col.items():
            if v:
                M.add(keys[k], j, v)
    b = {keys[k]: v for k, v in rhs.items()}
    x = solve(M, b, F)
    if x is None:
        return Infeasible()
    comps = {}
    for p, s in hshift.items():
        q = cx.prev(p)
        rows = [[ring.zero() for _ in range(cx.module(p).rank)] for _ in range(cx.module(q).rank)]
        comps[p] = (rows, s)
    for j, val in x.items():
        p, r, c, e = unknowns[j]
        rows, _ = comps[p]
        rows[r][c] = rows[r][c] + ring.monomial(e, val)
    h = {p: ModuleMap(ring, cx.module(p), cx.module(cx.prev(p)), rows, s, check=graded)
         for p, (rows, s) in comps.items()}
    hom = Homotopy(h, degree_bound)
    if not verify_homotopy(cx, hom, target):
        raise AssertionError("internal error: homotopy failed verification")
    return hom


def verify_homotopy(cx: FiniteComplex, h: Homotopy, target: Mapping[int, ModuleMap]) -> bool:
    """Exact check of d∘h + h∘d = target on every position."""
    ring = cx.ring
    for p in cx.positions:
        n = cx.module(p).rank
        acc = [[ring.zero() for _ in range(n)] for _ in range(n)]
        q = cx.prev(p)
        hp = h.components.get(p)
        if hp is not None:
            m = cx.diff(q).compose(hp)
            acc = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(acc, m.matrix)]
        nxt = cx.next(p)
        hn = h.components.get(nxt)
        if hn is not None and (cx.mode == Z2 or nxt in cx.modules):
            m = hn.compose(cx.diff(p))
            acc = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(acc, m.matrix)]
        t = target.get(p)
        tm = t.matrix if t is not None else [[ring.zero()] * n for _ in range(n)]
        if any(a != b for r1, r2 in zip(acc, tm) for a, b in zip(r1, r2)):
            return False
    return True


def scalar_endomorphism(cx: FiniteComplex, g: Poly) -> dict:
    """g·id on every position."""
    return {p: identity_map(cx.ring, cx.module(p), g) for p in cx.positions}


__all__ = [
    "Z", "Z2", "FreeGradedModule", "ModuleMap", "FiniteComplex", "CohomologyTable", "ChainMap",
    "HomComplex", "Homotopy", "Infeasible", "ValidationReport", "check_complex", "cohomology_window",
    "cone", "shift", "fold_Z2", "tensor", "hom_complex", "find_null_homotopy", "verify_homotopy",
    "identity_map", "complex_from_maps", "expand_map", "scalar_endomorphism", "hom_element",
    "apply_hom_differential", "euler_characteristic", "strand",
]
