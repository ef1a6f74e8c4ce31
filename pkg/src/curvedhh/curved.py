"""Curved algebras (A, w) and their perfect curved modules (matrix factorizations).

A curved algebra is a weighted polynomial ring together with a ground-ring
descriptor and a curvature w:

* ``ground="laurent"``: k = F[t, t⁻¹] with t of cohomological degree 2 and
  w = f·t.  Setting t = 1 gives the Z/2-periodic picture: every module is a
  pair of free Q-modules (parities 0 and 1), every odd map raises the
  auxiliary weight by W/2 where W is the weight of f.
* ``ground="poly"``: k = F[t_1..t_c]; the t_i are ordinary ring variables
  that are excluded from the relative differentials.
* ``ground="field"``: k = F.

Curved modules are stored with their t-free matrices over Q; the t-powers
are recovered from the cohomological degrees of the generators whenever a
t-ful presentation is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

from .errors import (CharacteristicMismatch, CurvatureDecompositionInvalid, CurvatureMismatch,
                     GroundRingMismatch, OddnessViolation, WeightError, ZeroCurvature)
from .exactalg.poly import Poly, PolyRing, strip_laurent
from .homcx import (Z, Z2, FiniteComplex, FreeGradedModule, Homotopy, Infeasible, ModuleMap,
                    cohomology_window, find_null_homotopy, hom_complex, scalar_endomorphism)
from .linalg import SparseMatrix, rank

LAURENT, POLY, FIELD = "laurent", "poly", "field"


# ---------------------------------------------------------------- matrices of polynomials

def mat_mul(A, B, ring):
    n, k = len(A), len(B)
    m = len(B[0]) if B else 0
    z = ring.zero()
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = z
            for l in range(k):
                a, b = A[i][l], B[l][j]
                if a and b:
                    s = s + a * b
            row.append(s)
        out.append(row)
    return out


def mat_scalar(ring, n, c):
    return [[c if i == j else ring.zero() for j in range(n)] for i in range(n)]


def mat_eq(A, B) -> bool:
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def mat_str(A):
    return [[str(e) for e in row] for row in A]


# ---------------------------------------------------------------- curved algebras

class CurvedAlgebra:
    """(A, w) over a declared ground ring."""

    def __init__(self, ring: PolyRing, w, ground: str = LAURENT, ground_vars: Sequence[str] = ()):
        self.ring = ring
        self.w = ring(w)
        self.ground = ground
        if ground == LAURENT:
            if len(ring.laurent) != 1:
                raise GroundRingMismatch("a Laurent ground ring needs exactly one invertible variable")
            (self.t,) = tuple(ring.laurent)
            self.ground_vars = (self.t,)
            f, meta = strip_laurent(self.w)
            if self.w and meta[self.t] != [1]:
                raise WeightError(f"the curvature must be f·{self.t} with f free of {self.t}")
            self.Q = f.ring
            self.f = f
            self.mode = Z2
        elif ground in (POLY, FIELD):
            if ring.laurent:
                raise GroundRingMismatch("Laurent variables require ground='laurent'")
            self.t = None
            self.ground_vars = tuple(ground_vars) if ground == POLY else ()
            for v in self.ground_vars:
                ring.index(v)
            self.Q = ring
            self.f = self.w
            self.mode = Z
        else:
            raise ValueError(f"unknown ground ring {ground!r}")
        # a curvature that is not quasi-homogeneous (e.g. x^p - s) still supports every
        # ideal-theoretic computation, but no weight slices
        self.graded = not self.f or self.f.is_homogeneous()
        self.W = self.f.weight() if self.f and self.graded else None

    # -- descriptors
    @property
    def field(self):
        return self.ring.field

    @property
    def relative_vars(self) -> tuple:
        return tuple(v for v in self.Q.variables if v not in self.ground_vars)

    @property
    def half(self) -> int:
        """W/2, the weight shift of odd maps in the periodic picture."""
        if not self.graded:
            raise WeightError(f"curvature {self.f} is not weight-homogeneous")
        if self.mode != Z2 or self.W is None:
            return 0
        if self.W % 2:
            raise WeightError(f"curvature weight {self.W} is odd; choose even variable weights")
        return self.W // 2

    @property
    def has_half(self) -> bool:
        """Whether W/2 is an integer, so that curved modules carry generator weights."""
        return self.graded and (self.W is None or self.W % 2 == 0)

    @property
    def odd_shift(self) -> int:
        """Weight of the odd differential of a curved module: W/2, or 0 when w = 0."""
        if not self.has_half:
            raise WeightError(f"curvature {self.f} has no integral half weight")
        return self.W // 2 if self.W is not None else 0

    def __eq__(self, other):
        return (isinstance(other, CurvedAlgebra) and self.ring == other.ring and self.w == other.w
                and self.ground == other.ground and self.ground_vars == other.ground_vars)

    def __hash__(self):
        return hash((self.ring, self.w, self.ground, self.ground_vars))

    def __repr__(self):
        return f"CurvedAlgebra({self.ring!r}, w={self.w}, ground={self.ground!r})"

    def to_json(self) -> dict:
        return {"field": repr(self.field), "variables": list(self.ring.variables),
                "weights": list(self.ring.weights), "laurent": sorted(self.ring.laurent),
                "ground": self.ground, "ground_vars": list(self.ground_vars), "curvature": str(self.w)}


def curved_algebra(field_, variables: Sequence[str], weights: Sequence[int], w: str,
                   ground: str = LAURENT, t: str = "t", ground_vars: Sequence[str] = ()) -> CurvedAlgebra:
    """Convenience constructor: the Laurent variable t is appended automatically."""
    if ground == LAURENT:
        ring = PolyRing(field_, list(variables) + [t], list(weights) + [2], laurent=[t])
    else:
        ring = PolyRing(field_, variables, weights)
    return CurvedAlgebra(ring, w, ground, ground_vars)


# ---------------------------------------------------------------- curved modules

@dataclass
class CurvedModule:
    """Free module with an odd endomorphism d, d² = w·id (t stripped in the periodic case)."""

    alg: CurvedAlgebra
    degrees: tuple          # cohomological degrees of the generators
    weights: tuple          # auxiliary weights of the generators
    d: list                 # matrix over alg.Q; d[r][c] is the image of generator c on r
    labels: list | None = None

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def parities(self) -> tuple:
        return tuple(g % 2 for g in self.degrees)

    @property
    def ring(self) -> PolyRing:
        return self.alg.Q

    @property
    def shift(self) -> int:
        return self.alg.odd_shift if self.alg.has_half else 0

    def square_defect(self):
        """d² − w·id."""
        sq = mat_mul(self.d, self.d, self.ring)
        return [[sq[i][j] - (self.alg.f if i == j else 0) for j in range(self.rank)]
                for i in range(self.rank)]

    def is_valid(self) -> bool:
        return all(not e for row in self.square_defect() for e in row)

    def matrix_with_t(self):
        """The differential with t-powers restored from the generator degrees."""
        if self.alg.mode != Z2:
            return [[e for e in row] for row in self.d]
        ring, t = self.alg.ring, self.alg.t
        tt = ring.gen(t)
        out = []
        for r in range(self.rank):
            row = []
            for c in range(self.rank):
                e = self.d[r][c]
                k = (self.degrees[c] + 1 - self.degrees[r]) // 2
                row.append(e.map_to(ring) * tt ** k if e else ring.zero())
            out.append(row)
        return out

    # -- complex view
    def positions(self) -> dict:
        """Position -> list of generator indices (parity in Z/2 mode, degree otherwise)."""
        out: dict = {}
        for j, g in enumerate(self.degrees):
            p = g % 2 if self.alg.mode == Z2 else g
            out.setdefault(p, []).append(j)
        if self.alg.mode == Z2:
            out.setdefault(0, [])
            out.setdefault(1, [])
        return dict(sorted(out.items()))

    def complex(self) -> FiniteComplex:
        ring = self.ring
        pos = self.positions()
        mode = self.alg.mode
        modules = {p: FreeGradedModule([self.weights[j] for j in idx], mode) for p, idx in pos.items()}
        diffs = {}
        for p, idx in pos.items():
            q = (p + 1) % 2 if mode == Z2 else p + 1
            if q not in pos:
                continue
            rows = [[self.d[r][c] for c in idx] for r in pos[q]]
            diffs[p] = ModuleMap(ring, modules[p], modules[q], rows, self.shift, check=self.alg.has_half)
        return FiniteComplex(ring, modules, diffs, mode, curved=bool(self.alg.f))

    def full_matrix(self, comps: Mapping[int, ModuleMap], step: int) -> list:
        """Reassemble per-position maps (position p -> p + step) into one matrix."""
        pos = self.positions()
        M = [[self.ring.zero() for _ in range(self.rank)] for _ in range(self.rank)]
        for p, m in comps.items():
            q = (p + step) % 2 if self.alg.mode == Z2 else p + step
            for a, r in enumerate(pos.get(q, [])):
                for b, c in enumerate(pos[p]):
                    M[r][c] = m.matrix[a][b]
        return M

    def to_json(self) -> dict:
        return {"algebra": self.alg.to_json(), "degrees": list(self.degrees),
                "weights": list(self.weights), "d": mat_str(self.matrix_with_t()),
                "curvature": str(self.alg.w)}


def _infer_weights(alg: CurvedAlgebra, d, n: int, given=None) -> tuple:
    if not alg.has_half:
        # odd or inhomogeneous curvature: the module is ungraded, every generator sits at weight 0
        if given is not None and any(int(x) for x in given):
            raise WeightError(f"generator weights are undefined for the curvature {alg.f}")
        return (0,) * n
    s = alg.odd_shift
    if given is not None:
        ws = tuple(int(x) for x in given)
        if len(ws) != n:
            raise WeightError("one weight per generator is required")
    else:
        ws = [None] * n
        for start in range(n):
            if ws[start] is not None:
                continue
            ws[start] = 0
            stack = [start]
            while stack:
                j = stack.pop()
                for k in range(n):
                    # entry (r, c) forces w_r = w_c + s - weight(entry)
                    for r, c in ((k, j), (j, k)):
                        e = d[r][c]
                        if not e:
                            continue
                        if not e.is_homogeneous():
                            raise WeightError(f"entry ({r},{c}) = {e} is not homogeneous")
                        val = ws[j] + s - e.weight() if r == k else ws[j] - s + e.weight()
                        if ws[k] is None:
                            ws[k] = val
                            stack.append(k)
        ws = tuple(ws)
    for r in range(n):
        for c in range(n):
            e = d[r][c]
            if e and e.weights() != {ws[c] - ws[r] + s}:
                raise WeightError(f"entry ({r},{c}) = {e} is incompatible with the generator weights")
    return ws


def curved_module_new(alg: CurvedAlgebra, gens: Sequence[int], d, weights=None) -> CurvedModule:
    """Validate and build a curved module.

    ``gens`` are cohomological degrees; ``d`` is a square matrix of
    polynomials (or strings) in the full ring of ``alg``; entry (r, c) is the
    component from generator c to generator r.
    """
    n = len(gens)
    degrees = tuple(int(g) for g in gens)
    ring = alg.ring
    rows = [[ring(e) for e in row] for row in d] if n else []
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError("d must be a square matrix matching the generator list")
    Q = alg.Q
    stripped = [[Q.zero() for _ in range(n)] for _ in range(n)]
    if alg.mode == Z2:
        t = alg.t
        for r in range(n):
            for c in range(n):
                e = rows[r][c]
                if not e:
                    continue
                diff = degrees[c] + 1 - degrees[r]
                if diff % 2:
                    raise OddnessViolation(f"entry ({r},{c}) joins generators of equal parity")
                q, meta = strip_laurent(e)
                if meta[t] != [diff // 2]:
                    raise OddnessViolation(
                        f"entry ({r},{c}) = {e} must carry {t}^{diff // 2} to have degree 1")
                stripped[r][c] = q
    else:
        if alg.f:
            raise GroundRingMismatch(
                "curved modules over a Z-graded curved algebra are not supported; use ground='laurent'")
        for r in range(n):
            for c in range(n):
                e = rows[r][c]
                if e and degrees[r] != degrees[c] + 1:
                    raise OddnessViolation(f"entry ({r},{c}) does not raise the degree by one")
                stripped[r][c] = e
    probe = CurvedModule(alg, degrees, (0,) * n, stripped)
    defect = probe.square_defect()
    if any(e for row in defect for e in row):
        raise CurvatureMismatch(f"d² − w·id = {mat_str(defect)}")
    ws = _infer_weights(alg, stripped, n, weights)
    return CurvedModule(alg, degrees, ws, stripped)


def _from_stripped(alg: CurvedAlgebra, degrees, d, weights=None) -> CurvedModule:
    n = len(degrees)
    ws = _infer_weights(alg, d, n, weights)
    X = CurvedModule(alg, tuple(degrees), ws, d)
    defect = X.square_defect()
    if any(e for row in defect for e in row):
        raise CurvatureMismatch(f"d² − w·id = {mat_str(defect)}")
    return X


# ---------------------------------------------------------------- Koszul curved modules

def _subsets(n: int) -> list[tuple]:
    return [S for k in range(n + 1) for S in combinations(range(n), k)]


def koszul_curved(alg: CurvedAlgebra, xs: Sequence, ys: Sequence) -> CurvedModule:
    """Exterior algebra on e_1..e_n with d = Σ x_i ι_i + Σ y_i (e_i ∧ −)."""
    if len(xs) != len(ys):
        raise ValueError("xs and ys must have the same length")
    ring = alg.ring
    xs_full = [ring(x) for x in xs]
    ys_full = [ring(y) for y in ys]
    total = ring.zero()
    for x, y in zip(xs_full, ys_full):
        total = total + x * y
    if total != alg.w:
        raise CurvatureDecompositionInvalid(f"Σ x_i y_i = {total} differs from w = {alg.w}")
    Q = alg.Q
    if alg.mode == Z2:
        xq = [strip_laurent(x)[0] for x in xs_full]
        yq = [strip_laurent(y)[0] for y in ys_full]
        for x, y in zip(xs_full, ys_full):
            if x and strip_laurent(x)[1][alg.t] != [0]:
                raise CurvatureDecompositionInvalid("the x_i must be free of t")
            if y and strip_laurent(y)[1][alg.t] != [1]:
                raise CurvatureDecompositionInvalid("the y_i must be of the form (·)·t")
    else:
        xq, yq = xs_full, ys_full
    n = len(xs)
    basis = _subsets(n)
    index = {S: i for i, S in enumerate(basis)}
    N = len(basis)
    d = [[Q.zero() for _ in range(N)] for _ in range(N)]
    for S in basis:
        c = index[S]
        for pos, i in enumerate(S):
            if xq[i]:
                T = S[:pos] + S[pos + 1:]
                d[index[T]][c] += xq[i] * (-1 if pos % 2 else 1)
        for i in range(n):
            if i in S or not yq[i]:
                continue
            before = sum(1 for j in S if j < i)
            T = tuple(sorted(S + (i,)))
            d[index[T]][c] += yq[i] * (-1 if before % 2 else 1)
    if alg.mode == Z2:
        degrees = [len(S) % 2 for S in basis]
    else:
        degrees = [-len(S) for S in basis]
    weights = None
    if alg.has_half and all(x and x.is_homogeneous() for x in xq):
        s = alg.odd_shift
        weights = [sum(xq[i].weight() - s for i in S) for S in basis]
    X = _from_stripped(alg, degrees, d, weights)
    X.labels = basis
    return X


def exterior_left(X: CurvedModule, i: int) -> list:
    """Matrix of e_i ∧ − on a Koszul curved module."""
    basis = X.labels
    index = {S: k for k, S in enumerate(basis)}
    Q = X.ring
    M = [[Q.zero() for _ in range(X.rank)] for _ in range(X.rank)]
    for S in basis:
        if i in S:
            continue
        before = sum(1 for j in S if j < i)
        T = tuple(sorted(S + (i,)))
        M[index[T]][index[S]] = Q.one() * (-1 if before % 2 else 1)
    return M


# ---------------------------------------------------------------- enveloping algebra and ψ

def enveloping(alg: CurvedAlgebra) -> CurvedAlgebra:
    """Primed copies of the relative variables; w^e = w ⊗ 1 − 1 ⊗ w over the shared ground ring."""
    ring = alg.ring
    rel = alg.relative_vars
    names = list(ring.variables)
    weights = list(ring.weights)
    primed = {}
    for v in rel:
        p = v + "'"
        while p in names:
            p += "'"
        primed[v] = p
    new_vars = [primed[v] for v in rel]
    new_w = [ring.weights[ring.index(v)] for v in rel]
    # primed variables go right after the originals, before the ground variables
    order = [v for v in names if v in rel] + new_vars + [v for v in names if v not in rel]
    wmap = dict(zip(names, weights))
    wmap.update(zip(new_vars, new_w))
    big = PolyRing(ring.field, order, [wmap[v] for v in order], ring.laurent)
    w1 = alg.w.map_to(big)
    pos = {i: big.index(primed.get(v, v)) for i, v in enumerate(names)}
    w2 = alg.w.map_to(big, pos)
    env = CurvedAlgebra(big, w1 - w2, alg.ground, alg.ground_vars)
    env.primed = primed
    env.base = alg
    return env


def dual(X: CurvedModule) -> CurvedModule:
    """X* = Hom(X, A) with d*(φ) = −(−1)^{|φ|} φ∘d; curvature −w."""
    alg = X.alg
    neg = CurvedAlgebra(alg.ring, -alg.w, alg.ground, alg.ground_vars)
    n = X.rank
    d = [[X.d[c][r] * (1 if X.parities[c] else -1) for c in range(n)] for r in range(n)]
    return CurvedModule(neg, tuple(-g for g in X.degrees), tuple(-w for w in X.weights), d)


def psi_tensor(X: CurvedModule, Y: CurvedModule) -> CurvedModule:
    """ψ(X, Y) = X ⊗_k Y* over the enveloping algebra (Y's variables primed)."""
    if X.alg != Y.alg:
        raise GroundRingMismatch("X and Y must be modules over the same curved algebra")
    env = enveloping(X.alg)
    E = env.Q
    Yd = dual(Y)
    Qx = X.ring
    pos_x = {i: E.index(v) for i, v in enumerate(Qx.variables)}
    pos_y = {i: E.index(env.primed.get(v, v)) for i, v in enumerate(Qx.variables)}
    n, m = X.rank, Yd.rank
    degrees, weights, pairs = [], [], []
    for i in range(n):
        for j in range(m):
            pairs.append((i, j))
            degrees.append(X.degrees[i] + Yd.degrees[j])
            weights.append(X.weights[i] + Yd.weights[j])
    idx = {p: k for k, p in enumerate(pairs)}
    N = len(pairs)
    d = [[E.zero() for _ in range(N)] for _ in range(N)]
    for (i, j), col in idx.items():
        for r in range(n):
            e = X.d[r][i]
            if e:
                d[idx[(r, j)]][col] += e.map_to(E, pos_x)
        sign = -1 if X.parities[i] else 1
        for r in range(m):
            e = Yd.d[r][j]
            if e:
                d[idx[(i, r)]][col] += e.map_to(E, pos_y) * sign
    return _from_stripped(env, degrees, d, weights)


# ---------------------------------------------------------------- endomorphism dga

@dataclass
class EndomorphismDga:
    """End_A(X): basis E_{ab} (generator b -> generator a) over A with the Hom differential."""

    module: CurvedModule
    complex: FiniteComplex
    labels: list            # (a, b) per basis element
    parities: list
    weights: list
    diff: list              # diff[k] = {k2: Poly} coordinates of ∂E_k

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def ring(self) -> PolyRing:
        return self.module.ring

    def identity(self) -> dict:
        one = self.ring.one()
        return {k: one for k, (a, b) in enumerate(self.labels) if a == b}

    def index(self, a: int, b: int) -> int:
        return a * self.module.rank + b

    def to_matrix(self, coords: Mapping[int, Poly]) -> list:
        n = self.module.rank
        M = [[self.ring.zero() for _ in range(n)] for _ in range(n)]
        for k, v in coords.items():
            a, b = self.labels[k]
            M[a][b] = M[a][b] + v
        return M

    def from_matrix(self, M) -> dict:
        return {self.index(a, b): M[a][b] for a in range(len(M)) for b in range(len(M)) if M[a][b]}

    def differential(self, coords: Mapping[int, Poly]) -> dict:
        out: dict = {}
        for k, v in coords.items():
            for k2, e in self.diff[k].items():
                out[k2] = out.get(k2, self.ring.zero()) + e * v
        return {k: v for k, v in out.items() if v}

    def mul(self, u: Mapping[int, Poly], v: Mapping[int, Poly]) -> dict:
        return self.from_matrix(mat_mul(self.to_matrix(u), self.to_matrix(v), self.ring))

    def verify(self) -> dict:
        """∂² = 0, Leibniz on all basis pairs, ∂(id) = 0."""
        d2 = all(not self.differential(self.diff[k]) for k in range(self.rank))
        leibniz = True
        for k1 in range(self.rank):
            for k2 in range(self.rank):
                a, b = {k1: self.ring.one()}, {k2: self.ring.one()}
                lhs = self.differential(self.mul(a, b))
                s = -1 if self.parities[k1] else 1
                r1 = self.mul(self.differential(a), b)
                r2 = self.mul(a, self.differential(b))
                rhs = dict(r1)
                for k, v in r2.items():
                    rhs[k] = rhs.get(k, self.ring.zero()) + v * s
                rhs = {k: v for k, v in rhs.items() if v}
                if lhs != rhs:
                    leibniz = False
                    break
            if not leibniz:
                break
        closed_id = not self.differential(self.identity())
        return {"d2": d2, "leibniz": leibniz, "identity_closed": closed_id}

    def homology(self, window: tuple):
        return cohomology_window(self.complex, window)


def endomorphism_dga(X: CurvedModule) -> EndomorphismDga:
    """End(X) with ∂g = d g − (−1)^{|g|} g d; the curvature cancels."""
    n = X.rank
    Q = X.ring
    labels = [(a, b) for a in range(n) for b in range(n)]
    parities = [(X.parities[a] + X.parities[b]) % 2 for a, b in labels]
    weights = [X.weights[a] - X.weights[b] for a, b in labels]
    diff = []
    for k, (a, b) in enumerate(labels):
        out: dict = {}
        sign = -1 if parities[k] else 1
        # d ∘ E_ab = Σ_r d[r][a] E_rb
        for r in range(n):
            e = X.d[r][a]
            if e:
                kk = r * n + b
                out[kk] = out.get(kk, Q.zero()) + e
        # E_ab ∘ d = Σ_c d[b][c] E_ac
        for c in range(n):
            e = X.d[b][c]
            if e:
                kk = a * n + c
                out[kk] = out.get(kk, Q.zero()) - e * sign
        diff.append({kk: v for kk, v in out.items() if v})
    cx = X.complex()
    H = hom_complex(cx, cx)
    return EndomorphismDga(X, H, labels, parities, weights, diff)


# ---------------------------------------------------------------- supports

@dataclass
class SupportCertificate:
    kind: str                       # "IN" or "OUT"
    g: Poly | None = None
    m: int | None = None
    h: list | None = None           # full odd matrix with d h + h d = g^m id
    point: dict | None = None
    dims: tuple | None = None       # (even, odd) fiber homology dims

    def verify(self, X: CurvedModule) -> bool:
        if self.kind == "OUT":
            Q = X.ring
            lhs = mat_mul(X.d, self.h, Q)
            rhs = mat_mul(self.h, X.d, Q)
            tot = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(lhs, rhs)]
            return mat_eq(tot, mat_scalar(Q, X.rank, self.g ** self.m))
        return support_include(X, self.point).dims == self.dims

    def to_json(self) -> dict:
        if self.kind == "OUT":
            return {"kind": "OUT", "g": str(self.g), "m": self.m, "h": mat_str(self.h)}
        return {"kind": "IN", "point": {k: str(v) for k, v in self.point.items()},
                "dims": list(self.dims)}


def support_exclude(X: CurvedModule, g, max_m: int = 3, degree_bound: int = 2):
    """Search for h with d h + h d = g^m·id, m = 1..max_m (Infeasible is not a proof)."""
    Q = X.ring
    g = Q(g) if not isinstance(g, Poly) or g.ring != Q else g
    if isinstance(g, Poly) and g.ring.laurent:
        g = strip_laurent(g)[0]
    if not g:
        raise ValueError("g must be nonzero")
    cx = X.complex()
    for m in range(1, max_m + 1):
        target = scalar_endomorphism(cx, g ** m)
        h = find_null_homotopy(cx, target, degree_bound, graded=X.alg.has_half)
        if isinstance(h, Homotopy):
            H = X.full_matrix(h.components, -1)
            cert = SupportCertificate("OUT", g, m, H)
            if not cert.verify(X):
                raise AssertionError("internal error: certificate failed verification")
            return cert
    return Infeasible(f"no homotopy for g^m, m <= {max_m}, entry degree <= {degree_bound}")


def _point_values(X: CurvedModule, point: Mapping[str, object]) -> dict:
    F = X.ring.field
    out = {}
    for k, v in point.items():
        if k in X.alg.ring.laurent:
            continue
        if isinstance(v, str):
            v = X.ring(v)
            if not v.is_constant():
                raise ValueError(f"value for {k!r} is not a scalar")
            v = v.constant_coeff()
        else:
            v = F(v)
        F.check(v)
        out[k] = v
    return out


def support_include(X: CurvedModule, point: Mapping[str, object]) -> SupportCertificate:
    """Z/2 homology of End(X) specialised at a rational point."""
    vals = _point_values(X, point)
    F = X.ring.field
    n = X.rank
    D = [[e.evaluate(vals) if e else F.zero for e in row] for row in X.d]
    labels = [(a, b) for a in range(n) for b in range(n)]
    par = [(X.parities[a] + X.parities[b]) % 2 for a, b in labels]
    idx = {lab: k for k, lab in enumerate(labels)}
    cols: dict = {0: [], 1: []}
    for k, (a, b) in enumerate(labels):
        sign = -1 if par[k] else 1
        col: dict = {}
        for r in range(n):
            if D[r][a]:
                kk = idx[(r, b)]
                col[kk] = col.get(kk, F.zero) + D[r][a]
        for c in range(n):
            if D[b][c]:
                kk = idx[(a, c)]
                col[kk] = col.get(kk, F.zero) - D[b][c] * sign
        cols[par[k]].append(col)
    ranks = {p: rank(SparseMatrix.from_columns(len(labels), cols[p]), F) for p in (0, 1)}
    size = {p: len(cols[p]) for p in (0, 1)}
    dims = tuple(size[p] - ranks[p] - ranks[1 - p] for p in (0, 1))
    return SupportCertificate("IN", point=dict(vals), dims=dims)


# ---------------------------------------------------------------- regular triviality

@dataclass
class ProbeReport:
    applicable: bool
    nonreg: list
    certificate: SupportCertificate | None = None
    reason: str = ""

    @property
    def agrees(self) -> bool:
        return (not self.applicable) or self.certificate is not None

    def to_json(self) -> dict:
        return {"applicable": self.applicable, "nonreg": self.nonreg,
                "certificate": self.certificate.to_json() if self.certificate else None,
                "agrees": self.agrees, "reason": self.reason}


def regular_triviality_probe(alg: CurvedAlgebra, sample: CurvedModule, degree_bound: int = 2) -> ProbeReport:
    """If Nonreg(𝒜) is empty, every perfect curved module is contractible; test the sample."""
    from .derham import nonreg_locus
    from .exactalg.groebner import buchberger
    if not alg.f:
        return ProbeReport(False, [], None, "precondition failed: w = 0 is a zero divisor")
    try:
        I = nonreg_locus(alg)
    except ZeroCurvature as exc:
        return ProbeReport(False, [], None, f"precondition failed: {exc}")
    gb = buchberger(I)
    gens = gb.strings()
    if not gb.is_unit:
        return ProbeReport(False, gens, None, "Nonreg is not empty; regular triviality does not apply")
    cert = support_exclude(sample, sample.ring.one(), max_m=1, degree_bound=degree_bound)
    if isinstance(cert, SupportCertificate):
        return ProbeReport(True, gens, cert, "contractibility certificate found")
    return ProbeReport(True, gens, None, "no certificate within the degree bound")


__all__ = [
    "LAURENT", "POLY", "FIELD", "CurvedAlgebra", "CurvedModule", "EndomorphismDga", "SupportCertificate",
    "ProbeReport", "curved_algebra", "curved_module_new", "koszul_curved", "enveloping", "dual",
    "psi_tensor", "endomorphism_dga", "support_exclude", "support_include", "regular_triviality_probe",
    "exterior_left", "mat_mul", "mat_eq",
]
