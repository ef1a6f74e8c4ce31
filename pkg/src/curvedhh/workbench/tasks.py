"""Task runners: each takes (scenario, params, context) and returns a JSON-ready dict."""

from __future__ import annotations

from typing import Callable

from ..curved import (CurvedAlgebra, curved_algebra, koszul_curved, regular_triviality_probe,
                      support_exclude, support_include)
from ..derham import (CHERN, TOP, nonreg_locus, sing_locus, twisted_cohomology, twisted_derham)
from ..errors import NotRegularSequence, WorkbenchError
from ..exactalg.groebner import IdealBasis, buchberger
from ..exactalg.poly import strip_laurent
from ..hochschild import (chern_compatibility_check, ground_field_dga, homology_stabilized,
                          hochschild_truncated, identity_suite, one_object)
from ..homcx import CohomologyTable, cohomology_window
from ..localcoh import FG, not_supported_on_V, rgamma_koszul_limit, rgamma_principal, smoothness_check


class Context:
    """Per-run settings shared by the tasks."""

    def __init__(self, seed: int | None = None, jobs: int = 1):
        self.seed = seed
        self.jobs = jobs


def _stripped(alg: CurvedAlgebra, s: str | None):
    """A polynomial of the scenario as an element of the t-free ring Q."""
    if s is None:
        return alg.f
    p = alg.ring(s)
    if p.ring.laurent:
        p = strip_laurent(p)[0]
    return p.map_to(alg.Q) if p.ring != alg.Q else p


def _table_json(table: CohomologyTable) -> dict:
    d = table.to_json()
    d["totals"] = {str(p): table.total(p) for p in sorted({p for p, _ in table.dims})}
    d["nonzero"] = {f"{p},{w}": v for (p, w), v in table.nonzero().items()}
    return d


def _window(params: dict, default=None):
    w = params.get("window", default)
    return tuple(w) if w is not None else None


# ---------------------------------------------------------------- de Rham side

def task_derham(sc, params: dict, ctx: Context) -> dict:
    alg = sc.algebra
    tdr = twisted_derham(alg, params.get("convention", TOP))
    out = {"dw": str(tdr.dw), "dw_zero": not tdr.dw, "convention": tdr.convention,
           "mode": tdr.mode, "relative_variables": list(tdr.rel),
           "generator_weights": {"^".join(tdr.rel[i] for i in I) or "1": w
                                 for I, w in sorted(tdr.gen_weight.items(), key=lambda kv: (len(kv[0]), kv[0]))}}
    win = _window(params)
    if win is not None:
        out["cohomology"] = _table_json(cohomology_window(tdr.complex, win, jobs=ctx.jobs))
    return out


def task_milnor(sc, params: dict, ctx: Context) -> dict:
    alg = sc.algebra
    tdr = twisted_derham(alg, params.get("convention", TOP))
    win = _window(params)
    try:
        table, md = twisted_cohomology(tdr, "regular_sequence", win)
        method = "regular_sequence"
    except NotRegularSequence as exc:
        if win is None:
            raise
        table, md = twisted_cohomology(tdr, "window", win)
        method = f"window ({exc})"
    out = {"method": method, "cohomology": _table_json(table)}
    if md is not None:
        out["milnor"] = md.to_json()
    parities = {p: table.total(p) for p in sorted({p for p, _ in table.dims})}
    out["parity"] = [p for p, v in parities.items() if v]
    out["weights"] = {str(p): table.weights_at(p) for p in parities}
    out["total"] = table.total()
    return out


def task_rgamma(sc, params: dict, ctx: Context) -> dict:
    alg = sc.algebra
    tdr = twisted_derham(alg, params.get("convention", TOP))
    f = _stripped(alg, params.get("f"))
    win = _window(params)
    res = rgamma_principal(tdr, f, win)
    out = res.to_json()
    out["f"] = str(f)
    out["dw_zero"] = not tdr.dw
    if "koszul_l_max" in params:
        k = rgamma_koszul_limit(tdr.complex, [f], params["koszul_l_max"], win)
        kj = k.to_json()
        agree = None
        if res.dims is not None:
            agree = all(res.dims.get(s, 0) == v for s, v in k.values.items() if k.stabilized.get(s))
        out["koszul_limit"] = {"values": kj.get("values"), "all_stabilized": k.all_stabilized,
                               "agrees_on_stabilized": agree}
    return out


def task_smooth_check(sc, params: dict, ctx: Context) -> dict:
    alg = sc.algebra
    f = _stripped(alg, params.get("f"))
    v = smoothness_check(alg.Q, f, params.get("max_power", 32))
    out = v.to_json()
    out["f"] = str(f)
    out["verified"] = v.verify(f)
    return out


def task_support(sc, params: dict, ctx: Context) -> dict:
    alg = sc.algebra
    Q = alg.Q
    sing = sing_locus(alg)
    out = {"sing_locus": buchberger(sing).strings() if sing.gens else ["0"]}
    try:
        out["nonreg_locus"] = buchberger(nonreg_locus(alg)).strings()
    except WorkbenchError as exc:
        out["nonreg_locus"] = {"error": type(exc).__name__, "message": str(exc)}
    if "zgens" in params:
        gens = [_stripped(alg, s) for s in params.get("ideal", [])] if "ideal" in params else list(sing.gens)
        I = IdealBasis(Q, gens)
        Z = [_stripped(alg, s) for s in params["zgens"]]
        out["not_supported_on_V"] = not_supported_on_V(I, Z).to_json()
        out["ideal"] = [str(g) for g in gens]
        out["zgens"] = [str(z) for z in Z]
    return out


# ---------------------------------------------------------------- Hochschild side

def _generator(alg: CurvedAlgebra, gen: dict):
    return koszul_curved(alg, gen["xs"], gen["ys"])


def task_hochschild(sc, params: dict, ctx: Context) -> dict:
    alg = sc.algebra
    caps = tuple(params["caps"])
    win = _window(params)
    kind = params.get("algebra", "one_object")
    if kind == "ground_field":
        A = ground_field_dga(alg.field)
    elif kind == "generator":
        A = _generator(alg, params["generator"])
    else:
        A = one_object(alg)
    out = {"algebra": kind, "caps": list(caps), "window": list(win)}
    if kind != "generator" and A.curved:
        N = params.get("identities_cap", caps[-1])
        T = hochschild_truncated(A, N, win)
        out["curved"] = True
        out["truncation"] = {"N": N, "d2": T.d2, "untrusted": sorted(f"{p},{w}" for p, w in T.untrusted)}
        out["identities"] = identity_suite(A, N, win)
        return out
    res = homology_stabilized(A, caps, win, model=params.get("model", "auto"), jobs=ctx.jobs,
                              cross_check_caps=tuple(params.get("cross_check_caps", (1, 2, 3))))
    out["curved"] = False
    out["homology"] = res.to_json()
    out["all_stabilized"] = res.all_stabilized
    if kind != "generator":
        out["identities"] = identity_suite(A, params.get("identities_cap", caps[-1]), win)
    return out


def task_chern_check(sc, params: dict, ctx: Context) -> dict:
    alg = sc.algebra
    seed = params.get("seed", ctx.seed)
    rep = chern_compatibility_check(alg, params.get("samples", 100), _window(params, [0, 4]),
                                    params.get("cap", 3), seed)
    out = rep.to_json()
    out["ok"] = rep.ok
    out["surjective_all"] = all(rep.surjective.values())
    return out


# ---------------------------------------------------------------- generator constructions

def task_appendix_koszul(sc, params: dict, ctx: Context) -> dict:
    alg = sc.algebra
    X = koszul_curved(alg, params["xs"], params["ys"])
    out = {"rank": X.rank, "degrees": list(X.degrees), "weights": list(X.weights),
           "square_is_w": X.is_valid(), "labels": [list(s) for s in (X.labels or [])]}
    ex = []
    for g in params.get("exclude", params["xs"]):
        cert = support_exclude(X, g, max_m=params.get("max_m", 3))
        ex.append({"g": str(g), "found": bool(cert),
                   **(cert.to_json() if cert else {"reason": getattr(cert, "reason", "")})})
    out["exclude"] = ex
    inc = []
    for pt in params.get("include_points", []):
        c = support_include(X, pt)
        inc.append({"point": {k: str(v) for k, v in pt.items()}, "dims": list(c.dims),
                    "in_support": any(c.dims)})
    out["include"] = inc
    if params.get("probe", False):
        pa = params.get("probe_algebra")
        if pa is not None:
            palg = curved_algebra(alg.field, alg.Q.variables, pa.get("weights", alg.Q.weights),
                                  pa["curvature"], alg.ground, alg.t or "t")
            sample = koszul_curved(palg, pa["xs"], pa["ys"])
        else:
            palg, sample = alg, X
        out["probe"] = regular_triviality_probe(palg, sample).to_json()
        out["probe"]["curvature"] = str(palg.w)
    return out


# ---------------------------------------------------------------- main isomorphism

def task_verify_main(sc, params: dict, ctx: Context) -> dict:
    """Both sides of HH ≅ RΓ(Ω·, dw): de Rham + local cohomology vs stabilized Hochschild of End(X)."""
    alg = sc.algebra
    win = _window(params)
    caps = tuple(params["caps"])
    tdr = twisted_derham(alg, CHERN)
    table, _ = twisted_cohomology(tdr, "window", win)
    rg = rgamma_principal(tdr, alg.f, win)
    if rg.verdict == FG and rg.dims is not None:
        side_a = {k: v for k, v in rg.dims.items() if v}
        source = "rgamma"
    else:
        side_a = {k: v for k, v in table.dims.items() if v}
        source = "derham"
    X = _generator(alg, params["generator"])
    hh = homology_stabilized(X, caps, win, model=params.get("model", "auto"), jobs=ctx.jobs,
                             cross_check_caps=tuple(params.get("cross_check_caps", (1, 2, 3))))
    side_b = dict(hh.table.dims)
    slices = sorted(set(side_a) | set(side_b) | {(p, w) for p in (0, 1) for w in range(win[0], win[1] + 1)})
    mismatches = [{"slice": f"{p},{w}", "derham_rgamma": side_a.get((p, w), 0),
                   "hochschild": side_b.get((p, w), 0)}
                  for p, w in slices if side_a.get((p, w), 0) != side_b.get((p, w), 0)]
    unstable = [f"{p},{w}" for (p, w), ok in sorted(hh.stabilized.items()) if not ok]
    cross = hh.cross_check
    cross_agrees = None
    if cross is not None:
        cross_agrees = {k: v for k, v in cross.table.dims.items() if v} == side_b and cross.all_stabilized
    totals_a = {str(p): sum(v for (q, _), v in side_a.items() if q == p) for p in (0, 1)}
    totals_b = {str(p): sum(v for (q, _), v in side_b.items() if q == p) for p in (0, 1)}
    return {"window": list(win), "caps": list(caps),
            "derham": _table_json(table), "rgamma": rg.to_json(), "side_a_source": source,
            "hochschild": hh.to_json(),
            "totals": {"derham_rgamma": totals_a, "hochschild": totals_b},
            "mismatches": mismatches, "unstabilized": unstable,
            "cross_check_agrees": cross_agrees,
            "agreement": not mismatches and not unstable}


TASKS: dict[str, Callable] = {
    "derham": task_derham,
    "milnor": task_milnor,
    "rgamma": task_rgamma,
    "smooth_check": task_smooth_check,
    "support": task_support,
    "hochschild": task_hochschild,
    "chern_check": task_chern_check,
    "appendix_koszul": task_appendix_koszul,
    "verify_main": task_verify_main,
}

__all__ = ["Context", "TASKS"] + [f"task_{k}" for k in TASKS]
