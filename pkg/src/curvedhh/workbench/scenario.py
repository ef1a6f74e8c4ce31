"""Declarative scenario files.

A scenario is a TOML document with a ``[ring]`` table describing the curved
algebra and an array of ``[[tasks]]`` tables, e.g.::

    name = "milnor_x3"
    seed = 0

    [ring]
    field = "QQ"
    variables = ["x"]
    weights = [2]
    ground = "laurent"
    curvature = "x^3*t"

    [[tasks]]
    kind = "milnor"

Syntax errors become :class:`ParseError` with line and column; semantic
problems become :class:`ValidationError` naming the offending field.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..curved import FIELD, LAURENT, POLY, CurvedAlgebra, curved_algebra
from ..derham import CHERN, TOP, tilde_construction
from ..errors import ParseError, ValidationError, WorkbenchError
from ..exactalg.scalars import field_from_descriptor

TASK_KINDS = ("derham", "milnor", "rgamma", "smooth_check", "support", "hochschild",
              "chern_check", "appendix_koszul", "verify_main")

# allowed parameters per task kind: name -> type tag
_PARAMS = {
    "derham": {"convention": "convention", "window": "window"},
    "milnor": {"window": "window", "convention": "convention"},
    "rgamma": {"f": "poly", "window": "window", "convention": "convention", "koszul_l_max": "posint"},
    "smooth_check": {"f": "poly", "max_power": "posint"},
    "support": {"ideal": "polys", "zgens": "polys"},
    "hochschild": {"algebra": "algebra", "generator": "generator", "caps": "caps", "window": "window",
                   "model": "model", "cross_check_caps": "caps", "identities_cap": "posint"},
    "chern_check": {"samples": "posint", "window": "window", "cap": "posint", "seed": "int"},
    "appendix_koszul": {"xs": "polys", "ys": "polys", "exclude": "polys", "max_m": "posint",
                        "include_points": "points", "probe": "bool", "probe_algebra": "probe_algebra"},
    "verify_main": {"generator": "generator", "caps": "caps", "window": "window", "model": "model",
                    "cross_check_caps": "caps"},
}
_REQUIRED = {
    "rgamma": ("window",),
    "hochschild": ("caps", "window"),
    "appendix_koszul": ("xs", "ys"),
    "verify_main": ("generator", "caps", "window"),
}
_TOP_KEYS = {"schema", "name", "description", "seed", "ring", "tasks"}
_RING_KEYS = {"field", "variables", "weights", "ground", "t", "ground_vars", "curvature", "tilde",
              "tilde_base"}
_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_']*$")


@dataclass
class RingSpec:
    field: str
    variables: list
    weights: list
    ground: str = LAURENT
    t: str = "t"
    ground_vars: list = field(default_factory=list)
    curvature: str | None = None
    tilde: list | None = None
    tilde_base: str = FIELD

    def build(self) -> CurvedAlgebra:
        F = field_from_descriptor(self.field)
        if self.tilde is not None:
            return tilde_construction(F, self.variables, self.weights, self.tilde, self.tilde_base)
        return curved_algebra(F, self.variables, self.weights, self.curvature or "0", self.ground,
                              self.t, self.ground_vars)

    def to_json(self) -> dict:
        d = {"field": self.field, "variables": list(self.variables), "weights": list(self.weights),
             "ground": self.ground}
        if self.ground == LAURENT:
            d["t"] = self.t
        if self.ground_vars:
            d["ground_vars"] = list(self.ground_vars)
        if self.tilde is not None:
            d["tilde"] = list(self.tilde)
            d["tilde_base"] = self.tilde_base
        else:
            d["curvature"] = self.curvature or "0"
        return d


@dataclass
class TaskSpec:
    kind: str
    params: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params}


@dataclass
class Scenario:
    name: str
    description: str
    ring: RingSpec
    tasks: list
    seed: int | None = None
    path: str | None = None
    _alg: CurvedAlgebra | None = field(default=None, repr=False)

    @property
    def algebra(self) -> CurvedAlgebra:
        if self._alg is None:
            self._alg = self.ring.build()
        return self._alg

    def to_json(self) -> dict:
        return {"name": self.name, "description": self.description, "seed": self.seed,
                "ring": self.ring.to_json(), "tasks": [t.to_json() for t in self.tasks]}


# ---------------------------------------------------------------- parsing

def _toml(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        msg = getattr(exc, "msg", None) or str(exc)
        if line is None:
            m = re.search(r"line (\d+), column (\d+)", str(exc))
            line, col = (int(m.group(1)), int(m.group(2))) if m else (1, 1)
            msg = re.sub(r"\s*\(at line \d+, column \d+\)", "", msg)
        raise ParseError(msg, line, col) from None


def parse_scenario(text: str, path: str | None = None) -> Scenario:
    """Parse and validate a scenario document."""
    data = _toml(text)
    extra = set(data) - _TOP_KEYS
    if extra:
        raise ValidationError(sorted(extra)[0], "unknown top-level key")
    schema = data.get("schema", 1)
    if schema != 1:
        raise ValidationError("schema", f"unsupported scenario schema {schema!r}")
    name = data.get("name") or (Path(path).stem if path else "scenario")
    if not isinstance(name, str):
        raise ValidationError("name", "must be a string")
    desc = data.get("description", "")
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
        raise ValidationError("seed", "must be an integer")
    if "ring" not in data or not isinstance(data["ring"], dict):
        raise ValidationError("ring", "missing [ring] table")
    ring = _ring(data["ring"])
    try:
        alg = ring.build()
    except WorkbenchError as exc:
        where = "ring.tilde" if ring.tilde is not None else "ring.curvature"
        raise ValidationError(where, str(exc)) from None
    except (ValueError, KeyError) as exc:
        raise ValidationError("ring", str(exc)) from None
    tasks_raw = data.get("tasks")
    if not isinstance(tasks_raw, list) or not tasks_raw:
        raise ValidationError("tasks", "need a non-empty [[tasks]] array")
    tasks = [_task(i, t, alg) for i, t in enumerate(tasks_raw)]
    sampling = [i for i, t in enumerate(tasks) if t.kind == "chern_check" and "seed" not in t.params]
    if sampling and seed is None:
        raise ValidationError(f"tasks[{sampling[0]}].seed", "sampling task without a seed "
                              "(set a top-level seed or a per-task seed)")
    sc = Scenario(name, desc, ring, tasks, seed, str(path) if path else None)
    sc._alg = alg
    return sc


def load_scenario(path) -> Scenario:
    p = Path(path)
    return parse_scenario(p.read_text(encoding="utf-8"), str(p))


def _ring(r: dict) -> RingSpec:
    extra = set(r) - _RING_KEYS
    if extra:
        raise ValidationError(f"ring.{sorted(extra)[0]}", "unknown key")
    for key in ("field", "variables", "weights"):
        if key not in r:
            raise ValidationError(f"ring.{key}", "required")
    if not isinstance(r["field"], str):
        raise ValidationError("ring.field", "must be a string such as \"QQ\", \"GF(3)\" or \"GF(3)(s)\"")
    try:
        field_from_descriptor(r["field"])
    except (ValueError, WorkbenchError) as exc:
        raise ValidationError("ring.field", str(exc)) from None
    vs = r["variables"]
    if not isinstance(vs, list) or not all(isinstance(v, str) and _IDENT.match(v) for v in vs):
        raise ValidationError("ring.variables", "must be a list of identifiers")
    if len(set(vs)) != len(vs):
        raise ValidationError("ring.variables", "duplicate variable")
    ws = r["weights"]
    if not isinstance(ws, list) or len(ws) != len(vs) or not all(isinstance(w, int) and not isinstance(w, bool)
                                                                for w in ws):
        raise ValidationError("ring.weights", "must be a list of integers, one per variable")
    ground = r.get("ground", LAURENT)
    if ground not in (LAURENT, POLY, FIELD):
        raise ValidationError("ring.ground", f"must be one of {LAURENT!r}, {POLY!r}, {FIELD!r}")
    t = r.get("t", "t")
    if ground == LAURENT and (not isinstance(t, str) or not _IDENT.match(t) or t in vs):
        raise ValidationError("ring.t", "must be a fresh identifier")
    gv = r.get("ground_vars", [])
    if not isinstance(gv, list) or any(v not in vs for v in gv):
        raise ValidationError("ring.ground_vars", "must list declared variables")
    if gv and ground != POLY:
        raise ValidationError("ring.ground_vars", "only meaningful with ground = \"poly\"")
    tilde = r.get("tilde")
    curv = r.get("curvature")
    if tilde is not None:
        if curv is not None:
            raise ValidationError("ring.curvature", "give either a curvature or a tilde list, not both")
        if not isinstance(tilde, list) or not tilde or not all(isinstance(f, str) for f in tilde):
            raise ValidationError("ring.tilde", "must be a non-empty list of polynomials")
        base = r.get("tilde_base", FIELD)
        if base not in (FIELD, POLY):
            raise ValidationError("ring.tilde_base", "must be \"field\" or \"poly\"")
        return RingSpec(r["field"], vs, ws, FIELD if base == FIELD else POLY, t, [], None, tilde, base)
    if curv is not None and not isinstance(curv, str):
        raise ValidationError("ring.curvature", "must be a polynomial string")
    return RingSpec(r["field"], vs, ws, ground, t, gv, curv, None, FIELD)


def _check_poly(alg: CurvedAlgebra, where: str, s) -> str:
    if not isinstance(s, str):
        raise ValidationError(where, "must be a polynomial string")
    try:
        alg.ring(s)
    except WorkbenchError as exc:
        raise ValidationError(where, str(exc)) from None
    except (ValueError, KeyError) as exc:
        raise ValidationError(where, f"cannot parse {s!r}: {exc}") from None
    return s


def _check(alg: CurvedAlgebra, where: str, tag: str, v):
    isint = lambda x: isinstance(x, int) and not isinstance(x, bool)
    if tag == "window":
        if not (isinstance(v, list) and len(v) == 2 and all(isint(x) for x in v) and v[0] <= v[1]):
            raise ValidationError(where, "must be a finite window [lo, hi] of integers with lo <= hi")
    elif tag == "caps":
        if not (isinstance(v, list) and len(v) >= 3 and all(isint(x) and x >= 0 for x in v)
                and v == sorted(set(v))):
            raise ValidationError(where, "must be at least three increasing nonnegative integers")
    elif tag == "posint":
        if not (isint(v) and v >= 0):
            raise ValidationError(where, "must be a nonnegative integer")
    elif tag == "int":
        if not isint(v):
            raise ValidationError(where, "must be an integer")
    elif tag == "bool":
        if not isinstance(v, bool):
            raise ValidationError(where, "must be true or false")
    elif tag == "convention":
        if v not in (TOP, CHERN):
            raise ValidationError(where, f"must be {TOP!r} or {CHERN!r}")
    elif tag == "model":
        if v not in ("auto", "direct", "minimal"):
            raise ValidationError(where, "must be \"auto\", \"direct\" or \"minimal\"")
    elif tag == "algebra":
        if v not in ("one_object", "generator", "ground_field"):
            raise ValidationError(where, "must be \"one_object\", \"generator\" or \"ground_field\"")
    elif tag == "poly":
        _check_poly(alg, where, v)
    elif tag == "polys":
        if not isinstance(v, list):
            raise ValidationError(where, "must be a list of polynomials")
        for i, s in enumerate(v):
            _check_poly(alg, f"{where}[{i}]", s)
    elif tag == "generator":
        if not isinstance(v, dict) or set(v) != {"xs", "ys"}:
            raise ValidationError(where, "must be a table {xs = [...], ys = [...]}")
        _check(alg, f"{where}.xs", "polys", v["xs"])
        _check(alg, f"{where}.ys", "polys", v["ys"])
        if len(v["xs"]) != len(v["ys"]):
            raise ValidationError(where, "xs and ys must have the same length")
    elif tag == "points":
        if not isinstance(v, list) or not all(isinstance(p, dict) for p in v):
            raise ValidationError(where, "must be a list of tables {variable = value}")
        for i, p in enumerate(v):
            for k in p:
                if k not in alg.ring.variables:
                    raise ValidationError(f"{where}[{i}].{k}", "undeclared variable")
    elif tag == "probe_algebra":
        if not isinstance(v, dict) or not {"curvature", "xs", "ys"} <= set(v) <= {"curvature", "xs", "ys",
                                                                              "weights"}:
            raise ValidationError(where, "must be a table {curvature = \"...\", xs = [...], ys = [...]"
                                  "[, weights = [...]]}")
        ws = v.get("weights", alg.Q.weights)
        if not (isinstance(ws, list | tuple) and len(ws) == len(alg.Q.variables) and all(isint(w) for w in ws)):
            raise ValidationError(f"{where}.weights", "must be a list of integers, one per variable")
        if not isinstance(v["curvature"], str):
            raise ValidationError(f"{where}.curvature", "must be a polynomial string")
        for k in ("xs", "ys"):
            if not isinstance(v[k], list) or not all(isinstance(s, str) for s in v[k]):
                raise ValidationError(f"{where}.{k}", "must be a list of polynomial strings")


def _task(i: int, t, alg: CurvedAlgebra) -> TaskSpec:
    where = f"tasks[{i}]"
    if not isinstance(t, dict):
        raise ValidationError(where, "must be a table")
    kind = t.get("kind")
    if kind not in TASK_KINDS:
        raise ValidationError(f"{where}.kind", f"must be one of {', '.join(TASK_KINDS)}")
    params = {k: v for k, v in t.items() if k != "kind"}
    allowed = _PARAMS[kind]
    for k, v in params.items():
        if k not in allowed:
            raise ValidationError(f"{where}.{k}", f"unknown parameter for task {kind!r}")
        _check(alg, f"{where}.{k}", allowed[k], v)
    for k in _REQUIRED.get(kind, ()):
        if k not in params:
            raise ValidationError(f"{where}.{k}", "required")
    if kind == "appendix_koszul" and len(params["xs"]) != len(params["ys"]):
        raise ValidationError(f"{where}.ys", "xs and ys must have the same length")
    if kind == "hochschild" and params.get("algebra") == "generator" and "generator" not in params:
        raise ValidationError(f"{where}.generator", "required when algebra = \"generator\"")
    return TaskSpec(kind, params)


__all__ = ["TASK_KINDS", "RingSpec", "TaskSpec", "Scenario", "parse_scenario", "load_scenario"]
