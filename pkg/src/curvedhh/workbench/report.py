"""Run a scenario and produce a deterministic JSON report; compare reports with goldens."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .. import __version__
from ..errors import WorkbenchError
from .scenario import Scenario, load_scenario
from .tasks import TASKS, Context

SCHEMA = "curvedhh.report/1"


def _plain(v):
    """Recursively convert to JSON-native values with string keys."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, set):
        return sorted((_plain(x) for x in v), key=repr)
    if isinstance(v, bool) or v is None or isinstance(v, (int, float, str)):
        return v
    if isinstance(v, Fraction):
        return str(v)
    if hasattr(v, "to_json"):
        return _plain(v.to_json())
    return str(v)


@dataclass
class Report:
    scenario: dict
    seed: int | None
    tasks: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(t["status"] == "ok" for t in self.tasks)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "scenario": self.scenario, "seed": self.seed,
                "tasks": self.tasks, "meta": self.meta}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def to_csv(self) -> str:
        """Every non-zero cohomology slice found in the task results, one row each."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["task", "kind", "table", "position", "weight", "dim"])

        def walk(node, path, i, kind):
            if isinstance(node, dict):
                nz = node.get("nonzero")
                if isinstance(nz, dict):
                    for key, dim in sorted(nz.items(), key=lambda kv: tuple(int(x) for x in kv[0].split(","))):
                        p, wt = key.split(",")
                        w.writerow([i, kind, path or "result", p, wt, dim])
                for k in sorted(node):
                    if k != "nonzero":
                        walk(node[k], f"{path}.{k}" if path else k, i, kind)

        for i, t in enumerate(self.tasks):
            walk(t.get("result"), "", i, t["kind"])
        return buf.getvalue()


def run(scenario: Scenario | str | Path, seed: int | None = None, jobs: int = 1) -> Report:
    """Execute every task; a task failure is recorded in its entry and does not stop the run."""
    sc = scenario if isinstance(scenario, Scenario) else load_scenario(scenario)
    seed = sc.seed if seed is None else seed
    ctx = Context(seed=seed, jobs=jobs)
    rep = Report(_plain(sc.to_json()), seed)
    timing = []
    t_all = time.perf_counter()
    for spec in sc.tasks:
        t0 = time.perf_counter()
        entry: dict = {"kind": spec.kind}
        try:
            entry["result"] = _plain(TASKS[spec.kind](sc, spec.params, ctx))
            entry["status"] = "ok"
        except WorkbenchError as exc:
            entry["status"] = "error"
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
        rep.tasks.append(entry)
        timing.append(round(time.perf_counter() - t0, 4))
    rep.meta = {"version": __version__, "timing": {"tasks": timing,
                                                  "total": round(time.perf_counter() - t_all, 4)}}
    return rep


def _diff(a, b, path: str, out: list):
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            p = f"{path}.{k}"
            if k not in a:
                out.append(f"{p}: missing in report")
            elif k not in b:
                out.append(f"{p}: missing in golden")
            else:
                _diff(a[k], b[k], p, out)
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            out.append(f"{path}: length {len(a)} != {len(b)}")
        for i, (x, y) in enumerate(zip(a, b)):
            _diff(x, y, f"{path}[{i}]", out)
    elif a != b:
        out.append(f"{path}: {json.dumps(a, sort_keys=True)} != {json.dumps(b, sort_keys=True)}")


def compare_golden(report, golden) -> list[str]:
    """Paths where the report differs from the golden; `meta` (timing, version) is ignored."""
    a = report.to_json() if isinstance(report, Report) else report
    b = golden.to_json() if isinstance(golden, Report) else golden
    out: list = []
    for k in sorted((set(a) | set(b)) - {"meta", "tasks"}):
        if k not in a:
            out.append(f"{k}: missing in report")
        elif k not in b:
            out.append(f"{k}: missing in golden")
        else:
            _diff(a[k], b[k], k, out)
    ta, tb = a.get("tasks", []), b.get("tasks", [])
    if len(ta) != len(tb):
        out.append(f"tasks: length {len(ta)} != {len(tb)}")
    for i, (x, y) in enumerate(zip(ta, tb)):
        _diff(x, y, f"tasks[{i}:{x.get('kind', '?')}]", out)
    for i in range(len(tb), len(ta)):
        out.append(f"tasks[{i}:{ta[i].get('kind', '?')}]: missing in golden")
    for i in range(len(ta), len(tb)):
        out.append(f"tasks[{i}:{tb[i].get('kind', '?')}]: missing in report")
    return out


def load_report(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


__all__ = ["SCHEMA", "Report", "run", "compare_golden", "load_report"]
