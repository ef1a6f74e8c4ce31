import copy
import json
import subprocess
import sys

import pytest

from curvedhh.errors import ParseError, ValidationError
from curvedhh.workbench import SCHEMA, compare_golden, load_report, load_scenario, parse_scenario, run
from curvedhh.workbench.cli import EXIT_GOLDEN, EXIT_OK, EXIT_TASK, main

from conftest import SCENARIOS

GOLDEN = SCENARIOS / "golden"
FAST = sorted(p.stem for p in SCENARIOS.glob("*.toml") if p.stem != "verify_main_x2")

HEADER = '''schema = 1
name = "mem"

[ring]
field = "QQ"
variables = ["x"]
weights = [2]
curvature = "x^3*t"
'''


# ---------------------------------------------------------------- parsing and validation

def test_parse_error_has_line_and_column():
    with pytest.raises(ParseError) as exc:
        parse_scenario('schema = 1\nname = "a"\n[ring\n', "mem.toml")
    assert (exc.value.line, exc.value.column) == (3, 6)


def test_validation_error_names_field():
    with pytest.raises(ValidationError) as exc:
        parse_scenario(HEADER + '[[tasks]]\nkind = "milnor"\nwindow = [0]\n')
    assert exc.value.field == "tasks[0].window"


def test_validation_error_unknown_variable():
    with pytest.raises(ValidationError) as exc:
        parse_scenario(HEADER.replace("x^3*t", "z^3*t"))
    assert exc.value.field == "ring.curvature"


def test_validation_error_unknown_task_kind():
    with pytest.raises(ValidationError) as exc:
        parse_scenario(HEADER + '[[tasks]]\nkind = "frobnicate"\n')
    assert exc.value.field.startswith("tasks[0]")


def test_sampling_task_requires_seed():
    with pytest.raises(ValidationError):
        parse_scenario(HEADER.replace("x^3*t", "x^2*t").replace("[2]", "[1]")
                       + '[[tasks]]\nkind = "chern_check"\nsamples = 5\nwindow = [0, 2]\n')


def test_catalog_parses():
    for stem in FAST + ["verify_main_x2"]:
        assert load_scenario(SCENARIOS / f"{stem}.toml").name == stem


# ---------------------------------------------------------------- runs

def test_task_errors_do_not_abort_later_tasks():
    sc = parse_scenario(HEADER.replace("QQ", "GF(3)").replace("[2]", "[1]")
                        + '[[tasks]]\nkind = "milnor"\n'
                        + '[[tasks]]\nkind = "smooth_check"\n')
    rep = run(sc)
    assert [t["status"] for t in rep.tasks] == ["error", "ok"]
    assert rep.tasks[0]["error"]["type"] == "NotRegularSequence"
    assert rep.tasks[1]["result"]["value"] is False
    assert not rep.ok


def test_report_is_deterministic():
    a = run(SCENARIOS / "milnor_x3.toml").to_json()
    b = run(SCENARIOS / "milnor_x3.toml").to_json()
    a.pop("meta"), b.pop("meta")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["schema"] == SCHEMA


@pytest.mark.parametrize("stem", FAST)
def test_catalog_matches_golden(stem):
    rep = run(SCENARIOS / f"{stem}.toml")
    assert rep.ok, [t.get("error") for t in rep.tasks]
    assert compare_golden(rep, load_report(GOLDEN / f"{stem}.json")) == []


def test_csv_lists_nonzero_slices():
    text = run(SCENARIOS / "milnor_x3.toml").to_csv().splitlines()
    assert text[0] == "task,kind,table,position,weight,dim"
    assert "0,milnor,cohomology,1,0,1" in text and "0,milnor,cohomology,1,2,1" in text


# ---------------------------------------------------------------- golden diffs

@pytest.fixture(scope="module")
def milnor_report():
    return run(SCENARIOS / "milnor_x3.toml").to_json()


def test_golden_identical_is_empty(milnor_report):
    assert compare_golden(milnor_report, copy.deepcopy(milnor_report)) == []


def test_golden_ignores_meta(milnor_report):
    other = copy.deepcopy(milnor_report)
    other["meta"] = {"version": "0", "timing": {"total": 99}}
    assert compare_golden(milnor_report, other) == []


def test_golden_dimension_change_names_path(milnor_report):
    golden = copy.deepcopy(milnor_report)
    dims = golden["tasks"][0]["result"]["cohomology"]["dims"]
    dims["1"]["2"] = 3
    diff = compare_golden(milnor_report, golden)
    assert diff == ["tasks[0:milnor].result.cohomology.dims.1.2: 1 != 3"]


def test_golden_extra_task_flagged(milnor_report):
    golden = copy.deepcopy(milnor_report)
    golden["tasks"] = golden["tasks"][:-1]
    diff = compare_golden(milnor_report, golden)
    assert "tasks[2:smooth_check]: missing in golden" in diff


def test_golden_missing_key_flagged(milnor_report):
    golden = copy.deepcopy(milnor_report)
    golden["tasks"][0]["result"]["extra"] = 1
    assert "tasks[0:milnor].result.extra: missing in report" in compare_golden(milnor_report, golden)


# ---------------------------------------------------------------- command line

def test_cli_run_ok(tmp_path):
    out = tmp_path / "r.json"
    code = main(["run", str(SCENARIOS / "milnor_x3.toml"), "--out", str(out),
                 "--golden", str(GOLDEN / "milnor_x3.json"), "--csv", str(tmp_path / "r.csv")])
    assert code == EXIT_OK
    assert load_report(out)["scenario"]["name"] == "milnor_x3"
    assert (tmp_path / "r.csv").read_text().startswith("task,kind")


def test_cli_golden_mismatch(tmp_path, capsys):
    golden = load_report(GOLDEN / "milnor_x3.json")
    golden["tasks"][0]["result"]["cohomology"]["dims"]["1"]["2"] = 3
    g = tmp_path / "g.json"
    g.write_text(json.dumps(golden))
    assert main(["run", str(SCENARIOS / "milnor_x3.toml"), "--out", str(tmp_path / "r.json"),
                 "--golden", str(g)]) == EXIT_GOLDEN
    assert "dims.1.2" in capsys.readouterr().err
    assert main(["golden", str(tmp_path / "r.json"), str(g)]) == EXIT_GOLDEN
    assert main(["golden", str(tmp_path / "r.json"), str(GOLDEN / "milnor_x3.json")]) == EXIT_OK


def test_cli_task_error_wins_over_golden(tmp_path):
    sc = tmp_path / "bad.toml"
    sc.write_text(HEADER.replace("QQ", "GF(3)").replace("[2]", "[1]")
                  + '[[tasks]]\nkind = "milnor"\n')
    assert main(["run", str(sc), "--out", str(tmp_path / "r.json")]) == EXIT_TASK
    assert main(["run", str(sc), "--out", str(tmp_path / "r.json"),
                 "--golden", str(GOLDEN / "milnor_x3.json")]) == EXIT_TASK


def test_cli_parse_error_reports_position(tmp_path, capsys):
    sc = tmp_path / "broken.toml"
    sc.write_text('schema = 1\nname = "a"\n[ring\n')
    assert main(["run", str(sc)]) == EXIT_TASK
    assert f"{sc}:3:6" in capsys.readouterr().err


def test_cli_missing_file(tmp_path):
    assert main(["run", str(tmp_path / "nope.toml")]) == EXIT_TASK


def test_cli_entry_point_subprocess(tmp_path):
    out = tmp_path / "r.json"
    res = subprocess.run([sys.executable, "-m", "curvedhh.workbench.cli", "run",
                          str(SCENARIOS / "smooth_x2_y2.toml"), "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert compare_golden(load_report(out), load_report(GOLDEN / "smooth_x2_y2.json")) == []


@pytest.mark.slow
def test_verify_main_matches_golden():
    rep = run(SCENARIOS / "verify_main_x2.toml")
    assert rep.ok
    assert compare_golden(rep, load_report(GOLDEN / "verify_main_x2.json")) == []
