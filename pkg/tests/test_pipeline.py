import copy
import json
import subprocess
import sys

import pytest

from discretegalois.corpus import INTEGRABLE, load_report, problem_names, problem_path, report_path
from discretegalois.pipeline import cli
from discretegalois.pipeline.analyze import analyze, render_text
from discretegalois.pipeline.problem import ProblemError, ProblemSpec
from discretegalois.pipeline.recheck import ReportCorrupted, recheck

EXPECTED = {
    "ex1_generic": ("NON_INTEGRABLE", "unipotent_affine"),
    "ex1_resonant": ("INCONCLUSIVE", "none"),
    "ex2": ("NON_INTEGRABLE", "unipotent_affine"),
    "ex3": ("HYPOTHESES_VIOLATED", "none"),
    "ex4": ("NON_INTEGRABLE", "unipotent_affine"),
    "diagonal_linear": ("INCONCLUSIVE", "none"),
    "conjugated_diagonal": ("INCONCLUSIVE", "none"),
    "ziglin_4d": ("INCONCLUSIVE", "none"),
}


def strip_timing(report):
    out = copy.deepcopy(report)
    out.pop("timing", None)
    return out


def test_corpus_is_complete():
    assert set(problem_names()) == set(EXPECTED)
    assert set(INTEGRABLE) <= set(EXPECTED)


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_corpus_verdicts(name):
    report = analyze(ProblemSpec.load(problem_path(name)))
    cert = report["certificate"]
    assert (cert["verdict"], cert["criterion"]) == EXPECTED[name]
    if cert["verdict"] == "NON_INTEGRABLE":
        assert cert["assumptions"] and not cert["missing"]


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_shipped_reports_are_current(name):
    fresh = analyze(ProblemSpec.load(problem_path(name)))
    assert strip_timing(fresh) == strip_timing(load_report(name))


def test_analysis_is_deterministic():
    spec = ProblemSpec.load(problem_path("ziglin_4d"))
    a = analyze(spec, seed=3)
    b = analyze(spec, seed=3)
    assert json.dumps(strip_timing(a), sort_keys=True) == json.dumps(strip_timing(b), sort_keys=True)


def test_problem_round_trip_and_hash():
    spec = ProblemSpec.load(problem_path("ex1_generic"))
    again = ProblemSpec.from_json(json.loads(json.dumps(spec.to_json())))
    assert again.input_hash() == spec.input_hash()
    # key order in the file does not matter
    raw = json.loads(problem_path("ex1_generic").read_text())
    shuffled = dict(reversed(list(raw.items())))
    assert ProblemSpec.from_json(shuffled).input_hash() == spec.input_hash()
    changed = dict(raw, parameters=["q", "qb", "extra"])
    assert ProblemSpec.from_json(changed).input_hash() != spec.input_hash()


@pytest.mark.parametrize("mutation", [
    lambda d: d.pop("map"),
    lambda d: d.update(map=["x"]),
    lambda d: d.update(variables=["x", "x"]),
    lambda d: d.update(parameters=["z"]),
    lambda d: d["curve"].update(components=["z"]),
])
def test_problem_validation(mutation):
    raw = json.loads(problem_path("ex1_generic").read_text())
    mutation(raw)
    with pytest.raises(ProblemError):
        ProblemSpec.from_json(raw).build()


def test_undeclared_symbol_is_a_problem_error():
    raw = json.loads(problem_path("ex1_generic").read_text())
    raw["map"][0] = "w*x"
    with pytest.raises(ProblemError):
        ProblemSpec.from_json(raw).build()


def test_text_rendering_mentions_verdict():
    report = load_report("ex1_generic")
    text = render_text(report)
    assert "NON_INTEGRABLE" in text and "unipotent_affine" in text


def test_periodic_phi_report_carries_warning():
    report = load_report("ex3")
    assert report["phi"]["periodic"] is True
    assert any("finite order" in n for n in report["certificate"]["notes"])


# recheck ---------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_recheck_shipped_reports(name):
    res = recheck(load_report(name))
    assert res.ok, res.failures


@pytest.mark.parametrize("path, value", [
    (("variational", "matrix", 0, 0), "2*q"),
    (("classification", "lattice"), []),
    (("certificate", "verdict"), "INCONCLUSIVE"),
    (("juniors", 0, "junior"), "z*Y1"),
    (("triangular", "P", 1, 0), "2"),
    (("certificate", "criterion"), "torus_full_diag"),
    (("certificate", "guard_tripped"), True),
])
def test_recheck_detects_tampering(path, value):
    name = {"juniors": "ex1_resonant", "triangular": "ex4"}.get(path[0], "ex1_generic")
    report = load_report(name)
    node = report
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value
    assert not recheck(report).ok


def test_recheck_detects_changed_problem():
    report = load_report("ex1_generic")
    report["problem"]["map"][0] = "2*q*x/(1 - y/(x - 1))"
    assert not recheck(report).ok


def test_recheck_rejects_corrupted_reports():
    with pytest.raises(ReportCorrupted):
        recheck({"tool": "x"})
    report = load_report("ex1_generic")
    report["variational"]["matrix"][0][0] = "q +* 1"
    with pytest.raises(ReportCorrupted):
        recheck(report)


# command line ------------------------------------------------------------------

def test_cli_analyze_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert cli.main(["analyze", str(problem_path("ex1_generic")), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["certificate"]["verdict"] == "NON_INTEGRABLE"
    assert cli.main(["recheck", str(out)]) == 0
    assert "recheck passed" in capsys.readouterr().out


def test_cli_analyze_text(capsys):
    assert cli.main(["analyze", str(problem_path("ex3")), "--format", "text"]) == 0
    assert "HYPOTHESES_VIOLATED" in capsys.readouterr().out


def test_cli_invalid_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["analyze", str(bad)]) == 2
    raw = json.loads(problem_path("ex1_generic").read_text())
    raw["map"][1] = "y +"
    bad.write_text(json.dumps(raw))
    assert cli.main(["analyze", str(bad)]) == 2
    assert cli.main(["analyze", str(tmp_path / "missing.json")]) == 2


def test_cli_internal_error(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise RuntimeError("boom")
    monkeypatch.setattr(cli, "analyze", boom)
    assert cli.main(["analyze", str(problem_path("ex1_generic"))]) == 3


def test_cli_recheck_exit_codes(tmp_path, capsys):
    report = load_report("ex1_generic")
    report["variational"]["matrix"][1][1] = "q"
    tampered = tmp_path / "t.json"
    tampered.write_text(json.dumps(report))
    assert cli.main(["recheck", str(tampered)]) == 1
    assert "FAIL" in capsys.readouterr().out
    broken = tmp_path / "b.json"
    broken.write_text("[1, 2")
    assert cli.main(["recheck", str(broken)]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "discretegalois", "recheck", str(report_path("ex4"))],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "recheck passed" in proc.stdout
