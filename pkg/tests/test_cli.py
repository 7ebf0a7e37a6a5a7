import json
import shutil

import pytest

from ctdde.cli import main
from ctdde.report import parse_report
from ctdde.repro import default_spec_dir
from ctdde.specfile import SpecFileError, dumps, load, loads

DATA = default_spec_dir()


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, parse_report(out.out), out


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


# -- spec files ---------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(p.stem for p in DATA.glob("*.json")))
def test_bundled_specs_round_trip(name, tmp_path):
    sf = load(DATA / f"{name}.json")
    once = dumps(sf)
    assert dumps(loads(once)) == once


def test_defaults_are_filled():
    sf = loads('{"terms": [{"a": "0.3", "h": "t - 1"}]}')
    assert sf.doc["sim"] == {"T": 30, "Q": 64}
    assert sf.initial.start == 0 and sf.alpha_grid[1] == 1 / 16


@pytest.mark.parametrize("text, fragment", [
    ('{"terms": []}', "schema"),
    ('{"terms": [{"a": "0.3"}]}', "schema"),
    ('{"terms": [{"a": "0.3", "h": "t - 1"}], "sim": {"Q": 1}}', "schema"),
    ('{"terms": [{"a": "0.3", "h": "t - 1"}], "history": {"expr": "1", "start": 2}}', "schema"),
    ('{"terms": [{"a": "0.3", "h": "t - 1"}], "extra": 1}', "schema"),
    ('{"terms": [{"a": "0.3 +", "h": "t - 1"}]}', "terms[0].a"),
    ('{"terms": [{"a": "0.3", "h": "t - 1"}], "analysis": {"n_range": [5, 2]}}', "empty"),
    ("{", "JSON"),
])
def test_schema_violations(text, fragment):
    with pytest.raises(SpecFileError) as err:
        loads(text)
    assert fragment in str(err.value)


# -- commands -------------------------------------------------------------------

def test_simulate_sign_change(capsys, tmp_path):
    code, rep, _ = run(capsys, "simulate", DATA / "sign_change.json", "--out", tmp_path)
    assert code == 0
    first = rep["first_sign_event"].strip("()").split(", ")
    assert 6.5 <= float(first[1]) < 7
    assert (tmp_path / "trajectory.csv").exists()
    assert (tmp_path / "simulate_report.txt").read_text().startswith("command=simulate\n")


def test_simulate_example1_eventually_positive(capsys):
    code, rep, _ = run(capsys, "simulate", DATA / "example1.json")
    assert code == 0 and rep["eventually_positive"] == "true" and rep["sign_events"] == "0"


def test_simulate_zero_coefficients_is_periodic(capsys, tmp_path):
    spec = write_spec(tmp_path, {"terms": [{"a": "0", "h": "t - 1"}],
                                 "history": {"expr": "1 + frac(t)", "start": -1}, "sim": {"T": 5, "Q": 8}})
    code, _, _ = run(capsys, "simulate", spec, "--out", tmp_path / "o")
    assert code == 0
    rows = (tmp_path / "o" / "trajectory.csv").read_text().splitlines()[1:]
    values = [float(r.split(",")[1]) for r in rows]
    assert values == [1 + j / 8 for j in range(8)] * 7


def test_simulate_overrides(capsys):
    code, rep, _ = run(capsys, "simulate", DATA / "example4.json", "--T", 5, "--Q", 8)
    assert code == 0 and rep["T"] == "5" and rep["Q"] == "8"


@pytest.mark.parametrize("name, verdict, code", [
    ("ex1eq1", "NoPositiveSolutionUnderCond5", 0),
    ("ex3eq1", "PositiveSolutionExists", 0),
    ("burst", "NoPositiveNonincreasing", 0),
    ("example4", "Inconclusive", 3),
])
def test_analyze_verdicts(capsys, name, verdict, code):
    got, rep, _ = run(capsys, "analyze", DATA / f"{name}.json")
    assert got == code and rep["verdict"] == verdict
    if name == "burst":
        assert rep["evidence.S"] == "4.5" and rep["evidence.t"] == "18"


def test_analyze_reports_each_section(capsys):
    _, rep, _ = run(capsys, "analyze", DATA / "groenwall.json")
    for key in ("thm2.verdict", "certificate.verdict", "s_scan.verdict", "barrier.verdict", "lemma.verdict"):
        assert key in rep
    assert rep["lemma.verdict"] == "NonOscillatory"


def test_analyze_contradiction_is_an_error(capsys, tmp_path):
    # a wrong "certificate" against an oscillatory equation must be caught, not reported
    spec = write_spec(tmp_path, {"terms": [{"a": "0.3", "h": "t - 1"}],
                                 "certificate": {"u": [1] * 40, "V": [1] * 40}})
    code, rep, out = run(capsys, "analyze", spec)
    assert code == 0 and rep["certificate.verdict"] == "Inconclusive"  # fails (16): no clash
    assert rep["verdict"] == "NoPositiveSolutionUnderCond5"
    import ctdde.cli as cli
    from ctdde.analysis import Tag, Verdict
    real = cli.certificate_verdict
    try:
        cli.certificate_verdict = lambda *a: Verdict(Tag.POSITIVE_SOLUTION_EXISTS, "forced")
        code, _, out = run(capsys, "analyze", spec)
    finally:
        cli.certificate_verdict = real
    assert code == 1 and "certificate passes" in out.err


def test_envelopes_command(capsys, tmp_path):
    code, rep, _ = run(capsys, "envelopes", DATA / "ex3eq1.json", "--out", tmp_path, "--alpha-grid", 2)
    assert code == 0
    assert rep["rigorous.alpha_0.0.max_hf_high_minus_n"] == "-1"
    lines = (tmp_path / "envelopes_rigorous.csv").read_text().splitlines()
    assert lines[0] == "n,k,a_low,a_high,hf_low,hf_high,mode,alpha"
    assert len(lines) == 1 + 2 * 31
    assert (tmp_path / "envelopes_sampled.csv").exists()


def test_bound_command(capsys, tmp_path):
    code, rep, _ = run(capsys, "bound", DATA / "ex3eq1.json", "--out", tmp_path)
    assert code == 0 and rep["certificate"] == "pass" and rep["bound_violations"] == "0"
    assert (tmp_path / "bounds.csv").read_text().startswith("n,piece_min,piece_max,u,V\n")


def test_bound_failing_certificate_is_inconclusive(capsys, tmp_path):
    spec = write_spec(tmp_path, {"terms": [{"a": "0.1", "h": "t - 1"}],
                                 "certificate": {"u": "1", "V": "1"}})
    code, rep, _ = run(capsys, "bound", spec)
    assert code == 3 and rep["failed_condition"] == "16"


def test_exit_codes_for_bad_input(capsys, tmp_path):
    assert run(capsys, "analyze", write_spec(tmp_path, {"terms": []}))[0] == 2
    assert run(capsys, "bound", DATA / "ex1eq1.json")[0] == 2
    assert run(capsys, "simulate", tmp_path / "missing.json")[0] == 1
    under = write_spec(tmp_path, {"terms": [{"a": "0.3", "h": "t - 3"}]}, "under.json")
    code, _, out = run(capsys, "simulate", under)
    assert code == 1 and "history start" in out.err


def test_reports_are_deterministic(capsys):
    first = run(capsys, "analyze", DATA / "burst.json")[1]
    second = run(capsys, "analyze", DATA / "burst.json")[1]
    assert first == second


def test_repro_single(capsys, tmp_path):
    code, rep, _ = run(capsys, "repro", "--only", "example4", "--out", tmp_path)
    assert code == 0 and rep["examples"] == "1" and rep["example4.status"] == "PASS"
    assert (tmp_path / "repro_report.txt").exists()


def test_repro_corrupted_directory(capsys, tmp_path):
    bad = tmp_path / "specs"
    shutil.copytree(DATA, bad)
    (bad / "burst.json").write_text('{"terms": "oops"}')
    code, rep, out = run(capsys, "repro", bad, "--only", "burst", "example4")
    assert code == 1
    assert rep["burst.status"] == "FAIL" and rep["example4.status"] == "PASS"
    assert rep["failed"] == "burst" and "'burst' failed" in out.err


def test_repro_full_suite(capsys):
    code, rep, _ = run(capsys, "repro")
    assert code == 0 and rep["examples"] == "8" and rep["failed"] == "none"
