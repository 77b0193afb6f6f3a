import json
import subprocess
import sys

import pytest

from mwq.cli import main
from mwq.fuzzing import run_trial, write_repro
from mwq.pipeline import default_window, load_kb

from conftest import BUNDLES


def files(name):
    d = BUNDLES / name
    return ["--kb", str(d / "kb.txt"), "--data", str(d / "data.csv"), "--query", str(d / "query.txt")]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


@pytest.mark.parametrize("name", ["cancer", "chemo"])
def test_bundle_goldens(capsys, name):
    code, out, _ = run(capsys, "answer", *files(name))
    assert code == 0
    assert json.loads(out) == json.loads((BUNDLES / name / "expected.json").read_text())


def test_output_is_deterministic(capsys):
    outs = {run(capsys, "answer", *files("cancer"))[1] for _ in range(3)}
    assert len(outs) == 1


def test_oracle_engine_agrees(capsys):
    _, rewrite, _ = run(capsys, "answer", *files("cancer"))
    code, oracle, _ = run(capsys, "answer", *files("cancer"), "--engine", "oracle")
    assert code == 0 and oracle == rewrite


def test_csv(capsys):
    code, out, _ = run(capsys, "answer", *files("chemo"), "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["x,from,to", "p1,257,258"]


def test_only_tem(capsys, write):
    q = write("q.txt", "q(x) := {CancerPatient(x)}\n")
    kb = files("chemo")[:4]
    code, out, _ = run(capsys, "answer", *kb, "--query", q, "--only-tem")
    assert json.loads(out) == {"answers": [{"tuple": ["p1"], "intervals": [[0, 0], [167, 167], [258, 258]]}]}


class TestCommands:
    def test_check(self, capsys):
        code, out, _ = run(capsys, "check", *files("cancer")[:4])
        assert (code, out) == (0, "")

    def test_classify(self, capsys):
        code, out, _ = run(capsys, "classify", "--kb", str(BUNDLES / "cancer" / "kb.txt"))
        lines = set(out.splitlines())
        assert code == 0
        assert {"BreastCancerPatient SUB CancerPatient", "SkinOfBreastCancer SUB BreastCancer"} <= lines
        assert not any(line.startswith("_") or "top" in line for line in lines)

    def test_classify_unsatisfiable(self, capsys, write):
        code, out, _ = run(capsys, "classify", "--kb", write("kb.txt", "A SUB bot\nB SUB A\nC SUB D\n"))
        assert code == 0
        assert out.splitlines() == ["A SUB bot", "B SUB bot", "C SUB D"]

    def test_saturate(self, capsys):
        code, out, _ = run(capsys, "saturate", *files("chemo")[:4])
        data = json.loads(out)
        assert code == 0
        assert data["individuals"]["p1"] == {"CancerPatient": [[0, 258]], "ChemotherapyPatient": [[0, 0], [167, 258]]}
        assert data["representatives"] == [-1, 0, 1, 166, 167, 168, 257, 258, 259]

    def test_saturate_needs_time_stamps(self, capsys):
        code, _, err = run(capsys, "saturate", *files("cancer")[:4])
        assert code == 1 and "time-stamped" in err

    def test_rewrite_text(self, capsys):
        code, out, _ = run(capsys, "rewrite", *files("cancer"))
        lines = out.splitlines()
        assert code == 0 and len(lines) == 3
        assert "->" in lines[1] and lines[2].startswith("q(x) := BreastCancerPatient(x)")

    def test_rewrite_json(self, capsys):
        code, out, _ = run(capsys, "rewrite", *files("cancer"), "--emit", "json")
        assert code == 0 and len(json.loads(out)) == 3

    def test_rewrite_temporal_skeleton(self, capsys):
        code, out, _ = run(capsys, "rewrite", *files("chemo"))
        assert code == 0 and out.splitlines()[0] == "# N = 270"

    def test_fuzz_passes(self, capsys, tmp_path):
        code, out, _ = run(capsys, "fuzz", "--seeds", "5", "--out", str(tmp_path / "repro"))
        assert code == 0 and json.loads(out) == {"failed_seed": None, "trials": 5}
        code, out, _ = run(capsys, "fuzz", "--seeds", "3", "--temporal", "--out", str(tmp_path / "repro"))
        assert code == 0
        assert not (tmp_path / "repro").exists()


class TestExitCodes:
    def test_usage(self, capsys):
        assert run(capsys, "answer", "--kb")[0] == 1
        assert run(capsys, "frobnicate")[0] == 1

    def test_parse_error(self, capsys, write):
        code, _, err = run(capsys, "check", "--kb", write("kb.txt", "A SUB SUB B\n"))
        assert code == 1 and "error" in err

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "check", "--kb", str(tmp_path / "absent.txt"))[0] == 1

    def test_inconsistent(self, capsys, write):
        kb = write("kb.txt", "A SUB bot\nA(a)\n")
        code, _, err = run(capsys, "check", "--kb", kb)
        assert code == 2 and "A(a)" in err
        q = write("q.txt", "q(x) := {A(x)}\n")
        assert run(capsys, "answer", "--kb", kb, "--query", q)[0] == 2

    def test_oracle_refusal(self, capsys, write):
        kb = write("kb.txt", "A SUB some r . B\nB SUB some r . A\nA(a)\n")
        q = write("q.txt", "q(x) := {r(x,y), B(y), r(y,z), A(z)}\n")
        code, _, err = run(capsys, "answer", "--kb", kb, "--query", q, "--engine", "oracle", "--oracle-depth", "1")
        assert code == 3 and "refused" in err


def test_module_entry_point():
    d = BUNDLES / "cancer"
    proc = subprocess.run(
        [sys.executable, "-m", "mwq", "answer", "--kb", str(d / "kb.txt"), "--data", str(d / "data.csv"), "--query", str(d / "query.txt")],
        capture_output=True,
        text=True,
        env={"MWQ_COLOR": "never", "PATH": ""},
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == json.loads((d / "expected.json").read_text())


@pytest.mark.parametrize("seed, temporal", [(3, False), (11, False), (4, True), (9, True)])
def test_repro_bundle_replays(capsys, tmp_path, seed, temporal):
    result = run_trial(seed, temporal=temporal)
    path = write_repro(result, tmp_path)
    kb = load_kb(path / "kb.txt", path / "data.txt")
    assert (kb.tbox, kb.abox, kb.temporal) == (result.instance.kb.tbox, result.instance.kb.abox, temporal)
    argv = ["answer", "--kb", str(path / "kb.txt"), "--data", str(path / "data.txt"), "--query", str(path / "query.txt")]
    if temporal:
        argv += ["--engine", "oracle", "--window", str(default_window(result.instance.query, kb))]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert json.loads(out) == json.loads((path / "expected.json").read_text())
