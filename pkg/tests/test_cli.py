import io
import json
import subprocess
import sys

import numpy as np
import pytest

from submatrix_amgm.cli import run


def invoke(argv, stdin_text="", monkeypatch=None, capsys=None):
    monkeypatch.setattr(sys, "stdin", io.StringIO(stdin_text))
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cli(monkeypatch, capsys):
    def _run(argv, stdin_text=""):
        return invoke(argv, stdin_text, monkeypatch, capsys)

    return _run


POSITIVE_3X3 = "1,2,0.7\n3,4,0.25\n0.5,2.5,1.5\n"


def test_verify_json(cli):
    code, out, _ = cli(["verify", "--k", "2", "--l", "2", "--report", "json"], POSITIVE_3X3)
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "holds"
    assert doc["values"]["lhs"] >= doc["values"]["rhs"]
    assert doc["values"]["submatrix_count"] == 9


def test_verify_from_file_json_format(cli, tmp_path):
    p = tmp_path / "b.json"
    p.write_text(json.dumps({"rows": [[1, 2], [3, 4]]}))
    code, out, _ = cli(["verify", "--k", "2", "--l", "2", "--input", str(p), "--format", "json", "--report", "json"])
    assert code == 0
    assert json.loads(out)["values"]["lhs"] == 2.5


def test_counterexample_exit_1(cli):
    code, out, _ = cli(["counterexample", "--m", "4", "--n", "3", "--k", "2", "--l", "2", "--report", "json"])
    assert code == 1
    doc = json.loads(out)
    assert doc["values"]["lhs"] == 0.0
    assert doc["values"]["rhs"] == pytest.approx(1 / 6)
    assert doc["values"]["matrix"] == ["1.0,1.0,1.0", "1.0,1.0,1.0", "0.0,0.0,0.0", "0.0,0.0,0.0"]


def test_counterexample_in_range_is_usage_error(cli):
    code, _, err = cli(["counterexample", "--m", "3", "--n", "3", "--k", "2", "--l", "2"])
    assert code == 2 and "RangeNotDegenerate" in err


def test_range_violation_exit_2(cli):
    code, out, err = cli(["verify", "--k", "1", "--l", "2"], "1,2,3,4\n1,2,3,4\n1,1,1,1\n")
    assert code == 2 and out == ""
    assert "2k > m" in err


def test_unchecked_reports_violation(cli):
    code, _, _ = cli(["verify-unchecked", "--k", "1", "--l", "1"], "1,2\n3,4\n")
    assert code == 1


@pytest.mark.parametrize(
    "argv, stdin_text",
    [
        (["verify", "--k", "2", "--l", "2"], "1,2\n3\n"),
        (["verify", "--k", "2", "--l", "2"], "1,-2\n3,4\n"),
        (["verify", "--k", "2"], "1,2\n3,4\n"),
        (["nonsense"], ""),
        (["verify", "--k", "2", "--l", "2", "--input", "/nonexistent/file.csv"], ""),
        (["verify", "--k", "2", "--l", "2", "--threads", "0"], "1,2\n3,4\n"),
    ],
)
def test_usage_errors_exit_2(cli, argv, stdin_text):
    code, _, _ = cli(argv, stdin_text)
    assert code == 2


def test_cap_exit_3(cli):
    code, _, err = cli(["verify", "--k", "2", "--l", "2", "--cap", "5"], POSITIVE_3X3)
    assert code == 3 and "CapExceeded" in err


def test_text_and_json_agree(cli):
    _, text, _ = cli(["verify", "--k", "2", "--l", "2"], POSITIVE_3X3)
    _, js, _ = cli(["verify", "--k", "2", "--l", "2", "--report", "json"], POSITIVE_3X3)
    doc = json.loads(js)
    fields = dict(line.split(": ", 1) for line in text.strip().splitlines())
    for key in ("lhs", "rhs", "margin", "relative_margin"):
        assert float(fields[key]) == doc["values"][key]
    assert fields["verdict"] == doc["verdict"]


def test_json_round_trip_lossless(cli):
    _, js, _ = cli(["trace", "--k", "2", "--l", "2", "--report", "json"], POSITIVE_3X3)
    doc = json.loads(js)
    assert json.loads(json.dumps(doc)) == doc
    assert doc["verdict"] == "chain-holds"
    assert [l["name"] for l in doc["values"]["links"]][-1] == "holder_equals_rhs"


def test_backends_agree_on_corpus(cli, rng):
    for _ in range(15):
        m, n = (int(v) for v in rng.integers(1, 5, 2))
        x = rng.integers(0, 6, (m, n))
        text = "\n".join(",".join(str(v) for v in row) for row in x)
        k, l = m // 2 + 1, n // 2 + 1
        args = ["verify", "--k", str(k), "--l", str(l), "--report", "json"]
        cf, of, _ = cli(args + ["--backend", "float"], text)
        ce, oe, _ = cli(args + ["--backend", "exact"], text)
        assert cf == ce == 0
        assert json.loads(of)["verdict"] == json.loads(oe)["verdict"]


def test_corpus_only_exit_0(cli, rng):
    for _ in range(30):
        m, n = (int(v) for v in rng.integers(1, 7, 2))
        text = "\n".join(",".join(repr(float(v)) for v in row) for row in 1 - rng.random((m, n)))
        for k in range(m // 2 + 1, m + 1):
            code, _, _ = cli(["verify", "--k", str(k), "--l", str(n // 2 + 1)], text)
            assert code == 0


def test_lemma_command(cli):
    code, out, _ = cli(["lemma", "--k", "2", "--l", "2", "--r", "2", "--backend", "exact", "--report", "json"], POSITIVE_3X3)
    doc = json.loads(out)
    assert code == 0 and doc["values"]["residual"] == "0" and doc["values"]["bases_checked"] == 9
    code, out, _ = cli(["lemma", "--k", "2", "--l", "2", "--r", "0", "--rows", "0,2", "--cols", "1,2"], POSITIVE_3X3)
    assert code == 0 and "verdict: identity" in out
    code, _, _ = cli(["lemma", "--k", "2", "--l", "2", "--r", "0.5", "--backend", "exact"], POSITIVE_3X3)
    assert code == 2


def test_coeffs_command(cli):
    code, out, _ = cli(["coeffs", "--m", "5", "--n", "4", "--k", "3", "--l", "3", "--rows", "1,2,4", "--cols", "0,1,3", "--report", "json"])
    doc = json.loads(out)
    assert code == 0 and doc["values"]["expected"] == "1/9"
    assert set(doc["values"]["coefficients"].values()) == {"1/9"}


def test_scan_and_reduce_commands(cli):
    code, out, _ = cli(["scan", "--trials", "100", "--seed", "4", "--report", "json"])
    doc = json.loads(out)
    assert code == 0 and doc["values"]["violated_count"] == 0
    assert doc["values"]["out_of_range_violations"] >= 1
    code, out, _ = cli(["reduce-check", "--trials", "30", "--report", "json"])
    assert code == 0 and json.loads(out)["verdict"] == "reductions-hold"


def test_no_color_when_not_a_tty(cli):
    _, out, _ = cli(["coeffs", "--m", "3", "--n", "3", "--k", "2", "--l", "2"])
    assert "\x1b[" not in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "submatrix_amgm", "counterexample", "--m", "4", "--n", "3", "--k", "2", "--l", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 1
    assert "verdict: violated" in proc.stdout
