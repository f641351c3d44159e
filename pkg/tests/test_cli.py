import math
import subprocess
import sys

import mpmath
import pytest

from heunbasis.cli import (
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_USAGE,
    EXIT_VALIDATION,
    EXIT_VERIFY,
    ProblemSpec,
    ResultDocument,
    SpecParseError,
    cmd_eigs,
    cmd_eval,
    cmd_verify,
    main,
    parse_spec,
)

P2_NORM = float(169 * mpmath.log(2) - 117)

P1_SPEC = """\
# reference family, class I
alpha = 1
beta = 2
gamma = 1.5
delta = 1.5
epsilon = 1
a = 2
class = I
lambda_min = -25
lambda_max = 5
max_count = 4
"""

P2_SPEC = """\
alpha = -2
beta = riemann   # solved from the exponent relation
gamma = 1
delta = 1
epsilon = 0
a = 2
class = I
lambda_min = -13
lambda_max = -11
"""


def write(tmp_path, text, name="problem.txt"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_parse_riemann_token():
    spec = parse_spec(P2_SPEC)
    assert spec.parameters["beta"] == "riemann"
    assert spec.resolved_parameters().beta == 3.0


@pytest.mark.parametrize(
    "text",
    [
        "alpha = 1\n",
        P1_SPEC.replace("beta = 2", "beta = riemann").replace("gamma = 1.5", "gamma = riemann"),
        P1_SPEC.replace("a = 2", "a = riemann"),
        P1_SPEC.replace("alpha = 1", "alpha = one"),
        P1_SPEC + "colour = blue\n",
        P1_SPEC + "alpha = 1\n",
        P1_SPEC.replace("lambda_max = 5", "lambda_max = -30"),
        P1_SPEC.replace("class = I", "class = V"),
        P1_SPEC + "format = xml\n",
        P1_SPEC + "just text\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(SpecParseError):
        parse_spec(text)


def test_cmd_eigs_degenerate():
    doc = cmd_eigs(parse_spec(P2_SPEC))
    assert len(doc.records) == 1
    assert abs(doc.records[0]["lambda_n"] + 12.0) <= 1e-10
    assert doc.spec["resolved"]["beta"] == 3.0


def test_cmd_eval_rows():
    spec = parse_spec(P2_SPEC)
    doc = cmd_eval(spec, [0.0, 0.5, 0.75])
    assert len(doc.samples) == 3
    bad, mid = doc.samples[0], doc.samples[1]
    assert bad["h"] is None and bad["error"].startswith("DomainError")
    assert abs(mid["h"] - (-0.5 / math.sqrt(P2_NORM))) <= 1e-10
    two = cmd_eval(parse_spec(P2_SPEC.replace("-13", "-20").replace("-11", "-5")), [0.2, 0.5, 0.8])
    assert len(two.records) == 2
    assert len(two.samples) == 6


def test_round_trip_and_determinism():
    spec = parse_spec(P1_SPEC)
    a = cmd_verify(spec)
    b = cmd_verify(spec)
    b.timing = 123.0
    assert a.same_content(b)
    assert ResultDocument.from_text(a.to_text()) == a
    assert a.to_text() == ResultDocument.from_text(a.to_text()).to_text()


def test_main_exit_codes(tmp_path, capsys):
    out = tmp_path / "out.json"
    assert main(["eigs", "--spec", write(tmp_path, P2_SPEC), "--out", str(out)]) == EXIT_OK
    doc = ResultDocument.from_text(out.read_text())
    assert doc.command == "eigs"

    bad_class = P1_SPEC.replace("gamma = 1.5", "gamma = 2.5").replace("beta = 2", "beta = 3")
    bad_class = bad_class.replace("class = I", "class = II")
    assert main(["eigs", "--spec", write(tmp_path, bad_class)]) == EXIT_VALIDATION
    riemann = P1_SPEC.replace("beta = 2", "beta = 2.5")
    assert main(["eigs", "--spec", write(tmp_path, riemann)]) == EXIT_VALIDATION
    assert main(["eigs", "--spec", str(tmp_path / "missing.txt")]) == EXIT_USAGE
    assert main(["eigs", "--spec", write(tmp_path, "alpha = x\n")]) == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == EXIT_USAGE

    # high mode where double-precision series cannot certify the continuation
    hard = P1_SPEC.replace("-25", "-150").replace("lambda_max = 5", "lambda_max = -135")
    assert main(["eigs", "--spec", write(tmp_path, hard)]) == EXIT_SOLVER
    assert "solver failure" in capsys.readouterr().err


def test_main_verify(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("HEUN_THREADS", "2")
    path = write(tmp_path, P1_SPEC)
    assert main(["verify", "--spec", path]) == EXIT_OK
    assert main(["verify", "--spec", path, "--corrupt-norm", "1.1"]) == EXIT_VERIFY
    assert "verification failed" in capsys.readouterr().err
    empty = P1_SPEC.replace("-25", "3").replace("lambda_max = 5", "lambda_max = 10")
    assert main(["verify", "--spec", write(tmp_path, empty)]) == EXIT_OK


def test_csv_output(tmp_path):
    out = tmp_path / "h.csv"
    code = main(["eval", "--spec", write(tmp_path, P2_SPEC), "--points", "0.25,0.5",
                 "--format", "csv", "--out", str(out)])
    assert code == EXIT_OK
    raw = out.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "n,x,h,error"
    n, x, h, err = lines[2].split(",")
    assert x == "0.5" and err == ""
    assert float(h) == pytest.approx(-0.5 / math.sqrt(P2_NORM), rel=1e-10)
    assert len(h.replace("-", "").replace(".", "").lstrip("0")) >= 16


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "heunbasis", "eigs", "--spec", write(tmp_path, P2_SPEC),
         "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    header, row = proc.stdout.splitlines()
    assert header == "n,lambda_n,A_n,I_n,residual"
    assert abs(float(row.split(",")[1]) + 12.0) <= 1e-10


def test_problem_spec_is_plain_data():
    spec = ProblemSpec({"alpha": 1.0, "beta": 2.0, "gamma": 1.5, "delta": 1.5,
                        "epsilon": 1.0, "a": 2.0}, "I", -1.0, 1.0)
    assert spec.resolved_parameters().a == 2.0
