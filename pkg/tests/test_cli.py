import json
import subprocess
import sys

import pytest

from lyndonlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 else None), out.err


def test_factorize(capsys):
    code, out, _ = run(capsys, "factorize", "banana")
    assert code == 0
    assert out["factors"] == ["b", "an", "an", "a"]
    assert out["rho"] == ["1/6", "1/3", "1/3", "1/6"]
    assert out["right_factor"] is None
    _, out, _ = run(capsys, "factorize", "aabab")
    assert out["right_factor"] == {"u": "aab", "v": "ab", "r": "2/5"}


def test_blocks(capsys):
    code, out, _ = run(capsys, "blocks", "aaababababababab", "--epsilon", "0.25", "--alpha", "0.03125")
    assert code == 0
    assert out["long_blocks"] == [[0, 14]]
    assert out["good_word"]["is_good"]
    assert out["decomposition"]["H"] == 1
    _, out, _ = run(capsys, "blocks", "babaaab")
    assert out["good_word"]["conditions"]["iv"] is False


def test_sample_deterministic(capsys):
    _, a, _ = run(capsys, "sample", "--n", "12", "--count", "3", "--seed", "9", "--lyndon")
    _, b, _ = run(capsys, "sample", "--n", "12", "--count", "3", "--seed", "9", "--lyndon")
    assert a == b and len(a["words"]) == 3


def test_exact(capsys):
    _, out, _ = run(capsys, "exact", "--n", "4", "--statistic", "primitive-prob")
    assert out["law"]["P"] == "3/4"
    _, out, _ = run(capsys, "exact", "--n", "3", "--statistic", "right-factor")
    assert out["law"]["L"] == {"1/3": "1/2", "2/3": "1/2"}


def test_exact_budget_exit_code(capsys):
    code, _, err = run(capsys, "exact", "--n", "30")
    assert code == 3 and "budget" in err


def test_config_exit_code(capsys):
    code, _, _ = run(capsys, "sample", "--dist", "uniform:1")
    assert code == 2
    code, _, _ = run(capsys, "experiment", "good-words", "--epsilon", "0.9")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["experiment", "unknown"])
    assert exc.value.code == 2


def test_wasserstein(capsys, tmp_path):
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text("0 0\n")
    b.write_text("1,1")
    _, out, _ = run(capsys, "wasserstein", str(a), "--other", str(b))
    assert out["w2"] == 1
    _, out, _ = run(capsys, "wasserstein", str(a), "--law", "mu:p1=0")
    assert out["w2"] == pytest.approx((0.25**2 / 2 + 0.75**2 / 2) ** 0.5)


def test_experiment_writes_report(capsys, tmp_path):
    path = tmp_path / "out" / "r.json"
    code, out, _ = run(
        capsys, "experiment", "good-words", "--n", "100,200,400", "--trials", "20", "--shards", "2",
        "--out", str(path),
    )
    assert code == 0
    saved = json.loads(path.read_text())
    assert saved["statistics"] == out["statistics"]
    assert saved["config"]["n"] == [100, 200, 400]


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "lyndonlab", "factorize", "ba"], capture_output=True, text=True, check=True
    )
    assert json.loads(res.stdout)["factors"] == ["b", "a"]
