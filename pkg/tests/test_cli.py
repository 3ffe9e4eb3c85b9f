import io
import json

import pytest

from thuefam.cli import EXIT_CAP, EXIT_OK, EXIT_USAGE, load_config, main
from thuefam.errors import UsageError
from thuefam.report import SweepReport


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture(autouse=True)
def _no_env_config(monkeypatch):
    monkeypatch.delenv("THUEFAM_CONFIG", raising=False)


def test_verify_lemmas_29():
    code, text = run("verify-lemmas", "--n", "29")
    assert code == EXIT_OK
    assert "FAIL" not in text and text.count("PASS") == 14


def test_verify_lemmas_100_regulator():
    code, text = run("verify-lemmas", "--n", "100")
    r = float(text.split("regulator R = ")[1].split()[0])
    assert code == EXIT_OK and 10**4 < r < 2 * 10**4


def test_verify_lemmas_small_n():
    code, text = run("verify-lemmas", "--n", "3")
    assert code == EXIT_OK and "envelopes skipped (n < 29)" in text


def test_reduce_29():
    code, text = run("reduce", "--n", "29", "--type", "1")
    y = float(text.split("Y = ")[1].split()[0])
    assert code == EXIT_OK and 2 <= y <= 42 and "none" in text
    code, text = run("reduce", "--n", "29", "--type", "3", "--json")
    d = json.loads(text)
    assert code == EXIT_OK and 567 <= float(d["Y"]) <= 56700 and d["solutions"] == []


def test_sweep_writes_report(tmp_path):
    path = tmp_path / "r.json"
    code, text = run("sweep", "--from", "29", "--to", "31", "--out", str(path))
    assert code == EXIT_OK
    rep = SweepReport.from_json(path.read_text())
    assert len(rep.cases) == 9 and rep.ok
    assert json.loads(path.read_text())["schema"] == 1


def test_final_bound():
    code, text = run("final-bound")
    assert code == EXIT_OK
    assert "round 2" in text and "round 3" not in text and "(below 1000)" in text


def test_search_and_check():
    code, text = run("search", "--n", "1", "--ymax", "10")
    assert code == EXIT_OK and "(7, 3)" in text and "non-exhaustive" in text
    code, text = run("check", "--n", "2", "--x", "1", "--y", "2")
    assert code == EXIT_OK and "rhs -1" in text and "nontrivial" in text
    code, text = run("check", "--n", "5", "--x", "3", "--y", "7")
    assert code == EXIT_OK and "not a solution" in text


def test_usage_errors():
    assert run("check", "--n", "0", "--x", "1", "--y", "1")[0] == EXIT_USAGE
    assert run("reduce", "--n", "10", "--type", "1")[0] == EXIT_USAGE
    assert run("reduce", "--n", "29", "--type", "4")[0] == EXIT_USAGE
    assert run("sweep", "--from", "20", "--to", "30", "--out", "/dev/null")[0] == EXIT_USAGE
    assert run("bogus")[0] == EXIT_USAGE


def test_config_file_and_precision_cap(tmp_path, monkeypatch):
    cfg = tmp_path / "thuefam.cfg"
    cfg.write_text("# tight cap\nprec_cap_bits = 400\nmax_convergents = 500\n")
    monkeypatch.setenv("THUEFAM_CONFIG", str(cfg))
    c = load_config()
    assert (c.prec_cap_bits, c.max_convergents, c.jobs) == (400, 500, 1)
    assert run("reduce", "--n", "1000", "--type", "3")[0] == EXIT_CAP


def test_bad_config(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    with pytest.raises(UsageError):
        load_config(str(cfg))
    assert run("--config", str(cfg), "final-bound")[0] == EXIT_USAGE
