import pytest

from aamemory.cli import main
from aamemory.sweep import read_echo_series, read_records


def test_echo(tmp_path, capsys):
    out = tmp_path / "e.csv"
    assert main(["echo", "-L", "13", "--delta", "2.5", "--epsilon", "0.1", "--t-max", "10",
                 "--samples", "21", "-o", str(out)]) == 0
    assert len(read_echo_series(out)["t"]) == 21


def test_report(capsys):
    code = main(["report", "-L", "13", "--delta", "2.5", "--epsilon", "0.3",
                 "--t-max", "60", "--samples", "401"])
    text = capsys.readouterr().out
    assert "ratio = " in text and "converged = " in text
    assert code in (0, 3)


def test_sweep_and_resume(tmp_path, capsys):
    cfg = tmp_path / "s.ini"
    cfg.write_text("[delta]\nvalues = 0.5 2.5\n[epsilon]\nvalues = 0.2\n[length]\nvalues = 13\n"
                   "[phase]\ncount = 2\n[grid]\nn_samples = 51\nt_max = 10\n")
    out = tmp_path / "s.csv"
    assert main(["sweep", str(cfg), "--seed", "4", "--workers", "1", "-o", str(out)]) == 0
    assert len(read_records(out)) == 4
    first = out.read_bytes()
    assert main(["sweep", str(cfg), "--seed", "4", "--workers", "1", "-o", str(out),
                 "--resume"]) == 0
    assert out.read_bytes() == first


def test_sweep_missing_seed(tmp_path, capsys):
    cfg = tmp_path / "s.ini"
    cfg.write_text("[delta]\nvalues = 1\n[epsilon]\nvalues = 0.2\n[length]\nvalues = 13\n"
                   "[phase]\ncount = 2\n")
    assert main(["sweep", str(cfg), "-o", str(tmp_path / "x.csv")]) == 1
    assert "seed" in capsys.readouterr().err


def test_phase_scan(tmp_path):
    out = tmp_path / "p.csv"
    assert main(["phase-scan", "-L", "13", "--count", "2", "--seed", "3", "--samples", "51",
                 "--delta-range", "1.0", "2.0", "0.5", "--workers", "1", "-o", str(out)]) == 0
    rows = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert len(rows) == 1 + 2 * 3


def test_oracle_check(capsys):
    assert main(["oracle-check", "--lengths", "5", "--draws", "3"]) == 0
    assert "max deviation" in capsys.readouterr().out


def test_bad_input_reports(capsys, tmp_path):
    assert main(["echo", "-L", "2", "-o", str(tmp_path / "x.csv")]) == 1
    with pytest.raises(SystemExit):
        main(["bogus"])
