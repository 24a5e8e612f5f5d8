import csv

import pytest

from burstlink.cli import main
from burstlink.trace import load_phy_trace


def _usage_error(argv):
    with pytest.raises(SystemExit) as err:
        main(argv)
    assert err.value.code == 2


def test_gen_phy(tmp_path, capsys):
    out = tmp_path / "phy.txt"
    assert main(["gen-phy", "--duration", "0.05", "--tp", "1e-3",
                 "--out", str(out)]) == 0
    line = capsys.readouterr().out.strip()
    assert "slots=50" in line
    trace = load_phy_trace(out)
    assert trace.n_slots == 50
    assert not trace.erased.any()


def test_gen_phy_rejects_zero_duration(tmp_path):
    _usage_error(["gen-phy", "--duration", "0", "--tp", "1e-3",
                  "--out", str(tmp_path / "x.txt")])


def test_inject_with_markov_params(tmp_path, capsys):
    phy = tmp_path / "phy.txt"
    noisy = tmp_path / "noisy.txt"
    main(["gen-phy", "--duration", "2.0", "--tp", "1e-3", "--out", str(phy)])
    assert main(["inject", "--in", str(phy), "--out", str(noisy),
                 "--alpha", "0.98", "--beta", "0.92", "--seed", "5"]) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert "erasure_rate=" in line and "seed=5" in line
    trace = load_phy_trace(noisy)
    assert 0.0 < trace.erasure_rate < 1.0


def test_inject_with_target_params(tmp_path):
    phy = tmp_path / "phy.txt"
    noisy = tmp_path / "noisy.txt"
    main(["gen-phy", "--duration", "1.0", "--tp", "1e-3", "--out", str(phy)])
    assert main(["inject", "--in", str(phy), "--out", str(noisy),
                 "--p", "0.2", "--burst", "12.5"]) == 0
    assert load_phy_trace(noisy).metadata["alpha"] == "0.98"


def test_inject_rejects_mixed_channel_styles(tmp_path):
    phy = tmp_path / "phy.txt"
    main(["gen-phy", "--duration", "0.1", "--tp", "1e-3", "--out", str(phy)])
    _usage_error(["inject", "--in", str(phy), "--out", str(tmp_path / "y.txt"),
                  "--alpha", "0.98", "--beta", "0.92", "--p", "0.2",
                  "--burst", "12.5"])


def test_run_pipeline(tmp_path, capsys):
    phy = tmp_path / "phy.txt"
    noisy = tmp_path / "noisy.txt"
    link = tmp_path / "link.csv"
    metrics = tmp_path / "metrics.txt"
    main(["gen-phy", "--duration", "5.0", "--tp", "1e-3", "--out", str(phy)])
    main(["inject", "--in", str(phy), "--out", str(noisy),
          "--alpha", "0.98", "--beta", "0.92", "--seed", "7"])
    assert main(["run", "--in", str(noisy), "--scheme", "fec",
                 "--nd", "10", "--nr", "12", "--rtt", "0.5",
                 "--out-link", str(link), "--out-metrics", str(metrics)]) == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert line.startswith("scheme=fec ")
    assert "eta=" in line and "drop_rate=" in line
    with open(link, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 5000 // 22  # one record per codeword block
    text = metrics.read_text()
    assert "eta=" in text and "warnings=" in text


def test_run_requires_code_dimensions(tmp_path):
    phy = tmp_path / "phy.txt"
    main(["gen-phy", "--duration", "0.1", "--tp", "1e-3", "--out", str(phy)])
    _usage_error(["run", "--in", str(phy), "--scheme", "harq2",
                  "--rtt", "0.5", "--out-link", str(tmp_path / "l.csv"),
                  "--out-metrics", str(tmp_path / "m.txt")])


def test_analytic_beta_sweep(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["analytic", "--scheme", "harq2", "--nd", "10", "--nr", "20",
                 "--rtt", "0.5", "--tp", "1e-3", "--alpha", "0.98",
                 "--sweep", "beta=0.1:0.9:0.4", "--out", str(out)]) == 0
    assert "points=3 errors=0" in capsys.readouterr().out
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3
    assert all(0.0 < float(r["eta"]) <= 1.0 for r in rows)


def test_analytic_p_sweep_requires_burst(tmp_path):
    _usage_error(["analytic", "--scheme", "arq", "--rtt", "0.5",
                  "--sweep", "p=0.1:0.3:0.1", "--out",
                  str(tmp_path / "s.csv")])


def test_analytic_reports_point_errors(tmp_path):
    # p=0.99 with burst 1.01 is an infeasible target pair: the row is
    # recorded with an error note and the exit code is 1
    out = tmp_path / "sweep.csv"
    assert main(["analytic", "--scheme", "arq", "--rtt", "0.5",
                 "--sweep", "p=0.99:0.99:0.1", "--burst", "1.01",
                 "--out", str(out)]) == 1
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1 and rows[0]["error"]


def test_validate_quick_pass(tmp_path, capsys):
    out = tmp_path / "report.csv"
    summary = tmp_path / "summary.txt"
    code = main(["validate", "--scheme", "fec", "--nd", "10", "--nr", "12",
                 "--rtt", "0.5", "--tp", "1e-3", "--alpha", "0.99",
                 "--betas", "0.5,0.9", "--blocks", "60000",
                 "--spot-points", "1", "--spot-blocks", "40000",
                 "--seed", "11", "--out", str(out),
                 "--summary", str(summary)])
    assert code == 0
    line = capsys.readouterr().out.strip().splitlines()[-1]
    assert "passed=True" in line and "spot_checks_ok=True" in line
    assert "passed=True" in summary.read_text()
    with open(out, newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 2


def test_validate_absurd_tolerance_fails(tmp_path):
    code = main(["validate", "--scheme", "fec", "--nd", "10", "--nr", "12",
                 "--rtt", "0.5", "--tp", "1e-3", "--alpha", "0.99",
                 "--betas", "0.5", "--blocks", "20000",
                 "--spot-points", "0", "--tol-eta", "1e-9"])
    assert code == 1


def test_validate_requires_beta_grid():
    _usage_error(["validate", "--scheme", "fec", "--nd", "10", "--nr", "12",
                  "--rtt", "0.5", "--alpha", "0.99"])


def test_compare(tmp_path, capsys):
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--alpha", "0.99", "--beta-range", "0.3:0.9:0.3",
                 "--nd", "10", "--nr", "2", "--rtt", "0.5",
                 "--out", str(out)]) == 0
    line = capsys.readouterr().out.strip()
    assert "claim_holds=" in line and "crossover_count=" in line
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 9  # 3 schemes x 3 betas


def test_run_error_exit_code(tmp_path, capsys):
    code = main(["run", "--in", str(tmp_path / "missing.txt"),
                 "--scheme", "arq", "--rtt", "0.5",
                 "--out-link", str(tmp_path / "l.csv"),
                 "--out-metrics", str(tmp_path / "m.txt")])
    assert code == 1
    assert capsys.readouterr().err.strip() != ""


def test_help_mentions_units(capsys):
    with pytest.raises(SystemExit) as err:
        main(["gen-phy", "--help"])
    assert err.value.code == 0
    assert "seconds" in capsys.readouterr().out
