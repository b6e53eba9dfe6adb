import json
import math

import numpy as np

from ftsindep import DgpSpec, iid_bm_sample, make_uniform_grid, save_sample_csv
from ftsindep.cli import main


def _prices(tmp_path, name, days, points, seed, sigma=0.01):
    rng = np.random.default_rng(seed)
    lines = ["date,time,price"]
    for d in range(days):
        date = f"2013-{1 + d // 28:02d}-{1 + d % 28:02d}"
        log_p = math.log(100.0) + np.cumsum(sigma * rng.standard_normal(points))
        for j in range(points):
            minutes = 570 + j * 5
            lines.append(
                f"{date},{minutes // 60:02d}:{minutes % 60:02d},{math.exp(log_p[j]):.10f}"
            )
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return path


def _bm_csv(tmp_path, name, n, m, seed):
    sample = iid_bm_sample(DgpSpec("iid_bm", n=n, grid=make_uniform_grid(m), seed=seed))
    path = tmp_path / name
    save_sample_csv(sample, path)
    return path


def test_simulate_writes_report_and_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    args = [
        "simulate", "--dgp", "iid", "--n", "30", "--m", "15", "--H", "2",
        "--reps", "5", "--seed", "1", "--out",
    ]
    assert main(args + [str(out1)]) == 0
    assert main(args + [str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    assert set(report["rejection_rates"]) == {"0.10", "0.05", "0.01"}
    assert report["config"]["H"] == 2
    assert report["dgp_x"]["seed"] == 1
    assert report["replications"] == 5


def test_simulate_threads_do_not_change_report(tmp_path):
    out1, out2 = tmp_path / "t1.json", tmp_path / "t2.json"
    base = ["simulate", "--dgp", "far1", "--q", "1.5", "--n", "40", "--m", "12",
            "--H", "2", "--reps", "6", "--seed", "3"]
    assert main(base + ["--threads", "1", "--out", str(out1)]) == 0
    assert main(base + ["--threads", "3", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_csv_format(tmp_path, capsys):
    assert main([
        "simulate", "--dgp", "iid", "--n", "24", "--m", "10", "--H", "1",
        "--reps", "3", "--seed", "2", "--format", "csv",
    ]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("n,H,dgp")
    assert out.splitlines()[1].startswith("24,1,iid_bm")


def test_simulate_nonstationary_far1_fails_usage(tmp_path, capsys):
    code = main(["simulate", "--dgp", "far1", "--q", "3.0", "--n", "30",
                 "--m", "10", "--reps", "2", "--seed", "1"])
    assert code == 2
    assert "sqrt(6)" in capsys.readouterr().err


def test_simulate_rejects_bad_params(capsys):
    assert main(["simulate", "--n", "1", "--reps", "2"]) == 2
    assert main(["simulate", "--n", "30", "--reps", "0"]) == 2


def test_test_command_independent_files(tmp_path, capsys):
    x = _bm_csv(tmp_path, "x.csv", 60, 20, 5)
    y = _bm_csv(tmp_path, "y.csv", 60, 20, 6)
    out = tmp_path / "res.json"
    code = main(["test", "--x", str(x), "--y", str(y), "--H", "3", "--out", str(out)])
    assert code == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("V=")
    assert "p=" in captured.out
    payload = json.loads(out.read_text())
    assert payload["n"] == 60 and payload["H"] == 3
    assert len(payload["per_lag"]) == 7
    assert payload["config"]["kernel_mu"]["family"] == "bartlett"


def test_test_command_self_pair_rejects(tmp_path, capsys):
    x = _bm_csv(tmp_path, "x.csv", 150, 20, 7)
    out = tmp_path / "res.json"
    assert main(["test", "--x", str(x), "--y", str(x), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["p_value"] < 0.001


def test_test_command_missing_file(tmp_path, capsys):
    x = _bm_csv(tmp_path, "x.csv", 20, 10, 8)
    code = main(["test", "--x", str(x), "--y", str(tmp_path / "nope.csv")])
    assert code == 3
    assert "nope.csv" in capsys.readouterr().err


def test_test_command_shape_mismatch(tmp_path, capsys):
    x = _bm_csv(tmp_path, "x.csv", 20, 10, 9)
    y = _bm_csv(tmp_path, "y.csv", 21, 10, 10)
    assert main(["test", "--x", str(x), "--y", str(y)]) == 3


def test_test_command_degenerate_exit(tmp_path):
    grid = make_uniform_grid(8)
    from ftsindep import FunctionalSample

    const = FunctionalSample(np.tile(np.linspace(1, 2, 8), (12, 1)), grid)
    path = tmp_path / "c.csv"
    save_sample_csv(const, path)
    assert main(["test", "--x", str(path), "--y", str(path), "--H", "2"]) == 4


def test_cidr_command_constant_prices(tmp_path, capsys):
    lines = ["date,time,price"]
    for j in range(5):
        lines.append(f"2013-01-02,09:{30 + j:02d},42.0")
        lines.append(f"2013-01-03,09:{30 + j:02d},11.0")
    src = tmp_path / "p.csv"
    src.write_text("\n".join(lines) + "\n")
    out = tmp_path / "cidr.csv"
    assert main(["cidr", "--prices", str(src), "--m", "10", "--out", str(out)]) == 0
    body = [l for l in out.read_text().splitlines() if not l.startswith("#grid")]
    values = np.array([[float(tok) for tok in line.split(",")] for line in body])
    assert values.shape == (2, 10)
    assert np.all(values == 0.0)


def test_cidr_command_json(tmp_path):
    src = _prices(tmp_path, "p.csv", days=4, points=6, seed=11)
    out = tmp_path / "cidr.json"
    assert main(["cidr", "--prices", str(src), "--m", "12", "--format", "json",
                 "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["values"]) == 4
    assert payload["skipped_days"] == 0


def test_cidr_command_parse_error_exit(tmp_path):
    src = tmp_path / "bad.csv"
    src.write_text("date,time,price\n2013-01-02,09:30,-5\n")
    assert main(["cidr", "--prices", str(src)]) == 3


def test_pairwise_three_tickers(tmp_path):
    paths = [str(_prices(tmp_path, f"t{k}.csv", days=40, points=8, seed=20 + k))
             for k in range(3)]
    out = tmp_path / "report.json"
    matrix = tmp_path / "matrix.csv"
    code = main(["pairwise", "--prices", *paths, "--m", "15", "--H", "2",
                 "--out", str(out), "--matrix-csv", str(matrix)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["tickers"]) == 3
    assert len(payload["pairs"]) == 3
    lines = matrix.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == "ticker,t0,t1,t2"
    # diagonal excluded
    assert lines[1].split(",")[1] == ""
    grid = np.array([
        [float(c) if c else np.nan for c in line.split(",")[1:]] for line in lines[1:]
    ])
    assert np.array_equal(grid, grid.T, equal_nan=True)


def test_pairwise_null_level_fraction(tmp_path):
    # independently simulated panels: about 5% of pairs should fall below 0.05
    k = 15
    paths = [str(_prices(tmp_path, f"n{j}.csv", days=120, points=10, seed=100 + j))
             for j in range(k)]
    out = tmp_path / "rep.json"
    assert main(["pairwise", "--prices", *paths, "--m", "15", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["pairs"]) == k * (k - 1) // 2
    assert abs(payload["frac_below_0.05"] - 0.05) <= 0.04


def test_kernel_and_window_flags(tmp_path, capsys):
    x = _bm_csv(tmp_path, "x.csv", 40, 15, 11)
    y = _bm_csv(tmp_path, "y.csv", 40, 15, 12)
    out = tmp_path / "r.json"
    code = main(["test", "--x", str(x), "--y", str(y), "--H", "2",
                 "--kernel1", "parzen", "--kernel2", "flat-top",
                 "--w1", "3", "--w2", "1.5", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["config"]["kernel_mu"] == {"family": "parzen", "window": 3.0}
    assert payload["config"]["kernel_sigma"] == {"family": "flat_top", "window": 1.5}
    assert main(["test", "--x", str(x), "--y", str(y), "--kernel1", "gauss"]) == 2


def test_no_subcommand_is_usage_error(capsys):
    import pytest

    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2


def test_env_threads_fallback(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("FTS_THREADS", "2")
    assert main(["simulate", "--dgp", "iid", "--n", "24", "--m", "10", "--H", "1",
                 "--reps", "2", "--seed", "4", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("n,H")
