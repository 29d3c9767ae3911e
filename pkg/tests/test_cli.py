import json

import numpy as np
import pytest

from srwdro.cli import main
from srwdro import datasets
from srwdro.harness import load_model

TINY = ["--n-train", "30", "--n-test", "30", "--epochs", "1",
        "--batch-size", "15", "--attack-k", "2", "--eval-k", "2"]


def test_gen_data(tmp_path, capsys):
    out = tmp_path / "d.csv"
    assert main(["gen-data", "--n", "24", "--out", str(out)]) == 0
    data = datasets.read_csv(out)
    assert len(data) == 24


def test_gen_data_bad_kind(tmp_path):
    assert main(["gen-data", "--kind", "nope", "--out", str(tmp_path / "x")]) == 1


def test_train_and_eval(tmp_path, capsys):
    run = tmp_path / "run"
    assert main(["train", *TINY, "--out-dir", str(run)]) == 0
    assert (run / "history.csv").exists()
    assert (run / "summary.json").exists()
    model = load_model(run / "model.bin")
    assert model.arch.kind == "mlp1"
    summary = json.loads((run / "summary.json").read_text())
    assert summary["config"]["epochs"] == 1

    data = tmp_path / "d.csv"
    main(["gen-data", "--n", "20", "--out", str(data)])
    capsys.readouterr()
    assert main(["eval", "--model", str(run / "model.bin"),
                 "--data", str(data), "--eps", "0.1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert 0.0 <= out["accuracy"] <= 1.0 and out["attacked"]


def test_train_history_reproducible(tmp_path):
    runs = []
    for tag in ("a", "b"):
        d = tmp_path / tag
        assert main(["train", *TINY, "--out-dir", str(d)]) == 0
        runs.append((d / "history.csv").read_bytes())
    assert runs[0] == runs[1]


def test_config_file_with_cli_override(tmp_path):
    cfg = tmp_path / "cfg"
    cfg.write_text("n_train = 30\nn_test = 30\nepochs = 3\nbatch_size = 15\n"
                   "attack_k = 2\neval_k = 2\n")
    run = tmp_path / "run"
    assert main(["train", "--config", str(cfg), "--epochs", "1",
                 "--out-dir", str(run)]) == 0
    lines = (run / "history.csv").read_text().strip().split("\n")
    assert len(lines) == 2  # header + one epoch: the flag beat the file


def test_bad_config_exit_codes(tmp_path):
    assert main(["train", "--epochs", "abc"]) == 1
    assert main(["train", "--epochs", "-3"]) == 1
    cfg = tmp_path / "cfg"
    cfg.write_text("not_a_key = 1\n")
    assert main(["train", "--config", str(cfg)]) == 1


def test_sweep(tmp_path, capsys):
    out = tmp_path / "sweep"
    assert main(["sweep", *TINY, "--gammas", "0,0.1", "--seeds", "0",
                 "--out-dir", str(out)]) == 0
    table = (out / "table.csv").read_text().strip().split("\n")
    assert len(table) == 3  # header + two configs
    assert (out / "summary.json").exists()
    assert (out / "curve_c0_s0.csv").exists()
    assert (out / "curve_c1_s0.csv").exists()


def test_oracle_check(tmp_path, capsys):
    csv = tmp_path / "pins.csv"
    assert main(["oracle-check", "--instances", "2", "--grid-res", "25",
                 "--csv", str(csv)]) == 0
    out = capsys.readouterr().out
    assert out.count("instance") >= 2
    lines = csv.read_text().strip().split("\n")
    assert lines[0] == "instance,eps,gamma,value" and len(lines) == 3


def test_certify(tmp_path, capsys):
    report = tmp_path / "report.csv"
    assert main(["certify", "--n", "30", "--trials", "40",
                 "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert "bound=" in out and "frequency" in out
    assert report.read_text().startswith("n,eps,gamma,p,m_cover,bound")


def test_metrics(capsys):
    assert main(["metrics", "--mu", "0.7,0.3", "--nu", "0.3,0.7",
                 "--cost", "0,1;1,0"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["wasserstein"] == pytest.approx(0.4, abs=1e-9)
    assert out["tv"] == pytest.approx(0.4, abs=1e-12)
    assert out["lp"] == pytest.approx(0.4, abs=1e-6)
    assert out["kl"] == pytest.approx(0.4 * np.log(0.7 / 0.3), abs=1e-9)
