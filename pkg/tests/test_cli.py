"""Command-line surface: artifacts, determinism, exit codes, agreement."""

import json
import pathlib
import subprocess
import sys

import numpy as np
import pytest

from ttrules import cli

REPO = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(scope="module")
def xor_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("xor_run")
    code = cli.main(["train", "--config", str(REPO / "configs/xor.json"),
                     "--output-dir", str(out)])
    assert code == 0
    return out


@pytest.fixture(scope="module")
def iris_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("iris_run")
    code = cli.main(["train", "--config", str(REPO / "configs/iris.json"),
                     "--epochs", "60", "--prune-rounds", "2",
                     "--finetune-epochs", "10", "--output-dir", str(out)])
    assert code == 0
    return out


def test_train_writes_artifacts(xor_run):
    for name in ("model.json", "training_log.json", "manifest.json"):
        assert (xor_run / name).exists()
    manifest = json.loads((xor_run / "manifest.json").read_text())
    assert manifest["config"]["seed"] == 0
    assert "numpy" in manifest["versions"]
    log = json.loads((xor_run / "training_log.json").read_text())
    assert "rounds" in log["prune"]


def test_rerun_is_byte_identical(xor_run, tmp_path):
    out2 = tmp_path / "again"
    code = cli.main(["train", "--config", str(REPO / "configs/xor.json"),
                     "--output-dir", str(out2)])
    assert code == 0
    assert (out2 / "model.json").read_bytes() == (xor_run / "model.json").read_bytes()


def test_extract_reports_exact_match(xor_run, tmp_path, capsys):
    out = tmp_path / "rules"
    code = cli.main(["extract", "--model", str(xor_run / "model.json"),
                     "--data", str(REPO / "data/xor.csv"), "--out", str(out)])
    assert code == 0
    text = (out / "rules.txt").read_text()
    assert "exact-match: 1.0000" in text
    assert "⊕" in text  # whole-model decision formula in XOR form
    rules = json.loads((out / "rules.json").read_text())
    assert rules["task"] == "binary"


def test_extract_without_xor_gives_two_term_dnf(xor_run, tmp_path):
    out = tmp_path / "rules_noxor"
    code = cli.main(["extract", "--model", str(xor_run / "model.json"),
                     "--data", str(REPO / "data/xor.csv"), "--no-xor",
                     "--out", str(out)])
    assert code == 0
    text = (out / "rules.txt").read_text()
    assert "⊕" not in text
    assert "∨" in text  # a disjunction appears instead


def test_evaluate_network_and_rules_agree(iris_run, tmp_path, capsys):
    rules_dir = tmp_path / "rules"
    assert cli.main(["extract", "--model", str(iris_run / "model.json"),
                     "--data", str(REPO / "data/iris.csv"),
                     "--out", str(rules_dir)]) == 0
    capsys.readouterr()
    out_json = tmp_path / "eval.json"
    code = cli.main(["evaluate", "--model", str(iris_run / "model.json"),
                     "--rules", str(rules_dir / "rules.json"),
                     "--data", str(REPO / "data/iris.csv"),
                     "--split", "test", "--out", str(out_json)])
    assert code == 0
    res = json.loads(out_json.read_text())
    assert abs(res["network"] - res["rules"]) <= 1e-10
    assert res["network"] > 0.9


def test_predict_writes_rows(iris_run, tmp_path):
    out = tmp_path / "preds.csv"
    code = cli.main(["predict", "--model", str(iris_run / "model.json"),
                     "--data", str(REPO / "data/iris.csv"), "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 151  # header + 150 rows
    assert "prediction" in lines[0]


def test_topk_debug_output(capsys):
    code = cli.main(["topk", "--x", "1,2,3,4", "--k", "2", "--tau", "0.5"])
    assert code == 0
    out = capsys.readouterr().out
    assert "c =" in out and "y =" in out and "residual history" in out


def test_missing_dataset_exits_2(capsys, tmp_path):
    cfg = json.loads((REPO / "configs/xor.json").read_text())
    cfg["dataset"] = "data/never_written.csv"
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code = cli.main(["train", "--config", str(p)])
    assert code == 2
    assert "dataset not found" in capsys.readouterr().err


def test_missing_config_exits_2(capsys):
    assert cli.main(["train", "--config", "nope.json"]) == 2


def test_bad_config_value_exits_2(tmp_path, capsys):
    cfg = json.loads((REPO / "configs/xor.json").read_text())
    cfg["prune_fraction"] = 1.5
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    assert cli.main(["train", "--config", str(p)]) == 2


def test_usage_error_exits_1(capsys):
    assert cli.main(["not-a-command"]) == 1
    assert cli.main([]) == 1
    assert cli.main(["train"]) == 1  # --config required


def test_schema_mismatch_exits_3(xor_run, capsys):
    code = cli.main(["evaluate", "--model", str(xor_run / "model.json"),
                     "--data", str(REPO / "data/iris.csv")])
    assert code == 3
    assert "schema mismatch" in capsys.readouterr().err


def test_regression_artifact_on_classification_data_exits_3(tmp_path, capsys):
    out = tmp_path / "reg"
    code = cli.main(["train", "--config", str(REPO / "configs/abalone.json"),
                     "--epochs", "2", "--prune-rounds", "0",
                     "--head-warmup-epochs", "0", "--output-dir", str(out)])
    assert code == 0
    # penguins has abalone's Sex/Length columns missing entirely
    code = cli.main(["evaluate", "--model", str(out / "model.json"),
                     "--data", str(REPO / "data/penguins.csv")])
    assert code == 3


def test_standalone_prune_command(xor_run, tmp_path):
    out = tmp_path / "pruned.json"
    code = cli.main(["prune", "--config", str(REPO / "configs/xor.json"),
                     "--model", str(xor_run / "model.json"),
                     "--prune-rounds", "1", "--prune-fraction", "0.4",
                     "--finetune-epochs", "5", "--out", str(out)])
    assert code == 0
    from ttrules.model import load_model
    model = load_model(out)
    assert model.layer.frozen_masks is not None


def test_extract_warns_on_unfrozen_model(xor_run, tmp_path, capsys):
    from ttrules.model import load_model, save_model
    model = load_model(xor_run / "model.json")
    model.layer.frozen_masks = None
    raw = tmp_path / "unfrozen.json"
    save_model(model, raw)
    code = cli.main(["extract", "--model", str(raw),
                     "--data", str(REPO / "data/xor.csv"),
                     "--out", str(tmp_path / "rules")])
    assert code == 0
    assert "never frozen" in capsys.readouterr().err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ttrules.cli", "topk",
                           "--x", "0,0", "--k", "1", "--tau", "1"],
                          capture_output=True, text=True, cwd=REPO)
    assert proc.returncode == 0
    assert "c = 0" in proc.stdout


def test_divergent_training_exits_4(tmp_path, capsys):
    cfg = json.loads((REPO / "configs/abalone.json").read_text())
    cfg.update(lr=1e160, epochs=3, prune_rounds=0, head_warmup_epochs=0,
               output_dir=str(tmp_path / "out"))
    p = tmp_path / "c.json"
    p.write_text(json.dumps(cfg))
    code = cli.main(["train", "--config", str(p)])
    assert code == 4
    assert "training failed" in capsys.readouterr().err
