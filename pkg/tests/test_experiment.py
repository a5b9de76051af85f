import json
from pathlib import Path

import pytest

from lcml import ConfigError
from lcml.experiment import (
    load_experiment_config,
    load_pipeline_config,
    run_experiment,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL_TOML = """
[experiment]
seed = 9
compare_unaugmented = true

[data]
source = "synth"
n_pos = 10
n_neg = 60
length = 96

[data.ranges]
baseline = [900.0, 1100.0]
depth = [0.05, 0.2]
period = [16, 40]
duration = [3, 8]
noise_sigma = [0.5, 3.0]

[split]
ratio = 0.8

[augment]
mode = "{mode}"

[[augment.steps]]
kind = "savgol"
window = 7
polyorder = 2

[[augment.steps]]
kind = "robust_scale"

[[augment.steps]]
kind = "minmax"

[[augment.steps]]
kind = "fourier_perturb"
amp_sigma = 0.02
phase_sigma = 0.05
copies = 1

[[augment.steps]]
kind = "smote"
k_neighbors = 3
target_ratio = 1.0

[[classifiers]]
kind = "logreg"
max_iter = 120

[[classifiers]]
kind = "knn"
k = 4

[[classifiers]]
kind = "random_forest"
n_trees = 15
seed = 0

[output]
formats = ["json", "csv", "md"]
"""


def write_config(tmp_path, mode="paper_fidelity", text=None):
    path = tmp_path / "exp.toml"
    path.write_text(text if text is not None else SMALL_TOML.format(mode=mode))
    return path


def test_bundled_configs_parse():
    for name in ("table1.toml", "table1_leakfree.toml", "synth_smoke.toml", "synth_small.toml"):
        cfg = load_experiment_config(CONFIGS / name)
        assert cfg.classifiers
        assert cfg.augment is not None


def test_run_writes_expected_artifacts(tmp_path):
    cfg = load_experiment_config(write_config(tmp_path))
    out = tmp_path / "out"
    manifest = run_experiment(cfg, out)
    assert (out / "manifest.json").is_file()
    assert (out / "comparison.md").is_file()
    assert (out / "comparison.csv").is_file()
    assert (out / "comparison.json").is_file()
    names = [r["name"] for r in manifest["runs"]]
    assert names == ["LR", "Augmented LR", "KNN", "Augmented KNN", "RF", "Augmented RF"]
    for run in manifest["runs"]:
        run_dir = out / run["dir"]
        assert (run_dir / "metrics.json").is_file()
        assert (run_dir / "confusion.txt").is_file()
        record = json.loads((run_dir / "metrics.json").read_text())
        assert record["confusion"] == run["confusion"]
    table = (out / "comparison.md").read_text()
    for name in names:
        assert f"| {name} |" in table


def test_rerun_is_byte_identical(tmp_path):
    cfg = load_experiment_config(write_config(tmp_path))
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    man_a = run_experiment(cfg, out_a)
    man_b = run_experiment(cfg, out_b)
    assert man_a["manifest_hash"] == man_b["manifest_hash"]
    for rel in ["comparison.json", "comparison.csv", "lr/metrics.json", "augmented_rf/metrics.json"]:
        assert (out_a / rel).read_bytes() == (out_b / rel).read_bytes()


def test_thread_count_does_not_change_results(tmp_path, monkeypatch):
    cfg = load_experiment_config(write_config(tmp_path))
    monkeypatch.setenv("LCML_THREADS", "1")
    man_1 = run_experiment(cfg, tmp_path / "t1")
    monkeypatch.setenv("LCML_THREADS", "5")
    man_5 = run_experiment(cfg, tmp_path / "t5")
    assert man_1["manifest_hash"] == man_5["manifest_hash"]
    assert (tmp_path / "t1" / "comparison.json").read_bytes() == (
        tmp_path / "t5" / "comparison.json"
    ).read_bytes()


def test_seed_override_changes_results_consistently(tmp_path):
    path = write_config(tmp_path)
    base = load_experiment_config(path)
    override = load_experiment_config(path, seed_override=123)
    assert base.split.seed != override.split.seed
    again = load_experiment_config(path, seed_override=123)
    assert override.split.seed == again.split.seed
    assert override.root_seed == 123


def test_paper_fidelity_mode_balances_before_split(tmp_path):
    cfg = load_experiment_config(write_config(tmp_path, mode="paper_fidelity"))
    manifest = run_experiment(cfg, tmp_path / "out")
    aug = manifest["augmented"]
    assert aug["mode"] == "paper_fidelity"
    assert aug["positives"] == aug["negatives"] == 60
    assert aug["n"] == 120
    # augmented test partition may contain synthetic positives (the leak)
    aug_rf = next(r for r in manifest["runs"] if r["name"] == "Augmented RF")
    assert aug_rf["train_size"] == 96  # floor(0.8 * 120)
    assert aug_rf["test_size"] == 24


def test_leak_free_mode_keeps_test_raw(tmp_path):
    cfg = load_experiment_config(write_config(tmp_path, mode="leak_free"))
    manifest = run_experiment(cfg, tmp_path / "out")
    raw_run = next(r for r in manifest["runs"] if r["name"] == "RF")
    aug_run = next(r for r in manifest["runs"] if r["name"] == "Augmented RF")
    assert aug_run["test_size"] == raw_run["test_size"] == 14  # 70 - floor(0.8*70)
    assert manifest["augmented"]["mode"] == "leak_free"
    # training partition was balanced
    assert manifest["augmented"]["positives"] == manifest["augmented"]["negatives"]


def test_manifest_hash_excludes_timings(tmp_path):
    cfg = load_experiment_config(write_config(tmp_path))
    manifest = run_experiment(cfg, tmp_path / "out")
    reloaded = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert reloaded["manifest_hash"] == manifest["manifest_hash"]
    assert "timings_s" in reloaded and "created_utc" in reloaded
    # recompute: hash must cover everything except timings/created/hash
    import hashlib

    probe = {
        k: v
        for k, v in reloaded.items()
        if k not in ("timings_s", "created_utc", "manifest_hash")
    }
    digest = hashlib.sha256(
        json.dumps(probe, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    assert digest == reloaded["manifest_hash"]


def test_zero_classifiers_is_config_error(tmp_path):
    text = SMALL_TOML.format(mode="leak_free")
    text = text[: text.index("[[classifiers]]")] + "[output]\nformats = ['json']\n"
    with pytest.raises(ConfigError):
        load_experiment_config(write_config(tmp_path, text=text))


def test_unknown_keys_are_config_errors(tmp_path):
    bad = SMALL_TOML.format(mode="leak_free").replace("[split]", "[split]\nbogus = 1")
    with pytest.raises(ConfigError, match="bogus"):
        load_experiment_config(write_config(tmp_path, text=bad))


def test_bad_step_kind_is_config_error(tmp_path):
    bad = SMALL_TOML.format(mode="leak_free").replace('kind = "savgol"', 'kind = "wavelet"')
    with pytest.raises(ConfigError, match="wavelet"):
        load_experiment_config(write_config(tmp_path, text=bad))


def test_missing_csv_path_is_config_error(tmp_path):
    text = SMALL_TOML.format(mode="leak_free").replace('source = "synth"', 'source = "csv"')
    with pytest.raises(ConfigError):
        load_experiment_config(write_config(tmp_path, text=text))


def test_partial_manifest_written_on_failure(tmp_path):
    text = """
[data]
source = "csv"
path = "does_not_exist.csv"

[[classifiers]]
kind = "knn"
k = 1
"""
    cfg = load_experiment_config(write_config(tmp_path, text=text))
    out = tmp_path / "fails"
    with pytest.raises(Exception):
        run_experiment(cfg, out)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["partial"] is True
    assert "error" in manifest


def test_load_pipeline_config_standalone(tmp_path):
    path = tmp_path / "aug.toml"
    path.write_text(
        """
[augment]
seed = 3
mode = "leak_free"

[[augment.steps]]
kind = "minmax"
"""
    )
    cfg = load_pipeline_config(path)
    assert cfg.seed == 3
    assert len(cfg.steps) == 1
    override = load_pipeline_config(path, seed_override=99)
    assert override.seed == 99
    with pytest.raises(ConfigError):
        load_pipeline_config(tmp_path / "nope.toml")
