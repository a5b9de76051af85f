"""Experiment configuration and the end-to-end batch runner.

An experiment is one TOML file: a data source (CSV path or synthetic
generator spec), a split, an optional augmentation pipeline, and one or
more classifiers. The runner trains every classifier on the raw and/or
augmented training partition, evaluates on the held-out partition, and
writes metrics, confusion matrices, comparison tables, figures, and a
manifest into the output directory.

Everything an experiment produces is a pure function of (config file,
input data, seed override); the manifest hash covers the deterministic
portion so reruns can be compared byte for byte.
"""

from __future__ import annotations

import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import augment as aug
from .errors import ConfigError
from .eval import compare_table, confusion, confusion_grid, metrics
from .ingest import LabeledDataset, class_counts, load_csv, split
from .models import make_classifier, save_model
from .rng import derive_seed
from .synth import ParamRanges, generate_dataset

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "ClassifierSpec",
    "DataConfig",
    "ExperimentConfig",
    "SplitConfig",
    "load_experiment_config",
    "run_experiment",
]

MANIFEST_FORMAT = "lcml-manifest/1"
FORMATS = ("json", "csv", "md", "svg")

# spawn-key tags for stage seeds derived from the experiment root seed
_TAG_DATA, _TAG_SPLIT, _TAG_AUGMENT = 101, 102, 103

_DEFAULT_NAMES = {"logreg": "LR", "knn": "KNN", "random_forest": "RF"}


@dataclass(frozen=True)
class DataConfig:
    source: str
    path: str | None = None
    n_pos: int = 37
    n_neg: int = 5050
    length: int = 3197
    seed: int = 0
    ranges: ParamRanges = field(default_factory=ParamRanges)


@dataclass(frozen=True)
class SplitConfig:
    ratio: float = 0.8
    seed: int = 0


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    name: str
    params: dict


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataConfig
    split: SplitConfig
    augment: aug.PipelineConfig | None
    classifiers: tuple[ClassifierSpec, ...]
    root_seed: int = 0
    compare_unaugmented: bool = True
    literature_rows: bool = False
    save_models: bool = False
    formats: tuple[str, ...] = ("json", "csv", "md")

    def to_dict(self) -> dict:
        """Canonical form used for the config hash (output location excluded)."""
        data = {
            "source": self.data.source,
            "path": self.data.path,
            "n_pos": self.data.n_pos,
            "n_neg": self.data.n_neg,
            "length": self.data.length,
            "seed": self.data.seed,
            "ranges": {
                "baseline": list(self.data.ranges.baseline),
                "depth": list(self.data.ranges.depth),
                "period": list(self.data.ranges.period),
                "duration": list(self.data.ranges.duration),
                "noise_sigma": list(self.data.ranges.noise_sigma),
            },
        }
        augment_part = None
        if self.augment is not None:
            augment_part = {
                "mode": self.augment.mode,
                "seed": self.augment.seed,
                "steps": [
                    {"kind": step.kind, **{k: getattr(step, k) for k in _step_fields(step)}}
                    for step in self.augment.steps
                ],
            }
        return {
            "data": data,
            "split": {"ratio": self.split.ratio, "seed": self.split.seed},
            "augment": augment_part,
            "classifiers": [
                {"kind": c.kind, "name": c.name, "params": dict(sorted(c.params.items()))}
                for c in self.classifiers
            ],
            "root_seed": self.root_seed,
            "compare_unaugmented": self.compare_unaugmented,
            "literature_rows": self.literature_rows,
            "save_models": self.save_models,
            "formats": list(self.formats),
        }


def _step_fields(step) -> tuple[str, ...]:
    return tuple(step.__dataclass_fields__)


_STEP_PARSERS = {
    "savgol": aug.SavgolStep,
    "minmax": aug.MinMaxStep,
    "robust_scale": aug.RobustScaleStep,
    "fourier_perturb": aug.FourierPerturbStep,
    "smote": aug.SmoteStep,
}


def _build_step(table: dict):
    table = dict(table)
    kind = table.pop("kind", None)
    if kind not in _STEP_PARSERS:
        raise ConfigError(
            f"unknown augment step kind {kind!r}, expected one of {sorted(_STEP_PARSERS)}"
        )
    try:
        return _STEP_PARSERS[kind](**table)
    except TypeError as exc:
        raise ConfigError(f"bad {kind} step parameters: {exc}") from None


def _expect_table(doc: dict, key: str) -> dict:
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{key}] must be a table")
    return dict(value)


def _pop_seed(table: dict, root: int, tag: int, override: int | None) -> int:
    configured = table.pop("seed", None)
    if override is not None:
        return derive_seed(override, tag)
    if configured is not None:
        return int(configured)
    return derive_seed(root, tag)


def _parse_ranges(table: dict) -> ParamRanges:
    defaults = ParamRanges()
    kwargs = {}
    for name in defaults.__dataclass_fields__:
        if name in table:
            pair = table.pop(name)
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ConfigError(f"[data.ranges] {name} must be a two-element array")
            kwargs[name] = tuple(pair)
    if table:
        raise ConfigError(f"unknown [data.ranges] keys: {sorted(table)}")
    return ParamRanges(**kwargs)


def load_experiment_config(path: str | Path, seed_override: int | None = None) -> ExperimentConfig:
    """Parse and validate an experiment TOML file.

    ``seed_override`` replaces the experiment root seed and re-derives
    the data/split/augment stage seeds from it, ignoring any per-stage
    seeds in the file. Classifier parameters (including a forest's own
    seed) are never overridden.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as handle:
            doc = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    exp = _expect_table(doc, "experiment")
    configured_root = int(exp.pop("seed", 0))
    root_seed = configured_root if seed_override is None else int(seed_override)

    data_tbl = _expect_table(doc, "data")
    source = data_tbl.pop("source", "csv")
    if source not in ("csv", "synth"):
        raise ConfigError(f"[data] source must be 'csv' or 'synth', got {source!r}")
    data_seed = _pop_seed(data_tbl, root_seed, _TAG_DATA, seed_override)
    ranges = _parse_ranges(data_tbl.pop("ranges", {}))
    if source == "csv":
        data_path = data_tbl.pop("path", None)
        if not data_path:
            raise ConfigError("[data] source 'csv' requires a path")
        data = DataConfig(source="csv", path=str(data_path), seed=data_seed, ranges=ranges)
    else:
        data = DataConfig(
            source="synth",
            n_pos=int(data_tbl.pop("n_pos", 37)),
            n_neg=int(data_tbl.pop("n_neg", 5050)),
            length=int(data_tbl.pop("length", 3197)),
            seed=data_seed,
            ranges=ranges,
        )
    if data_tbl:
        raise ConfigError(f"unknown [data] keys: {sorted(data_tbl)}")

    split_tbl = _expect_table(doc, "split")
    split_seed = _pop_seed(split_tbl, root_seed, _TAG_SPLIT, seed_override)
    split_cfg = SplitConfig(ratio=float(split_tbl.pop("ratio", 0.8)), seed=split_seed)
    if not (0.0 < split_cfg.ratio < 1.0):
        raise ConfigError(f"[split] ratio must be in (0, 1) for experiments, got {split_cfg.ratio}")
    if split_tbl:
        raise ConfigError(f"unknown [split] keys: {sorted(split_tbl)}")

    augment_cfg = None
    if "augment" in doc:
        aug_tbl = _expect_table(doc, "augment")
        aug_seed = _pop_seed(aug_tbl, root_seed, _TAG_AUGMENT, seed_override)
        mode = aug_tbl.pop("mode", "leak_free")
        steps_tbl = aug_tbl.pop("steps", None)
        if steps_tbl is None:
            steps = aug.default_paper_pipeline().steps
        else:
            steps = tuple(_build_step(t) for t in steps_tbl)
        if aug_tbl:
            raise ConfigError(f"unknown [augment] keys: {sorted(aug_tbl)}")
        augment_cfg = aug.PipelineConfig(steps=steps, seed=aug_seed, mode=mode)

    raw_classifiers = doc.get("classifiers", [])
    if not raw_classifiers:
        raise ConfigError("at least one [[classifiers]] entry is required")
    classifiers = []
    for table in raw_classifiers:
        table = dict(table)
        kind = table.pop("kind", None)
        if kind not in _DEFAULT_NAMES:
            raise ConfigError(
                f"unknown classifier kind {kind!r}, expected one of {sorted(_DEFAULT_NAMES)}"
            )
        name = str(table.pop("name", _DEFAULT_NAMES[kind]))
        if kind == "random_forest":
            table.setdefault("seed", 0)  # resolved here so the manifest records it
        make_classifier(kind, **table)  # validate parameters eagerly
        classifiers.append(ClassifierSpec(kind=kind, name=name, params=table))

    out_tbl = _expect_table(doc, "output")
    out_tbl.pop("dir", None)
    formats = tuple(out_tbl.pop("formats", ["json", "csv", "md"]))
    for fmt in formats:
        if fmt not in FORMATS:
            raise ConfigError(f"unknown output format {fmt!r}, expected one of {FORMATS}")
    if out_tbl:
        raise ConfigError(f"unknown [output] keys: {sorted(out_tbl)}")

    cfg = ExperimentConfig(
        data=data,
        split=split_cfg,
        augment=augment_cfg,
        classifiers=tuple(classifiers),
        root_seed=root_seed,
        compare_unaugmented=bool(exp.pop("compare_unaugmented", True)),
        literature_rows=bool(exp.pop("literature_rows", False)),
        save_models=bool(exp.pop("save_models", False)),
        formats=formats,
    )
    if exp:
        raise ConfigError(f"unknown [experiment] keys: {sorted(exp)}")
    return cfg


def load_pipeline_config(path: str | Path, seed_override: int | None = None) -> aug.PipelineConfig:
    """Parse just the ``[augment]`` section of a TOML file.

    Used by the standalone ``augment`` subcommand; the section follows
    the same schema as in a full experiment file.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as handle:
            doc = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if "augment" not in doc:
        raise ConfigError(f"{path}: no [augment] section")
    aug_tbl = _expect_table(doc, "augment")
    seed = int(seed_override if seed_override is not None else aug_tbl.pop("seed", 0))
    if seed_override is not None:
        aug_tbl.pop("seed", None)
    mode = aug_tbl.pop("mode", "leak_free")
    steps_tbl = aug_tbl.pop("steps", None)
    if steps_tbl is None:
        steps = aug.default_paper_pipeline().steps
    else:
        steps = tuple(_build_step(t) for t in steps_tbl)
    if aug_tbl:
        raise ConfigError(f"unknown [augment] keys: {sorted(aug_tbl)}")
    return aug.PipelineConfig(steps=steps, seed=seed, mode=mode)


def default_output_dir(path: str | Path) -> Path:
    """Output directory named in the config file, if any."""
    path = Path(path)
    with open(path, "rb") as handle:
        doc = tomllib.load(handle)
    out = doc.get("output", {}).get("dir")
    return Path(out) if out else Path("runs") / path.stem


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _slug(name: str) -> str:
    return "".join(ch if ch.isalnum() else "_" for ch in name.lower()).strip("_")


def _load_data(cfg: ExperimentConfig) -> LabeledDataset:
    if cfg.data.source == "csv":
        return load_csv(cfg.data.path)
    return generate_dataset(
        cfg.data.n_pos, cfg.data.n_neg, cfg.data.ranges, cfg.data.length, cfg.data.seed
    )


def _dataset_summary(ds: LabeledDataset) -> dict:
    neg, pos = class_counts(ds)
    return {"n": ds.n, "length": ds.length, "negatives": neg, "positives": pos}


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path) -> dict:
    """Execute the experiment and write all artifacts under ``out_dir``.

    Returns the manifest dict. On failure a partial manifest (with an
    ``error`` field) is still written before the exception propagates.
    """
    from .plots import save_confusion_figure, save_lightcurve_figure

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings: dict = {}
    manifest: dict = {
        "format": MANIFEST_FORMAT,
        "config_hash": _sha256(_canonical_json(cfg.to_dict())),
        "seeds": {
            "root": cfg.root_seed,
            "data": cfg.data.seed if cfg.data.source == "synth" else None,
            "split": cfg.split.seed,
            "augment": cfg.augment.seed if cfg.augment is not None else None,
        },
        "runs": [],
    }

    try:
        t0 = time.perf_counter()
        ds = _load_data(cfg)
        timings["load"] = time.perf_counter() - t0
        manifest["dataset"] = {"source": cfg.data.source, **_dataset_summary(ds)}

        train, test, _ = split(ds, cfg.split.ratio, cfg.split.seed)
        if test.n == 0 or train.n == 0:
            raise ConfigError(
                f"split ratio {cfg.split.ratio} left an empty partition "
                f"(train={train.n}, test={test.n})"
            )

        aug_train = aug_test = None
        if cfg.augment is not None:
            t0 = time.perf_counter()
            if cfg.augment.mode == "paper_fidelity":
                full = aug.run_pipeline(ds, cfg.augment)
                aug_train, aug_test, _ = split(full, cfg.split.ratio, cfg.split.seed)
                manifest["augmented"] = {"mode": cfg.augment.mode, **_dataset_summary(full)}
            else:
                # train-only row generation; the held-out rows get just the
                # stateless per-curve transforms so scales stay comparable
                aug_train = aug.run_pipeline(train, cfg.augment)
                aug_test = aug.run_pipeline(test, aug.transform_only(cfg.augment))
                manifest["augmented"] = {
                    "mode": cfg.augment.mode,
                    **_dataset_summary(aug_train),
                }
            timings["augment"] = time.perf_counter() - t0

        jobs = []
        for spec in cfg.classifiers:
            if cfg.augment is None or cfg.compare_unaugmented:
                jobs.append((spec, spec.name, False, train, test))
            if cfg.augment is not None:
                jobs.append((spec, f"Augmented {spec.name}", True, aug_train, aug_test))

        named_reports = []
        timings["train_eval"] = {}
        for spec, run_name, augmented, fit_ds, eval_ds in jobs:
            t0 = time.perf_counter()
            model = make_classifier(spec.kind, **spec.params)
            model.fit(fit_ds.X, fit_ds.y)
            predicted = model.predict(eval_ds.X)
            cm = confusion(eval_ds.y, predicted)
            report = metrics(cm)
            timings["train_eval"][run_name] = time.perf_counter() - t0
            named_reports.append((run_name, report))

            run_dir = out / _slug(run_name)
            run_dir.mkdir(parents=True, exist_ok=True)
            artifacts = ["metrics.json"]
            record = {
                "name": run_name,
                "dir": run_dir.name,
                "augmented": augmented,
                "classifier": {"kind": spec.kind, "params": dict(sorted(spec.params.items()))},
                "train_size": fit_ds.n,
                "test_size": eval_ds.n,
                "confusion": cm.as_dict(),
                "metrics": report.as_dict(),
            }
            _write_json(run_dir / "metrics.json", record)
            if "csv" in cfg.formats:
                (run_dir / "metrics.csv").write_text(
                    compare_table([(run_name, report)], fmt="csv"), encoding="utf-8"
                )
                artifacts.append("metrics.csv")
            (run_dir / "confusion.txt").write_text(confusion_grid(cm), encoding="utf-8")
            artifacts.append("confusion.txt")
            if "svg" in cfg.formats:
                save_confusion_figure(cm, run_dir / "confusion.svg", title=run_name)
                artifacts.append("confusion.svg")
            if cfg.save_models:
                save_model(model, run_dir / "model.npz")
                artifacts.append("model.npz")
            record["artifacts"] = artifacts
            manifest["runs"].append(record)

        t0 = time.perf_counter()
        _write_json(
            out / "comparison.json",
            {
                "rows": [
                    {"name": name, **report.as_dict()} for name, report in named_reports
                ],
                "literature_included": cfg.literature_rows,
            },
        )
        if "csv" in cfg.formats:
            (out / "comparison.csv").write_text(
                compare_table(named_reports, cfg.literature_rows, fmt="csv"),
                encoding="utf-8",
            )
        if "md" in cfg.formats:
            (out / "comparison.md").write_text(
                compare_table(named_reports, cfg.literature_rows, fmt="markdown"),
                encoding="utf-8",
            )
        if "svg" in cfg.formats:
            pos_rows = np.flatnonzero(ds.y == 1)
            neg_rows = np.flatnonzero(ds.y == 0)
            if pos_rows.size and neg_rows.size:
                save_lightcurve_figure(
                    [ds.X[pos_rows[0]], ds.X[neg_rows[0]]],
                    out / "lightcurves.svg",
                    labels=["exoplanet", "non-exoplanet"],
                    title="Example light curves",
                )
        timings["write"] = time.perf_counter() - t0

        manifest["manifest_hash"] = _sha256(_canonical_json(manifest))
        manifest["timings_s"] = timings
        manifest["created_utc"] = datetime.now(timezone.utc).isoformat()
        _write_json(out / "manifest.json", manifest)
        return manifest
    except Exception as exc:
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        manifest["partial"] = True
        manifest["timings_s"] = timings
        manifest["created_utc"] = datetime.now(timezone.utc).isoformat()
        _write_json(out / "manifest.json", manifest)
        raise
