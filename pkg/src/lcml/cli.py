"""Command-line interface.

Subcommands: ``validate`` (check a flux CSV), ``synth`` (generate a
synthetic dataset), ``augment`` (dataset -> augmented CSV), ``run``
(full experiment from a TOML config), ``predict`` (apply a saved model).

Exit codes: 0 success, 2 data validation failure, 64 usage or
configuration error, 70 internal numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .errors import (
    ConfigError,
    LabelError,
    NumericError,
    ParseError,
    SchemaError,
    ShapeError,
    ValidationError,
)

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64
EXIT_NUMERIC = 70

_DATA_ERRORS = (SchemaError, ParseError, LabelError, ValidationError, ShapeError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lcml", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="validate a flux CSV")
    p.add_argument("dataset", help="path to the CSV file")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--n-pos", type=int, default=37)
    p.add_argument("--n-neg", type=int, default=5050)
    p.add_argument("--length", type=int, default=3197)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", default=None, help="also render example curves to this figure file")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("augment", help="augment a dataset CSV")
    p.add_argument("dataset", help="input CSV path")
    p.add_argument("--config", required=True, help="TOML file with an [augment] section")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--seed", type=int, default=None, help="override the pipeline seed")
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("--config", required=True, help="experiment TOML file")
    p.add_argument("--out", default=None, help="output directory (default from config)")
    p.add_argument("--seed", type=int, default=None, help="override the experiment root seed")
    p.add_argument(
        "--format",
        default=None,
        help="comma-separated subset of json,csv,md,svg (default from config)",
    )
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("predict", help="apply a saved model to a dataset")
    p.add_argument("model", help="model .npz file")
    p.add_argument("dataset", help="CSV of rows to classify")
    p.add_argument("--out", required=True, help="output predictions CSV")
    p.set_defaults(func=_cmd_predict)
    return parser


def _cmd_validate(args) -> int:
    from .ingest import class_counts, load_csv

    if not args.dataset.strip():
        print("lcml validate: error: empty dataset path", file=sys.stderr)
        return EXIT_USAGE
    ds = load_csv(args.dataset)
    _, positives = class_counts(ds)
    print(f"{ds.n} rows × {ds.length} flux, {positives} positives")
    return EXIT_OK


def _cmd_synth(args) -> int:
    from .ingest import write_csv
    from .synth import generate_dataset

    ds = generate_dataset(args.n_pos, args.n_neg, length=args.length, seed=args.seed)
    write_csv(ds, args.out)
    print(f"wrote {ds.n} rows × {ds.length} flux to {args.out}")
    if args.plot:
        import numpy as np

        from .plots import save_lightcurve_figure

        pos = np.flatnonzero(ds.y == 1)[:2]
        neg = np.flatnonzero(ds.y == 0)[:1]
        rows = list(pos) + list(neg)
        save_lightcurve_figure(
            ds.X[rows],
            args.plot,
            labels=["exoplanet" if ds.y[r] else "non-exoplanet" for r in rows],
            title="Synthetic light curves",
        )
        print(f"wrote figure {args.plot}")
    return EXIT_OK


def _cmd_augment(args) -> int:
    from .augment import run_pipeline
    from .experiment import load_pipeline_config
    from .ingest import class_counts, load_csv, write_csv

    cfg = load_pipeline_config(args.config, seed_override=args.seed)
    ds = load_csv(args.dataset)
    out = run_pipeline(ds, cfg)
    write_csv(out, args.out)
    neg, pos = class_counts(out)
    print(f"wrote {out.n} rows ({neg} negatives, {pos} positives) to {args.out}")
    return EXIT_OK


def _cmd_run(args) -> int:
    from .experiment import default_output_dir, load_experiment_config, run_experiment

    cfg = load_experiment_config(args.config, seed_override=args.seed)
    if args.format is not None:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        bad = [f for f in formats if f not in ("json", "csv", "md", "svg")]
        if bad:
            raise ConfigError(f"unknown output format(s): {bad}")
        cfg = dataclasses.replace(cfg, formats=formats)
    out_dir = Path(args.out) if args.out else default_output_dir(args.config)
    manifest = run_experiment(cfg, out_dir)
    for run in manifest["runs"]:
        m = run["metrics"]
        print(
            f"{run['name']}: accuracy={m['accuracy']:.4f} recall={m['recall']:.4f} "
            f"precision={m['precision']:.4f} f1={m['f1']:.4f}"
        )
    print(f"artifacts in {out_dir} (manifest hash {manifest['manifest_hash'][:12]})")
    return EXIT_OK


def _cmd_predict(args) -> int:
    from .ingest import load_csv
    from .models import load_model

    model = load_model(args.model)
    ds = load_csv(args.dataset)
    labels = model.predict(ds.X)
    scores = model.predict_proba(ds.X)
    lines = ["row,predicted_label,score"]
    for i, (label, score) in enumerate(zip(labels, scores)):
        lines.append(f"{i},{int(label)},{float(score)!r}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(labels)} predictions to {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"lcml: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"lcml: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _DATA_ERRORS as exc:
        print(f"lcml: {exc}", file=sys.stderr)
        return EXIT_DATA


def app() -> None:
    sys.exit(main())


if __name__ == "__main__":
    app()
