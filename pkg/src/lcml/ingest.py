"""Dataset ingestion, validation, and train/test splitting.

A light curve is one row of relative-brightness flux samples; a dataset
is a float64 matrix of shape (N, L) plus a binary label per row
(1 = exoplanet, 0 = non-exoplanet). On disk the raw label encoding is
2 = exoplanet, 1 = non-exoplanet with header ``LABEL,FLUX.1,...,FLUX.L``,
matching the public Kepler labelled-time-series CSV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import LabelError, ParseError, SchemaError, ValidationError
from .rng import mask64, substream

__all__ = [
    "CsvSchema",
    "LabeledDataset",
    "SplitIndices",
    "class_counts",
    "load_csv",
    "map_labels",
    "split",
    "write_csv",
]


@dataclass(frozen=True)
class CsvSchema:
    """Column conventions for flux CSV files."""

    label_column: str = "LABEL"
    flux_prefix: str = "FLUX."
    positive_raw: int = 2
    negative_raw: int = 1


DEFAULT_SCHEMA = CsvSchema()


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable flux matrix plus binary labels.

    ``X`` has shape (N, L) float64, ``y`` shape (N,) int64 with values in
    {0, 1}. Arrays are copied and marked read-only, so a dataset can be
    shared across threads. Ingestion never yields an empty dataset, but
    N = 0 is representable (the test half of a ratio-1.0 split).
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, ndmin=2)
        y = np.array(self.y, dtype=np.int64).ravel()
        if X.ndim != 2:
            raise SchemaError(f"flux matrix must be 2-D, got ndim={X.ndim}")
        if X.shape[0] != y.shape[0]:
            raise SchemaError(
                f"curves and labels disagree: {X.shape[0]} rows vs {y.shape[0]} labels"
            )
        bad = (y != 0) & (y != 1)
        if bad.any():
            i = int(np.argmax(bad))
            raise LabelError(f"label at row {i} is {y[i]}, expected 0 or 1")
        if not np.isfinite(X).all():
            r, c = map(int, np.argwhere(~np.isfinite(X))[0])
            raise ValidationError(f"non-finite flux at row {r}, flux column {c + 1}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def length(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class SplitIndices:
    """Provenance of one train/test partition."""

    train_idx: np.ndarray
    test_idx: np.ndarray
    seed: int
    ratio: float


def map_labels(raw) -> np.ndarray:
    """Map raw on-disk labels {2, 1} to binary {1, 0}.

    2 is an exoplanet (positive class 1), 1 a non-exoplanet (0). Any
    other value raises `LabelError`.
    """
    arr = np.asarray(raw)
    out = np.empty(arr.shape, dtype=np.int64)
    known = np.zeros(arr.shape, dtype=bool)
    for raw_value, mapped in ((2, 1), (1, 0)):
        hit = arr == raw_value
        out[hit] = mapped
        known |= hit
    if not known.all():
        i = int(np.argmax(~known))
        raise LabelError(f"raw label at row {i} is {arr[i]!r}, expected 1 or 2")
    return out


def _labels_to_raw(y: np.ndarray, schema: CsvSchema) -> np.ndarray:
    return np.where(y == 1, schema.positive_raw, schema.negative_raw).astype(np.int64)


def _locate_bad_cell(series: pd.Series) -> tuple[int, object]:
    coerced = pd.to_numeric(series, errors="coerce")
    bad = coerced.isna() & series.notna()
    pos = int(np.argmax(bad.to_numpy()))
    return pos, series.iloc[pos]


def load_csv(path: str | Path, schema: CsvSchema = DEFAULT_SCHEMA) -> LabeledDataset:
    """Load and validate a flux CSV.

    Parameters
    ----------
    path : str | Path
        CSV with a header row; first column is the raw label, remaining
        columns are numeric flux samples.
    schema : CsvSchema
        Column-name and label-encoding conventions.

    Raises
    ------
    SchemaError
        Missing file content, missing/short header, ragged rows.
    ParseError
        A non-numeric cell (message names row and column).
    LabelError
        Raw label outside {1, 2}.
    ValidationError
        NaN or infinite flux values; nothing is imputed.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"dataset file not found: {path}")
    try:
        # round_trip parsing: shortest-repr floats written by write_csv
        # must reload bit-exactly
        df = pd.read_csv(path, header=0, float_precision="round_trip")
    except pd.errors.EmptyDataError:
        raise SchemaError(f"{path}: empty file, expected a header row") from None
    except pd.errors.ParserError as exc:
        raise ParseError(f"{path}: {exc}") from None

    columns = list(df.columns)
    if len(columns) < 2:
        raise SchemaError(
            f"{path}: header has {len(columns)} column(s), need a "
            f"{schema.label_column!r} column plus at least one flux column"
        )
    if columns[0] != schema.label_column:
        raise SchemaError(
            f"{path}: first header column is {columns[0]!r}, expected {schema.label_column!r}"
        )
    if df.shape[0] == 0:
        raise SchemaError(f"{path}: no data rows")

    for col in columns:
        if df[col].dtype == object:
            row, value = _locate_bad_cell(df[col])
            raise ParseError(
                f"{path}: non-numeric value {value!r} at data row {row}, column {col!r}"
            )

    raw = df[columns[0]].to_numpy()
    if not np.all(raw == np.floor(raw)):
        i = int(np.argmax(raw != np.floor(raw)))
        raise LabelError(f"raw label at row {i} is {raw[i]!r}, expected 1 or 2")
    y = map_labels(raw.astype(np.int64))

    X = df[columns[1:]].to_numpy(dtype=np.float64)
    if not np.isfinite(X).all():
        r, c = map(int, np.argwhere(~np.isfinite(X))[0])
        raise ValidationError(
            f"{path}: non-finite flux at data row {r}, column {columns[1 + c]!r}"
        )
    return LabeledDataset(X, y)


def write_csv(ds: LabeledDataset, path: str | Path, schema: CsvSchema = DEFAULT_SCHEMA) -> None:
    """Persist a dataset in the ingestion schema.

    Floats are written with shortest round-trip repr, so
    ``load_csv(write_csv(ds))`` reproduces ``ds.X`` bit-exactly.
    """
    path = Path(path)
    names = [f"{schema.flux_prefix}{i + 1}" for i in range(ds.length)]
    frame = pd.DataFrame(np.asarray(ds.X), columns=names)
    frame.insert(0, schema.label_column, _labels_to_raw(ds.y, schema))
    frame.to_csv(path, index=False)


def split(
    ds: LabeledDataset, ratio: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset, SplitIndices]:
    """Seeded uniform train/test partition (not stratified).

    The row permutation is a pure function of ``seed``. Train size is
    ``floor(ratio * N)`` (with a 1e-9 guard against floating-point dust);
    the test set gets the remainder, so an 80/20 split of 5087 rows
    yields 4069/1018.
    """
    if not (0.0 < ratio <= 1.0):
        raise ValidationError(f"split ratio must be in (0, 1], got {ratio}")
    n = ds.n
    n_train = int(math.floor(ratio * n + 1e-9))
    perm = substream(mask64(seed)).permutation(n)
    train_idx = perm[:n_train]
    test_idx = perm[n_train:]
    train = LabeledDataset(ds.X[train_idx], ds.y[train_idx])
    test = LabeledDataset(ds.X[test_idx], ds.y[test_idx])
    return train, test, SplitIndices(train_idx, test_idx, seed=seed, ratio=ratio)


def class_counts(ds: LabeledDataset) -> tuple[int, int]:
    """Return ``(negatives, positives)``; the two always sum to N."""
    positives = int(ds.y.sum())
    return ds.n - positives, positives
