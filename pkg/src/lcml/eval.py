"""Confusion matrices, the four headline metrics, and comparison tables.

Conventions: the positive class is 1 (exoplanet). Precision and recall
degrade to 0.0 (never NaN) when their denominator is zero, and F1 is 0
when precision + recall is zero — so an all-negative predictor scores
a clean row of zeros rather than propagating NaNs into reports.
"""

from __future__ import annotations

import io
from dataclasses import asdict, dataclass

import numpy as np

from .errors import LabelError, ShapeError, ValidationError

__all__ = [
    "LITERATURE_ROWS",
    "ConfusionMatrix",
    "MetricsReport",
    "compare_table",
    "confusion",
    "confusion_grid",
    "format_percent",
    "metrics",
]


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name, value in asdict(self).items():
            if value < 0:
                raise ValidationError(f"confusion count {name} is negative: {value}")
        if self.total == 0:
            raise ValidationError("confusion matrix has no samples")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float

    def as_dict(self) -> dict:
        return asdict(self)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    """Count tp/fp/fn/tn for binary label vectors of equal length."""
    t = np.asarray(y_true).ravel()
    p = np.asarray(y_pred).ravel()
    if t.shape[0] != p.shape[0]:
        raise ShapeError(f"length mismatch: {t.shape[0]} true vs {p.shape[0]} predicted")
    if t.shape[0] == 0:
        raise ShapeError("cannot evaluate zero samples")
    for name, arr in (("y_true", t), ("y_pred", p)):
        if ((arr != 0) & (arr != 1)).any():
            raise LabelError(f"{name} contains values outside {{0, 1}}")
    tp = int(((t == 1) & (p == 1)).sum())
    fp = int(((t == 0) & (p == 1)).sum())
    fn = int(((t == 1) & (p == 0)).sum())
    tn = int(((t == 0) & (p == 0)).sum())
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, precision, recall, F1 with zero-division -> 0.0."""
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if cm.tp + cm.fp > 0 else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn > 0 else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return MetricsReport(accuracy=accuracy, precision=precision, recall=recall, f1=f1)


def format_percent(value: float | None) -> str:
    """Render a fraction as a one-decimal percentage; None renders as '-'."""
    if value is None:
        return "-"
    return f"{100.0 * value:.1f}%"


def confusion_grid(cm: ConfusionMatrix) -> str:
    """2x2 labeled text grid, rows = actual class, columns = predicted."""
    width = max(len(str(v)) for v in (cm.tp, cm.fp, cm.fn, cm.tn))
    width = max(width, 6)
    corner = "actual \\ predicted"
    out = io.StringIO()
    out.write(f"{corner:>20} | {'0':>{width}} | {'1':>{width}}\n")
    out.write(f"{'-' * 20}-+-{'-' * width}-+-{'-' * width}\n")
    out.write(f"{'0 (non-exoplanet)':>20} | {cm.tn:>{width}} | {cm.fp:>{width}}\n")
    out.write(f"{'1 (exoplanet)':>20} | {cm.fn:>{width}} | {cm.tp:>{width}}\n")
    return out.getvalue()


# Published results quoted for side-by-side context. Never computed here;
# None marks metrics the source did not report.
LITERATURE_ROWS: tuple[tuple[str, float | None, float | None, float | None, float | None], ...] = (
    ("ExoMiner", 0.736, 0.936, 0.99, 0.962),
    ("YOLO", None, 0.85, 0.81, 0.830),
    ("CNN", 0.990, None, None, None),
)

_COLUMNS = ("Model", "Accuracy", "Recall", "Precision", "F1")


def _rows(reports, include_literature):
    rows = []
    for name, report in reports:
        if not str(name).strip():
            raise ValidationError("report name must be non-empty")
        rows.append(
            (str(name), report.accuracy, report.recall, report.precision, report.f1)
        )
    if include_literature:
        for name, acc, rec, prec, f1 in LITERATURE_ROWS:
            rows.append((f"{name}*", acc, rec, prec, f1))
    return rows


def compare_table(
    reports: list[tuple[str, MetricsReport]],
    include_literature: bool = False,
    fmt: str = "markdown",
) -> str:
    """Render named reports as a comparison table.

    ``fmt`` is ``"markdown"`` (one-decimal percentages) or ``"csv"``
    (numeric percent values, blank for unreported). Literature rows are
    marked with ``*`` and a footnote: they are quoted, not computed.
    """
    if not reports:
        raise ValidationError("compare_table needs at least one report")
    rows = _rows(reports, include_literature)
    if fmt == "csv":
        lines = [",".join(_COLUMNS)]
        for name, *values in rows:
            cells = ["" if v is None else f"{100.0 * v:.1f}" for v in values]
            lines.append(",".join([name] + cells))
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        lines = ["| " + " | ".join(_COLUMNS) + " |"]
        lines.append("|" + "|".join([" --- "] * len(_COLUMNS)) + "|")
        for name, *values in rows:
            cells = [format_percent(v) for v in values]
            lines.append("| " + " | ".join([name] + cells) + " |")
        text = "\n".join(lines) + "\n"
        if include_literature:
            text += "\n\\* quoted from published work, not computed by this toolkit.\n"
        return text
    raise ValidationError(f"unknown table format {fmt!r}")
