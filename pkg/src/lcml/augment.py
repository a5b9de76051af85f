"""Class-balancing augmentation pipeline for flux datasets.

Five techniques: Savitzky-Golay smoothing, min-max normalization,
robust (median/IQR) scaling, frequency-domain amplitude/phase jitter,
and SMOTE minority oversampling. `run_pipeline` composes them in a
configured order with per-step derived seeds, so results are
bit-reproducible regardless of parallelism.

The positive class (label 1) is the minority by contract: jitter copies
and SMOTE samples are only ever added for it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigError
from .ingest import LabeledDataset
from .rng import derive_seed, substream

__all__ = [
    "FourierPerturbStep",
    "MinMaxStep",
    "PipelineConfig",
    "RobustScaleStep",
    "SavgolStep",
    "SmoteStep",
    "default_paper_pipeline",
    "fourier_perturb",
    "minmax_normalize",
    "robust_scale",
    "run_pipeline",
    "savgol_filter",
    "savgol_weights",
    "smote",
    "transform_only",
]


def savgol_weights(window: int, polyorder: int) -> np.ndarray:
    """Convolution weights of the smoothing (center-point) Savitzky-Golay filter.

    Fitting a degree-``polyorder`` polynomial to ``window`` centered
    samples by least squares and evaluating it at the center is a fixed
    linear combination of the samples; this returns that combination.
    E.g. window 5, order 2 gives (-3, 12, 17, 12, -3) / 35.
    """
    if window % 2 == 0:
        raise ConfigError(f"window must be odd, got {window}")
    if polyorder < 0:
        raise ConfigError(f"polyorder must be >= 0, got {polyorder}")
    if window <= polyorder:
        raise ConfigError(f"window ({window}) must exceed polyorder ({polyorder})")
    half = window // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    design = np.vander(offsets, polyorder + 1, increasing=True)
    # row 0 of the pseudoinverse evaluates the fitted polynomial at offset 0
    return np.linalg.pinv(design)[0]


def savgol_filter(curve: np.ndarray, window: int, polyorder: int) -> np.ndarray:
    """Least-squares polynomial smoothing along the last axis.

    Accepts a single curve or a (N, L) matrix. Edges use mirror padding
    (the edge sample itself is not repeated), so output length equals
    input length and polynomials of degree <= ``polyorder`` are
    reproduced exactly at interior points.
    """
    x = np.asarray(curve, dtype=np.float64)
    length = x.shape[-1]
    if window > length:
        raise ConfigError(f"window ({window}) exceeds curve length ({length})")
    weights = savgol_weights(window, polyorder)
    half = window // 2
    pad = [(0, 0)] * (x.ndim - 1) + [(half, half)]
    padded = np.pad(x, pad, mode="reflect")
    return sliding_window_view(padded, window, axis=-1) @ weights


def minmax_normalize(curve: np.ndarray) -> np.ndarray:
    """Rescale each curve to [0, 1] via (x - min) / (max - min).

    A constant curve maps to all zeros.
    """
    x = np.asarray(curve, dtype=np.float64)
    lo = x.min(axis=-1, keepdims=True)
    hi = x.max(axis=-1, keepdims=True)
    span = hi - lo
    span = np.where(span == 0.0, 1.0, span)
    return (x - lo) / span


def robust_scale(curve: np.ndarray) -> np.ndarray:
    """Center each curve on its median and scale by its interquartile range.

    Quantiles use linear interpolation between order statistics. A zero
    IQR (at least half the samples identical) falls back to a unit
    divisor, so constant curves map to all zeros.
    """
    x = np.asarray(curve, dtype=np.float64)
    q1, med, q3 = np.quantile(x, [0.25, 0.5, 0.75], axis=-1, keepdims=True)
    iqr = q3 - q1
    iqr = np.where(iqr == 0.0, 1.0, iqr)
    return (x - med) / iqr


def fourier_perturb(
    curve: np.ndarray, amp_sigma: float, phase_sigma: float, seed: int
) -> np.ndarray:
    """Jitter a curve in the frequency domain.

    Forward real-input DFT, then each bin k is scaled by (1 + eps_k)
    with eps ~ N(0, amp_sigma^2) and rotated by delta_k ~ N(0,
    phase_sigma^2) radians, then inverse transform. The DC bin (and the
    Nyquist bin for even length) keeps its phase so the output stays
    real. The stream draws all amplitude factors first, then all phase
    rotations; zero sigmas still consume draws, so the identity
    perturbation is the sigma -> 0 limit of the same stream.
    """
    x = np.asarray(curve, dtype=np.float64)
    if x.ndim != 1:
        raise ConfigError("fourier_perturb operates on a single curve")
    length = x.shape[0]
    if length < 2:
        raise ConfigError(f"curve length must be >= 2, got {length}")
    if amp_sigma < 0 or phase_sigma < 0:
        raise ConfigError("amp_sigma and phase_sigma must be >= 0")
    rng = substream(seed)
    spectrum = np.fft.rfft(x)
    eps = rng.normal(0.0, 1.0, spectrum.shape[0]) * amp_sigma
    delta = rng.normal(0.0, 1.0, spectrum.shape[0]) * phase_sigma
    delta[0] = 0.0
    if length % 2 == 0:
        delta[-1] = 0.0
    return np.fft.irfft(spectrum * (1.0 + eps) * np.exp(1j * delta), n=length)


def _pairwise_sq_dists(points: np.ndarray) -> np.ndarray:
    # exact row-by-row evaluation; symmetric and free of dot-product cancellation
    m = points.shape[0]
    out = np.empty((m, m), dtype=np.float64)
    for i in range(m):
        diff = points - points[i]
        out[i] = np.einsum("ij,ij->i", diff, diff)
    return out


def smote(
    minority: np.ndarray,
    k: int,
    n_synthetic: int,
    seed: int,
    return_details: bool = False,
):
    """Synthesize minority samples by interpolating toward near neighbors.

    Each synthetic sample is ``x + lam * (nn - x)`` where ``x`` is a
    uniformly chosen minority row, ``nn`` one of its ``k`` nearest
    minority neighbors (Euclidean distance over all features, distance
    ties broken by lower row index), and ``lam ~ Uniform[0, 1)``. Sample
    s draws from substream (seed, s) in the order: row, neighbor, lam.

    With ``return_details`` the generating (row, neighbor, lam) triples
    are returned alongside the samples.
    """
    points = np.asarray(minority, dtype=np.float64)
    if points.ndim != 2:
        points = np.atleast_2d(points)
    m = points.shape[0]
    if m < 2:
        raise ConfigError(f"SMOTE needs at least 2 minority samples, got {m}")
    if not (1 <= k < m):
        raise ConfigError(f"SMOTE k must satisfy 1 <= k < {m}, got {k}")
    if n_synthetic < 0:
        raise ConfigError(f"n_synthetic must be >= 0, got {n_synthetic}")

    d2 = _pairwise_sq_dists(points)
    np.fill_diagonal(d2, np.inf)
    neighbors = np.argsort(d2, axis=1, kind="stable")[:, :k]

    samples = np.empty((n_synthetic, points.shape[1]), dtype=np.float64)
    base = np.empty(n_synthetic, dtype=np.int64)
    near = np.empty(n_synthetic, dtype=np.int64)
    lams = np.empty(n_synthetic, dtype=np.float64)
    for s in range(n_synthetic):
        rng = substream(seed, s)
        i = int(rng.integers(m))
        j = int(neighbors[i, rng.integers(k)])
        lam = rng.random()
        samples[s] = points[i] + lam * (points[j] - points[i])
        base[s], near[s], lams[s] = i, j, lam
    if return_details:
        return samples, (base, near, lams)
    return samples


@dataclass(frozen=True)
class SavgolStep:
    window: int = 11
    polyorder: int = 3

    kind = "savgol"

    def validate(self):
        savgol_weights(self.window, self.polyorder)


@dataclass(frozen=True)
class MinMaxStep:
    kind = "minmax"

    def validate(self):
        pass


@dataclass(frozen=True)
class RobustScaleStep:
    kind = "robust_scale"

    def validate(self):
        pass


@dataclass(frozen=True)
class FourierPerturbStep:
    """Append jittered copies of every minority row."""

    amp_sigma: float = 0.02
    phase_sigma: float = 0.05
    copies: int = 1

    kind = "fourier_perturb"

    def validate(self):
        if self.amp_sigma < 0 or self.phase_sigma < 0:
            raise ConfigError("fourier_perturb sigmas must be >= 0")
        if self.copies < 1:
            raise ConfigError(f"fourier_perturb copies must be >= 1, got {self.copies}")


@dataclass(frozen=True)
class SmoteStep:
    """Append synthetic minority rows until positives = target_ratio * negatives."""

    k_neighbors: int = 5
    target_ratio: float = 1.0

    kind = "smote"

    def validate(self):
        if self.k_neighbors < 1:
            raise ConfigError(f"smote k_neighbors must be >= 1, got {self.k_neighbors}")
        if not (0.0 < self.target_ratio <= 1.0):
            raise ConfigError(
                f"smote target_ratio must be in (0, 1], got {self.target_ratio}"
            )


Step = SavgolStep | MinMaxStep | RobustScaleStep | FourierPerturbStep | SmoteStep

# stateless per-curve transforms: applying them to held-out rows leaks nothing
ROW_TRANSFORM_KINDS = ("savgol", "minmax", "robust_scale")

MODES = ("paper_fidelity", "leak_free")


@dataclass(frozen=True)
class PipelineConfig:
    """Ordered augmentation steps plus the root seed.

    ``mode`` records whether an experiment augments the full dataset
    before splitting (``paper_fidelity`` — reproduces the published
    procedure, which leaks synthetic minority rows into the test set)
    or only the training partition (``leak_free``).
    """

    steps: tuple[Step, ...] = ()
    seed: int = 0
    mode: str = "leak_free"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        smote_positions = [i for i, s in enumerate(self.steps) if isinstance(s, SmoteStep)]
        if len(smote_positions) > 1:
            raise ConfigError("at most one smote step is allowed")
        if smote_positions and smote_positions[0] != len(self.steps) - 1:
            raise ConfigError("smote, if present, must be the last step")
        for step in self.steps:
            step.validate()


def default_paper_pipeline(seed: int = 0, mode: str = "paper_fidelity") -> PipelineConfig:
    """Denoise, scale, jitter minority copies, then SMOTE to balance."""
    return PipelineConfig(
        steps=(
            SavgolStep(),
            RobustScaleStep(),
            MinMaxStep(),
            FourierPerturbStep(),
            SmoteStep(),
        ),
        seed=seed,
        mode=mode,
    )


def transform_only(cfg: PipelineConfig) -> PipelineConfig:
    """Sub-pipeline keeping only the per-curve transform steps.

    A leak-free experiment applies this to the held-out partition so train
    and test rows live on the same feature scale, while the row-generating
    steps (jitter copies, SMOTE) stay confined to the training partition.
    """
    steps = tuple(s for s in cfg.steps if s.kind in ROW_TRANSFORM_KINDS)
    return PipelineConfig(steps=steps, seed=cfg.seed, mode=cfg.mode)


def _apply_step(step: Step, X: np.ndarray, y: np.ndarray, step_seed: int):
    if isinstance(step, SavgolStep):
        return savgol_filter(X, step.window, step.polyorder), y
    if isinstance(step, MinMaxStep):
        return minmax_normalize(X), y
    if isinstance(step, RobustScaleStep):
        return robust_scale(X), y
    if isinstance(step, FourierPerturbStep):
        minority_rows = np.flatnonzero(y == 1)
        extras = np.empty(
            (minority_rows.shape[0] * step.copies, X.shape[1]), dtype=np.float64
        )
        pos = 0
        for r in minority_rows:
            for c in range(step.copies):
                extras[pos] = fourier_perturb(
                    X[r], step.amp_sigma, step.phase_sigma, derive_seed(step_seed, r, c)
                )
                pos += 1
        X2 = np.vstack([X, extras])
        y2 = np.concatenate([y, np.ones(extras.shape[0], dtype=np.int64)])
        return X2, y2
    if isinstance(step, SmoteStep):
        positives = int((y == 1).sum())
        negatives = y.shape[0] - positives
        target = int(round(step.target_ratio * negatives))
        n_synthetic = target - positives
        if n_synthetic <= 0:
            return X, y
        synthetic = smote(X[y == 1], step.k_neighbors, n_synthetic, step_seed)
        X2 = np.vstack([X, synthetic])
        y2 = np.concatenate([y, np.ones(n_synthetic, dtype=np.int64)])
        return X2, y2
    raise ConfigError(f"unknown augmentation step {step!r}")


def run_pipeline(ds: LabeledDataset, cfg: PipelineConfig) -> LabeledDataset:
    """Apply the configured steps in order and return the augmented dataset.

    Per-curve transforms touch every row; fourier_perturb and smote
    append minority rows (labels extended with 1s). Step i draws from
    seed ``derive_seed(cfg.seed, i)``, so inserting or reordering steps
    cannot silently reuse another step's stream.
    """
    X, y = ds.X, ds.y
    for i, step in enumerate(cfg.steps):
        X, y = _apply_step(step, X, y, derive_seed(cfg.seed, i))
    return LabeledDataset(X, y)
