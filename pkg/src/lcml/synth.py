"""Synthetic transit light curves.

Box-shaped transits on a flat baseline with optional Gaussian and
Poisson noise. Good enough to exercise the full pipeline without the
real flux dataset; not an astrophysical model (no limb darkening).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .ingest import LabeledDataset
from .rng import derive_seed, substream

__all__ = ["ParamRanges", "TransitParams", "generate_curve", "generate_dataset"]

# substream namespaces inside generate_dataset
_POS_PARAMS, _POS_CURVE, _NEG_PARAMS, _NEG_CURVE, _SHUFFLE = range(5)


@dataclass(frozen=True)
class TransitParams:
    """Parameters of one box-transit curve.

    ``depth`` is the fractional dip (0 disables transits), ``period`` the
    spacing between transit starts in samples, ``duration`` the in-transit
    width, ``phase`` the offset of the first transit start.
    """

    baseline: float = 1.0
    depth: float = 0.01
    period: int = 100
    duration: int = 5
    noise_sigma: float = 0.0
    poisson_scale: float | None = None
    phase: int = 0

    def validate(self, length: int) -> None:
        if not (0 < self.duration < self.period <= length):
            raise ValidationError(
                f"need 0 < duration < period <= curve length, got "
                f"duration={self.duration}, period={self.period}, length={length}"
            )
        if self.depth < 0:
            raise ValidationError(f"depth must be >= 0, got {self.depth}")
        if self.noise_sigma < 0:
            raise ValidationError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.phase < 0:
            raise ValidationError(f"phase must be >= 0, got {self.phase}")
        if self.poisson_scale is not None and self.poisson_scale <= 0:
            raise ValidationError(f"poisson_scale must be > 0, got {self.poisson_scale}")


@dataclass(frozen=True)
class ParamRanges:
    """Uniform draw bounds for randomized positive-curve parameters.

    Integer fields are drawn inclusive of both ends; ``duration`` is
    clamped below the drawn period. Negatives reuse ``baseline`` and
    ``noise_sigma`` with depth forced to zero.
    """

    baseline: tuple[float, float] = (5e3, 5e4)
    depth: tuple[float, float] = (0.005, 0.05)
    period: tuple[int, int] = (40, 400)
    duration: tuple[int, int] = (3, 25)
    noise_sigma: tuple[float, float] = (5.0, 50.0)


def generate_curve(params: TransitParams, length: int, seed: int) -> np.ndarray:
    """Render one light curve of ``length`` samples.

    flux[i] = baseline * (1 - depth * in_transit(i)) + Gaussian noise,
    where in_transit(i) = ((i - phase) mod period) < duration. When
    ``poisson_scale`` is set, the result is re-drawn as
    Poisson(flux * scale) / scale. Deterministic per seed; the stream
    draws Gaussian noise first, then Poisson counts.
    """
    params.validate(length)
    i = np.arange(length)
    in_transit = ((i - params.phase) % params.period) < params.duration
    flux = params.baseline * (1.0 - params.depth * in_transit.astype(np.float64))
    rng = substream(seed)
    flux = flux + rng.normal(0.0, 1.0, length) * params.noise_sigma
    if params.poisson_scale is not None:
        rate = np.clip(flux * params.poisson_scale, 0.0, None)
        flux = rng.poisson(rate).astype(np.float64) / params.poisson_scale
    return flux


def _draw_positive_params(
    rng: np.random.Generator, ranges: ParamRanges, length: int
) -> TransitParams:
    # draw order is part of the determinism contract; period/duration bounds
    # are clamped so short curves still satisfy duration < period <= length
    baseline = rng.uniform(*ranges.baseline)
    depth = rng.uniform(*ranges.depth)
    period_hi = min(ranges.period[1], length)
    period_lo = max(2, min(ranges.period[0], period_hi))
    period = int(rng.integers(period_lo, period_hi + 1))
    dur_hi = min(ranges.duration[1], period - 1)
    dur_lo = max(1, min(ranges.duration[0], dur_hi))
    duration = int(rng.integers(dur_lo, dur_hi + 1))
    phase = int(rng.integers(0, period))
    noise_sigma = rng.uniform(*ranges.noise_sigma)
    return TransitParams(
        baseline=baseline,
        depth=depth,
        period=period,
        duration=duration,
        noise_sigma=noise_sigma,
        phase=phase,
    )


def _draw_negative_params(
    rng: np.random.Generator, ranges: ParamRanges, length: int
) -> TransitParams:
    baseline = rng.uniform(*ranges.baseline)
    noise_sigma = rng.uniform(*ranges.noise_sigma)
    return TransitParams(
        baseline=baseline,
        depth=0.0,
        period=max(2, min(ranges.period[0], length)),
        duration=1,
        noise_sigma=noise_sigma,
        phase=0,
    )


def generate_dataset(
    n_pos: int,
    n_neg: int,
    ranges: ParamRanges | None = None,
    length: int = 3197,
    seed: int = 0,
) -> LabeledDataset:
    """Generate a labeled dataset of ``n_pos`` transit and ``n_neg`` flat curves.

    Positives draw their transit parameters uniformly from ``ranges``;
    negatives are baseline plus noise (depth 0). Rows are shuffled
    deterministically. Every curve has its own derived substream, so
    generation order or parallelism cannot change the output.
    """
    if n_pos < 0 or n_neg < 0:
        raise ValidationError("curve counts must be >= 0")
    if ranges is None:
        ranges = ParamRanges()
    if length < 2:
        raise ValidationError(f"curve length must be >= 2, got {length}")

    rows = np.empty((n_pos + n_neg, length), dtype=np.float64)
    labels = np.empty(n_pos + n_neg, dtype=np.int64)
    for i in range(n_pos):
        params = _draw_positive_params(substream(seed, _POS_PARAMS, i), ranges, length)
        rows[i] = generate_curve(params, length, derive_seed(seed, _POS_CURVE, i))
        labels[i] = 1
    for j in range(n_neg):
        params = _draw_negative_params(substream(seed, _NEG_PARAMS, j), ranges, length)
        rows[n_pos + j] = generate_curve(params, length, derive_seed(seed, _NEG_CURVE, j))
        labels[n_pos + j] = 0

    order = substream(seed, _SHUFFLE).permutation(n_pos + n_neg)
    return LabeledDataset(rows[order], labels[order])
