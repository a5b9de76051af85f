import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lcml import LabeledDataset, generate_dataset
from lcml.synth import ParamRanges

# ranges that make short test curves cheap and clearly detectable
SMALL_RANGES = ParamRanges(
    baseline=(900.0, 1100.0),
    depth=(0.05, 0.2),
    period=(16, 40),
    duration=(3, 8),
    noise_sigma=(0.5, 3.0),
)


def kepler_path():
    """Real flux CSV, if the user has provided one."""
    env = os.environ.get("LCML_KEPLER_CSV")
    candidates = []
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parents[1] / "data" / "exoTrain.csv")
    for path in candidates:
        if path.is_file():
            return path
    return None


@pytest.fixture(scope="session")
def small_ds() -> LabeledDataset:
    return generate_dataset(8, 40, ranges=SMALL_RANGES, length=64, seed=11)


@pytest.fixture(scope="session")
def tiny_imbalanced() -> LabeledDataset:
    return generate_dataset(5, 60, ranges=SMALL_RANGES, length=48, seed=23)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
