"""lcml: light-curve machine learning.

Detects exoplanet transits in stellar flux time series: ingestion of
labeled flux CSVs, a five-technique class-balancing augmentation
pipeline, three natively implemented classifiers, and an evaluation
harness with a reproducible experiment CLI.
"""

from .augment import (
    FourierPerturbStep,
    MinMaxStep,
    PipelineConfig,
    RobustScaleStep,
    SavgolStep,
    SmoteStep,
    default_paper_pipeline,
    fourier_perturb,
    minmax_normalize,
    robust_scale,
    run_pipeline,
    savgol_filter,
    savgol_weights,
    smote,
)
from .errors import (
    ConfigError,
    LabelError,
    LcmlError,
    NumericError,
    ParseError,
    SchemaError,
    ShapeError,
    ValidationError,
)
from .eval import (
    ConfusionMatrix,
    MetricsReport,
    compare_table,
    confusion,
    confusion_grid,
    metrics,
)
from .ingest import (
    CsvSchema,
    LabeledDataset,
    SplitIndices,
    class_counts,
    load_csv,
    map_labels,
    split,
    write_csv,
)
from .models import (
    KNearestNeighbors,
    LogisticRegression,
    RandomForest,
    gini_impurity,
    knn_predict,
    load_model,
    make_classifier,
    save_model,
    sigmoid,
)
from .synth import ParamRanges, TransitParams, generate_curve, generate_dataset

__version__ = "0.1.0"
