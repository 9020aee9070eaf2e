"""shuftext: black-box word-order robustness evaluation for text classifiers."""

from .adapter import AdapterError, ExternalAdapterModel, run_protocol_check
from .augment import (
    Exp1Report,
    Exp2Report,
    make_shuffled_class,
    overall_accuracy,
    run_experiment1,
    run_experiment2,
    select_generic,
)
from .corpus import (
    Dataset,
    DatasetError,
    Example,
    LengthSummary,
    avg_class_size,
    length_iqr,
    load_dataset,
    load_generic_corpus,
    tokenize,
)
from .evaluate import (
    BoxPlotStats,
    EvalRecord,
    ShufTextReport,
    accuracy,
    boxplot_stats,
    run_shuftext,
    same_prediction_pct,
)
from .models import NaiveBayes, NgramLogisticRegression, Prediction, make_builtin
from .report import RunManifest, TOOLKIT_VERSION, emit_boxplot_data, emit_json, emit_table_csv
from .shuffle import SplitMix64, build_shuffled_set, shuffle_tokens, substream

__version__ = TOOLKIT_VERSION

__all__ = [
    "AdapterError",
    "BoxPlotStats",
    "Dataset",
    "DatasetError",
    "EvalRecord",
    "Example",
    "Exp1Report",
    "Exp2Report",
    "ExternalAdapterModel",
    "LengthSummary",
    "NaiveBayes",
    "NgramLogisticRegression",
    "Prediction",
    "RunManifest",
    "ShufTextReport",
    "SplitMix64",
    "TOOLKIT_VERSION",
    "accuracy",
    "avg_class_size",
    "boxplot_stats",
    "build_shuffled_set",
    "emit_boxplot_data",
    "emit_json",
    "emit_table_csv",
    "length_iqr",
    "load_dataset",
    "load_generic_corpus",
    "make_builtin",
    "make_shuffled_class",
    "overall_accuracy",
    "run_experiment1",
    "run_experiment2",
    "run_protocol_check",
    "run_shuftext",
    "same_prediction_pct",
    "select_generic",
    "shuffle_tokens",
    "substream",
    "tokenize",
]
