"""bayeval: classifier evaluation with Bayesian uncertainty.

Deterministic confusion-matrix metrics, Dirichlet-multinomial posterior
distributions of those metrics (with HDI summaries), multi-class AUC,
segmentation IoU, and severity-score/relevance-heatmap comparison, all driven
from data files through the ``bayeval`` CLI.
"""

from . import backend
from .auc import binary_auc, hand_till_auc, pairwise_separability
from .brixia import (
    BrixiaScore,
    StudyRecord,
    ZonePartition,
    default_partition,
    overall_score,
    spearman,
    study_report,
    zone_relevance,
)
from .confusion import (
    ConfusionMatrix,
    MetricReport,
    accuracy,
    class_f1,
    class_precision,
    class_recall,
    class_specificity,
    full_report,
)
from .errors import InvariantError, ParameterError, ParseError
from .mcmc import metropolis_reference
from .posterior import (
    MetricId,
    PosteriorModel,
    PosteriorSummary,
    PriorConfig,
    draw_metric_samples,
    draw_parameters,
    estimate,
    fit_posterior,
    hdi,
    metric_ids,
    metric_value,
    ml_parameters,
    prior_only_model,
    summarize,
)
from .sampling import DirichletParams, RandomStream, sample_dirichlet, sample_gamma
from .segmetrics import binarize, iou, mean_iou

__version__ = "0.1.0"

__all__ = [
    "BrixiaScore",
    "ConfusionMatrix",
    "DirichletParams",
    "InvariantError",
    "MetricId",
    "MetricReport",
    "ParameterError",
    "ParseError",
    "PosteriorModel",
    "PosteriorSummary",
    "PriorConfig",
    "RandomStream",
    "StudyRecord",
    "ZonePartition",
    "accuracy",
    "backend",
    "binarize",
    "binary_auc",
    "class_f1",
    "class_precision",
    "class_recall",
    "class_specificity",
    "default_partition",
    "draw_metric_samples",
    "draw_parameters",
    "estimate",
    "fit_posterior",
    "full_report",
    "hand_till_auc",
    "hdi",
    "iou",
    "mean_iou",
    "metric_ids",
    "metric_value",
    "metropolis_reference",
    "ml_parameters",
    "overall_score",
    "pairwise_separability",
    "prior_only_model",
    "sample_dirichlet",
    "sample_gamma",
    "spearman",
    "study_report",
    "summarize",
    "zone_relevance",
    "__version__",
]
