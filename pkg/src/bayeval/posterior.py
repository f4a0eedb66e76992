"""Bayesian posterior over classifier performance metrics.

Model: class prevalences mu ~ Dir(beta) with multinomial class counts, and
per-class confusion rows theta_j ~ Dir(alpha_j) with multinomial row counts.
Both factors are conjugate, so the posterior given a confusion matrix is a
product of independent Dirichlets (prior + counts) and can be sampled exactly
with i.i.d. draws; no MCMC, tuning, or convergence diagnostics are needed.
Metric functionals (precision, recall, F1, specificity, their macro averages,
and accuracy/micro-F1) are evaluated per joint draw and summarized by mean,
sample std, Monte Carlo error, and a highest-density interval.

Monte Carlo draws are indexed: draw i always comes from substream i of the
supplied stream, so results are bit-identical for any worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backend
from ._purekernels import eval_metrics as _eval_metrics_scalar
from .confusion import ConfusionMatrix
from .errors import InvariantError, ParameterError
from .sampling import DirichletParams, RandomStream

_AGGREGATE_KINDS = (
    "accuracy",
    "macro_f1",
    "macro_precision",
    "macro_recall",
    "macro_specificity",
)
_CLASS_KINDS = ("precision", "recall", "f1", "specificity")

_AGGREGATE_DISPLAY = {
    "accuracy": "Mean Accuracy or miF1",
    "macro_f1": "Macro-averaged F1-Score",
    "macro_precision": "Macro-averaged Precision",
    "macro_recall": "Macro-averaged Recall",
    "macro_specificity": "Macro-averaged Specificity",
}
_CLASS_DISPLAY = {
    "precision": "{label} Precision",
    "recall": "{label} Recall",
    "f1": "{label} F1-Score",
    "specificity": "{label} Specificity",
}


@dataclass(frozen=True)
class MetricId:
    """Identifies one metric functional: an aggregate or a per-class value."""

    kind: str
    class_index: int | None = None

    def __post_init__(self):
        if self.kind in _AGGREGATE_KINDS:
            if self.class_index is not None:
                raise ParameterError(f"{self.kind} takes no class index")
        elif self.kind in _CLASS_KINDS:
            if self.class_index is None or self.class_index < 0:
                raise ParameterError(f"{self.kind} needs a nonnegative class index")
        else:
            raise ParameterError(f"unknown metric kind {self.kind!r}")

    def display(self, labels):
        if self.class_index is None:
            return _AGGREGATE_DISPLAY[self.kind]
        return _CLASS_DISPLAY[self.kind].format(label=labels[self.class_index])

    def slug(self, labels):
        """Filesystem-safe identifier (for histogram file names)."""
        name = self.kind
        if self.class_index is not None:
            name = f"{self.kind}_{labels[self.class_index]}"
        return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


def metric_ids(n_classes):
    """Canonical metric order: 5 aggregates, then P/R/F1/specificity per class."""
    ids = [MetricId(kind) for kind in _AGGREGATE_KINDS]
    for j in range(n_classes):
        ids.extend(MetricId(kind, j) for kind in _CLASS_KINDS)
    return tuple(ids)


def n_metric_columns(n_classes):
    return 5 + 4 * n_classes


def metric_column(metric, n_classes):
    """Column of a metric in the sample matrix (see backend layout docs)."""
    if metric.class_index is not None and metric.class_index >= n_classes:
        raise ParameterError(
            f"class index {metric.class_index} out of range for {n_classes} classes"
        )
    if metric.kind == "accuracy":
        return 0
    if metric.kind == "macro_f1":
        return 1
    if metric.kind == "macro_precision":
        return 2
    if metric.kind == "macro_recall":
        return 3
    if metric.kind == "macro_specificity":
        return 4
    offset = {"precision": 0, "recall": 1, "f1": 2, "specificity": 3}[metric.kind]
    return 5 + 4 * metric.class_index + offset


@dataclass(frozen=True)
class PriorConfig:
    """Dirichlet hyperparameters: beta for mu, one alpha row per theta_j."""

    beta: DirichletParams
    alpha_rows: tuple[DirichletParams, ...]

    def __post_init__(self):
        m = self.beta.dimension
        rows = tuple(self.alpha_rows)
        if len(rows) != m or any(r.dimension != m for r in rows):
            raise ParameterError("prior dimensions must all match the class count")
        object.__setattr__(self, "alpha_rows", rows)

    @classmethod
    def uniform(cls, n_classes):
        """All-ones hyperparameters (the default, noninformative choice)."""
        ones = DirichletParams((1.0,) * n_classes)
        return cls(beta=ones, alpha_rows=(ones,) * n_classes)

    @property
    def n_classes(self):
        return self.beta.dimension


@dataclass(frozen=True)
class PosteriorModel:
    """Conjugate posterior: independent Dirichlets for mu and each theta row."""

    labels: tuple[str, ...]
    mu_params: DirichletParams
    theta_params: tuple[DirichletParams, ...]
    sample_size: int

    def __post_init__(self):
        m = len(self.labels)
        if self.mu_params.dimension != m or len(self.theta_params) != m:
            raise ParameterError("model dimensions must match the label count")
        if any(r.dimension != m for r in self.theta_params):
            raise ParameterError("each theta row must have one entry per class")

    @property
    def n_classes(self):
        return len(self.labels)


@dataclass(frozen=True)
class ParameterDraw:
    """One joint draw: prevalences mu (M,) and confusion rows theta (M, M)."""

    mu: np.ndarray
    theta: np.ndarray


def fit_posterior(cm, prior=None):
    """Conjugate update: mu gets beta + row sums, theta_j gets alpha_j + row j.

    Pure bookkeeping; no sampling happens here.
    """
    if not isinstance(cm, ConfusionMatrix):
        raise ParameterError("fit_posterior expects a ConfusionMatrix")
    m = cm.n_classes
    if prior is None:
        prior = PriorConfig.uniform(m)
    if prior.n_classes != m:
        raise ParameterError(
            f"prior is for {prior.n_classes} classes, matrix has {m}"
        )
    row_sums = cm.row_sums()
    mu_params = DirichletParams(
        tuple(b + int(n) for b, n in zip(prior.beta.alpha, row_sums))
    )
    theta_params = tuple(
        DirichletParams(
            tuple(a + int(c) for a, c in zip(prior.alpha_rows[j].alpha, cm.counts[j]))
        )
        for j in range(m)
    )
    return PosteriorModel(
        labels=cm.labels,
        mu_params=mu_params,
        theta_params=theta_params,
        sample_size=cm.total,
    )


def prior_only_model(prior, labels=None):
    """The no-data posterior (= the prior); mainly a testing hook."""
    m = prior.n_classes
    if labels is None:
        labels = tuple(f"class{j}" for j in range(m))
    return PosteriorModel(
        labels=tuple(labels),
        mu_params=prior.beta,
        theta_params=prior.alpha_rows,
        sample_size=0,
    )


def ml_parameters(cm):
    """Maximum-likelihood plug-in parameters: mu = n/N, theta rows normalized."""
    row_sums = cm.row_sums()
    if np.any(row_sums == 0):
        raise ParameterError("ML parameters need every row sum positive")
    mu = row_sums / cm.total
    theta = cm.counts / row_sums[:, None]
    return ParameterDraw(mu=mu.astype(np.float64), theta=theta.astype(np.float64))


def draw_parameters(model, stream):
    """One joint posterior draw; mu and the theta rows are independent."""
    mu = stream.dirichlet(model.mu_params)
    m = model.n_classes
    theta = np.empty((m, m), dtype=np.float64)
    for j in range(m):
        theta[j] = stream.dirichlet(model.theta_params[j])
    return ParameterDraw(mu=mu, theta=theta)


def metric_value(draw, metric):
    """Evaluate one metric functional at a parameter point.

    Returns None when the draw makes the metric's denominator zero (the
    undefined-metric signal). Backend-independent: always uses the pure
    scalar evaluator.
    """
    mu = np.asarray(draw.mu, dtype=np.float64)
    theta = np.asarray(draw.theta, dtype=np.float64)
    m = mu.shape[0]
    if theta.shape != (m, m):
        raise ParameterError("theta must be M x M")
    col = metric_column(metric, m)
    row = [0.0] * n_metric_columns(m)
    _eval_metrics_scalar(mu, theta, row)
    value = row[col]
    if math.isnan(value):
        return None
    return value


def draw_metric_samples(model, sample_count, stream=None, workers=1):
    """S joint draws evaluated on every metric; returns an (S, 5+4M) matrix.

    Row i is a pure function of (stream identity, i): splitting the rows
    across threads cannot change the result. NaN entries mark draws where a
    metric's denominator was zero (counted as exclusions by summarize()).
    """
    if not isinstance(sample_count, (int, np.integer)) or sample_count < 1:
        raise ParameterError(f"sample_count must be a positive integer, got {sample_count}")
    if stream is None:
        stream = RandomStream(0)
    if stream.is_substream:
        raise ParameterError("pass a root stream, not a substream")
    if not isinstance(workers, (int, np.integer)) or workers < 1:
        raise ParameterError(f"workers must be a positive integer, got {workers}")
    m = model.n_classes
    mu_alpha = model.mu_params.as_array()
    theta_alpha = np.ascontiguousarray(
        np.stack([row.as_array() for row in model.theta_params])
    )
    s = int(sample_count)
    out = np.empty((s, n_metric_columns(m)), dtype=np.float64)
    kernels = backend.active()
    seed, stream_id = stream.seed, stream.stream_id

    def fill(lo, hi):
        kernels.batch_metric_samples(mu_alpha, theta_alpha, seed, stream_id, lo, hi, out)

    w = min(workers, s)
    if w == 1:
        fill(0, s)
    else:
        bounds = [i * s // w for i in range(w + 1)]
        with ThreadPoolExecutor(max_workers=w) as pool:
            futures = [pool.submit(fill, bounds[i], bounds[i + 1]) for i in range(w)]
            for f in futures:
                f.result()
    return out


def hdi(samples, mass=0.95):
    """Shortest window holding ceil(mass * n) sorted samples.

    Ties in window width break toward the lowest starting index. Input order
    does not matter (sorted internally).
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 1:
        raise ParameterError("samples must be a 1-D vector")
    n = x.shape[0]
    if n < 100:
        raise ParameterError(f"need at least 100 samples for an HDI, got {n}")
    if not 0.0 < mass < 1.0:
        raise ParameterError(f"mass must be in (0, 1), got {mass}")
    x = np.sort(x)
    n_in = math.ceil(mass * n)
    widths = x[n_in - 1:] - x[: n - n_in + 1]
    i = int(np.argmin(widths))
    return float(x[i]), float(x[i + n_in - 1])


@dataclass(frozen=True)
class PosteriorSummary:
    """Monte Carlo summary of one metric's posterior distribution."""

    metric: MetricId
    mean: float
    std: float
    mc_error: float
    hdi_low: float
    hdi_high: float
    sample_count: int
    excluded: int
    warning: str | None = None


def summarize(samples, metrics=None, mass=0.95, exclusion_warn_fraction=0.01):
    """Per-metric mean, sample std (ddof=1), MC error = std/sqrt(n), and HDI.

    NaN rows are excluded per metric with a counted exclusion; a warning is
    attached when exclusions exceed ``exclusion_warn_fraction`` of the draws.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 2 or (samples.shape[1] - 5) % 4 != 0:
        raise ParameterError("samples must be an (S, 5+4M) matrix")
    m = (samples.shape[1] - 5) // 4
    if m < 1:
        raise ParameterError("samples matrix implies zero classes")
    if metrics is None:
        metrics = metric_ids(m)
    total = samples.shape[0]
    out = []
    for metric in metrics:
        col = metric_column(metric, m)
        values = samples[:, col]
        keep = ~np.isnan(values)
        used = values[keep]
        n_used = int(used.shape[0])
        excluded = total - n_used
        if n_used < 2:
            raise InvariantError(
                f"metric {metric} was undefined in {excluded} of {total} draws"
            )
        mean = float(np.mean(used))
        std = float(np.std(used, ddof=1))
        low, high = hdi(used, mass)
        warning = None
        if excluded > exclusion_warn_fraction * total:
            warning = (
                f"{excluded} of {total} draws excluded (zero denominator); "
                "summary may be biased"
            )
        out.append(
            PosteriorSummary(
                metric=metric,
                mean=mean,
                std=std,
                mc_error=std / math.sqrt(n_used),
                hdi_low=low,
                hdi_high=high,
                sample_count=n_used,
                excluded=excluded,
                warning=warning,
            )
        )
    return out


def estimate(model, metrics=None, sample_count=100000, stream=None, mass=0.95, workers=1):
    """Monte Carlo posterior summaries for the requested metrics.

    Defaults reproduce the reference settings: S = 100000 draws, 95% HDI,
    uniform priors (via fit_posterior). Deterministic for fixed stream
    identity, independent of ``workers``.
    """
    if not isinstance(sample_count, (int, np.integer)) or sample_count < 1000:
        raise ParameterError(f"sample_count must be >= 1000, got {sample_count}")
    samples = draw_metric_samples(model, sample_count, stream, workers)
    return summarize(samples, metrics, mass)


def histogram(values, bins=100):
    """Equal-width histogram (counts, edges) over the sample range.

    A constant sample vector yields a single [v, v] bin holding everything.
    """
    values = np.asarray(values, dtype=np.float64)
    values = values[~np.isnan(values)]
    if values.size == 0:
        raise ParameterError("no finite samples to bin")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return np.array([values.size], dtype=np.int64), np.array([lo, hi])
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    return counts.astype(np.int64), edges
