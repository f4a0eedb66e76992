"""Random-walk Metropolis sampler targeting the same metric posterior.

This is a validation route, deliberately independent of the direct conjugate
sampler: it random-walks an unconstrained softmax parameterization of
(mu, theta) and evaluates the same metric functionals along the chain. Each
simplex block keeps its first coordinate pinned at 0 (additive log-ratio), so
the map is bijective and the Dirichlet(a) target becomes
exp(sum_k a_k log mu_k) up to a constant after the Jacobian.

The proposal scale adapts toward a 0.3 acceptance rate during burn-in only
and is frozen afterwards, keeping the recorded chain a valid fixed-kernel
Metropolis chain.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._purekernels import _eval_metrics_flat
from .errors import ParameterError
from .posterior import (
    PosteriorModel,
    fit_posterior,
    metric_column,
    metric_ids,
    n_metric_columns,
)
from .sampling import RandomStream

_ADAPT_BATCH = 200
_TARGET_ACCEPT = 0.3


@dataclass(frozen=True)
class MetropolisResult:
    """Post-burn-in metric samples plus chain diagnostics."""

    metric_samples: dict
    mu_samples: np.ndarray | None
    acceptance_rate: float
    step_scale: float
    warnings: tuple[str, ...]


def _block_logpdf(z, offset, alpha, m):
    """log target contribution of one simplex block (up to a constant)."""
    vmax = 0.0
    for k in range(m - 1):
        v = z[offset + k]
        if v > vmax:
            vmax = v
    total = math.exp(0.0 - vmax)
    for k in range(m - 1):
        total += math.exp(z[offset + k] - vmax)
    lse = vmax + math.log(total)
    logp = alpha[0] * (0.0 - lse)
    for k in range(m - 1):
        logp += alpha[k + 1] * (z[offset + k] - lse)
    return logp


def _log_target(z, blocks, m):
    logp = 0.0
    offset = 0
    for alpha in blocks:
        logp += _block_logpdf(z, offset, alpha, m)
        offset += m - 1
    return logp


def _softmax_block(z, offset, m):
    vmax = 0.0
    for k in range(m - 1):
        v = z[offset + k]
        if v > vmax:
            vmax = v
    exps = [math.exp(0.0 - vmax)]
    for k in range(m - 1):
        exps.append(math.exp(z[offset + k] - vmax))
    total = 0.0
    for e in exps:
        total += e
    return [e / total for e in exps]


def metropolis_reference(
    cm=None,
    prior=None,
    steps=200000,
    stream=None,
    *,
    model=None,
    burn_in=None,
    metrics=None,
    keep_mu=False,
    initial_scale=0.5,
):
    """Run the Metropolis chain and return post-burn-in metric samples.

    Provide either a confusion matrix (optionally with a prior) or a fitted
    ``model``. ``steps`` is the total chain length including burn-in
    (default burn-in: steps // 5). A warning is attached if the post-burn-in
    acceptance rate falls outside [0.1, 0.6].
    """
    if (cm is None) == (model is None):
        raise ParameterError("pass exactly one of cm or model")
    if model is None:
        model = fit_posterior(cm, prior)
    elif not isinstance(model, PosteriorModel):
        raise ParameterError("model must be a PosteriorModel")
    if not isinstance(steps, (int, np.integer)) or steps < 100000:
        raise ParameterError(f"steps must be >= 100000, got {steps}")
    if burn_in is None:
        burn_in = steps // 5
    if not 0 <= burn_in < steps:
        raise ParameterError(f"burn_in must be in [0, steps), got {burn_in}")
    if stream is None:
        stream = RandomStream(0)
    m = model.n_classes
    if metrics is None:
        metrics = metric_ids(m)
    columns = [metric_column(mid, m) for mid in metrics]
    ncols = n_metric_columns(m)

    blocks = [model.mu_params.alpha] + [row.alpha for row in model.theta_params]
    dim = (m + 1) * (m - 1)

    if not initial_scale > 0.0:
        raise ParameterError(f"initial_scale must be > 0, got {initial_scale}")
    z = [0.0] * dim
    logp = _log_target(z, blocks, m)
    scale = float(initial_scale)
    kept = steps - burn_in
    sel = np.empty((kept, len(columns)), dtype=np.float64)
    mu_out = np.empty((kept, m), dtype=np.float64) if keep_mu else None

    row = [0.0] * ncols
    row_stale = True
    accepted_post = 0
    accepted_batch = 0
    next_normal = stream._impl.normal
    next_uniform = stream._impl.uniform
    exp = math.exp
    mu = None

    for step in range(steps):
        z_new = [zd + scale * next_normal() for zd in z]
        u = next_uniform()
        logp_new = _log_target(z_new, blocks, m)
        delta = logp_new - logp
        if delta >= 0.0 or u < exp(delta):
            z = z_new
            logp = logp_new
            row_stale = True
            if step >= burn_in:
                accepted_post += 1
            else:
                accepted_batch += 1
        if step < burn_in:
            if (step + 1) % _ADAPT_BATCH == 0:
                rate = accepted_batch / _ADAPT_BATCH
                scale *= exp(rate - _TARGET_ACCEPT)
                scale = min(max(scale, 1e-3), 10.0)
                accepted_batch = 0
            continue
        if row_stale:
            mu = _softmax_block(z, 0, m)
            theta_flat = []
            for j in range(m):
                theta_flat.extend(_softmax_block(z, (j + 1) * (m - 1), m))
            _eval_metrics_flat(mu, theta_flat, m, row)
            row_stale = False
        k = step - burn_in
        for c, col in enumerate(columns):
            sel[k, c] = row[col]
        if keep_mu:
            for j in range(m):
                mu_out[k, j] = mu[j]

    acceptance = accepted_post / kept if kept else 0.0
    warnings = ()
    if not 0.1 <= acceptance <= 0.6:
        warnings = (
            f"post-burn-in acceptance rate {acceptance:.3f} outside [0.1, 0.6]; "
            "treat the chain with suspicion",
        )
    samples = {mid: np.ascontiguousarray(sel[:, c]) for c, mid in enumerate(metrics)}
    return MetropolisResult(
        metric_samples=samples,
        mu_samples=mu_out,
        acceptance_rate=acceptance,
        step_scale=scale,
        warnings=warnings,
    )
