"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the variate generators and the posterior metric-sampling loop on both
backends with identical streams, checks the outputs are bitwise identical,
and reports throughput and speedup.

Usage: python benchmarks/compare_backends.py [--variates N] [--draws N]
"""

import argparse
import time

import numpy as np

from bayeval import ConfusionMatrix, fit_posterior
from bayeval import _purekernels as pure

try:
    from bayeval import _kernels as compiled
except ImportError:
    compiled = None


def timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def bench_variates(n):
    rows = []
    cases = [
        ("uniform", lambda st, out: st.fill_uniform(out)),
        ("normal", lambda st, out: st.fill_normal(out)),
        ("gamma(0.7)", lambda st, out: st.fill_gamma(0.7, out)),
        ("gamma(5)", lambda st, out: st.fill_gamma(5.0, out)),
        ("gamma(51)", lambda st, out: st.fill_gamma(51.0, out)),
    ]
    for name, fill in cases:
        out_c = np.empty(n)
        out_p = np.empty(n)
        t_c = timed(lambda: fill(compiled.Stream(42, 0), out_c))
        t_p = timed(lambda: fill(pure.Stream(42, 0), out_p))
        assert np.array_equal(out_c, out_p), f"{name}: backends disagree"
        rows.append((f"{name} x{n}", t_p, t_c))
    return rows


def bench_posterior(draws):
    cm = ConfusionMatrix(
        ("Normal", "Pneumonia", "Covid-19"),
        np.array([[38, 7, 5], [8, 32, 10], [2, 0, 48]]),
    )
    model = fit_posterior(cm)
    mu_alpha = model.mu_params.as_array()
    theta_alpha = np.ascontiguousarray(
        np.stack([r.as_array() for r in model.theta_params])
    )
    out_c = np.empty((draws, 17))
    out_p = np.empty((draws, 17))
    t_c = timed(
        lambda: compiled.batch_metric_samples(mu_alpha, theta_alpha, 0, 0, 0, draws, out_c)
    )
    t_p = timed(
        lambda: pure.batch_metric_samples(mu_alpha, theta_alpha, 0, 0, 0, draws, out_p)
    )
    assert np.array_equal(out_c, out_p), "posterior sampling: backends disagree"
    return [(f"posterior draws x{draws}", t_p, t_c)]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--variates", type=int, default=200000,
                        help="variates per generator benchmark (default 200000)")
    parser.add_argument("--draws", type=int, default=20000,
                        help="posterior draws (default 20000)")
    args = parser.parse_args()
    if compiled is None:
        raise SystemExit("compiled backend not built; nothing to compare")

    rows = bench_variates(args.variates) + bench_posterior(args.draws)
    width = max(len(r[0]) for r in rows)
    print(f"{'benchmark'.ljust(width)}  {'pure':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, t_p, t_c in rows:
        print(f"{name.ljust(width)}  {t_p:>9.3f}s  {t_c:>9.3f}s  {t_p / t_c:>7.1f}x")
    print("\nall outputs bitwise identical across backends")


if __name__ == "__main__":
    main()
