"""Command-line entry point: reproducible batch evaluations from data files.

Subcommands: report (point metrics), bayes (posterior summaries), auc,
iou, brixia. Human-readable tables go to stdout (3-decimal half-up display);
full-precision CSVs are written under --out. Diagnostics and warnings go to
stderr and never change the exit code.

Exit codes: 0 success, 2 parse/parameter error, 3 internal invariant failure.
"""

import argparse
import csv
import os
import sys
import traceback
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .auc import hand_till_auc, pairwise_separability
from .brixia import ZONE_LABELS, study_report
from .confusion import full_report
from .errors import InvariantError, ParameterError, ParseError
from .fileio import (
    csv_number,
    format_fraction,
    read_confusion,
    read_mask,
    read_mask_pairs,
    read_scores_csv,
    read_study_manifest,
)
from .posterior import (
    draw_metric_samples,
    fit_posterior,
    histogram,
    metric_column,
    metric_ids,
    summarize,
)
from .sampling import RandomStream
from .segmetrics import binarize
from .segmetrics import iou as iou_score

_WORKERS_ENV = "BAYEVAL_WORKERS"


def _default_workers():
    raw = os.environ.get(_WORKERS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"{_WORKERS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ParameterError(f"{_WORKERS_ENV} must be >= 1, got {value}")
    return value


def _resolve_workers(args):
    return args.workers if args.workers is not None else _default_workers()


def _out_dir(args):
    if args.out is None:
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _print_table(headers, rows):
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(row):
        return "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
    print(fmt(headers))
    print(fmt(["-" * w for w in widths]))
    for row in rows:
        print(fmt(row))


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _point_value(report, metric):
    if metric.kind == "accuracy":
        return report.accuracy
    if metric.kind.startswith("macro_"):
        return getattr(report, metric.kind)
    return getattr(report.per_class[metric.class_index], metric.kind)


def _cmd_report(args):
    cm = read_confusion(args.confusion)
    report = full_report(cm)
    ids = metric_ids(cm.n_classes)
    named = [(m.display(cm.labels), _point_value(report, m)) for m in ids]
    _print_table(
        ["Metric", "Score"],
        [[name, format_fraction(value)] for name, value in named],
    )
    out = _out_dir(args)
    if out is not None:
        _write_csv(
            out / "report.csv",
            ["metric", "value"],
            [[name, csv_number(value)] for name, value in named],
        )
    return 0


def _cmd_bayes(args):
    if args.samples < 1000:
        raise ParameterError(f"--samples must be >= 1000, got {args.samples}")
    if not 0.0 < args.mass < 1.0:
        raise ParameterError(f"--mass must be in (0, 1), got {args.mass}")
    workers = _resolve_workers(args)
    cm = read_confusion(args.confusion)
    model = fit_posterior(cm)
    stream = RandomStream(args.seed)
    samples = draw_metric_samples(model, args.samples, stream, workers)
    ids = metric_ids(cm.n_classes)
    summaries = summarize(samples, ids, mass=args.mass)
    for s in summaries:
        if s.warning:
            print(f"warning: {s.metric.display(cm.labels)}: {s.warning}", file=sys.stderr)
    hdi_header = f"{args.mass * 100:g}% HDI"
    _print_table(
        ["Metric", "Mean", "std", "MC error", hdi_header],
        [
            [
                s.metric.display(cm.labels),
                format_fraction(s.mean),
                format_fraction(s.std),
                format_fraction(s.mc_error),
                f"[{format_fraction(s.hdi_low)},{format_fraction(s.hdi_high)}]",
            ]
            for s in summaries
        ],
    )
    out = _out_dir(args)
    if args.histograms and out is None:
        raise ParameterError("--histograms requires --out")
    if out is not None:
        _write_csv(
            out / "summary.csv",
            ["metric", "mean", "std", "mc_error", "hdi_low", "hdi_high", "samples", "excluded"],
            [
                [
                    s.metric.display(cm.labels),
                    csv_number(s.mean),
                    csv_number(s.std),
                    csv_number(s.mc_error),
                    csv_number(s.hdi_low),
                    csv_number(s.hdi_high),
                    str(s.sample_count),
                    str(s.excluded),
                ]
                for s in summaries
            ],
        )
        if args.histograms:
            for metric in ids:
                col = metric_column(metric, cm.n_classes)
                counts, edges = histogram(samples[:, col], bins=100)
                _write_csv(
                    out / f"hist_{metric.slug(cm.labels)}.csv",
                    ["bin_low", "bin_high", "count"],
                    [
                        [csv_number(edges[i]), csv_number(edges[i + 1]), str(int(c))]
                        for i, c in enumerate(counts)
                    ],
                )
    return 0


def _cmd_auc(args):
    labels, scores = read_scores_csv(args.scores)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pairs = pairwise_separability(labels, scores)
        value = hand_till_auc(labels, scores)
    for message in dict.fromkeys(str(w.message) for w in caught):
        print(f"warning: {message}", file=sys.stderr)
    rows = [[f"{i}-{j}", format_fraction(pairs[(i, j)])] for i, j in sorted(pairs)]
    _print_table(["Class pair", "Separability"], rows)
    print(f"Macro AUC: {format_fraction(value)}")
    out = _out_dir(args)
    if out is not None:
        csv_rows = [
            [str(i), str(j), csv_number(pairs[(i, j)])] for i, j in sorted(pairs)
        ]
        csv_rows.append(["macro", "", csv_number(value)])
        _write_csv(out / "auc.csv", ["class_a", "class_b", "auc"], csv_rows)
    return 0


def _cmd_iou(args):
    pairs = read_mask_pairs(args.manifest)
    workers = _resolve_workers(args)

    def score(item):
        pred_path, target_path = item
        pred = read_mask(pred_path)
        target = read_mask(target_path)
        try:
            return iou_score(binarize(pred, args.threshold), target)
        except ParameterError as exc:
            raise ParameterError(f"pair {pred_path.name} vs {target_path.name}: {exc}") from None

    if workers == 1:
        values = [score(item) for item in pairs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(score, pairs))
    mean_value = sum(values) / len(values)
    rows = [
        [pred.name, target.name, format_fraction(v)]
        for (pred, target), v in zip(pairs, values)
    ]
    _print_table(["Prediction", "Target", "IoU"], rows)
    print(f"Mean IoU: {format_fraction(mean_value)}")
    out = _out_dir(args)
    if out is not None:
        csv_rows = [
            [str(pred), str(target), csv_number(v)]
            for (pred, target), v in zip(pairs, values)
        ]
        csv_rows.append(["mean", "", csv_number(mean_value)])
        _write_csv(out / "iou.csv", ["pred", "target", "iou"], csv_rows)
    return 0


def _cmd_brixia(args):
    abc_side = "left" if args.laterality == "abc-left" else "right"
    records = read_study_manifest(args.manifest, abc_side)
    report = study_report(records)
    rows = []
    for rec in report.records:
        rows.append(
            [
                rec.identifier,
                *(f"{v:.6g}" for v in rec.zone_relevance),
                format_fraction(rec.rho),
                "yes" if rec.top_zone_mismatch else "no",
            ]
        )
    _print_table(["Record", *ZONE_LABELS, "rho", "flagged"], rows)
    print(f"Overall-score vs probability rho: {format_fraction(report.overall_rho)}")
    if report.flagged:
        print(
            "flagged (top relevance outside top-scored zones): "
            + ", ".join(report.flagged),
            file=sys.stderr,
        )
    out = _out_dir(args)
    if out is not None:
        csv_rows = [
            [
                rec.identifier,
                *(csv_number(v) for v in rec.zone_relevance),
                csv_number(rec.rho) if rec.rho is not None else "n/a",
                "1" if rec.top_zone_mismatch else "0",
            ]
            for rec in report.records
        ]
        csv_rows.append(
            ["overall", "", "", "", "", "", "",
             csv_number(report.overall_rho) if report.overall_rho is not None else "n/a", ""]
        )
        _write_csv(
            out / "brixia.csv",
            ["record", *ZONE_LABELS, "rho", "top_zone_mismatch"],
            csv_rows,
        )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bayeval",
        description="Classifier evaluation with Bayesian uncertainty.",
    )
    parser.add_argument("--version", action="version", version=f"bayeval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="point metrics from a confusion matrix")
    p.add_argument("confusion", help="confusion matrix file (.json or .csv)")
    p.add_argument("--out", help="directory for report.csv")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("bayes", help="posterior metric summaries (Monte Carlo)")
    p.add_argument("confusion", help="confusion matrix file (.json or .csv)")
    p.add_argument("--seed", type=int, default=0, help="stream seed (default 0)")
    p.add_argument("--samples", type=int, default=100000, help="posterior draws (default 100000)")
    p.add_argument("--mass", type=float, default=0.95, help="HDI probability mass (default 0.95)")
    p.add_argument("--workers", type=int, default=None,
                   help=f"sampling threads (default ${_WORKERS_ENV} or 1); does not change results")
    p.add_argument("--histograms", action="store_true",
                   help="write per-metric 100-bin histogram CSVs (requires --out)")
    p.add_argument("--out", help="directory for summary.csv and histograms")
    p.set_defaults(func=_cmd_bayes)

    p = sub.add_parser("auc", help="multi-class AUC from scored predictions")
    p.add_argument("scores", help="CSV with true_label,score_0,...,score_{M-1}")
    p.add_argument("--out", help="directory for auc.csv")
    p.set_defaults(func=_cmd_auc)

    p = sub.add_parser("iou", help="intersection-over-union for mask pairs")
    p.add_argument("manifest", help="CSV manifest with header pred,target")
    p.add_argument("--threshold", type=float, default=0.5,
                   help="binarization threshold, inclusive upward (default 0.5)")
    p.add_argument("--workers", type=int, default=None,
                   help=f"scoring threads (default ${_WORKERS_ENV} or 1)")
    p.add_argument("--out", help="directory for iou.csv")
    p.set_defaults(func=_cmd_iou)

    p = sub.add_parser("brixia", help="zone relevance vs severity-score report")
    p.add_argument("manifest", help="study manifest (.json)")
    p.add_argument("--laterality", choices=("abc-left", "abc-right"), default="abc-left",
                   help="which image side gets zones A/B/C (default abc-left)")
    p.add_argument("--out", help="directory for brixia.csv")
    p.set_defaults(func=_cmd_brixia)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
