"""File formats: confusion matrices, scored predictions, masks, study manifests.

Formats (documented in the README, fixtures shipped under fixtures/):

* Confusion JSON: {"labels": [...], "orientation": "true-rows"|"predicted-rows",
  "counts": [[...], ...]}. The orientation field is mandatory; matrices are
  stored internally as rows = true classes (predicted-rows input is
  transposed on load).
* Confusion CSV: header "true\\predicted,<label>,...", one row per true class
  with the true label leading; row label order must equal the header order.
* Scored predictions CSV: header "true_label,score_0,...,score_{M-1}".
* Masks: CSV of floats (rows of equal length) or binary PGM (P5, maxval 255,
  values scaled by 255).
* Study manifest JSON: {"records": [{"id", "partial_scores" (6 ints),
  "heatmap" (path relative to the manifest), "covid_probability",
  optional "lung_boxes" ([[r0,r1,c0,c1] x2]) and "row_boundaries"
  ([[b1,b2] x2], aligned with lung_boxes)}]}. Without boxes, the lungs
  default to the left and right halves of the heatmap.
"""

import csv
import json
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from .brixia import BrixiaScore, StudyRecord, default_partition, partition_from_boxes
from .confusion import ConfusionMatrix
from .errors import ParameterError, ParseError

_ORIENTATIONS = ("true-rows", "predicted-rows")
_CSV_CORNER = "true\\predicted"


def format_fraction(value, places=3):
    """Half-up rounding to ``places`` decimals, trailing zeros trimmed (one kept).

    None renders as "n/a". This is the human-readable display convention;
    CSV output keeps full precision via :func:`csv_number`.
    """
    if value is None:
        return "n/a"
    quantum = Decimal(1).scaleb(-places)
    d = Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_UP)
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0")
        if s.endswith("."):
            s += "0"
    return s


def csv_number(value):
    """Full-precision (shortest round-trip) rendering; None -> "n/a"."""
    if value is None:
        return "n/a"
    return repr(float(value))


def _read_text(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(str(exc), path=path) from None


def _read_bytes(path):
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(str(exc), path=path) from None


def read_confusion(path):
    """Load a confusion matrix from .json or .csv."""
    suffix = Path(path).suffix.lower()
    if suffix == ".json":
        return _read_confusion_json(path)
    if suffix == ".csv":
        return _read_confusion_csv(path)
    raise ParseError(f"unsupported confusion-matrix format {suffix!r} (use .json or .csv)", path=path)


def _read_confusion_json(path):
    text = _read_text(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object", path=path)
    for key in ("labels", "orientation", "counts"):
        if key not in doc:
            raise ParseError(f"missing required field {key!r}", path=path)
    labels = doc["labels"]
    if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
        raise ParseError("'labels' must be a list of strings", path=path)
    orientation = doc["orientation"]
    if orientation not in _ORIENTATIONS:
        raise ParseError(
            f"'orientation' must be one of {_ORIENTATIONS}, got {orientation!r}", path=path
        )
    counts = doc["counts"]
    if not isinstance(counts, list) or not all(isinstance(r, list) for r in counts):
        raise ParseError("'counts' must be a list of rows", path=path)
    for i, row_values in enumerate(counts):
        for j, v in enumerate(row_values):
            if not isinstance(v, int) or isinstance(v, bool):
                raise ParseError(
                    f"counts[{i}][{j}] must be an integer, got {v!r}", path=path
                )
    grid = np.asarray(counts, dtype=object)
    if grid.ndim != 2:
        raise ParseError("'counts' rows must all have the same length", path=path)
    grid = grid.astype(np.int64)
    if orientation == "predicted-rows":
        grid = grid.T
    try:
        return ConfusionMatrix(labels=tuple(labels), counts=grid)
    except ParameterError as exc:
        raise ParseError(str(exc), path=path) from None


def _read_confusion_csv(path):
    text = _read_text(path)
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise ParseError("empty file", path=path)
    header = rows[0]
    if len(header) < 3:
        raise ParseError("header must list at least two predicted-class labels", path=path, line=1)
    labels = header[1:]
    data = rows[1:]
    if len(data) != len(labels):
        raise ParseError(
            f"expected {len(labels)} data rows (one per class), got {len(data)}",
            path=path,
        )
    grid = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for i, row_values in enumerate(data):
        line = i + 2
        if len(row_values) != len(labels) + 1:
            raise ParseError(
                f"expected {len(labels) + 1} fields, got {len(row_values)}", path=path, line=line
            )
        if row_values[0] != labels[i]:
            raise ParseError(
                f"row label {row_values[0]!r} must match header order ({labels[i]!r}); "
                "a transposed matrix would be silently wrong",
                path=path,
                line=line,
            )
        for j, cell in enumerate(row_values[1:]):
            try:
                grid[i, j] = int(cell)
            except ValueError:
                raise ParseError(f"field {j + 2}: {cell!r} is not an integer", path=path, line=line) from None
    try:
        return ConfusionMatrix(labels=tuple(labels), counts=grid)
    except ParameterError as exc:
        raise ParseError(str(exc), path=path) from None


def write_confusion_json(cm, path):
    doc = {
        "labels": list(cm.labels),
        "orientation": "true-rows",
        "counts": [[int(v) for v in row] for row in cm.counts],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def write_confusion_csv(cm, path):
    lines = [",".join([_CSV_CORNER, *cm.labels])]
    for label, row in zip(cm.labels, cm.counts):
        lines.append(",".join([label, *(str(int(v)) for v in row)]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_scores_csv(path):
    """Scored predictions: (labels int array, scores (n, M) float array)."""
    text = _read_text(path)
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise ParseError("empty file", path=path)
    header = rows[0]
    m = len(header) - 1
    expected = ["true_label"] + [f"score_{k}" for k in range(m)]
    if m < 2 or header != expected:
        raise ParseError(
            "header must be true_label,score_0,...,score_{M-1} with M >= 2; "
            f"got {','.join(header)}",
            path=path,
            line=1,
        )
    if len(rows) < 2:
        raise ParseError("no data rows", path=path)
    labels = np.empty(len(rows) - 1, dtype=np.int64)
    scores = np.empty((len(rows) - 1, m), dtype=np.float64)
    for i, row_values in enumerate(rows[1:]):
        line = i + 2
        if len(row_values) != m + 1:
            raise ParseError(f"expected {m + 1} fields, got {len(row_values)}", path=path, line=line)
        try:
            labels[i] = int(row_values[0])
        except ValueError:
            raise ParseError(f"true_label {row_values[0]!r} is not an integer", path=path, line=line) from None
        for k, cell in enumerate(row_values[1:]):
            try:
                scores[i, k] = float(cell)
            except ValueError:
                raise ParseError(f"score_{k} value {cell!r} is not a number", path=path, line=line) from None
    return labels, scores


def read_mask(path):
    """Load a mask grid from .csv (floats) or .pgm (binary P5, maxval 255)."""
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return _read_mask_csv(path)
    if suffix == ".pgm":
        return _read_mask_pgm(path)
    raise ParseError(f"unsupported mask format {suffix!r} (use .csv or .pgm)", path=path)


def _read_mask_csv(path):
    text = _read_text(path)
    rows = list(csv.reader(text.splitlines()))
    rows = [r for r in rows if r]
    if not rows:
        raise ParseError("empty mask", path=path)
    width = len(rows[0])
    grid = np.empty((len(rows), width), dtype=np.float64)
    for i, row_values in enumerate(rows):
        line = i + 1
        if len(row_values) != width:
            raise ParseError(
                f"row has {len(row_values)} fields, expected {width}", path=path, line=line
            )
        for j, cell in enumerate(row_values):
            try:
                grid[i, j] = float(cell)
            except ValueError:
                raise ParseError(f"field {j + 1}: {cell!r} is not a number", path=path, line=line) from None
    return grid


def _read_mask_pgm(path):
    data = _read_bytes(path)
    whitespace = b" \t\r\n\x0b\x0c"
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < 4 and pos < n:
        ch = data[pos : pos + 1]
        if ch == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if ch in whitespace:
            pos += 1
            continue
        start = pos
        while pos < n and data[pos : pos + 1] not in whitespace and data[pos : pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    if len(tokens) != 4 or tokens[0] != b"P5":
        raise ParseError("not a binary PGM (expected P5 header)", path=path)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ParseError("PGM header fields must be integers", path=path) from None
    if width < 1 or height < 1:
        raise ParseError(f"invalid PGM dimensions {width}x{height}", path=path)
    if maxval != 255:
        raise ParseError(f"only 8-bit PGM (maxval 255) is supported, got {maxval}", path=path)
    if pos >= n or data[pos : pos + 1] not in whitespace:
        raise ParseError("missing whitespace before PGM raster", path=path)
    raster = data[pos + 1 : pos + 1 + width * height]
    if len(raster) != width * height:
        raise ParseError(
            f"raster holds {len(raster)} bytes, expected {width * height}", path=path
        )
    grid = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return grid.astype(np.float64) / 255.0


def read_mask_pairs(path):
    """IoU manifest: CSV with header pred,target; paths resolve relative to it."""
    text = _read_text(path)
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise ParseError("empty manifest", path=path)
    if rows[0] != ["pred", "target"]:
        raise ParseError("header must be exactly 'pred,target'", path=path, line=1)
    base = Path(path).parent
    pairs = []
    for i, row_values in enumerate(rows[1:]):
        line = i + 2
        if len(row_values) != 2:
            raise ParseError(f"expected 2 fields, got {len(row_values)}", path=path, line=line)
        pairs.append((base / row_values[0], base / row_values[1]))
    if not pairs:
        raise ParseError("manifest lists no mask pairs", path=path)
    return pairs


def read_study_manifest(path, abc_side="left"):
    """Load study records (scores + heatmaps + probabilities) for brixia runs."""
    text = _read_text(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("records"), list):
        raise ParseError("top level must be an object with a 'records' list", path=path)
    base = Path(path).parent
    records = []
    for idx, entry in enumerate(doc["records"]):
        where = f"records[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where} must be an object", path=path)
        try:
            identifier = str(entry.get("id", idx))
            partials = entry["partial_scores"]
            heatmap_path = entry["heatmap"]
            probability = entry["covid_probability"]
        except KeyError as exc:
            raise ParseError(f"{where} is missing field {exc.args[0]!r}", path=path) from None
        relevance = read_mask(base / heatmap_path)
        boxes = entry.get("lung_boxes")
        boundaries = entry.get("row_boundaries")
        try:
            score = BrixiaScore(tuple(partials))
            if boxes is None:
                if boundaries is not None:
                    raise ParameterError("row_boundaries requires lung_boxes")
                h, w = relevance.shape
                boxes = ((0, h, 0, w // 2), (0, h, w // 2, w))
                partition = default_partition(boxes, abc_side)
            elif boundaries is None:
                partition = default_partition(boxes, abc_side)
            else:
                partition = partition_from_boxes(boxes, boundaries, abc_side)
            records.append(
                StudyRecord(
                    identifier=identifier,
                    score=score,
                    relevance=relevance,
                    covid_probability=float(probability),
                    partition=partition,
                )
            )
        except (ParameterError, TypeError, ValueError) as exc:
            raise ParseError(f"{where} ({identifier}): {exc}", path=path) from None
    if not records:
        raise ParseError("manifest lists no records", path=path)
    return records
