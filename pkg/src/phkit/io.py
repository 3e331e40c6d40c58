"""Text formats for diagrams, feature matrices, Gram matrices, labels and codebooks.

Diagram CSV::

    # max_dim=2 max_scale=1.73205081
    dim,birth,death
    0,0,inf
    1,1,1.73205081

Numbers are written with 9 significant digits; ``inf`` marks an infinite
death. The comment line is optional on input.
"""

from __future__ import annotations

import csv
import json
import math
import re
from pathlib import Path

import numpy as np

from .geometry import ParseError
from .persistence import PersistenceDiagramSet
from .vectorize._base import FeatureMatrix
from .vectorize.codebook import Codebook, GmmModel

__all__ = [
    "format_diagram_csv",
    "write_diagram_csv",
    "read_diagram_csv",
    "write_feature_csv",
    "read_feature_csv",
    "write_gram_csv",
    "read_gram_csv",
    "write_labels_csv",
    "read_labels_csv",
    "save_codebook",
    "load_codebook",
]

_META = re.compile(r"(\w+)=(\S+)")


def _fmt(x, digits=9) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}g}"


def format_diagram_csv(d: PersistenceDiagramSet) -> str:
    lines = [f"# max_dim={d.max_dim} max_scale={_fmt(d.max_scale)}", "dim,birth,death"]
    for k, bars in enumerate(d):
        for a, b in bars.tolist():
            lines.append(f"{k},{_fmt(a)},{_fmt(b)}")
    return "\n".join(lines) + "\n"


def write_diagram_csv(d: PersistenceDiagramSet, path) -> None:
    Path(path).write_text(format_diagram_csv(d))


def read_diagram_csv(path) -> PersistenceDiagramSet:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read diagram file ({exc.strerror})", path=path) from None
    meta = {}
    rows = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta.update(dict(_META.findall(line)))
            continue
        if not header_seen:
            if [c.strip() for c in line.split(",")] != ["dim", "birth", "death"]:
                raise ParseError("expected header 'dim,birth,death'", line=lineno, path=path)
            header_seen = True
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ParseError(f"expected 3 fields, got {len(parts)}", line=lineno, path=path)
        try:
            k, a, b = int(parts[0]), float(parts[1]), float(parts[2])
        except ValueError:
            raise ParseError("unparseable diagram row", line=lineno, path=path) from None
        if k < 0 or math.isnan(a) or math.isnan(b) or b < a:
            raise ParseError("invalid bar (negative dim, NaN, or death < birth)", line=lineno, path=path)
        rows.append((k, a, b))
    if not header_seen:
        raise ParseError("missing header 'dim,birth,death'", path=path)
    top = max([r[0] for r in rows], default=0)
    top = max(top, int(meta.get("max_dim", top)))
    diags = [[(a, b) for k, a, b in rows if k == dim] for dim in range(top + 1)]
    max_scale = float(meta["max_scale"]) if "max_scale" in meta else max(
        [b for _, _, b in rows if math.isfinite(b)] + [a for _, a, _ in rows] + [0.0]
    )
    return PersistenceDiagramSet(diags, max_scale=max_scale)


def write_feature_csv(fm: FeatureMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", *fm.columns])
        for rid, row in zip(fm.ids, fm.values.tolist()):
            w.writerow([rid, *(repr(float(v)) for v in row)])


def _read_table(path):
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", path=path) from None
    if not rows:
        raise ParseError("empty file", path=path)
    return path, rows


def read_feature_csv(path) -> FeatureMatrix:
    path, rows = _read_table(path)
    header = rows[0]
    ids, vals = [], []
    for lineno, r in enumerate(rows[1:], 2):
        if len(r) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(r)}", line=lineno, path=path)
        ids.append(r[0])
        try:
            vals.append([float(v) for v in r[1:]])
        except ValueError:
            raise ParseError("non-numeric feature value", line=lineno, path=path) from None
    values = np.array(vals, dtype=float).reshape(len(ids), len(header) - 1)
    return FeatureMatrix(values, header[1:], ids)


def write_gram_csv(values, ids, path) -> None:
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", *ids])
        for rid, row in zip(ids, values.tolist()):
            w.writerow([rid, *(repr(float(v)) for v in row)])


def read_gram_csv(path):
    """Return ``(values, ids)``; checks the id header row matches the id column."""
    path, rows = _read_table(path)
    ids = rows[0][1:]
    body = rows[1:]
    if len(body) != len(ids):
        raise ParseError(f"Gram matrix has {len(body)} rows for {len(ids)} columns", path=path)
    vals = []
    for lineno, r in enumerate(body, 2):
        if len(r) != len(ids) + 1:
            raise ParseError("ragged Gram row", line=lineno, path=path)
        if r[0] != ids[lineno - 2]:
            raise ParseError(f"row id {r[0]!r} does not match column id {ids[lineno - 2]!r}", line=lineno, path=path)
        try:
            vals.append([float(v) for v in r[1:]])
        except ValueError:
            raise ParseError("non-numeric Gram entry", line=lineno, path=path) from None
    return np.array(vals, dtype=float).reshape(len(ids), len(ids)), ids


def write_labels_csv(ids, labels, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "label"])
        w.writerows(zip(ids, labels))


def read_labels_csv(path):
    """Return ``(ids, labels)`` as string lists."""
    path, rows = _read_table(path)
    if [c.strip() for c in rows[0]] != ["id", "label"]:
        raise ParseError("expected header 'id,label'", path=path)
    ids, labels = [], []
    for lineno, r in enumerate(rows[1:], 2):
        if len(r) != 2:
            raise ParseError("expected 2 fields", line=lineno, path=path)
        ids.append(r[0])
        labels.append(r[1])
    return ids, labels


def save_codebook(model, path) -> None:
    """Write a :class:`Codebook` or :class:`GmmModel` as JSON."""
    if isinstance(model, Codebook):
        data = {
            "type": "codebook",
            "centers": model.centers.tolist(),
            "weighted": model.weighted,
            "t1": model.t1,
            "t2": model.t2,
            "homology_dim": model.homology_dim,
        }
    elif isinstance(model, GmmModel):
        data = {
            "type": "gmm",
            "weights": model.weights.tolist(),
            "means": model.means.tolist(),
            "variances": model.variances.tolist(),
            "homology_dim": model.homology_dim,
        }
    else:
        raise TypeError(f"cannot serialise {type(model).__name__}")
    Path(path).write_text(json.dumps(data, indent=1))


def load_codebook(path):
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ParseError(f"cannot read codebook ({exc.strerror})", path=path) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", line=exc.lineno, path=path) from None
    kind = data.get("type")
    if kind == "codebook":
        return Codebook(np.array(data["centers"]), data["weighted"], data["t1"], data["t2"], data["homology_dim"])
    if kind == "gmm":
        return GmmModel(data["weights"], data["means"], data["variances"], homology_dim=data["homology_dim"])
    raise ParseError(f"unknown model type {kind!r}", path=path)
