"""Per-class accuracy and Type-I / Type-II error report."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["EvalReport", "evaluate"]


@dataclass
class EvalReport:
    """Classification summary for a task with one mixed class.

    Type-I errors involve the mixed class on either side (true or
    predicted); Type-II errors are confusions between the pure classes.
    """

    classes: list
    class_names: list
    per_class_accuracy: np.ndarray
    type1: int
    type2: int
    n: int
    confusion: np.ndarray

    @property
    def overall(self) -> float:
        return float(np.trace(self.confusion)) / self.n

    @property
    def type1_rate(self) -> float:
        return self.type1 / self.n

    @property
    def type2_rate(self) -> float:
        return self.type2 / self.n

    def rows(self) -> list:
        """(label, value) rows: one accuracy per class, Type-I, Type-II, overall."""
        out = [(name, f"{100 * acc:.1f}%") for name, acc in zip(self.class_names, self.per_class_accuracy)]
        out.append(("Type-I Error", f"{self.type1}/{self.n}"))
        out.append(("Type-II Error", f"{self.type2}/{self.n}"))
        out.append(("Overall", f"{100 * self.overall:.1f}%"))
        return out

    def table(self) -> str:
        rows = self.rows()
        w = max(len(r[0]) for r in rows)
        return "\n".join(f"{label:<{w}}  {value:>8}" for label, value in rows)

    def to_dict(self) -> dict:
        return {
            "classes": [str(c) for c in self.classes],
            "per_class_accuracy": self.per_class_accuracy.tolist(),
            "type1": self.type1,
            "type2": self.type2,
            "n": self.n,
            "overall": self.overall,
            "confusion": self.confusion.tolist(),
        }


def evaluate(pred, truth, mixed_class, classes=None, class_names=None) -> EvalReport:
    """Build an :class:`EvalReport`.

    ``classes`` fixes the row/column order of the confusion matrix (default:
    sorted labels of ``truth``); every predicted label must be among them.
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError("pred and truth must be 1-D and of equal length")
    if not len(truth):
        raise ValueError("nothing to evaluate")
    classes = list(np.unique(truth)) if classes is None else list(classes)
    index = {c: i for i, c in enumerate(classes)}
    unknown = set(pred.tolist()) - set(index) | set(truth.tolist()) - set(index)
    if unknown:
        raise ValueError(f"labels {sorted(map(str, unknown))} are not among the classes")
    if mixed_class not in index:
        raise ValueError(f"mixed class {mixed_class!r} is not among the classes")
    k = len(classes)
    conf = np.zeros((k, k), dtype=int)
    for t, p in zip(truth.tolist(), pred.tolist()):
        conf[index[t], index[p]] += 1
    wrong = pred != truth
    involves_mixed = (pred == mixed_class) | (truth == mixed_class)
    type1 = int(np.count_nonzero(wrong & involves_mixed))
    type2 = int(np.count_nonzero(wrong & ~involves_mixed))
    support = conf.sum(axis=1)
    acc = np.divide(np.diag(conf), support, out=np.zeros(k), where=support > 0)
    names = [str(c) for c in classes] if class_names is None else list(class_names)
    if len(names) != k:
        raise ValueError("need one name per class")
    return EvalReport(classes, names, acc, type1, type2, len(truth), conf)
