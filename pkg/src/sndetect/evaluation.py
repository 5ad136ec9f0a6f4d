"""Classification metrics and the model-comparison harness.

Conventions: precision/recall/f1 are 0 when their denominator is 0; micro
averages equal accuracy for single-label data; weighted averages use
per-class support. Splits are seedless and deterministic: documents keep
their input order (their id order) and are dealt round-robin per class.
"""

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EmptyMatrix, TooFewSamples, UnknownLabel


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple
    counts: np.ndarray  # rows = true class, columns = predicted

    def __post_init__(self):
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))
        k = len(self.classes)
        if self.counts.shape != (k, k):
            raise ValueError("counts must be a KxK matrix")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def support(self) -> np.ndarray:
        return self.counts.sum(axis=1)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: float


@dataclass(frozen=True)
class ClassificationReport:
    classes: tuple
    per_class: tuple[ClassMetrics, ...]
    micro_avg: ClassMetrics
    macro_avg: ClassMetrics
    weighted_avg: ClassMetrics

    @property
    def accuracy(self) -> float:
        return self.micro_avg.recall


def confusion(y_true: Sequence, y_pred: Sequence, classes: Sequence) -> ConfusionMatrix:
    if len(y_true) != len(y_pred):
        raise ValueError("label sequences differ in length")
    classes = tuple(classes)
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        if t not in index:
            raise UnknownLabel(f"true label {t!r} not in classes")
        if p not in index:
            raise UnknownLabel(f"predicted label {p!r} not in classes")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(classes=classes, counts=counts)


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def report(cm: ConfusionMatrix) -> ClassificationReport:
    """Per-class precision/recall/f1/support plus micro, macro, and
    support-weighted averages."""
    total = cm.total
    if total == 0:
        raise EmptyMatrix("confusion matrix has zero total")
    k = len(cm.classes)
    row_sums = cm.counts.sum(axis=1)
    col_sums = cm.counts.sum(axis=0)
    per_class = []
    for i in range(k):
        tp = float(cm.counts[i, i])
        precision = _safe_div(tp, float(col_sums[i]))
        recall = _safe_div(tp, float(row_sums[i]))
        f1 = _safe_div(2.0 * precision * recall, precision + recall)
        per_class.append(
            ClassMetrics(precision=precision, recall=recall, f1=f1, support=float(row_sums[i]))
        )
    accuracy = float(np.trace(cm.counts)) / total
    micro = ClassMetrics(precision=accuracy, recall=accuracy, f1=accuracy, support=float(total))
    macro = ClassMetrics(
        precision=sum(m.precision for m in per_class) / k,
        recall=sum(m.recall for m in per_class) / k,
        f1=sum(m.f1 for m in per_class) / k,
        support=float(total),
    )
    weights = [float(s) / total for s in row_sums]
    weighted = ClassMetrics(
        precision=sum(w * m.precision for w, m in zip(weights, per_class)),
        recall=sum(w * m.recall for w, m in zip(weights, per_class)),
        f1=sum(w * m.f1 for w, m in zip(weights, per_class)),
        support=float(total),
    )
    return ClassificationReport(
        classes=cm.classes,
        per_class=tuple(per_class),
        micro_avg=micro,
        macro_avg=macro,
        weighted_avg=weighted,
    )


def render_report(rep: ClassificationReport) -> str:
    """Fixed-width text table with 5-decimal cells."""
    rows = [(str(c), m) for c, m in zip(rep.classes, rep.per_class)]
    rows.append(("micro avg", rep.micro_avg))
    rows.append(("macro avg", rep.macro_avg))
    rows.append(("weighted avg", rep.weighted_avg))
    label_width = max(len(name) for name, _ in rows)
    header = f"{'':<{label_width}}  {'f1-score':>9}  {'precision':>9}  {'recall':>9}  {'support':>9}"
    lines = [header]
    for name, m in rows:
        lines.append(
            f"{name:<{label_width}}  {m.f1:>9.5f}  {m.precision:>9.5f}  {m.recall:>9.5f}  {m.support:>9.1f}"
        )
    return "\n".join(lines)


def report_to_dict(rep: ClassificationReport) -> dict:
    """JSON-ready view of a classification report."""

    def metrics(m: ClassMetrics) -> dict:
        return {"precision": m.precision, "recall": m.recall, "f1": m.f1, "support": m.support}

    return {
        "classes": {str(c): metrics(m) for c, m in zip(rep.classes, rep.per_class)},
        "micro_avg": metrics(rep.micro_avg),
        "macro_avg": metrics(rep.macro_avg),
        "weighted_avg": metrics(rep.weighted_avg),
        "accuracy": rep.accuracy,
    }


def render_confusion(cm: ConfusionMatrix) -> str:
    corner = "true\\pred"
    names = [str(c) for c in cm.classes]
    width = max(
        [len(corner)] + [len(n) for n in names] + [len(str(int(cm.counts.max() if cm.total else 0)))]
    )
    header = "  ".join([f"{corner:<{width}}"] + [f"{n:>{width}}" for n in names])
    lines = [header]
    for i, name in enumerate(names):
        cells = "  ".join(f"{int(v):>{width}}" for v in cm.counts[i])
        lines.append(f"{name:<{width}}  {cells}")
    return "\n".join(lines)


Trainer = Callable[[list, list], Callable]


def _stratified_folds(y: Sequence, k: int) -> list[list[int]]:
    folds: list[list[int]] = [[] for _ in range(k)]
    seen: dict = {}
    for i, label in enumerate(y):
        position = seen.get(label, 0)
        folds[position % k].append(i)
        seen[label] = position + 1
    return folds


@dataclass(frozen=True)
class CrossValResult:
    fold_scores: tuple[float, ...]
    mean: float


def cross_validate(X: Sequence, y: Sequence, k: int, trainer: Trainer) -> CrossValResult:
    """Deterministic stratified k-fold accuracy.

    `trainer(X_train, y_train)` must return a callable mapping one feature
    vector to a predicted label.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(X) != len(y):
        raise ValueError("X and y differ in length")
    if len(X) < k:
        raise TooFewSamples(f"{len(X)} samples cannot fill {k} folds")
    folds = _stratified_folds(y, k)
    scores = []
    for f in range(k):
        test_idx = folds[f]
        if not test_idx:
            raise TooFewSamples(f"fold {f} received no test documents")
        train_idx = [i for g in range(k) if g != f for i in folds[g]]
        train_idx.sort()
        predict_fn = trainer([X[i] for i in train_idx], [y[i] for i in train_idx])
        hits = sum(1 for i in test_idx if predict_fn(X[i]) == y[i])
        scores.append(hits / len(test_idx))
    return CrossValResult(fold_scores=tuple(scores), mean=sum(scores) / k)


def train_test_split_eval(
    X: Sequence, y: Sequence, test_fraction: float, trainer: Trainer
) -> tuple[float, float]:
    """Deterministic per-class split; returns (train accuracy, test accuracy)."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must lie in (0, 1)")
    if len(X) != len(y):
        raise ValueError("X and y differ in length")
    by_class: dict = {}
    for i, label in enumerate(y):
        by_class.setdefault(label, []).append(i)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label, idxs in by_class.items():
        n_train = math.floor(len(idxs) * (1.0 - test_fraction))
        if n_train == 0:
            raise TooFewSamples(f"class {label!r} would have an empty train side")
        train_idx.extend(idxs[:n_train])
        test_idx.extend(idxs[n_train:])
    if not test_idx:
        raise TooFewSamples("empty test side")
    train_idx.sort()
    test_idx.sort()
    predict_fn = trainer([X[i] for i in train_idx], [y[i] for i in train_idx])
    train_acc = sum(1 for i in train_idx if predict_fn(X[i]) == y[i]) / len(train_idx)
    test_acc = sum(1 for i in test_idx if predict_fn(X[i]) == y[i]) / len(test_idx)
    return train_acc, test_acc


def per_pos_report(records: Sequence[tuple[str, object, object]]) -> dict[str, ClassificationReport]:
    """One report per POS tag present, plus a 'combined' entry.

    Records are (tag, true_label, predicted_label) triples; the class
    inventory is shared across partitions so the tables line up.
    """
    if not records:
        return {}
    classes = tuple(sorted({r[1] for r in records} | {r[2] for r in records}, key=str))
    out: dict[str, ClassificationReport] = {}
    tags = sorted({r[0] for r in records})
    for tag in tags:
        part = [r for r in records if r[0] == tag]
        cm = confusion([r[1] for r in part], [r[2] for r in part], classes)
        out[tag] = report(cm)
    cm_all = confusion([r[1] for r in records], [r[2] for r in records], classes)
    out["combined"] = report(cm_all)
    return out
