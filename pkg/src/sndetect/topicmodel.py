"""TF-IDF vectorization and L2-regularized multinomial logistic regression.

Training is deterministic: full-batch gradient descent with Armijo
backtracking from an all-zero start, stopping when the max-norm of the
gradient drops below ``tol`` or ``max_iter`` is hit. Refitting identical
inputs reproduces the model bitwise.
"""

import dataclasses
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels, textprep
from .errors import DegenerateLabels, EmptyCorpus
from .textprep import StopwordTable, TokenStream

_ARMIJO_C1 = 1e-4
_MIN_STEP = 1e-20


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, weight) pairs; zero weights are never stored."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.indices.shape != self.values.shape or self.indices.ndim != 1:
            raise ValueError("indices and values must be parallel 1-d arrays")
        if self.indices.size and np.any(np.diff(self.indices) <= 0):
            raise ValueError("indices must be strictly increasing")
        if np.any(self.values == 0.0):
            raise ValueError("zero weights must not be stored")

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def pairs(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.indices, self.values)]


EMPTY_VECTOR = SparseVector(np.empty(0, dtype=np.int64), np.empty(0))


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    document_frequency: np.ndarray
    n_docs: int
    idf: np.ndarray

    @property
    def n_features(self) -> int:
        return len(self.vocabulary)


@dataclass(frozen=True)
class LogRegHyperparams:
    penalty: str = "l2"
    c: float = 1.0
    tol: float = 1e-4
    intercept_scaling: float = 1.0
    max_iter: int = 1000

    def __post_init__(self):
        if self.penalty != "l2":
            raise ValueError("only the l2 penalty is supported")
        if self.c <= 0:
            raise ValueError("c must be positive")


@dataclass(frozen=True)
class LogRegModel:
    classes: tuple[str, ...]
    weights: np.ndarray
    intercepts: np.ndarray
    hyperparams: LogRegHyperparams
    converged: bool
    n_iter: int


@dataclass(frozen=True)
class TopicLabel:
    label: str
    low_confidence: bool = False

    def project(self, target_class: str) -> int:
        """Binary view: 1 when this label equals the target class, else 0."""
        return 1 if self.label == target_class else 0


@dataclass(frozen=True)
class TopicClassifier:
    """A fitted TF-IDF model and logistic-regression pair."""

    tfidf: TfIdfModel
    logreg: LogRegModel


def fit_tfidf(corpus: Sequence[TokenStream]) -> TfIdfModel:
    """Vocabulary over all distinct tokens; idf = ln((1+N)/(1+df)) + 1."""
    if not corpus:
        raise EmptyCorpus("cannot fit TF-IDF on an empty corpus")
    df_counter: Counter[str] = Counter()
    for stream in corpus:
        df_counter.update(set(stream.normalized_tokens()))
    vocabulary = {token: i for i, token in enumerate(sorted(df_counter))}
    n_docs = len(corpus)
    df = np.zeros(len(vocabulary), dtype=np.int64)
    for token, i in vocabulary.items():
        df[i] = df_counter[token]
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    return TfIdfModel(vocabulary=vocabulary, document_frequency=df, n_docs=n_docs, idf=idf)


def transform(model: TfIdfModel, stream: TokenStream) -> SparseVector:
    """Raw count times idf, L2-normalized; all-OOV input gives the zero vector."""
    counts = Counter(stream.normalized_tokens())
    items = sorted(
        (model.vocabulary[token], n) for token, n in counts.items() if token in model.vocabulary
    )
    if not items:
        return EMPTY_VECTOR
    indices = np.array([i for i, _ in items], dtype=np.int64)
    values = np.array([n for _, n in items], dtype=np.float64) * model.idf[indices]
    norm = math.sqrt(float(np.dot(values, values)))
    if norm == 0.0:
        return EMPTY_VECTOR
    return SparseVector(indices, values / norm)


def _as_label(value) -> str:
    return value.label if isinstance(value, TopicLabel) else str(value)


def _to_csr(X: Sequence[SparseVector], n_features: int):
    indptr = np.zeros(len(X) + 1, dtype=np.int64)
    for i, vec in enumerate(X):
        if vec.nnz and int(vec.indices[-1]) >= n_features:
            raise ValueError("vector index exceeds feature count")
        indptr[i + 1] = indptr[i] + vec.nnz
    indices = np.empty(int(indptr[-1]), dtype=np.int64)
    data = np.empty(int(indptr[-1]), dtype=np.float64)
    for i, vec in enumerate(X):
        indices[indptr[i] : indptr[i + 1]] = vec.indices
        data[indptr[i] : indptr[i + 1]] = vec.values
    return indptr, indices, data


def objective_and_grad(
    X: Sequence[SparseVector],
    y: Sequence,
    classes: tuple[str, ...],
    weights: np.ndarray,
    intercepts: np.ndarray,
    c: float,
    n_features: int | None = None,
):
    """Summed cross-entropy plus (1/2C)*||W||^2 and its gradient.

    Exposed for the finite-difference check; the fit loop uses it too.
    """
    n_features = weights.shape[1] if n_features is None else n_features
    indptr, indices, data = _to_csr(X, n_features)
    class_index = {label: k for k, label in enumerate(classes)}
    y_idx = np.array([class_index[_as_label(label)] for label in y], dtype=np.int64)
    return _kernels.logreg_obj_grad(
        indptr, indices, data, y_idx, np.ascontiguousarray(weights), intercepts, 1.0 / c
    )


def fit_logreg(
    X: Sequence[SparseVector],
    y: Sequence,
    hyperparams: LogRegHyperparams | None = None,
    n_features: int | None = None,
) -> LogRegModel:
    """Deterministic full-batch convex fit from all-zero initialization."""
    hp = hyperparams or LogRegHyperparams()
    labels = [_as_label(label) for label in y]
    if len(X) != len(labels):
        raise ValueError("X and y must be the same length")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise DegenerateLabels(f"need at least 2 distinct labels, got {len(classes)}")
    if n_features is None:
        n_features = max((int(v.indices[-1]) for v in X if v.nnz), default=-1) + 1
    indptr, indices, data = _to_csr(X, n_features)
    class_index = {label: k for k, label in enumerate(classes)}
    y_idx = np.array([class_index[label] for label in labels], dtype=np.int64)
    inv_c = 1.0 / hp.c

    weights = np.zeros((len(classes), n_features))
    intercepts = np.zeros(len(classes))
    obj, grad_w, grad_b = _kernels.logreg_obj_grad(
        indptr, indices, data, y_idx, weights, intercepts, inv_c
    )

    converged = False
    n_iter = 0
    step = 1.0
    for _ in range(hp.max_iter):
        grad_max = max(
            float(np.max(np.abs(grad_w))) if grad_w.size else 0.0,
            float(np.max(np.abs(grad_b))),
        )
        if grad_max < hp.tol:
            converged = True
            break
        n_iter += 1
        grad_sq = float(np.sum(grad_w * grad_w)) + float(np.sum(grad_b * grad_b))
        step = step * 2.0
        while True:
            new_w = weights - step * grad_w
            new_b = intercepts - step * grad_b
            new_obj, new_gw, new_gb = _kernels.logreg_obj_grad(
                indptr, indices, data, y_idx, new_w, new_b, inv_c
            )
            if new_obj <= obj - _ARMIJO_C1 * step * grad_sq:
                break
            step *= 0.5
            if step < _MIN_STEP:
                break
        if step < _MIN_STEP:
            break
        weights, intercepts = new_w, new_b
        obj, grad_w, grad_b = new_obj, new_gw, new_gb
    else:
        grad_max = max(
            float(np.max(np.abs(grad_w))) if grad_w.size else 0.0,
            float(np.max(np.abs(grad_b))),
        )
        converged = grad_max < hp.tol

    return LogRegModel(
        classes=classes,
        weights=weights,
        intercepts=intercepts,
        hyperparams=hp,
        converged=converged,
        n_iter=n_iter,
    )


def decision_values(model: LogRegModel, x: SparseVector) -> np.ndarray:
    if x.nnz == 0:
        return model.intercepts.copy()
    return model.intercepts + model.weights[:, x.indices] @ x.values


def predict_proba(model: LogRegModel, x: SparseVector) -> np.ndarray:
    """Softmax probabilities over model.classes; sums to 1 within 1e-9."""
    scores = decision_values(model, x)
    scores -= scores.max()
    expd = np.exp(scores)
    return expd / expd.sum()


def predict(model: LogRegModel, x: SparseVector) -> TopicLabel:
    """Argmax class; ties resolve to the earliest class in model.classes."""
    scores = decision_values(model, x)
    return TopicLabel(label=model.classes[int(np.argmax(scores))])


def analyze_topic(
    texts: Sequence[str],
    language: str,
    classifier: TopicClassifier,
    table: StopwordTable | None = None,
) -> TopicLabel:
    """Classify the concatenation of texts.

    Serves both full documents and semantic fields (neighbor words joined
    by spaces). A result from an all-OOV or empty input is flagged
    low-confidence because it rests on the intercepts alone.
    """
    joined = " ".join(texts)
    stream = textprep.prepare(joined, language, table=table)
    vec = transform(classifier.tfidf, stream)
    label = predict(classifier.logreg, vec)
    if vec.nnz == 0:
        return dataclasses.replace(label, low_confidence=True)
    return label


def train_topic_model(
    streams: Sequence[TokenStream],
    labels: Sequence[str],
    hyperparams: LogRegHyperparams | None = None,
) -> TopicClassifier:
    """Fit the TF-IDF model and the classifier on prepared token streams."""
    tfidf = fit_tfidf(streams)
    X = [transform(tfidf, stream) for stream in streams]
    logreg = fit_logreg(X, labels, hyperparams, n_features=tfidf.n_features)
    return TopicClassifier(tfidf=tfidf, logreg=logreg)
