"""File formats: labeled corpora, term-concordance CSV, model bundles.

Model bundles are a single JSON document with a content checksum, so a
corrupted file is rejected rather than half-loaded. Vector-file reading
and dumping live in the embeddings module and are re-exported here.
"""

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .embeddings import dump_vectors, read_vector_file  # noqa: F401  (re-export)
from .errors import CsvFormatError, EmptyCorpus, SchemaError, VersionMismatch
from .textprep import RawDocument
from .topicmodel import (
    LogRegHyperparams,
    LogRegModel,
    TfIdfModel,
    TopicClassifier,
)

BUNDLE_VERSION = "sndetect-bundle/1"


@dataclass(frozen=True)
class LabeledCorpus:
    documents: tuple[tuple[str, RawDocument], ...]

    def __post_init__(self):
        ids = [doc.id for _, doc in self.documents]
        if len(ids) != len(set(ids)):
            raise ValueError("document ids must be unique")

    def labels(self) -> tuple[str, ...]:
        return tuple(sorted({label for label, _ in self.documents}))

    def __len__(self) -> int:
        return len(self.documents)


@dataclass(frozen=True)
class ModelBundle:
    version: str
    language: str
    classifier: TopicClassifier
    metadata: dict


def _read_text_file(path, error_cls):
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            return fh.read()
    except UnicodeDecodeError as exc:
        raise error_cls(f"{path} is not valid UTF-8: {exc}") from None


def read_labeled_csv(path) -> LabeledCorpus:
    """CSV with header 'label,text' (RFC-4180, UTF-8)."""
    reader = csv.reader(io.StringIO(_read_text_file(path, CsvFormatError), newline=""))
    documents = []
    try:
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("missing header row", row=0) from None
        if [h.strip().lower() for h in header] != ["label", "text"]:
            raise CsvFormatError(f"expected header 'label,text', got {header!r}", row=0)
        for n, row in enumerate(reader, start=1):
            if len(row) != 2:
                raise CsvFormatError(f"expected 2 fields, got {len(row)}", row=n)
            label, text = row
            if not label.strip():
                raise CsvFormatError("empty label", row=n)
            try:
                doc = RawDocument(id=f"row-{n}", text=text)
            except ValueError as exc:
                raise CsvFormatError(str(exc), row=n) from None
            documents.append((label, doc))
    except csv.Error as exc:
        raise CsvFormatError(f"malformed CSV: {exc}") from None
    if not documents:
        raise EmptyCorpus(f"no documents in {path}")
    return LabeledCorpus(documents=tuple(documents))


def read_labeled_dir(path) -> LabeledCorpus:
    """Directory tree <label>/<doc>.txt; one document per file."""
    root = Path(path)
    documents = []
    for label_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        for doc_path in sorted(label_dir.glob("*.txt")):
            text = doc_path.read_text(encoding="utf-8")
            try:
                doc = RawDocument(id=f"{label_dir.name}/{doc_path.name}", text=text)
            except ValueError as exc:
                raise CsvFormatError(f"{doc_path}: {exc}") from None
            documents.append((label_dir.name, doc))
    if not documents:
        raise EmptyCorpus(f"no documents under {path}")
    return LabeledCorpus(documents=tuple(documents))


def read_corpus(path) -> LabeledCorpus:
    p = Path(path)
    return read_labeled_dir(p) if p.is_dir() else read_labeled_csv(p)


def read_term_csv(path) -> list[tuple[str, str]]:
    """CSV with header 'term,concordance'; empty data section is allowed."""
    reader = csv.reader(io.StringIO(_read_text_file(path, CsvFormatError), newline=""))
    rows = []
    try:
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError("missing header row", row=0) from None
        if [h.strip().lower() for h in header] != ["term", "concordance"]:
            raise CsvFormatError(f"expected header 'term,concordance', got {header!r}", row=0)
        for n, row in enumerate(reader, start=1):
            if len(row) != 2:
                raise CsvFormatError(f"expected 2 fields, got {len(row)}", row=n)
            rows.append((row[0], row[1]))
    except csv.Error as exc:
        raise CsvFormatError(f"malformed CSV: {exc}") from None
    return rows


def _canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _checksum(payload: dict) -> str:
    return hashlib.sha256(_canonical_json(payload).encode("utf-8")).hexdigest()


def make_bundle(classifier: TopicClassifier, language: str, metadata: dict | None = None) -> ModelBundle:
    meta = dict(metadata or {})
    meta.setdefault("created_at", datetime.now(timezone.utc).isoformat())
    return ModelBundle(
        version=BUNDLE_VERSION, language=language, classifier=classifier, metadata=meta
    )


def _bundle_payload(bundle: ModelBundle) -> dict:
    tfidf = bundle.classifier.tfidf
    logreg = bundle.classifier.logreg
    vocab_in_order = [None] * len(tfidf.vocabulary)
    for token, i in tfidf.vocabulary.items():
        vocab_in_order[i] = token
    hp = logreg.hyperparams
    return {
        "version": bundle.version,
        "language": bundle.language,
        "tfidf": {
            "vocabulary": vocab_in_order,
            "document_frequency": [int(x) for x in tfidf.document_frequency],
            "n_docs": tfidf.n_docs,
            "idf": [float(x) for x in tfidf.idf],
        },
        "logreg": {
            "classes": list(logreg.classes),
            "weights": [[float(x) for x in row] for row in logreg.weights],
            "intercepts": [float(x) for x in logreg.intercepts],
            "hyperparams": {
                "penalty": hp.penalty,
                "c": hp.c,
                "tol": hp.tol,
                "intercept_scaling": hp.intercept_scaling,
                "max_iter": hp.max_iter,
            },
            "converged": logreg.converged,
            "n_iter": logreg.n_iter,
        },
        "metadata": bundle.metadata,
    }


def save_bundle(bundle: ModelBundle, path) -> None:
    payload = _bundle_payload(bundle)
    document = dict(payload)
    document["checksum"] = _checksum(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2, ensure_ascii=False, allow_nan=False)
        fh.write("\n")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def load_bundle(path) -> ModelBundle:
    text = _read_text_file(path, SchemaError)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"bundle is not valid JSON: {exc}") from None
    _require(isinstance(document, dict), "bundle root must be an object")
    version = document.get("version")
    _require(version is not None, "bundle lacks a version tag")
    if version != BUNDLE_VERSION:
        raise VersionMismatch(f"unsupported bundle version {version!r}")
    stored_checksum = document.pop("checksum", None)
    _require(isinstance(stored_checksum, str), "bundle lacks a checksum")
    if _checksum(document) != stored_checksum:
        raise SchemaError("bundle checksum mismatch (file corrupted?)")

    try:
        tfidf_doc = document["tfidf"]
        logreg_doc = document["logreg"]
        language = document["language"]
        metadata = document.get("metadata", {})
        vocab = tfidf_doc["vocabulary"]
        df = tfidf_doc["document_frequency"]
        idf = tfidf_doc["idf"]
        n_docs = tfidf_doc["n_docs"]
        classes = logreg_doc["classes"]
        weights = logreg_doc["weights"]
        intercepts = logreg_doc["intercepts"]
        hp_doc = logreg_doc["hyperparams"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bundle missing field: {exc}") from None

    _require(isinstance(vocab, list) and all(isinstance(t, str) for t in vocab), "bad vocabulary")
    _require(len(set(vocab)) == len(vocab), "vocabulary has duplicates")
    _require(isinstance(df, list) and len(df) == len(vocab), "document_frequency length mismatch")
    _require(isinstance(idf, list) and len(idf) == len(vocab), "idf length mismatch")
    _require(isinstance(n_docs, int) and n_docs >= 0, "bad n_docs")
    _require(isinstance(classes, list) and len(classes) >= 2, "need >= 2 classes")
    _require(len(set(classes)) == len(classes), "duplicate classes")
    _require(isinstance(weights, list) and len(weights) == len(classes), "weight row count mismatch")
    _require(
        all(isinstance(row, list) and len(row) == len(vocab) for row in weights),
        "weight row length mismatch",
    )
    _require(isinstance(intercepts, list) and len(intercepts) == len(classes), "intercept length mismatch")
    _require(isinstance(metadata, dict), "metadata must be an object")

    try:
        hyperparams = LogRegHyperparams(
            penalty=hp_doc["penalty"],
            c=float(hp_doc["c"]),
            tol=float(hp_doc["tol"]),
            intercept_scaling=float(hp_doc["intercept_scaling"]),
            max_iter=int(hp_doc["max_iter"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad hyperparameters: {exc}") from None

    try:
        weights_arr = np.array(weights, dtype=np.float64).reshape(len(classes), len(vocab))
        intercepts_arr = np.array(intercepts, dtype=np.float64)
        idf_arr = np.array(idf, dtype=np.float64)
        df_arr = np.array(df, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad numeric field: {exc}") from None
    _require(bool(np.all(np.isfinite(weights_arr))), "non-finite weights")
    _require(bool(np.all(np.isfinite(intercepts_arr))), "non-finite intercepts")
    _require(bool(np.all(idf_arr > 0.0)), "idf values must be positive")

    tfidf = TfIdfModel(
        vocabulary={token: i for i, token in enumerate(vocab)},
        document_frequency=df_arr,
        n_docs=n_docs,
        idf=idf_arr,
    )
    logreg = LogRegModel(
        classes=tuple(classes),
        weights=weights_arr,
        intercepts=intercepts_arr,
        hyperparams=hyperparams,
        converged=bool(logreg_doc.get("converged", False)),
        n_iter=int(logreg_doc.get("n_iter", 0)),
    )
    return ModelBundle(
        version=version,
        language=language,
        classifier=TopicClassifier(tfidf=tfidf, logreg=logreg),
        metadata=metadata,
    )


def write_graph_edges(edge_list, path) -> None:
    """Edge list as 'u<TAB>v<TAB>weight' lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, w in edge_list:
            fh.write(f"{u}\t{v}\t{w:g}\n")


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, ensure_ascii=False, sort_keys=True, allow_nan=False)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
