"""Pretrained word-vector stores and exact top-N similarity queries.

Three key schemes mirror the usual embedding flavors: plain tokens,
sense-tagged ``token|POS`` keys, and subword stores that compose a vector
for out-of-vocabulary tokens from boundary-marked character n-grams.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels, resources, textprep, topicmodel
from .errors import FormatError, KeyNotFound, NoSubwordCoverage
from .postag import COARSE_TAGS
from .textprep import StopwordTable
from .topicmodel import TopicClassifier

BACKENDS = ("plain", "sense", "subword")
SENSE_FALLBACK_TAGS = ("NOUN", "VERB", "ADJ")
NGRAM_RANGE = (3, 6)

DEFAULT_TOPN = 140

# diagnostic thresholds
VARIANT_SHARE = 0.5
FOREIGN_SHARE = 0.5
AMBIGUITY_GAP = 0.2
VARIANT_EDIT_DISTANCE = 2


@dataclass(frozen=True)
class EmbeddingStore:
    backend: str
    dim: int
    keys: tuple[str, ...]
    raw: np.ndarray
    normalized: np.ndarray
    degenerate: np.ndarray
    key_index: dict[str, int]
    keys_array: np.ndarray
    # representative row per entry: bitwise-duplicate vectors share one row,
    # so their similarities tie exactly and the lexicographic tie rule holds
    # regardless of how the matvec backend rounds
    duplicate_of: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    ngram_keys: tuple[str, ...] = ()
    ngram_raw: np.ndarray | None = None
    ngram_index: dict[str, int] = field(default_factory=dict)

    def __contains__(self, key: str) -> bool:
        return key in self.key_index

    def __len__(self) -> int:
        return len(self.keys)

    def vector(self, key: str) -> np.ndarray:
        return self.raw[self.key_index[key]]


@dataclass(frozen=True)
class SemanticField:
    """Top-N most-similar entries for one keyword."""

    keyword: str
    query_key: str
    neighbors: tuple[tuple[str, float], ...]
    topn_requested: int

    def neighbor_tokens(self) -> list[str]:
        return [strip_sense_suffix(key) for key, _ in self.neighbors]


@dataclass(frozen=True)
class SfDiagnostics:
    flags: frozenset[str]
    evidence: dict[str, float]


def strip_sense_suffix(key: str) -> str:
    """troyano|NOUN -> troyano; keys without a tag suffix pass through."""
    token, sep, tag = key.rpartition("|")
    if sep and tag in COARSE_TAGS:
        return token
    return key


def read_vector_file(path) -> tuple[int, list[tuple[str, np.ndarray]]]:
    """Parse word2vec text format: '<count> <dim>' header, then one
    '<key> <v1> ... <v_dim>' line per entry. Raises FormatError with the
    offending 1-based line number."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except UnicodeDecodeError as exc:
        raise FormatError(f"vector file is not valid UTF-8: {exc}") from None
    if not lines:
        raise FormatError("empty vector file", line=1)
    header = lines[0].split()
    if len(header) != 2:
        raise FormatError(f"header must be '<count> <dim>', got {lines[0]!r}", line=1)
    try:
        count, dim = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(f"non-integer header fields: {lines[0]!r}", line=1) from None
    if count < 0 or dim < 1:
        raise FormatError(f"invalid header values: {lines[0]!r}", line=1)
    entries: list[tuple[str, np.ndarray]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != dim + 1:
            raise FormatError(
                f"expected {dim} components, got {len(parts) - 1}", line=lineno
            )
        key = parts[0]
        if key in seen:
            raise FormatError(f"duplicate key {key!r}", line=lineno)
        seen.add(key)
        try:
            vec = np.array([float(p) for p in parts[1:]], dtype=np.float64)
        except ValueError:
            raise FormatError(f"non-numeric component in entry {key!r}", line=lineno) from None
        if not np.all(np.isfinite(vec)):
            raise FormatError(f"non-finite component in entry {key!r}", line=lineno)
        entries.append((key, vec))
    if len(entries) != count:
        raise FormatError(f"header promises {count} entries, file has {len(entries)}", line=1)
    return dim, entries


def dump_vectors(store: EmbeddingStore, path) -> None:
    """Debug dump of the main entries back to word2vec text format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(store.keys)} {store.dim}\n")
        for key, row in zip(store.keys, store.raw):
            fh.write(key + " " + " ".join(repr(float(x)) for x in row) + "\n")


def _validate_sense_key(key: str, lineno_hint: str) -> None:
    token, sep, tag = key.rpartition("|")
    if not sep or not token or tag not in COARSE_TAGS:
        raise FormatError(
            f"sense key {key!r} must look like token|TAG with TAG in {COARSE_TAGS}{lineno_hint}"
        )


def load_vectors(path, backend: str, ngram_path=None) -> EmbeddingStore:
    """Load a vector file; for the subword backend an optional second file
    holds the character n-gram vectors (same text format)."""
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}")
    dim, entries = read_vector_file(path)
    if backend == "sense":
        for key, _ in entries:
            _validate_sense_key(key, f" (in {path})")
    keys = tuple(key for key, _ in entries)
    raw = np.array([vec for _, vec in entries]) if entries else np.zeros((0, dim))
    norms = np.sqrt((raw * raw).sum(axis=1)) if len(entries) else np.zeros(0)
    degenerate = norms == 0.0
    safe = np.where(degenerate, 1.0, norms)
    normalized = raw / safe[:, None]
    duplicate_of = np.arange(len(keys), dtype=np.int64)
    first_seen: dict[bytes, int] = {}
    for i in range(len(keys)):
        fingerprint = normalized[i].tobytes()
        duplicate_of[i] = first_seen.setdefault(fingerprint, i)
    ngram_keys: tuple[str, ...] = ()
    ngram_raw = None
    ngram_index: dict[str, int] = {}
    if backend == "subword" and ngram_path is not None:
        ngram_dim, ngram_entries = read_vector_file(ngram_path)
        if ngram_dim != dim:
            raise FormatError(
                f"n-gram dimensionality {ngram_dim} != entry dimensionality {dim}", line=1
            )
        low, high = NGRAM_RANGE
        for key, _ in ngram_entries:
            if not low <= len(key) <= high:
                raise FormatError(f"n-gram key {key!r} outside length range {NGRAM_RANGE}")
        ngram_keys = tuple(key for key, _ in ngram_entries)
        ngram_raw = (
            np.array([vec for _, vec in ngram_entries])
            if ngram_entries
            else np.zeros((0, dim))
        )
        ngram_index = {key: i for i, key in enumerate(ngram_keys)}
    return EmbeddingStore(
        backend=backend,
        dim=dim,
        keys=keys,
        raw=raw,
        normalized=normalized,
        degenerate=degenerate,
        key_index={key: i for i, key in enumerate(keys)},
        keys_array=np.array(keys, dtype=np.str_) if keys else np.empty(0, dtype=np.str_),
        duplicate_of=duplicate_of,
        ngram_keys=ngram_keys,
        ngram_raw=ngram_raw,
        ngram_index=ngram_index,
    )


def resolve_key(store: EmbeddingStore, token: str, tag: str | None = None) -> str | None:
    """Map a (token, tag) query onto a store key.

    Returns None when nothing resolves; that is an expected outcome, not a
    failure. The subword backend always resolves: an absent token becomes a
    synthetic key composed later from its n-grams.
    """
    if store.backend == "plain":
        return token if token in store.key_index else None
    if store.backend == "sense":
        candidates = []
        if tag is not None:
            candidates.append(f"{token}|{tag}")
        for fallback in SENSE_FALLBACK_TAGS:
            candidate = f"{token}|{fallback}"
            if candidate not in candidates:
                candidates.append(candidate)
        for candidate in candidates:
            if candidate in store.key_index:
                return candidate
        return None
    return token


def character_ngrams(token: str, n_range: tuple[int, int] = NGRAM_RANGE) -> list[str]:
    """All n-grams of the boundary-marked token, n in n_range, in order."""
    word = f"<{token}>"
    low, high = n_range
    grams = []
    for n in range(low, high + 1):
        for i in range(len(word) - n + 1):
            grams.append(word[i : i + n])
    return grams


def compose_oov(store: EmbeddingStore, token: str) -> np.ndarray:
    """Average the stored vectors of the token's character n-grams.

    Every occurrence counts, so repeated n-grams weigh more. Raises
    NoSubwordCoverage when no n-gram has a stored vector.
    """
    if store.backend != "subword":
        raise ValueError("subword composition requires a subword-backend store")
    hits = [
        store.ngram_raw[store.ngram_index[g]]
        for g in character_ngrams(token)
        if g in store.ngram_index
    ]
    if not hits:
        raise NoSubwordCoverage(f"no stored n-gram covers token {token!r}")
    return np.sum(hits, axis=0) / len(hits)


def most_similar(
    store: EmbeddingStore,
    query,
    topn: int = DEFAULT_TOPN,
    keyword: str | None = None,
) -> SemanticField:
    """Exact cosine top-N against every non-degenerate entry.

    `query` is a store key or a raw vector. The query key is excluded from
    its own results; ties order lexicographically by key.
    """
    if topn < 1:
        raise ValueError("topn must be >= 1")
    exclude = -1
    if isinstance(query, str):
        query_key = query
        idx = store.key_index.get(query)
        if idx is not None:
            qvec = store.normalized[idx]
            exclude = idx
        elif store.backend == "subword":
            qvec = compose_oov(store, query)
        else:
            raise KeyNotFound(f"key {query!r} not in store")
    else:
        query_key = keyword or ""
        qvec = np.asarray(query, dtype=np.float64)
        if qvec.shape != (store.dim,):
            raise ValueError(f"query vector must have shape ({store.dim},)")
    norm = float(np.sqrt(np.dot(qvec, qvec)))
    unit = qvec / norm if norm > 0.0 else np.zeros_like(qvec)
    if len(store.keys) == 0:
        return SemanticField(
            keyword=keyword if keyword is not None else query_key,
            query_key=query_key,
            neighbors=(),
            topn_requested=topn,
        )
    scores = np.asarray(_kernels.dot_scores(store.normalized, unit), dtype=np.float64)
    scores = np.clip(scores, -1.0, 1.0)
    if store.duplicate_of.size:
        scores = scores[store.duplicate_of]
    ranked_scores = scores.copy()
    ranked_scores[store.degenerate] = -np.inf
    if exclude >= 0:
        ranked_scores[exclude] = -np.inf
    order = np.lexsort((store.keys_array, -ranked_scores))
    n_valid = int(np.sum(np.isfinite(ranked_scores)))
    take = min(topn, n_valid)
    neighbors = tuple(
        (store.keys[i], float(scores[i])) for i in order[:take]
    )
    return SemanticField(
        keyword=keyword if keyword is not None else query_key,
        query_key=query_key,
        neighbors=neighbors,
        topn_requested=topn,
    )


def pair_similarity(store: EmbeddingStore, key_a: str, key_b: str) -> float:
    """Cosine between two stored entries (on the normalized copies)."""
    a = store.normalized[store.key_index[key_a]]
    b = store.normalized[store.key_index[key_b]]
    return float(np.dot(a, b))


def edit_distance(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ch_a in enumerate(a, start=1):
        current = [i]
        for j, ch_b in enumerate(b, start=1):
            cost = 0 if ch_a == ch_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def _strip_punctuation(token: str) -> str:
    return "".join(ch for ch in token if ch.isalnum() or ch in "-_")


def _is_variant(keyword: str, neighbor_token: str) -> bool:
    cleaned = _strip_punctuation(neighbor_token.lower())
    if not cleaned:
        return False
    if keyword in cleaned:
        return True
    return edit_distance(keyword, cleaned) <= VARIANT_EDIT_DISTANCE


def diagnose_sf(
    sf: SemanticField,
    language: str,
    classifier: TopicClassifier,
    known_words: frozenset[str] | None = None,
    table: StopwordTable | None = None,
) -> SfDiagnostics:
    """Flag pathological semantic fields.

    non_informative: at least half the neighbors are spelling variants of
    the keyword (substring hit or edit distance <= 2 after stripping
    punctuation). l2_in_l1: at least half the neighbors are missing from
    the working language's frequency lexicon. ambiguous: the classifier's
    top-2 probability gap over the whole field is under 0.2.
    """
    flags = set()
    evidence: dict[str, float] = {}
    n = len(sf.neighbors)
    if n == 0:
        return SfDiagnostics(flags=frozenset(), evidence={})
    keyword = sf.keyword.lower()
    tokens = sf.neighbor_tokens()

    variants = sum(1 for tok in tokens if _is_variant(keyword, tok))
    evidence["non_informative"] = float(variants)
    if variants / n >= VARIANT_SHARE:
        flags.add("non_informative")

    if known_words is None:
        known_words = resources.known_words(language)
    foreign = sum(1 for tok in tokens if tok.lower() not in known_words)
    evidence["l2_in_l1"] = float(foreign)
    if foreign / n >= FOREIGN_SHARE:
        flags.add("l2_in_l1")

    stream = textprep.prepare(" ".join(tokens), language, table=table)
    vec = topicmodel.transform(classifier.tfidf, stream)
    probs = np.sort(topicmodel.predict_proba(classifier.logreg, vec))[::-1]
    gap = float(probs[0] - probs[1]) if probs.size >= 2 else 1.0
    evidence["ambiguous"] = gap
    if gap < AMBIGUITY_GAP:
        flags.add("ambiguous")

    return SfDiagnostics(flags=frozenset(flags), evidence=evidence)
