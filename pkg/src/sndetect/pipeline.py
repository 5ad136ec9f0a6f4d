"""End-to-end semantic-neologism candidate detection.

Flow per document: language gate, topic assignment, keyword extraction,
semantic-field generation per keyword, then the agreement filter: a
keyword is a candidate iff its field's topic disagrees with the text
topic (both projected onto target-class vs not-target-class).
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import embeddings, keywords, resources, textprep, topicmodel
from .embeddings import EmbeddingStore, SemanticField, SfDiagnostics
from .errors import (
    CsvFormatError,
    KeyNotFound,
    ModelMissing,
    NoSubwordCoverage,
    SnDetectError,
    UnsupportedLanguage,
)
from .postag import PosLexicon
from .storage import ModelBundle, read_term_csv
from .textprep import RawDocument

AUTO = "auto"


@dataclass(frozen=True)
class PipelineConfig:
    lang: str = AUTO
    topic: str = AUTO
    kw: int = 10
    topn: int = 140
    backend: str = "sense"
    min_concordance_chars: int = 130
    target_class: str = "informática"

    def __post_init__(self):
        if self.kw < 1:
            raise ValueError("kw must be >= 1")
        if self.topn < 1:
            raise ValueError("topn must be >= 1")
        if self.min_concordance_chars < 0:
            raise ValueError("min_concordance_chars must be >= 0")


@dataclass(frozen=True)
class PipelineModels:
    bundles: dict[str, ModelBundle]
    store: EmbeddingStore

    @classmethod
    def single(cls, bundle: ModelBundle, store: EmbeddingStore) -> "PipelineModels":
        return cls(bundles={bundle.language: bundle}, store=store)


@dataclass(frozen=True)
class KeywordRecord:
    keyword: str
    tag: str
    injected: bool
    resolved_key: str | None
    skipped: bool
    sf: SemanticField | None
    sf_topic: str | None
    candidate: bool
    flags: tuple[str, ...]
    diagnostics: SfDiagnostics | None


@dataclass(frozen=True)
class SNCandidate:
    keyword: str
    keyword_tag: str
    text_topic: str
    sf_topic: str
    sf: SemanticField
    diagnostics: SfDiagnostics


@dataclass(frozen=True)
class PipelineReport:
    doc_id: str
    language: str
    text_topic: str
    text_topic_low_confidence: bool
    records: tuple[KeywordRecord, ...]
    candidates: tuple[SNCandidate, ...]

    def to_json_dict(self, include_neighbors: bool = True) -> dict:
        keyword_rows = []
        for r in self.records:
            row = {
                "keyword": r.keyword,
                "tag": r.tag,
                "injected": r.injected,
                "resolved_key": r.resolved_key,
                "skipped": r.skipped,
                "sf_topic": r.sf_topic,
                "candidate": r.candidate,
                "flags": sorted(r.flags),
            }
            if include_neighbors and r.sf is not None:
                row["neighbors"] = [[k, s] for k, s in r.sf.neighbors]
            keyword_rows.append(row)
        return {
            "document_id": self.doc_id,
            "language": self.language,
            "text_topic": self.text_topic,
            "text_topic_low_confidence": self.text_topic_low_confidence,
            "keywords": keyword_rows,
            "candidates": [
                {
                    "keyword": c.keyword,
                    "tag": c.keyword_tag,
                    "text_topic": c.text_topic,
                    "sf_topic": c.sf_topic,
                    "flags": sorted(c.diagnostics.flags),
                }
                for c in self.candidates
            ],
        }

    def to_csv_rows(self) -> list[list[str]]:
        rows = []
        for r in self.records:
            flags = sorted(r.flags)
            if r.skipped:
                flags = ["skipped"] + flags
            rows.append(
                [
                    r.keyword,
                    r.tag,
                    self.text_topic,
                    r.sf_topic or "",
                    "true" if r.candidate else "false",
                    "|".join(flags),
                ]
            )
        return rows


CSV_HEADER = ["keyword", "tag", "text_topic", "sf_topic", "candidate", "flags"]


def _resolve_language(doc: RawDocument, config: PipelineConfig) -> str:
    if config.lang != AUTO:
        if config.lang not in resources.SUPPORTED_LANGUAGES:
            raise UnsupportedLanguage(f"language not supported: {config.lang!r}")
        return config.lang
    if doc.declared_language is not None:
        return doc.declared_language
    supported, lang = textprep.detect_language(doc.text)
    if not supported:
        raise UnsupportedLanguage(f"could not detect a supported language for {doc.id!r}")
    return lang


def _resolve_topic(
    doc: RawDocument, config: PipelineConfig, language: str, bundle: ModelBundle
) -> topicmodel.TopicLabel:
    if config.topic != AUTO:
        return topicmodel.TopicLabel(label=config.topic)
    if doc.declared_topic is not None:
        return topicmodel.TopicLabel(label=doc.declared_topic)
    return topicmodel.analyze_topic([doc.text], language, bundle.classifier)


def _skipped_record(token: str, tag: str, injected: bool) -> KeywordRecord:
    return KeywordRecord(
        keyword=token,
        tag=tag,
        injected=injected,
        resolved_key=None,
        skipped=True,
        sf=None,
        sf_topic=None,
        candidate=False,
        flags=(),
        diagnostics=None,
    )


def _process_keyword(
    token: str,
    tag: str,
    injected: bool,
    language: str,
    text_topic: topicmodel.TopicLabel,
    config: PipelineConfig,
    bundle: ModelBundle,
    store: EmbeddingStore,
) -> KeywordRecord:
    key = embeddings.resolve_key(store, token, tag)
    if key is None:
        return _skipped_record(token, tag, injected)
    try:
        sf = embeddings.most_similar(store, key, topn=config.topn, keyword=token)
    except (KeyNotFound, NoSubwordCoverage):
        return _skipped_record(token, tag, injected)
    try:
        sf_topic = topicmodel.analyze_topic(sf.neighbor_tokens(), language, bundle.classifier)
        diagnostics = embeddings.diagnose_sf(sf, language, bundle.classifier)
    except SnDetectError as exc:
        raise type(exc)(f"{exc} (keyword {token!r})") from exc
    candidate = text_topic.project(config.target_class) != sf_topic.project(config.target_class)
    return KeywordRecord(
        keyword=token,
        tag=tag,
        injected=injected,
        resolved_key=key,
        skipped=False,
        sf=sf,
        sf_topic=sf_topic.label,
        candidate=candidate,
        flags=tuple(sorted(diagnostics.flags)),
        diagnostics=diagnostics,
    )


def sn_classification(
    doc: RawDocument,
    config: PipelineConfig,
    models: PipelineModels,
    injected_terms: Sequence[str] = (),
) -> PipelineReport:
    """Classify one document and return the full audit report.

    `injected_terms` are evaluated as mandatory keywords ahead of the
    extracted ones (batch mode injects the database term this way).
    Keywords whose embedding key cannot be resolved are recorded as
    skipped, not errors.
    """
    language = _resolve_language(doc, config)
    bundle = models.bundles.get(language)
    if bundle is None:
        raise ModelMissing(f"no topic model bundle for language {language!r}")
    text_topic = _resolve_topic(doc, config, language, bundle)

    extracted = keywords.extract_keywords(doc.text, language, kw=config.kw)
    plan: list[tuple[str, str, bool]] = []
    seen: set[str] = set()
    if injected_terms:
        lexicon = PosLexicon.bundled(language)
        for term in injected_terms:
            if term not in seen:
                seen.add(term)
                plan.append((term, lexicon.lookup(term), True))
    for token, tag, _score in extracted:
        if token not in seen:
            seen.add(token)
            plan.append((token, tag, False))

    records = tuple(
        _process_keyword(
            token, tag, injected, language, text_topic, config, bundle, models.store
        )
        for token, tag, injected in plan
    )
    candidates = tuple(
        SNCandidate(
            keyword=r.keyword,
            keyword_tag=r.tag,
            text_topic=text_topic.label,
            sf_topic=r.sf_topic,
            sf=r.sf,
            diagnostics=r.diagnostics,
        )
        for r in records
        if r.candidate
    )
    return PipelineReport(
        doc_id=doc.id,
        language=language,
        text_topic=text_topic.label,
        text_topic_low_confidence=text_topic.low_confidence,
        records=records,
        candidates=candidates,
    )


@dataclass(frozen=True)
class BatchSummary:
    backend: str
    expected: int
    recovered: int
    skipped_short: int
    skipped_unsupported: int
    term_candidates: int

    @property
    def percentage(self) -> float:
        return 100.0 * self.recovered / self.expected if self.expected else 0.0

    def percentage_text(self) -> str:
        return f"{self.percentage:.6g}%"

    def render(self) -> str:
        header = f"{'Model':<10} {'Expected':>9} {'Recovered':>10} {'Percentage':>11}"
        row = (
            f"{self.backend:<10} {self.expected:>9} {self.recovered:>10} "
            f"{self.percentage_text():>11}"
        )
        lines = [header, row]
        if self.skipped_short:
            lines.append(f"rows below length threshold: {self.skipped_short}")
        if self.skipped_unsupported:
            lines.append(f"rows in unsupported languages: {self.skipped_unsupported}")
        lines.append(f"term candidates: {self.term_candidates}")
        return "\n".join(lines)


def batch_classify(
    source,
    config: PipelineConfig,
    models: PipelineModels,
) -> tuple[list[PipelineReport], BatchSummary]:
    """Run the pipeline over term-concordance rows.

    `source` is a CSV path or an iterable of (term, concordance) pairs.
    Rows with concordances shorter than min_concordance_chars are skipped
    and counted; rows whose language cannot be resolved are likewise
    counted and passed over, mirroring the continue-on-unsupported gate.
    The injected term bypasses keyword extraction: it is the unit under
    evaluation.
    """
    if isinstance(source, (str, Path)):
        rows = read_term_csv(source)
    else:
        rows = list(source)
    reports: list[PipelineReport] = []
    skipped_short = 0
    skipped_unsupported = 0
    recovered = 0
    term_candidates = 0
    for n, row in enumerate(rows, start=1):
        term, concordance = row
        if len(concordance) < config.min_concordance_chars:
            skipped_short += 1
            continue
        term_token = textprep.normalize(term).replace(" ", "_")
        if not term_token:
            raise CsvFormatError(f"term {term!r} is empty after normalization", row=n)
        try:
            doc = RawDocument(id=f"row-{n}", text=concordance)
        except ValueError as exc:
            raise CsvFormatError(str(exc), row=n) from None
        try:
            report = sn_classification(doc, config, models, injected_terms=[term_token])
        except UnsupportedLanguage:
            skipped_unsupported += 1
            continue
        reports.append(report)
        injected = next(r for r in report.records if r.injected)
        if not injected.skipped:
            recovered += 1
            if injected.candidate:
                term_candidates += 1
    summary = BatchSummary(
        backend=models.store.backend,
        expected=len(reports),
        recovered=recovered,
        skipped_short=skipped_short,
        skipped_unsupported=skipped_unsupported,
        term_candidates=term_candidates,
    )
    return reports, summary
