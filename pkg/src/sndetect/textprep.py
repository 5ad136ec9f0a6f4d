"""Normalization, tokenization, stopword removal, and language identification.

Supported working languages: Spanish (es), Catalan (ca), French (fr).
All operations are pure; loaded tables are immutable.
"""

import unicodedata
from dataclasses import dataclass
from functools import lru_cache

from . import resources
from .errors import UnsupportedLanguage

SUPPORTED_LANGUAGES = resources.SUPPORTED_LANGUAGES
UNDETERMINED = "und"

# Minimum fraction of tokens that must hit a stopword table before a
# language claim is made.
DETECTION_THRESHOLD = 0.05


@dataclass(frozen=True)
class RawDocument:
    """An input text plus optional user-declared language and topic."""

    id: str
    text: str
    declared_language: str | None = None
    declared_topic: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("document text is empty after trimming")
        if self.declared_language is not None and self.declared_language not in SUPPORTED_LANGUAGES:
            raise ValueError(f"declared_language must be one of {SUPPORTED_LANGUAGES}")


@lru_cache(maxsize=4096)
def _char_class(ch: str) -> str:
    """Classify one character: keep it, drop it, or turn it into a space.

    Latin-script letters and decimal digits are kept; hyphen/underscore are
    kept (token-internal joiners); non-Latin letters and combining marks are
    dropped so they never split a word; everything else becomes a space.
    """
    if ch in "-_":
        return "keep"
    cat = unicodedata.category(ch)
    if cat.startswith("L"):
        if unicodedata.name(ch, "").startswith("LATIN"):
            return "keep"
        return "drop"
    if cat == "Nd":
        return "keep"
    if cat.startswith("M"):
        return "drop"
    return "space"


def _is_word_char(ch: str) -> bool:
    return ch not in "-_" and _char_class(ch) == "keep"


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    position: int
    pos: str | None = None

    def __post_init__(self):
        if not self.normalized:
            raise ValueError("token normalized form is empty")
        if not (_is_word_char(self.normalized[0]) and _is_word_char(self.normalized[-1])):
            raise ValueError(f"token {self.normalized!r} has non-internal hyphen/underscore")
        for ch in self.normalized:
            if _char_class(ch) != "keep":
                raise ValueError(f"token {self.normalized!r} contains invalid character {ch!r}")


@dataclass(frozen=True)
class TokenStream:
    doc_id: str
    tokens: tuple[Token, ...]
    language: str

    def __post_init__(self):
        last = -1
        for token in self.tokens:
            if token.position <= last:
                raise ValueError("token positions must be strictly increasing")
            last = token.position

    def normalized_tokens(self) -> list[str]:
        return [t.normalized for t in self.tokens]


class StopwordTable:
    """Per-language stopword sets; iteration order fixes tie-breaking."""

    def __init__(self, tables: dict[str, frozenset[str]]):
        self._tables = {lang: frozenset(w.lower() for w in words) for lang, words in tables.items()}

    @classmethod
    def bundled(cls) -> "StopwordTable":
        return _bundled_table()

    def languages(self) -> tuple[str, ...]:
        return tuple(self._tables)

    def for_language(self, language: str) -> frozenset[str]:
        try:
            return self._tables[language]
        except KeyError:
            raise UnsupportedLanguage(f"no stopword table for language {language!r}") from None


@lru_cache(maxsize=1)
def _bundled_table() -> StopwordTable:
    return StopwordTable({lang: resources.stopwords(lang) for lang in SUPPORTED_LANGUAGES})


def normalize(text: str) -> str:
    """Lowercase, NFC-compose, and reduce to Latin letters, digits, - and _.

    Symbols and control characters become single spaces; non-Latin letters
    and combining marks are removed outright; whitespace runs collapse.
    Idempotent by construction.
    """
    s = unicodedata.normalize("NFC", text).lower()
    s = unicodedata.normalize("NFC", s)
    out = []
    for ch in s:
        cls = _char_class(ch)
        if cls == "keep":
            out.append(ch)
        elif cls == "space":
            out.append(" ")
    return " ".join("".join(out).split())


def tokenize(text: str, language: str, doc_id: str = "") -> TokenStream:
    """Whitespace-split normalized text into positioned tokens.

    Leading/trailing non-alphanumeric characters are stripped per token and
    tokens that become empty are dropped.
    """
    tokens = []
    position = 0
    for piece in text.split():
        start, end = 0, len(piece)
        while start < end and not _is_word_char(piece[start]):
            start += 1
        while end > start and not _is_word_char(piece[end - 1]):
            end -= 1
        core = piece[start:end]
        if not core:
            continue
        tokens.append(Token(surface=piece, normalized=core, position=position))
        position += 1
    return TokenStream(doc_id=doc_id, tokens=tuple(tokens), language=language)


def remove_stopwords(stream: TokenStream, table: StopwordTable | None = None) -> TokenStream:
    """Drop stopword tokens; surviving tokens keep their positions."""
    table = table or StopwordTable.bundled()
    entries = table.for_language(stream.language)
    kept = tuple(t for t in stream.tokens if t.normalized not in entries)
    return TokenStream(doc_id=stream.doc_id, tokens=kept, language=stream.language)


def detect_language(text: str, table: StopwordTable | None = None) -> tuple[bool, str]:
    """Score languages by stopword-hit fraction; argmax wins above 0.05.

    Ties resolve in table order (bundled order: es, ca, fr). Returns
    (False, "und") when no language clears the threshold.
    """
    table = table or StopwordTable.bundled()
    stream = tokenize(normalize(text), UNDETERMINED)
    words = stream.normalized_tokens()
    if not words:
        return (False, UNDETERMINED)
    best_lang = UNDETERMINED
    best_score = -1.0
    for lang in table.languages():
        entries = table.for_language(lang)
        score = sum(1 for w in words if w in entries) / len(words)
        if score > best_score:
            best_lang, best_score = lang, score
    if best_score >= DETECTION_THRESHOLD:
        return (True, best_lang)
    return (False, UNDETERMINED)


def prepare(text: str, language: str, doc_id: str = "", table: StopwordTable | None = None) -> TokenStream:
    """normalize -> tokenize -> remove_stopwords, as one step."""
    return remove_stopwords(tokenize(normalize(text), language, doc_id=doc_id), table)
