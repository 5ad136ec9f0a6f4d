"""Bundled language resources: stopword lists and coarse POS lexicons.

Files live next to this module. The environment variable
``SNDETECT_RESOURCES`` may point at a directory whose files (same names)
take precedence over the bundled ones.
"""

import os
from functools import lru_cache
from importlib import resources as _ir
from pathlib import Path

SUPPORTED_LANGUAGES = ("es", "ca", "fr")


def _resource_text(filename: str) -> str:
    override = os.environ.get("SNDETECT_RESOURCES")
    if override:
        candidate = Path(override) / filename
        if candidate.is_file():
            return candidate.read_text(encoding="utf-8")
    return (_ir.files(__package__) / filename).read_text(encoding="utf-8")


def parse_wordlist(text: str) -> set[str]:
    """One word per line; blank lines and # comments ignored."""
    words = set()
    for line in text.splitlines():
        entry = line.strip()
        if not entry or entry.startswith("#"):
            continue
        words.add(entry.lower())
    return words


def parse_lexicon(text: str) -> dict[str, str]:
    """TSV token<TAB>TAG lines; blank lines and # comments ignored."""
    entries = {}
    for line in text.splitlines():
        row = line.strip()
        if not row or row.startswith("#"):
            continue
        token, _, tag = row.partition("\t")
        entries[token.strip().lower()] = tag.strip().upper()
    return entries


@lru_cache(maxsize=None)
def stopwords(language: str) -> frozenset[str]:
    if language not in SUPPORTED_LANGUAGES:
        raise KeyError(language)
    return frozenset(parse_wordlist(_resource_text(f"stopwords_{language}.txt")))


@lru_cache(maxsize=None)
def lexicon_entries(language: str) -> dict[str, str]:
    if language not in SUPPORTED_LANGUAGES:
        raise KeyError(language)
    return dict(parse_lexicon(_resource_text(f"lexicon_{language}.tsv")))


@lru_cache(maxsize=None)
def known_words(language: str) -> frozenset[str]:
    """Frequency lexicon used by the foreign-neighbor diagnostic."""
    return frozenset(stopwords(language) | set(lexicon_entries(language)))
