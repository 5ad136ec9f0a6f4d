"""Coarse POS tagging: lexicon lookup, then suffix rules, then a default.

The built-in tagger is deliberately lightweight. When quality matters,
supply tags from an external annotation file via load_conllu_tags.
"""

import dataclasses
from dataclasses import dataclass
from functools import lru_cache

from . import resources
from .errors import AlignmentError
from .textprep import TokenStream, normalize

COARSE_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "OTHER")
DEFAULT_TAG = "OTHER"

# UPOS -> coarse tag; everything unlisted collapses to OTHER.
_UPOS_TO_COARSE = {
    "NOUN": "NOUN",
    "PROPN": "NOUN",
    "VERB": "VERB",
    "AUX": "VERB",
    "ADJ": "ADJ",
    "ADV": "ADV",
}

# Ordered (suffix, tag) heuristics; longest suffix wins at match time and a
# rule only fires when the token is at least two characters longer than it.
_SUFFIX_RULES = {
    "es": [
        ("mente", "ADV"),
        ("ación", "NOUN"),
        ("sión", "NOUN"),
        ("ción", "NOUN"),
        ("xión", "NOUN"),
        ("miento", "NOUN"),
        ("mientos", "NOUN"),
        ("ciones", "NOUN"),
        ("dades", "NOUN"),
        ("dad", "NOUN"),
        ("tad", "NOUN"),
        ("umbre", "NOUN"),
        ("ismo", "NOUN"),
        ("ista", "NOUN"),
        ("logía", "NOUN"),
        ("grafía", "NOUN"),
        ("anza", "NOUN"),
        ("encia", "NOUN"),
        ("ancia", "NOUN"),
        ("aje", "NOUN"),
        ("dor", "NOUN"),
        ("dora", "NOUN"),
        ("ístico", "ADJ"),
        ("ística", "ADJ"),
        ("ico", "ADJ"),
        ("ica", "ADJ"),
        ("oso", "ADJ"),
        ("osa", "ADJ"),
        ("ivo", "ADJ"),
        ("iva", "ADJ"),
        ("able", "ADJ"),
        ("ible", "ADJ"),
        ("ario", "ADJ"),
        ("aria", "ADJ"),
        ("ante", "ADJ"),
        ("iente", "ADJ"),
        ("arse", "VERB"),
        ("erse", "VERB"),
        ("irse", "VERB"),
        ("ando", "VERB"),
        ("iendo", "VERB"),
        ("aba", "VERB"),
        ("aban", "VERB"),
        ("aron", "VERB"),
        ("ieron", "VERB"),
        ("ar", "VERB"),
        ("er", "VERB"),
        ("ir", "VERB"),
        ("ó", "VERB"),
    ],
    "ca": [
        ("ment", "ADV"),
        ("ció", "NOUN"),
        ("cions", "NOUN"),
        ("tat", "NOUN"),
        ("isme", "NOUN"),
        ("atge", "NOUN"),
        ("ós", "ADJ"),
        ("osa", "ADJ"),
        ("iu", "ADJ"),
        ("iva", "ADJ"),
        ("able", "ADJ"),
        ("ible", "ADJ"),
        ("ar", "VERB"),
        ("er", "VERB"),
        ("ir", "VERB"),
        ("re", "VERB"),
    ],
    "fr": [
        ("ement", "ADV"),
        ("tion", "NOUN"),
        ("sion", "NOUN"),
        ("té", "NOUN"),
        ("isme", "NOUN"),
        ("age", "NOUN"),
        ("eur", "NOUN"),
        ("eux", "ADJ"),
        ("euse", "ADJ"),
        ("if", "ADJ"),
        ("ive", "ADJ"),
        ("ique", "ADJ"),
        ("able", "ADJ"),
        ("ible", "ADJ"),
        ("er", "VERB"),
        ("ir", "VERB"),
    ],
}


@dataclass(frozen=True)
class PosLexicon:
    """token -> tag entries plus ordered suffix fallbacks and a default."""

    entries: dict[str, str]
    suffix_rules: tuple[tuple[str, str], ...]
    default_tag: str = DEFAULT_TAG

    def __post_init__(self):
        for tag in self.entries.values():
            if tag not in COARSE_TAGS:
                raise ValueError(f"invalid tag {tag!r} in lexicon")
        for _, tag in self.suffix_rules:
            if tag not in COARSE_TAGS:
                raise ValueError(f"invalid tag {tag!r} in suffix rules")
        # longest-first so the most specific rule fires
        object.__setattr__(
            self,
            "suffix_rules",
            tuple(sorted(self.suffix_rules, key=lambda r: (-len(r[0]), r[0]))),
        )

    @classmethod
    def bundled(cls, language: str) -> "PosLexicon":
        return _bundled_lexicon(language)

    def lookup(self, token: str) -> str:
        hit = self.entries.get(token)
        if hit is not None:
            return hit
        for suffix, rule_tag in self.suffix_rules:
            if len(token) >= len(suffix) + 2 and token.endswith(suffix):
                return rule_tag
        return self.default_tag


@lru_cache(maxsize=None)
def _bundled_lexicon(language: str) -> PosLexicon:
    return PosLexicon(
        entries=resources.lexicon_entries(language),
        suffix_rules=tuple(_SUFFIX_RULES.get(language, ())),
    )


def tag(stream: TokenStream, lexicon: PosLexicon | None = None) -> TokenStream:
    """Assign a coarse tag to every token; re-tagging overwrites."""
    lexicon = lexicon or PosLexicon.bundled(stream.language)
    tagged = tuple(
        dataclasses.replace(t, pos=lexicon.lookup(t.normalized)) for t in stream.tokens
    )
    return TokenStream(doc_id=stream.doc_id, tokens=tagged, language=stream.language)


def parse_conllu(text: str) -> list[tuple[str, str]]:
    """(form, upos) pairs from CoNLL-U text.

    Comments, multiword-token ranges (id like 1-2), and empty nodes
    (id like 1.1) are skipped per the standard layout.
    """
    rows = []
    for line in text.splitlines():
        line = line.strip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) < 4:
            raise AlignmentError(f"CoNLL-U row has {len(cols)} columns, expected >= 4")
        token_id = cols[0]
        if "-" in token_id or "." in token_id:
            continue
        rows.append((cols[1], cols[3]))
    return rows


def load_conllu_tags(stream: TokenStream, conllu_text: str) -> TokenStream:
    """Copy UPOS tags from aligned CoNLL-U records onto the stream.

    Alignment is by sequence: record n tags token n, and the normalized
    forms must agree. Raises AlignmentError with the first bad index.
    """
    rows = parse_conllu(conllu_text)
    n = min(len(rows), len(stream.tokens))
    for i in range(n):
        form_norm = normalize(rows[i][0])
        if form_norm != stream.tokens[i].normalized:
            raise AlignmentError(
                f"form mismatch at index {i}: {form_norm!r} != {stream.tokens[i].normalized!r}",
                index=i,
            )
    if len(rows) != len(stream.tokens):
        raise AlignmentError(
            f"length mismatch: {len(stream.tokens)} tokens vs {len(rows)} annotation rows",
            index=n,
        )
    tagged = tuple(
        dataclasses.replace(t, pos=_UPOS_TO_COARSE.get(rows[i][1].upper(), DEFAULT_TAG))
        for i, t in enumerate(stream.tokens)
    )
    return TokenStream(doc_id=stream.doc_id, tokens=tagged, language=stream.language)
