"""Drug and symptom lexicons with whole-token phrase matching.

Matching is exact after normalization: no stemming, no fuzzy matching.
A query mentioning several drugs counts for every one of them.
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field

RX_OTC_VALUES = ("RX", "OTC", "UNCLASSIFIED")

_NON_TOKEN = re.compile(r"[^\w\s]|_")
_WS = re.compile(r"\s+")


class LexiconError(ValueError):
    """Raised when a lexicon file contains malformed rows."""


def normalize_text(raw: str) -> str:
    """Lowercase, replace punctuation with spaces, collapse whitespace."""
    s = _NON_TOKEN.sub(" ", raw.lower())
    return _WS.sub(" ", s).strip()


@dataclass(frozen=True)
class DrugEntry:
    canonical_name: str
    brand_names: tuple[str, ...] = ()
    rx_otc: str = "UNCLASSIFIED"

    def __post_init__(self):
        if not self.canonical_name:
            raise LexiconError("empty canonical drug name")
        if self.rx_otc not in RX_OTC_VALUES:
            raise LexiconError(f"bad rx_otc value {self.rx_otc!r}")


@dataclass
class SymptomLexicon:
    phrases: frozenset[str]
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self._index = _build_phrase_index(
            (p, p) for p in self.phrases
        )


def _build_phrase_index(pairs):
    """Index phrase token sequences by first token.

    pairs: iterable of (phrase, payload). Returns
    {first_token: [(token_tuple, payload), ...]}.
    """
    index: dict[str, list] = {}
    for phrase, payload in pairs:
        tokens = tuple(phrase.split())
        if not tokens:
            continue
        index.setdefault(tokens[0], []).append((tokens, payload))
    return index


def _scan(tokens: tuple[str, ...], index: dict) -> set:
    hits = set()
    n = len(tokens)
    for i, tok in enumerate(tokens):
        for phrase_tokens, payload in index.get(tok, ()):
            m = len(phrase_tokens)
            if i + m <= n and tokens[i:i + m] == phrase_tokens:
                hits.add(payload)
    return hits


class DrugMatcher:
    """Whole-token phrase matcher over a drug lexicon.

    Immutable after construction; safe to share across workers.
    """

    def __init__(self, entries: list[DrugEntry]):
        seen = set()
        for e in entries:
            if e.canonical_name in seen:
                raise LexiconError(f"duplicate canonical name {e.canonical_name!r}")
            seen.add(e.canonical_name)
        pairs = []
        for e in entries:
            pairs.append((e.canonical_name, e.canonical_name))
            for brand in e.brand_names:
                pairs.append((brand, e.canonical_name))
        self._index = _build_phrase_index(pairs)
        self.entries = list(entries)

    def match(self, query: str) -> set[str]:
        return _scan(tuple(query.split()), self._index)


def match_drugs(query: str, lexicon: list[DrugEntry]) -> set[str]:
    """Canonical names of all lexicon entries appearing in the (normalized) query."""
    return DrugMatcher(lexicon).match(query)


def contains_symptom(query: str, lexicon: SymptomLexicon) -> bool:
    return bool(_scan(tuple(query.split()), lexicon._index))


def load_drug_lexicon(path) -> list[DrugEntry]:
    """Read the drug lexicon CSV (header: canonical,brands,rx_otc).

    brands is a |-separated list, possibly empty. Malformed rows raise
    LexiconError with the offending row numbers.
    """
    entries = []
    errors = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        required = {"canonical", "brands", "rx_otc"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise LexiconError(f"{path}: header must contain {sorted(required)}")
        for lineno, row in enumerate(reader, start=2):
            canonical = normalize_text(row["canonical"] or "")
            rx_otc = (row["rx_otc"] or "UNCLASSIFIED").strip().upper()
            brands = tuple(
                b for b in (normalize_text(p) for p in (row["brands"] or "").split("|"))
                if b
            )
            try:
                entries.append(DrugEntry(canonical, brands, rx_otc))
            except LexiconError as exc:
                errors.append(f"row {lineno}: {exc}")
    if errors:
        raise LexiconError(f"{path}: " + "; ".join(errors))
    names = [e.canonical_name for e in entries]
    if len(names) != len(set(names)):
        dupes = sorted({n for n in names if names.count(n) > 1})
        raise LexiconError(f"{path}: duplicate canonical names {dupes}")
    return entries


def load_symptom_lexicon(path) -> SymptomLexicon:
    """Read the symptom list: one phrase per line, # comments allowed."""
    phrases = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.split("#", 1)[0]
            phrase = normalize_text(line)
            if phrase:
                phrases.add(phrase)
    return SymptomLexicon(frozenset(phrases))
