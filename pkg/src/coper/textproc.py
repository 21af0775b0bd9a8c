"""Deterministic text normalization, tokenization, stopword removal and
pluggable POS tagging.

All functions are pure; configuration (character map, stopword list, POS
lexicon) comes from external data files so the machinery stays
script-agnostic. Default Persian data ships with the package.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, replace
from enum import Enum
from importlib.resources import files
from pathlib import Path
from typing import Callable, Iterable, Protocol

from .errors import ConfigError, InputError, TaggingError

ZWNJ = "‌"


class PosTag(Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    NUM = "NUM"
    PRON = "PRON"
    PREP = "PREP"
    CONJ = "CONJ"
    PUNC = "PUNC"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Token:
    """One token of a normalized text; offsets index into that text."""

    surface: str
    start: int
    end: int
    pos: PosTag | None = None


@dataclass(frozen=True)
class RawDocument:
    """Raw article record: the unit being ranked."""

    id: str
    title: str
    body: str
    url: str | None = None
    published_at: str | None = None


@dataclass(frozen=True)
class ProcessedDocument:
    """A normalized text with its tagged token sequence."""

    doc_id: str
    text: str
    tokens: tuple[Token, ...]


def data_path(name: str) -> Path:
    """Path of a packaged default data file."""
    return Path(str(files("coper").joinpath("data", name)))


# --- character mapping table ------------------------------------------------

CharMap = dict[int, str]


def load_charmap(path: str | Path) -> CharMap:
    """Load a `source<TAB>target` codepoint table (hex). A line with no
    target deletes the source character.

    Chains (a->b while b is itself a source) are resolved at load time so a
    single translate pass leaves no source characters behind; cycles are a
    configuration error.
    """
    raw: dict[str, str] = {}
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read mapping table {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 1:
            parts = [parts[0], ""]
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: expected 'source<TAB>target'")
        src_hex, dst_field = parts[0].strip(), parts[1].strip()
        try:
            src = chr(int(src_hex, 16))
            dst = "".join(chr(int(h, 16)) for h in dst_field.split() if h)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad codepoint: {exc}") from exc
        raw[src] = dst

    def resolve(ch: str, seen: tuple[str, ...]) -> str:
        if ch in seen:
            raise ConfigError(f"mapping table {path} contains a cycle at U+{ord(ch):04X}")
        if ch not in raw:
            return ch
        return "".join(resolve(c, seen + (ch,)) for c in raw[ch])

    return {ord(src): resolve(src, ()) for src in raw}


_DEFAULT_CHARMAP: CharMap | None = None


def default_charmap() -> CharMap:
    global _DEFAULT_CHARMAP
    if _DEFAULT_CHARMAP is None:
        _DEFAULT_CHARMAP = load_charmap(data_path("charmap_fa.tsv"))
    return _DEFAULT_CHARMAP


# --- normalization ----------------------------------------------------------

def _is_word_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat[0] in ("L", "M") or cat == "Nd"


_ZWNJ_RUN = re.compile(f"{ZWNJ}{{2,}}")


def _fix_zwnj(text: str) -> str:
    """Keep ZWNJ only between word characters; collapse runs to one."""
    text = _ZWNJ_RUN.sub(ZWNJ, text)
    out: list[str] = []
    for i, ch in enumerate(text):
        if ch == ZWNJ:
            prev_ok = i > 0 and _is_word_char(text[i - 1])
            next_ok = i + 1 < len(text) and _is_word_char(text[i + 1])
            if not (prev_ok and next_ok):
                continue
        out.append(ch)
    return "".join(out)


def _normalize_pass(text: str, table: CharMap) -> str:
    text = unicodedata.normalize("NFC", text)
    text = text.translate(table)
    text = _fix_zwnj(text)
    return " ".join(text.split())


def normalize(text: str, table: CharMap | None = None) -> str:
    """Canonicalize text: NFC, character mapping, ZWNJ hygiene, whitespace.

    The pass is iterated to a fixpoint (NFC recomposition after mapping can
    expose further work), which makes normalization idempotent by
    construction.
    """
    try:
        text.encode("utf-8")
    except UnicodeEncodeError as exc:
        raise InputError(f"text is not valid Unicode: {exc}") from exc
    if table is None:
        table = default_charmap()
    cap = len(text) + 8
    for _ in range(cap):
        nxt = _normalize_pass(text, table)
        if nxt == text:
            return text
        text = nxt
    raise InputError("normalization did not converge")


# --- tokenization -----------------------------------------------------------

def tokenize(text: str) -> list[Token]:
    """Split normalized text on whitespace and punctuation.

    Punctuation and symbol characters become single-char PUNC tokens;
    ZWNJ-joined compounds stay one token.
    """
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if _is_word_char(ch) or ch == ZWNJ:
            j = i
            while j < n and (_is_word_char(text[j]) or text[j] == ZWNJ):
                j += 1
            tokens.append(Token(surface=text[i:j], start=i, end=j))
            i = j
        else:
            tokens.append(Token(surface=ch, start=i, end=i + 1, pos=PosTag.PUNC))
            i += 1
    return tokens


# --- stopwords --------------------------------------------------------------

def load_stopwords(
    path: str | Path, normalizer: Callable[[str], str] | None = None
) -> frozenset[str]:
    """Load a one-token-per-line stopword file."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read stopword file {path}: {exc}") from exc
    words = (normalizer(w) if normalizer else w for w in (line.strip() for line in raw))
    return frozenset(w for w in words if w)


def remove_stopwords(tokens: Iterable[Token], stopwords: frozenset[str]) -> list[Token]:
    """Drop tokens whose surface is a stopword; order and offsets survive."""
    return [t for t in tokens if t.surface not in stopwords]


# --- POS tagging ------------------------------------------------------------

class PosTagger(Protocol):
    def tag(self, surface: str) -> PosTag: ...


def load_lexicon(path: str | Path) -> dict[str, PosTag]:
    """Load a `surface<TAB>TAG` lexicon."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read lexicon {path}: {exc}") from exc
    lexicon: dict[str, PosTag] = {}
    for lineno, line in enumerate(raw, start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ConfigError(f"{path}:{lineno}: expected 'surface<TAB>TAG'")
        surface, tag = parts[0].strip(), parts[1].strip()
        try:
            lexicon[surface] = PosTag[tag]
        except KeyError as exc:
            raise ConfigError(f"{path}:{lineno}: unknown tag {tag!r}") from exc
    return lexicon


class LexiconTagger:
    """Fallback tagger: lexicon lookup, then suffix heuristics, then NOUN.

    Heuristics (checked in order, after the lexicon):
      all-digit surface            -> NUM
      prefix می/نمی + ZWNJ         -> VERB (imperfective verb prefix)
      suffix ترین, or ZWNJ + تر    -> ADJ (superlative / comparative)
      suffix ها / های / هایی       -> NOUN (plural; the default anyway)
    """

    _VERB_PREFIXES = ("می" + ZWNJ, "نمی" + ZWNJ)
    _ADJ_SUFFIXES = ("ترین", ZWNJ + "تر")

    def __init__(self, lexicon: dict[str, PosTag]):
        self._lexicon = lexicon

    def tag(self, surface: str) -> PosTag:
        hit = self._lexicon.get(surface)
        if hit is not None:
            return hit
        if surface.isdigit():
            return PosTag.NUM
        if surface.startswith(self._VERB_PREFIXES):
            return PosTag.VERB
        if surface.endswith(self._ADJ_SUFFIXES):
            return PosTag.ADJ
        return PosTag.NOUN


def _is_punc_surface(surface: str) -> bool:
    return all(unicodedata.category(c)[0] in ("P", "S") for c in surface)


def pos_tag(tokens: Iterable[Token], tagger: PosTagger) -> list[Token]:
    """Return a copy of `tokens` with every `pos` filled in."""
    out: list[Token] = []
    for tok in tokens:
        if tok.pos is PosTag.PUNC or _is_punc_surface(tok.surface):
            out.append(replace(tok, pos=PosTag.PUNC))
            continue
        try:
            out.append(replace(tok, pos=tagger.tag(tok.surface)))
        except Exception as exc:  # tagger is pluggable; surface the token
            raise TaggingError(tok.surface, exc) from exc
    return out


# --- composed pipeline ------------------------------------------------------

class TextPipeline:
    """Bundle of normalization + tokenization + tagging resources.

    One instance is shared by indexing, keyword extraction and query
    analysis so every stage sees byte-identical preprocessing.
    """

    def __init__(
        self,
        charmap: CharMap,
        stopwords: frozenset[str],
        tagger: PosTagger,
    ):
        self.charmap = charmap
        self.stopwords = stopwords
        self.tagger = tagger

    @classmethod
    def from_paths(
        cls,
        charmap_path: str | Path,
        stopwords_path: str | Path,
        lexicon_path: str | Path,
    ) -> "TextPipeline":
        charmap = load_charmap(charmap_path)
        stopwords = load_stopwords(stopwords_path, normalizer=lambda w: normalize(w, charmap))
        tagger = LexiconTagger(load_lexicon(lexicon_path))
        return cls(charmap, stopwords, tagger)

    @classmethod
    def default(cls) -> "TextPipeline":
        return cls.from_paths(
            data_path("charmap_fa.tsv"),
            data_path("stopwords_fa.txt"),
            data_path("lexicon_fa.tsv"),
        )

    def normalize(self, text: str) -> str:
        return normalize(text, self.charmap)

    def process(self, doc_id: str, text: str) -> ProcessedDocument:
        """normalize -> tokenize -> pos_tag."""
        normalized = self.normalize(text)
        tokens = pos_tag(tokenize(normalized), self.tagger)
        return ProcessedDocument(doc_id=doc_id, text=normalized, tokens=tuple(tokens))

    def index_terms(self, text: str) -> list[str]:
        """Term stream for the lexical index: stopwords and punctuation out."""
        tokens = tokenize(self.normalize(text))
        kept = remove_stopwords(tokens, self.stopwords)
        return [t.surface for t in kept if t.pos is not PosTag.PUNC]
