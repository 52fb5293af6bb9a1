"""Corpus ingestion, tokenization and text partitioning.

Texts are described by a CSV manifest (``file,author,title,category``).
Raw ``.txt`` files go through the built-in heuristic tagger; ``.tsv`` files
are treated as pre-tagged (``surface<TAB>lemma<TAB>pos``, blank line between
sentences) and bypass it.
"""

from __future__ import annotations

import csv
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

CATEGORIES = ("children", "essays", "novels", "plays", "poems", "stories")
POS_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "PROPN", "OTHER")
CONTENT_POS = frozenset({"NOUN", "VERB", "ADJ", "ADV"})

DEFAULT_CHAPTER_PATTERNS = (
    r"^[ \t]*chapter[ \t]+(?:[ivxlcdm]+|\d+)\b[^\n]*$",
)

_SENTENCE_END = re.compile(r"(?<=[.!?])[\"')\]]*\s+|\n\s*\n")
_WORD = re.compile(r"[A-Za-z]+(?:'[A-Za-z]+)?")


class CorpusError(Exception):
    """Base class for corpus-level failures."""


class ManifestError(CorpusError):
    """Raised when manifest rows are invalid; ``errors`` lists one message per bad row."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("invalid manifest rows:\n  " + "\n  ".join(errors))


class EmptyCorpusError(CorpusError):
    pass


class ShortTextError(CorpusError):
    pass


class UndefinedRatioError(CorpusError):
    pass


@dataclass(frozen=True)
class ManifestRow:
    file_path: str
    author: str
    title: str
    category: str


@dataclass(frozen=True)
class Document:
    id: str
    author: str
    title: str
    category: str
    raw_text: str
    path: str = ""

    @property
    def pretagged(self) -> bool:
        return self.path.endswith(".tsv")


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str
    sentence_index: int


@dataclass(frozen=True)
class TokenStream:
    doc_id: str
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]

    def sentences(self) -> list[list[Token]]:
        """Tokens grouped by sentence index, in order."""
        groups: list[list[Token]] = []
        last = None
        for tok in self.tokens:
            if tok.sentence_index != last:
                groups.append([])
                last = tok.sentence_index
            groups[-1].append(tok)
        return groups

    def filter_pos(self, pos_set: Iterable[str]) -> "TokenStream":
        keep = frozenset(pos_set)
        return TokenStream(self.doc_id, tuple(t for t in self.tokens if t.pos in keep))


@dataclass(frozen=True)
class Segment:
    """A contiguous slice of a token stream (used for segments, chunks and chapters)."""

    doc_id: str
    index: int
    tokens: tuple[Token, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]


Chunk = Segment


@dataclass(frozen=True)
class Chapter:
    doc_id: str
    index: int
    heading: str
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class ChapterSplit:
    chapters: tuple[Chapter, ...]

    @property
    def chapterless(self) -> bool:
        return len(self.chapters) < 2


@dataclass
class Corpus:
    documents: list[Document]
    dropped: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


# --------------------------------------------------------------------------
# assets

def _asset_lines(name: str) -> list[str]:
    text = resources.files("stylometrics.assets").joinpath(name).read_text(encoding="utf-8")
    return text.splitlines()


def read_word_list(path: str | Path | None = None, asset: str | None = None) -> list[str]:
    """Read a one-word-per-line list, skipping blanks and ``#`` comments."""
    lines = Path(path).read_text(encoding="utf-8").splitlines() if path else _asset_lines(asset)
    out = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return frozenset(w.lower() for w in read_word_list(asset="stopwords.txt"))


@lru_cache(maxsize=None)
def default_lexicon() -> dict[str, tuple[str, str]]:
    lex = {}
    for line in _asset_lines("lexicon.tsv"):
        if not line or line.startswith("#"):
            continue
        form, lemma, pos = line.split("\t")
        lex[form] = (lemma, pos)
    return lex


@dataclass(frozen=True)
class TaggerConfig:
    """Settings for :func:`tokenize`.

    ``lexicon`` maps lowercased word forms to ``(lemma, pos)``; ``None`` uses
    the bundled lexicon. ``stopwords`` likewise defaults to the bundled list.
    """

    lexicon: dict | None = None
    stopwords: frozenset[str] | None = None
    keep_propn: bool = True
    strip_headings: bool = True
    chapter_patterns: tuple[str, ...] = DEFAULT_CHAPTER_PATTERNS

    def resolved_lexicon(self) -> dict[str, tuple[str, str]]:
        return default_lexicon() if self.lexicon is None else self.lexicon

    def resolved_stopwords(self) -> frozenset[str]:
        return default_stopwords() if self.stopwords is None else self.stopwords


# --------------------------------------------------------------------------
# manifest and ingestion

def read_manifest(path: str | Path) -> list[ManifestRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"file", "author", "title", "category"} - set(reader.fieldnames or ())
        if missing:
            raise ManifestError([f"header missing columns: {', '.join(sorted(missing))}"])
        return [
            ManifestRow(r["file"].strip(), r["author"].strip(), r["title"].strip(),
                        r["category"].strip().lower())
            for r in reader
        ]


def _doc_id(row: ManifestRow) -> str:
    return Path(row.file_path).with_suffix("").as_posix()


def ingest_corpus(directory: str | Path, manifest: Sequence[ManifestRow],
                  min_per_author_category: int = 5) -> Corpus:
    """Load manifest rows from ``directory`` and keep prolific (author, category) pairs.

    A document survives when its author has at least ``min_per_author_category``
    texts in the same category. The result is sorted by (category, author, title).
    """
    if min_per_author_category < 0:
        raise ValueError("min_per_author_category must be >= 0")
    directory = Path(directory)
    errors: list[str] = []
    docs: list[Document] = []
    seen: set[str] = set()
    for lineno, row in enumerate(manifest, start=2):
        if row.category not in CATEGORIES:
            errors.append(f"row {lineno}: unknown category {row.category!r}")
            continue
        path = directory / row.file_path
        if not path.is_file():
            errors.append(f"row {lineno}: missing file {row.file_path}")
            continue
        try:
            text = path.read_text(encoding="utf-8")
        except UnicodeDecodeError:
            errors.append(f"row {lineno}: not UTF-8: {row.file_path}")
            continue
        if not text.strip():
            errors.append(f"row {lineno}: empty file {row.file_path}")
            continue
        doc_id = _doc_id(row)
        if doc_id in seen:
            errors.append(f"row {lineno}: duplicate document id {doc_id}")
            continue
        seen.add(doc_id)
        docs.append(Document(doc_id, row.author, row.title, row.category, text, row.file_path))
    if errors:
        raise ManifestError(errors)

    counts = Counter((d.author, d.category) for d in docs)
    kept = [d for d in docs if counts[d.author, d.category] >= min_per_author_category]
    dropped = sorted(d.id for d in docs if counts[d.author, d.category] < min_per_author_category)
    if not kept:
        raise EmptyCorpusError(
            f"no documents survive the per-(author, category) threshold {min_per_author_category}")
    kept.sort(key=lambda d: (d.category, d.author, d.title, d.id))
    return Corpus(kept, dropped)


# --------------------------------------------------------------------------
# tagging

def _guess(word: str, sentence_initial: bool, lexicon: dict) -> tuple[str, str]:
    lower = word.lower()
    hit = lexicon.get(lower)
    if hit is not None:
        return hit
    if word[0].isupper() and not sentence_initial:
        return lower, "PROPN"
    if lower.endswith("ly") and len(lower) > 4:
        return lower, "ADV"
    for suffix, repl in (("ing", ""), ("ied", "y"), ("ed", ""), ("es", ""), ("s", "")):
        if lower.endswith(suffix) and len(lower) - len(suffix) >= 3:
            stem = lower[: len(lower) - len(suffix)] + repl
            base = lexicon.get(stem)
            if base is not None and base[1] == "VERB":
                return base[0], "VERB"
            if suffix in ("ing", "ed", "ied"):
                if len(stem) > 3 and stem[-1] == stem[-2]:
                    stem = stem[:-1]
                return stem, "VERB"
            if base is not None and base[1] == "NOUN" and suffix == "s":
                return base[0], "NOUN"
    return lower, "NOUN"


def split_sentences(text: str) -> list[str]:
    return [s for s in (p.strip() for p in _SENTENCE_END.split(text)) if s]


def _strip_headings(text: str, patterns: Sequence[str]) -> str:
    for pat in patterns:
        text = re.sub(pat, ". ", text, flags=re.IGNORECASE | re.MULTILINE)
    return text


def _read_tsv(doc: Document, config: TaggerConfig) -> list[Token]:
    tokens = []
    sentence = 0
    pending = False
    for line in doc.raw_text.splitlines():
        if not line.strip():
            if pending:
                sentence += 1
                pending = False
            continue
        surface, lemma, pos = line.rstrip("\n").split("\t")[:3]
        pos = pos.strip().upper()
        if pos not in POS_TAGS:
            pos = "OTHER"
        tokens.append(Token(surface, lemma, pos, sentence))
        pending = True
    return tokens


def tokenize(doc: Document, config: TaggerConfig | None = None) -> TokenStream:
    """Tag, lemmatize and filter ``doc`` down to its content-word lemmas.

    Stopwords are matched on the lowercased surface form. Proper nouns are
    detected before lowercasing (capitalized, not sentence-initial) and are
    dropped when ``config.keep_propn`` is false.
    """
    config = config or TaggerConfig()
    stop = config.resolved_stopwords()
    allowed = CONTENT_POS | ({"PROPN"} if config.keep_propn else set())

    if doc.pretagged:
        return TokenStream(doc.id, tuple(
            t for t in _read_tsv(doc, config)
            if t.pos in allowed and t.surface.lower() not in stop and t.lemma))

    lexicon = config.resolved_lexicon()
    text = doc.raw_text
    if config.strip_headings:
        text = _strip_headings(text, config.chapter_patterns)
    out = []
    for s_idx, sentence in enumerate(split_sentences(text)):
        for w_idx, match in enumerate(_WORD.finditer(sentence)):
            word = match.group()
            if word.lower() in stop:
                continue
            lemma, pos = _guess(word, w_idx == 0, lexicon)
            if pos in allowed:
                out.append(Token(word, lemma, pos, s_idx))
    return TokenStream(doc.id, tuple(out))


# --------------------------------------------------------------------------
# partitioning

def segment_equal(stream: TokenStream, n: int) -> list[Segment]:
    """Split ``stream`` into ``n`` contiguous segments whose sizes differ by at most one.

    The remainder tokens go to the leading segments.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    total = len(stream)
    if total < n:
        raise ShortTextError(f"{stream.doc_id}: {total} tokens < {n} segments")
    base, extra = divmod(total, n)
    out = []
    start = 0
    for i in range(n):
        size = base + (1 if i < extra else 0)
        out.append(Segment(stream.doc_id, i, stream.tokens[start:start + size]))
        start += size
    return out


def chunk_fixed(stream: TokenStream, chunk_size: int, merge_tail: bool = True) -> list[Chunk]:
    """Cut ``stream`` into ``chunk_size``-token chunks.

    A trailing chunk of at most ``chunk_size / 2`` tokens is folded into the previous
    chunk unless ``merge_tail`` is false.
    """
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    toks = stream.tokens
    if not toks:
        return []
    bounds = [(i, min(i + chunk_size, len(toks))) for i in range(0, len(toks), chunk_size)]
    if merge_tail and len(bounds) > 1 and (bounds[-1][1] - bounds[-1][0]) <= chunk_size / 2:
        tail = bounds.pop()
        bounds[-1] = (bounds[-1][0], tail[1])
    return [Chunk(stream.doc_id, i, toks[a:b]) for i, (a, b) in enumerate(bounds)]


def split_chapters(doc: Document, patterns: Sequence[str] = DEFAULT_CHAPTER_PATTERNS) -> ChapterSplit:
    """Locate chapter headings in ``doc.raw_text``.

    Text before the first heading is not a chapter. Fewer than two headings
    yields a split whose ``chapterless`` flag is set.
    """
    text = doc.raw_text
    starts: list[tuple[int, int]] = []
    for pat in patterns:
        for m in re.finditer(pat, text, flags=re.IGNORECASE | re.MULTILINE):
            starts.append((m.start(), m.end()))
    starts = sorted(set(starts))
    chapters = []
    for i, (a, head_end) in enumerate(starts):
        b = starts[i + 1][0] if i + 1 < len(starts) else len(text)
        chapters.append(Chapter(doc.id, i, text[a:head_end].strip(), a, b, text[head_end:b]))
    if len(chapters) < 2:
        log.info("%s: chapterless (%d heading(s) found)", doc.id, len(chapters))
    return ChapterSplit(tuple(chapters))


def chapter_documents(doc: Document, split: ChapterSplit) -> list[Document]:
    """Wrap each chapter body as a standalone Document for tokenization."""
    return [
        Document(f"{doc.id}#ch{c.index + 1}", doc.author, doc.title, doc.category, c.text, "")
        for c in split.chapters
    ]


# --------------------------------------------------------------------------
# lexical diversity

def ttr(stream: TokenStream | Segment | Sequence[str]) -> float:
    """Type-token ratio over lemmas."""
    lemmas = _lemmas(stream)
    if not lemmas:
        raise ValueError("ttr of an empty stream")
    return len(set(lemmas)) / len(lemmas)


def avq(stream: TokenStream | Segment) -> float:
    """Adjective-verb quotient."""
    pos = Counter(t.pos for t in stream.tokens)
    if pos["VERB"] == 0:
        raise UndefinedRatioError("avq undefined: no verbs")
    return pos["ADJ"] / pos["VERB"]


def _lemmas(stream) -> list[str]:
    if isinstance(stream, (TokenStream, Segment)):
        return stream.lemmas
    return list(stream)
