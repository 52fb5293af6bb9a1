"""Embedding-based sentiment scoring.

A word's affective-aesthetic potential (AAP) is its mean cosine similarity to
a set of positive label words minus its mean similarity to negative labels.
Discrete emotions (happiness, fear, ...) score a word by its mean similarity
to that emotion's labels, optionally z-scored against the whole embedding
vocabulary.
"""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import TokenStream, read_word_list
from .topics import TopicModel, top_words
from .vectorspace import EmbeddingTable, ZeroVectorError

log = logging.getLogger(__name__)

SCORED_POS = frozenset({"NOUN", "VERB"})


class SentimentError(ValueError):
    pass


@dataclass(frozen=True)
class LabelSet:
    name: str
    labels: tuple[str, ...]

    @classmethod
    def from_file(cls, path: str | Path, name: str | None = None) -> "LabelSet":
        path = Path(path)
        return cls(name or path.stem, tuple(w.lower() for w in read_word_list(path)))

    @classmethod
    def bundled(cls, name: str) -> "LabelSet":
        return cls(name, tuple(w.lower() for w in read_word_list(asset=f"{name}.txt")))

    def resolve(self, table: EmbeddingTable) -> np.ndarray:
        """Unit-normalized label vectors; labels missing from ``table`` are dropped."""
        found = [w for w in self.labels if w in table]
        missing = len(self.labels) - len(found)
        if missing:
            log.warning("label set %r: %d label(s) not in embedding table", self.name, missing)
        if not found:
            raise SentimentError(f"label set {self.name!r}: no label resolvable in the table")
        m = np.asarray([table[w] for w in found], dtype=float)
        norms = np.linalg.norm(m, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise ZeroVectorError(f"label set {self.name!r} contains a zero vector")
        return m / norms


def _mean_cos(vec: np.ndarray, unit_labels: np.ndarray) -> float:
    norm = np.linalg.norm(vec)
    if norm == 0:
        raise ZeroVectorError("zero word vector")
    return float((unit_labels @ (vec / norm)).mean())


def aap(word: str, table: EmbeddingTable, pos_labels: LabelSet, neg_labels: LabelSet) -> float | None:
    """AAP of ``word``; ``None`` when the word is not in the table."""
    vec = table.get(word)
    if vec is None:
        return None
    return _mean_cos(vec, pos_labels.resolve(table)) - _mean_cos(vec, neg_labels.resolve(table))


def emotion_score(word: str, table: EmbeddingTable, labelset: LabelSet,
                  z_normalize: bool = False) -> float | None:
    vec = table.get(word)
    if vec is None:
        return None
    unit = labelset.resolve(table)
    raw = _mean_cos(vec, unit)
    if not z_normalize:
        return raw
    mean, sd = _vocab_stats(table, unit)
    return (raw - mean) / sd


def _vocab_stats(table: EmbeddingTable, unit_labels: np.ndarray) -> tuple[float, float]:
    m = table.matrix
    norms = np.linalg.norm(m, axis=1)
    ok = norms > 0
    scores = (m[ok] / norms[ok, None]) @ unit_labels.T
    per_word = scores.mean(axis=1)
    sd = per_word.std()
    if sd == 0:
        raise SentimentError("emotion scores are constant over the vocabulary")
    return float(per_word.mean()), float(sd)


class SentimentScorer:
    """Precomputes label matrices so corpus-scale scoring stays cheap.

    Holds no mutable state after construction and can be shared between threads.
    """

    def __init__(self, table: EmbeddingTable, positive: LabelSet, negative: LabelSet,
                 emotions: Sequence[LabelSet] = (), z_normalize: bool = True):
        self.table = table
        self.z_normalize = z_normalize
        self._pos = positive.resolve(table)
        self._neg = negative.resolve(table)
        self.emotion_names = tuple(e.name for e in emotions)
        self._emo = [e.resolve(table) for e in emotions]
        self._emo_stats = [_vocab_stats(table, u) if z_normalize else (0.0, 1.0) for u in self._emo]
        self._cache: dict[str, tuple[float, ...] | None] = {}

    def word_scores(self, word: str) -> tuple[float, ...] | None:
        """``(aap, *emotion scores)`` for ``word``, or ``None`` if OOV or zero-norm."""
        if word in self._cache:
            return self._cache[word]
        vec = self.table.get(word)
        out = None
        if vec is not None and np.any(vec):
            unit = vec / np.linalg.norm(vec)
            a = float((self._pos @ unit).mean() - (self._neg @ unit).mean())
            emos = tuple(float(((u @ unit).mean() - mu) / sd)
                         for u, (mu, sd) in zip(self._emo, self._emo_stats))
            out = (a, *emos)
        self._cache[word] = out
        return out

    def aap(self, word: str) -> float | None:
        s = self.word_scores(word)
        return None if s is None else s[0]


@dataclass(frozen=True)
class SentimentProfile:
    subject: str
    aap_mean: float
    emotions: Mapping[str, float] = field(default_factory=dict)
    n_items: int = 1


def text_sentiment(stream: TokenStream, scorer: SentimentScorer,
                   pos_set: frozenset[str] = SCORED_POS) -> SentimentProfile:
    """Average word scores within each sentence, then average over sentences."""
    sentence_means = []
    for sentence in stream.sentences():
        rows = [s for s in (scorer.word_scores(t.lemma) for t in sentence if t.pos in pos_set)
                if s is not None]
        if rows:
            sentence_means.append(np.mean(rows, axis=0))
    if not sentence_means:
        raise SentimentError(f"{stream.doc_id}: no scorable sentence")
    mean = np.mean(sentence_means, axis=0)
    return SentimentProfile(stream.doc_id, float(mean[0]),
                            dict(zip(scorer.emotion_names, map(float, mean[1:]))),
                            len(sentence_means))


def topic_happiness(model: TopicModel, topic: int, scorer: SentimentScorer, n: int = 50) -> float:
    """Mean AAP of the in-vocabulary words among the topic's ``n`` top words."""
    vals = [a for a in (scorer.aap(w) for w, _ in top_words(model, topic, n)) if a is not None]
    if not vals:
        raise SentimentError(f"topic {topic}: no top word in the embedding table")
    return float(np.mean(vals))


def aggregate_profiles(profiles: Sequence[SentimentProfile],
                       groups: Mapping[str, str]) -> list[SentimentProfile]:
    """Average member profiles per group (``groups`` maps subject -> group key).

    Returned happiest first: descending ``aap_mean``, ties by group name.
    """
    members: dict[str, list[SentimentProfile]] = defaultdict(list)
    for p in profiles:
        members[groups[p.subject]].append(p)
    out = []
    for key, ps in members.items():
        names = list(ps[0].emotions)
        out.append(SentimentProfile(
            key,
            float(np.mean([p.aap_mean for p in ps])),
            {n: float(np.mean([p.emotions[n] for p in ps])) for n in names},
            len(ps),
        ))
    out.sort(key=lambda p: (-p.aap_mean, p.subject))
    return out


def write_profiles_csv(profiles: Sequence[SentimentProfile], path: str | Path,
                       emotion_names: Sequence[str] = ("happiness", "fear")) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject", "aap", *emotion_names, "n"])
        for p in profiles:
            w.writerow([p.subject, repr(p.aap_mean),
                        *(repr(p.emotions[n]) if n in p.emotions else "" for n in emotion_names),
                        p.n_items])
