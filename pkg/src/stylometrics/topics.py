"""LDA topic models fit by collapsed Gibbs sampling.

The sampler consumes one block of uniforms per sweep drawn from a numpy
``Generator`` seeded by the caller, so a fixed seed reproduces every count
matrix exactly.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numba
import numpy as np

from .corpus import TokenStream

MODEL_FORMAT_VERSION = 1
REPORT_THRESHOLD = 0.001


class TopicModelError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    frequencies: tuple[int, ...]
    document_frequencies: tuple[int, ...]
    min_freq: int
    pos_set: tuple[str, ...]
    exclude_propn: bool
    index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.index:
            self.index.update({w: i for i, w in enumerate(self.words)})

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def encode(self, lemmas: Iterable[str]) -> np.ndarray:
        idx = self.index
        return np.array([idx[w] for w in lemmas if w in idx], dtype=np.int64)


def build_vocab(streams: Sequence[TokenStream], min_freq: int = 100,
                pos_set: Iterable[str] = ("NOUN", "VERB"),
                exclude_propn: bool = True) -> Vocabulary:
    """Collect lemmas with the wanted POS and corpus frequency >= ``min_freq``.

    Ids follow descending frequency; ties are broken lexicographically.
    """
    pos = set(pos_set)
    if exclude_propn:
        pos.discard("PROPN")
    freq: Counter = Counter()
    dfreq: Counter = Counter()
    for s in streams:
        lemmas = [t.lemma for t in s.tokens if t.pos in pos]
        freq.update(lemmas)
        dfreq.update(set(lemmas))
    kept = sorted((w for w, c in freq.items() if c >= min_freq), key=lambda w: (-freq[w], w))
    if not kept:
        raise TopicModelError(f"empty vocabulary (min_freq={min_freq}, pos={sorted(pos)})")
    return Vocabulary(tuple(kept), tuple(freq[w] for w in kept), tuple(dfreq[w] for w in kept),
                      min_freq, tuple(sorted(pos)), exclude_propn)


@dataclass(frozen=True)
class TopicDistribution:
    probabilities: np.ndarray
    threshold: float = REPORT_THRESHOLD

    def __post_init__(self):
        p = self.probabilities
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise TopicModelError("topic distribution is not normalized")

    @property
    def above_threshold(self) -> np.ndarray:
        return self.probabilities >= self.threshold

    def __len__(self) -> int:
        return len(self.probabilities)


@dataclass
class TopicModel:
    n_topics: int
    alpha: float
    beta: float
    iterations: int
    seed: int
    vocabulary: tuple[str, ...]
    topic_word: np.ndarray  # (K, V) int64
    doc_topic: np.ndarray  # (D, K) int64
    doc_ids: tuple[str, ...] = ()

    def __post_init__(self):
        self._index = {w: i for i, w in enumerate(self.vocabulary)}

    @property
    def n_words(self) -> int:
        return len(self.vocabulary)

    def word_index(self, word: str) -> int | None:
        return self._index.get(word)

    def topic_word_distribution(self) -> np.ndarray:
        nkw = self.topic_word.astype(float)
        return (nkw + self.beta) / (nkw.sum(axis=1, keepdims=True) + self.beta * self.n_words)

    def doc_topic_distribution(self) -> np.ndarray:
        ndk = self.doc_topic.astype(float)
        return (ndk + self.alpha) / (ndk.sum(axis=1, keepdims=True) + self.alpha * self.n_topics)

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "n_topics": self.n_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "seed": self.seed,
            "vocabulary": list(self.vocabulary),
            "doc_ids": list(self.doc_ids),
            "topic_word": self.topic_word.tolist(),
            "doc_topic": self.doc_topic.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TopicModel":
        if data.get("format_version") != MODEL_FORMAT_VERSION:
            raise TopicModelError(f"unsupported model format {data.get('format_version')!r}")
        k = data["n_topics"]
        return cls(k, data["alpha"], data["beta"], data["iterations"], data["seed"],
                   tuple(data["vocabulary"]),
                   np.asarray(data["topic_word"], dtype=np.int64).reshape(k, -1),
                   np.asarray(data["doc_topic"], dtype=np.int64).reshape(-1, k),
                   tuple(data["doc_ids"]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), separators=(",", ":")) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TopicModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@numba.njit(cache=True)
def _gibbs_sweep(words, docs, z, nkw, ndk, nk, u, alpha, beta, vbeta):
    n_topics = nk.shape[0]
    probs = np.empty(n_topics)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        nkw[k, w] -= 1
        ndk[d, k] -= 1
        nk[k] -= 1
        total = 0.0
        for t in range(n_topics):
            total += (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + vbeta)
            probs[t] = total
        r = u[i] * total
        k = n_topics - 1
        for t in range(n_topics):
            if r < probs[t]:
                k = t
                break
        z[i] = k
        nkw[k, w] += 1
        ndk[d, k] += 1
        nk[k] += 1


@numba.njit(cache=True)
def _foldin_sweep(words, z, phi, ndk, u, alpha):
    n_topics = ndk.shape[0]
    probs = np.empty(n_topics)
    for i in range(words.shape[0]):
        w = words[i]
        ndk[z[i]] -= 1
        total = 0.0
        for t in range(n_topics):
            total += (ndk[t] + alpha) * phi[t, w]
            probs[t] = total
        r = u[i] * total
        k = n_topics - 1
        for t in range(n_topics):
            if r < probs[t]:
                k = t
                break
        z[i] = k
        ndk[k] += 1


def fit_lda(docs: Sequence[np.ndarray], n_words: int, n_topics: int = 50,
            iterations: int = 2500, alpha: float | None = None, beta: float = 0.01,
            seed: int = 1, vocabulary: Sequence[str] | None = None,
            doc_ids: Sequence[str] = (),
            on_sweep: Callable[[int, np.ndarray, np.ndarray, np.ndarray], None] | None = None,
            ) -> TopicModel:
    """Fit LDA to documents given as arrays of word ids in ``range(n_words)``.

    ``alpha`` defaults to ``50 / n_topics``. ``on_sweep(i, nkw, ndk, nk)`` is
    called after every sweep with the live count arrays (read-only use).
    """
    if n_topics < 1:
        raise TopicModelError("n_topics must be >= 1")
    if n_topics > n_words:
        raise TopicModelError(f"n_topics={n_topics} exceeds vocabulary size {n_words}")
    docs = [np.asarray(d, dtype=np.int64) for d in docs]
    if not docs or sum(len(d) for d in docs) == 0:
        raise TopicModelError("empty training corpus")
    if alpha is None:
        alpha = 50.0 / n_topics
    if vocabulary is None:
        vocabulary = tuple(str(i) for i in range(n_words))
    if len(vocabulary) != n_words:
        raise TopicModelError("vocabulary length does not match n_words")

    words = np.concatenate(docs)
    if words.min() < 0 or words.max() >= n_words:
        raise TopicModelError("word id out of range")
    doc_of = np.repeat(np.arange(len(docs), dtype=np.int64), [len(d) for d in docs])

    rng = np.random.default_rng(seed)
    z = rng.integers(0, n_topics, size=len(words)).astype(np.int64)
    nkw = np.zeros((n_topics, n_words), dtype=np.int64)
    ndk = np.zeros((len(docs), n_topics), dtype=np.int64)
    np.add.at(nkw, (z, words), 1)
    np.add.at(ndk, (doc_of, z), 1)
    nk = nkw.sum(axis=1)

    for sweep in range(iterations):
        u = rng.random(len(words))
        _gibbs_sweep(words, doc_of, z, nkw, ndk, nk, u, float(alpha), float(beta),
                     float(beta) * n_words)
        if on_sweep is not None:
            on_sweep(sweep, nkw, ndk, nk)

    return TopicModel(n_topics, float(alpha), float(beta), iterations, seed,
                      tuple(vocabulary), nkw, ndk, tuple(doc_ids))


def top_words(model: TopicModel, topic: int, n: int = 50) -> list[tuple[str, float]]:
    """The ``n`` most probable words of ``topic``; equal probabilities sort lexicographically."""
    if not 0 <= topic < model.n_topics:
        raise IndexError(f"topic {topic} out of range")
    phi = model.topic_word_distribution()[topic]
    counts = model.topic_word[topic]
    order = sorted(range(model.n_words), key=lambda i: (-counts[i], model.vocabulary[i]))
    return [(model.vocabulary[i], float(phi[i])) for i in order[:n]]


def infer_topics(model: TopicModel, lemmas: Sequence[str], iterations: int = 200,
                 seed: int = 1, burn_in: int | None = None) -> TopicDistribution:
    """Estimate a document's topic mixture with the model's topic-word counts held fixed.

    The estimate averages the smoothed doc-topic proportions over the sweeps
    after ``burn_in`` (default: half of ``iterations``).
    """
    ids = np.array([i for i in (model.word_index(w) for w in lemmas) if i is not None],
                   dtype=np.int64)
    if len(ids) == 0:
        raise TopicModelError("document has no words in the model vocabulary")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if burn_in is None:
        burn_in = iterations // 2
    burn_in = min(burn_in, iterations - 1)
    phi = model.topic_word_distribution()
    k = model.n_topics
    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=len(ids)).astype(np.int64)
    ndk = np.bincount(z, minlength=k).astype(np.int64)
    acc = np.zeros(k)
    kept = 0
    denom = len(ids) + k * model.alpha
    for sweep in range(iterations):
        _foldin_sweep(ids, z, phi, ndk, rng.random(len(ids)), float(model.alpha))
        if sweep >= burn_in:
            acc += (ndk + model.alpha) / denom
            kept += 1
    theta = acc / kept
    return TopicDistribution(theta / theta.sum())


def coherence_umass(model: TopicModel, docs: Sequence[Iterable[str]], top_n: int = 10) -> float:
    """Mean UMass coherence over topics.

    Per topic: sum over ranked top-word pairs (w_i after w_j) of
    log((D(w_i, w_j) + 1) / D(w_j)), with D counting documents.
    """
    doc_sets = [set(d) for d in docs]
    scores = []
    for t in range(model.n_topics):
        words = [w for w, _ in top_words(model, t, top_n)]
        present = {w: {i for i, s in enumerate(doc_sets) if w in s} for w in words}
        total = 0.0
        for j, i in combinations(range(len(words)), 2):
            dj = present[words[j]]
            if not dj:
                continue
            co = len(present[words[i]] & dj)
            total += math.log((co + 1) / len(dj))
        scores.append(total)
    return float(np.mean(scores))


def write_top_words_csv(model: TopicModel, path: str | Path, n: int = 50) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["topic", "rank", "word", "probability"])
        for t in range(model.n_topics):
            for rank, (word, p) in enumerate(top_words(model, t, n), start=1):
                w.writerow([t, rank, word, repr(p)])
