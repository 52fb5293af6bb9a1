"""Semantic-complexity measures of a text.

Lexical: per-segment Shannon entropy and its decay over the text.
Literariness: intra-textual variance (ITV) and stepwise distance (SWD) of
chunk embeddings. Creativity: forward flow (FF) over word sequences.
Beauty: harmony and variety of chapter topic distributions, compared with
the Hellinger distance.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .corpus import Segment, TokenStream, segment_equal
from .stats import FitResult, polyfit
from .vectorspace import EmbeddingTable

NORMALIZATION_TOL = 1e-6


class ComplexityError(ValueError):
    pass


class ChapterlessError(ComplexityError):
    pass


# --------------------------------------------------------------------------
# entropy and vocabulary decay

@dataclass(frozen=True)
class EntropyProfile:
    doc_id: str
    h: np.ndarray
    log_base: float = 2.0


def shannon_entropy(items: Sequence[str], base: float = 2.0) -> float:
    if len(items) == 0:
        raise ComplexityError("entropy of an empty segment")
    counts = np.fromiter(Counter(items).values(), dtype=float)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum() / math.log(base)) + 0.0


def segment_entropy(segments: Sequence[Segment | Sequence[str]], doc_id: str = "",
                    base: float = 2.0) -> EntropyProfile:
    h = np.array([shannon_entropy(s.lemmas if isinstance(s, Segment) else s, base)
                  for s in segments])
    if not doc_id and segments and isinstance(segments[0], Segment):
        doc_id = segments[0].doc_id
    return EntropyProfile(doc_id, h, base)


def entropy_profile(stream: TokenStream, n_segments: int = 100) -> EntropyProfile:
    return segment_entropy(segment_equal(stream, n_segments), stream.doc_id)


def smooth_rolling(values, window: int = 10) -> np.ndarray:
    """Trailing rolling mean; the first ``window - 1`` entries average the available prefix."""
    v = np.asarray(getattr(values, "h", values), dtype=float)
    if window < 1 or window > len(v):
        raise ValueError("window must lie in [1, len(values)]")
    return np.array([v[max(0, i - window + 1):i + 1].mean() for i in range(len(v))])


def standardize(values) -> np.ndarray:
    v = np.asarray(getattr(values, "h", values), dtype=float)
    sd = v.std()
    if sd == 0:
        raise ComplexityError("cannot standardize a constant profile")
    return (v - v.mean()) / sd


@dataclass(frozen=True)
class DecayFit:
    coeffs: np.ndarray
    r2_adj: float
    f_ratio: float
    p_value: float
    decaying: bool
    bucket_means: np.ndarray
    fit: FitResult | None


def bucket_means(values, n_buckets: int) -> np.ndarray:
    v = np.asarray(getattr(values, "h", values), dtype=float)
    if n_buckets < 1 or len(v) % n_buckets:
        raise ValueError(f"profile of length {len(v)} does not split into {n_buckets} buckets")
    return v.reshape(n_buckets, -1).mean(axis=1)


def decay_fit(profile, n_buckets: int = 10, alpha: float = 0.05, degree: int = 3) -> DecayFit:
    """Cubic least-squares fit to bucket-averaged entropies.

    A profile is flagged as decaying when the fit is significant at ``alpha``
    and the last bucket mean is below the first.
    """
    means = bucket_means(profile, n_buckets)
    x = np.arange(1, n_buckets + 1, dtype=float)
    if np.ptp(means) == 0:
        return DecayFit(np.r_[means[0], np.zeros(degree)], 0.0, 0.0, 1.0, False, means, None)
    fit = polyfit(x, means, degree)
    decaying = fit.p_value < alpha and means[-1] < means[0]
    return DecayFit(fit.coefficients, fit.r2_adj, fit.f_ratio, fit.p_value, bool(decaying),
                    means, fit)


# --------------------------------------------------------------------------
# chunk-level literariness

def _as_matrix(vectors) -> np.ndarray:
    m = np.asarray(vectors, dtype=float)
    if m.ndim != 2:
        raise ComplexityError("expected a sequence of equal-length vectors")
    return m


def intra_textual_variance(vectors) -> float:
    """Mean squared Euclidean distance of chunk vectors from their centroid."""
    m = _as_matrix(vectors)
    if len(m) < 1:
        raise ComplexityError("ITV needs at least one chunk")
    d = m - m.mean(axis=0)
    return float(np.einsum("ij,ij->i", d, d).mean())


def stepwise_distance(vectors) -> float:
    """Mean squared Euclidean distance between consecutive chunk vectors."""
    m = _as_matrix(vectors)
    if len(m) < 2:
        raise ComplexityError("SWD needs at least two chunks")
    d = np.diff(m, axis=0)
    return float(np.einsum("ij,ij->i", d, d).mean())


# --------------------------------------------------------------------------
# forward flow

def forward_flow(vectors) -> float:
    """Mean over words 2..n of the word's mean cosine distance to all preceding words.

    Zero-norm vectors are dropped before scoring.
    """
    m = np.asarray(vectors, dtype=float)
    if m.ndim != 2:
        raise ComplexityError("expected a sequence of equal-length vectors")
    norms = np.linalg.norm(m, axis=1)
    m = m[norms > 0] / norms[norms > 0, None]
    n = len(m)
    if n < 2:
        raise ComplexityError("forward flow needs at least two usable words")
    dist = 1.0 - np.clip(m @ m.T, -1.0, 1.0)
    lower = np.tril(dist, k=-1)
    per_word = lower[1:].sum(axis=1) / np.arange(1, n)
    return float(per_word.mean())


def doc_forward_flow(stream: TokenStream, table: EmbeddingTable) -> float:
    """Average the per-sentence forward flow over sentences with >= 2 in-vocabulary words."""
    scores = []
    for sentence in stream.sentences():
        vecs = [v for v in (table.get(t.lemma) for t in sentence) if v is not None]
        vecs = [v for v in vecs if np.any(v)]
        if len(vecs) >= 2:
            scores.append(forward_flow(vecs))
    if not scores:
        raise ComplexityError(f"{stream.doc_id}: no sentence with two scorable words")
    return float(np.mean(scores))


# --------------------------------------------------------------------------
# beauty

def _check_distribution(p: np.ndarray, name: str) -> None:
    if np.any(p < 0) or abs(p.sum() - 1.0) > NORMALIZATION_TOL:
        raise ComplexityError(f"{name} is not a normalized probability distribution")


def hellinger(p, q) -> float:
    p = np.asarray(getattr(p, "probabilities", p), dtype=float)
    q = np.asarray(getattr(q, "probabilities", q), dtype=float)
    if p.shape != q.shape:
        raise ComplexityError("distributions differ in length")
    _check_distribution(p, "P")
    _check_distribution(q, "Q")
    return float(min(1.0, np.sqrt(((np.sqrt(p) - np.sqrt(q)) ** 2).sum()) / math.sqrt(2.0)))


def harmony(book, chapters) -> float:
    """Mean Hellinger distance between the whole-book distribution and each chapter's."""
    if len(chapters) < 2:
        raise ChapterlessError("harmony needs at least two chapters")
    return float(np.mean([hellinger(book, c) for c in chapters]))


def variety(chapters) -> float:
    """Mean Hellinger distance over all unordered pairs of chapters."""
    if len(chapters) < 2:
        raise ChapterlessError("variety needs at least two chapters")
    return float(np.mean([hellinger(a, b) for a, b in combinations(chapters, 2)]))


def beauty_predicate(harm: float, vari: float) -> bool:
    if not (math.isfinite(harm) and math.isfinite(vari)) or harm < 0 or vari < 0:
        raise ValueError("harmony and variety must be finite and non-negative")
    return vari > harm


@dataclass(frozen=True)
class BeautyAssessment:
    doc_id: str
    harmony: float
    variety: float

    @property
    def beautiful(self) -> bool:
        return beauty_predicate(self.harmony, self.variety)


def rank_beauty(items: Sequence[BeautyAssessment]) -> list[BeautyAssessment]:
    """Order books from most to least beautiful.

    Books satisfying the predicate come first; within each group, higher
    variety ranks higher, then lower harmony value (more harmonious), then id.
    """
    return sorted(items, key=lambda b: (not b.beautiful, -b.variety, b.harmony, b.doc_id))
