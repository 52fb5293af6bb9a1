"""Word-embedding table and the vector arithmetic built on it."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)


class EmbeddingFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EmptyInputError(ValueError):
    pass


class AllOOVError(ValueError):
    pass


class ZeroVectorError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingTable:
    """Immutable word -> vector map. Keys are lowercased on load and on lookup."""

    words: tuple[str, ...]
    matrix: np.ndarray
    duplicates: int = 0
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self._index:
            self._index.update({w: i for i, w in enumerate(self.words)})
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._index

    def get(self, word: str) -> np.ndarray | None:
        i = self._index.get(word.lower())
        return None if i is None else self.matrix[i]

    def __getitem__(self, word: str) -> np.ndarray:
        vec = self.get(word)
        if vec is None:
            raise KeyError(word)
        return vec

    def coverage(self, words: Iterable[str]) -> float:
        words = list(words)
        if not words:
            return 0.0
        return sum(w.lower() in self._index for w in words) / len(words)

    @classmethod
    def from_dict(cls, mapping: dict[str, Sequence[float]]) -> "EmbeddingTable":
        words = tuple(w.lower() for w in mapping)
        matrix = np.asarray([np.asarray(v, dtype=float) for v in mapping.values()], dtype=float)
        if not np.all(np.isfinite(matrix)):
            raise EmbeddingFormatError("non-finite vector component")
        return cls(words, matrix)


def load_embeddings(path: str | Path) -> EmbeddingTable:
    """Read a whitespace-delimited text embedding file.

    The first line is ``count dim``; each following line is ``word v1 ... v_dim``.
    Duplicate words keep their first vector and are counted in ``duplicates``.
    """
    words: list[str] = []
    rows: list[list[float]] = []
    seen: set[str] = set()
    dupes = 0
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise EmbeddingFormatError("header must be 'count dim'", 1)
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise EmbeddingFormatError("header must be two integers", 1) from None
        if count < 0 or dim < 1:
            raise EmbeddingFormatError("bad count/dim in header", 1)
        n_rows = 0
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            n_rows += 1
            if len(parts) != dim + 1:
                raise EmbeddingFormatError(f"expected {dim + 1} fields, got {len(parts)}", lineno)
            try:
                vec = [float(x) for x in parts[1:]]
            except ValueError:
                raise EmbeddingFormatError("non-numeric component", lineno) from None
            if not all(np.isfinite(vec)):
                raise EmbeddingFormatError("non-finite component", lineno)
            word = parts[0].lower()
            if word in seen:
                dupes += 1
                continue
            seen.add(word)
            words.append(word)
            rows.append(vec)
    if n_rows != count:
        raise EmbeddingFormatError(f"header declares {count} rows, file has {n_rows}")
    if dupes:
        log.warning("%s: %d duplicate word row(s) ignored", path, dupes)
    matrix = np.asarray(rows, dtype=float).reshape(len(rows), dim)
    return EmbeddingTable(tuple(words), matrix, duplicates=dupes)


def save_embeddings(table: EmbeddingTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table)} {table.dim}\n")
        for word, vec in zip(table.words, table.matrix):
            fh.write(word + " " + " ".join(repr(float(x)) for x in vec) + "\n")


def centroid(vectors: Sequence[np.ndarray]) -> np.ndarray:
    if len(vectors) == 0:
        raise EmptyInputError("centroid of no vectors")
    return np.mean(np.asarray(vectors, dtype=float), axis=0)


def chunk_vector(lemmas: Sequence[str], table: EmbeddingTable) -> tuple[np.ndarray, float]:
    """Mean embedding of the in-vocabulary lemmas, plus the fraction that was OOV."""
    if len(lemmas) == 0:
        raise EmptyInputError("empty chunk")
    hits = [v for v in (table.get(w) for w in lemmas) if v is not None]
    if not hits:
        raise AllOOVError("every token in the chunk is out of vocabulary")
    return np.mean(hits, axis=0), 1.0 - len(hits) / len(lemmas)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVectorError("cosine of a zero vector")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def sq_euclidean(a: np.ndarray, b: np.ndarray) -> float:
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    return float(np.dot(d, d))


def cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise cosines between the rows of ``a`` and the rows of ``b``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    na = np.linalg.norm(a, axis=1, keepdims=True)
    nb = np.linalg.norm(b, axis=1, keepdims=True)
    if np.any(na == 0) or np.any(nb == 0):
        raise ZeroVectorError("cosine of a zero vector")
    return np.clip((a / na) @ (b / nb).T, -1.0, 1.0)
