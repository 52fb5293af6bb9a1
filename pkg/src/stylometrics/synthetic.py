"""Seeded synthetic data with known generative structure.

Used by the test suite and by ``stylometrics fixture`` to build a small
end-to-end corpus (texts, manifest, embeddings and label sets).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import CATEGORIES, default_lexicon, read_word_list
from .learn import FeatureTable
from .vectorspace import EmbeddingTable, save_embeddings

ROMAN = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII"]

# lemma clusters used both for topical text generation and for embedding geometry
THEMES = {
    "sea": "ship sea sailor wave island captain boat harbor storm wind shore sail voyage crew "
           "swim row sink",
    "war": "soldier army war battle enemy sword gun fort camp general officer flag horse victory "
           "fight march shoot kill",
    "family": "mother father child family home house garden kitchen table door window room "
              "sister brother baby eat sleep",
    "romance": "love heart kiss lady gentleman marriage wedding letter dance ball rose flower "
               "friend smile marry laugh",
    "court": "king queen crown court castle throne prince lord servant knight palace duke rule "
             "command serve",
    "faith": "sin soul god heaven hell church prayer faith angel spirit devil grace mercy "
             "judgment pray die weep",
    "nature": "forest tree river mountain field hill valley sky sun moon star earth light night "
              "morning cloud grow shine wander",
    "learning": "book school teacher lesson word page story question answer idea reason mind "
                "thought truth knowledge read write learn teach think know",
    "trade": "money business trade market price bank merchant debt bill plague street city town "
             "village road buy sell pay",
}
POSITIVE = ("love joy happiness delight peace hope beauty kindness comfort pleasure laughter smile "
            "friend gift grace happy merry sweet dear kind gentle").split()
NEGATIVE = ("hate fear terror pain grief misery despair murder crime death anger sorrow sin "
            "danger prison ghost shadow dark cruel evil grave").split()

CATEGORY_THEMES = {
    "children": ("sea", "family", "learning"),
    "essays": ("learning", "trade", "nature"),
    "novels": ("romance", "family", "court"),
    "plays": ("court", "war", "faith"),
    "poems": ("nature", "faith", "romance"),
    "stories": ("sea", "war", "trade"),
}
CATEGORY_AFFECT = {"children": 0.1, "essays": 0.6, "novels": 0.3, "plays": -0.6,
                   "poems": 0.0, "stories": 0.4}
CHAPTERED = {"children", "essays", "novels", "stories"}


# --------------------------------------------------------------------------
# bag-of-words and profile generators

def lda_corpus(n_docs: int = 300, n_topics: int = 3, words_per_topic: int = 50,
               doc_len: tuple[int, int] = (80, 120), concentration: float = 0.1,
               seed: int = 0) -> tuple[list[np.ndarray], np.ndarray]:
    """Documents over disjoint per-topic vocabularies.

    Topic ``k`` owns word ids ``[k * words_per_topic, (k + 1) * words_per_topic)``
    with Zipf-like weights. Returns (docs, dominant topic per doc).
    """
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, words_per_topic + 1) ** 0.5
    weights /= weights.sum()
    docs, dominant = [], []
    for _ in range(n_docs):
        theta = rng.dirichlet([concentration] * n_topics)
        n = int(rng.integers(doc_len[0], doc_len[1] + 1))
        z = rng.choice(n_topics, size=n, p=theta)
        w = rng.choice(words_per_topic, size=n, p=weights)
        docs.append((z * words_per_topic + w).astype(np.int64))
        dominant.append(int(np.argmax(theta)))
    return docs, np.asarray(dominant)


def single_topic_doc(topic: int, length: int, words_per_topic: int = 50, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    weights = 1.0 / np.arange(1, words_per_topic + 1) ** 0.5
    weights /= weights.sum()
    return (topic * words_per_topic + rng.choice(words_per_topic, size=length, p=weights)).astype(np.int64)


def decaying_text(n_segments: int = 100, segment_len: int = 60, vocab_start: int = 400,
                  vocab_end: int = 400, seed: int = 0) -> list[list[str]]:
    """Segments whose usable vocabulary shrinks linearly from ``vocab_start`` to ``vocab_end``."""
    rng = np.random.default_rng(seed)
    sizes = np.linspace(vocab_start, vocab_end, n_segments).round().astype(int)
    return [[f"w{i}" for i in rng.integers(0, v, size=segment_len)] for v in sizes]


def diversity_segments(n_segments: int = 200, segment_len: int = 80, seed: int = 0
                       ) -> list[list[str]]:
    """Segments drawn from vocabularies whose size varies from 5 to 300 words."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_segments):
        v = int(rng.integers(5, 301))
        out.append([f"w{i}" for i in rng.integers(0, v, size=segment_len)])
    return out


def gaussian_blobs(n_classes: int = 4, n_per_class: int = 200, n_features: int = 5,
                   separation: float = 5.0, seed: int = 0,
                   feature_names: tuple[str, ...] | None = None) -> FeatureTable:
    """Unit-variance Gaussian classes on orthogonal axes.

    Any two class centers are ``separation`` standard deviations apart (as long
    as ``n_classes <= n_features``).
    """
    if n_classes > n_features:
        raise ValueError("need at least as many features as classes")
    rng = np.random.default_rng(seed)
    centers = np.zeros((n_classes, n_features))
    for c in range(n_classes):
        centers[c, c] = separation / np.sqrt(2.0)
    X = np.vstack([centers[c] + rng.standard_normal((n_per_class, n_features))
                   for c in range(n_classes)])
    labels = tuple(f"class{c}" for c in range(n_classes) for _ in range(n_per_class))
    names = feature_names or tuple(f"f{i}" for i in range(n_features))
    ids = tuple(f"row{i:04d}" for i in range(len(X)))
    return FeatureTable(ids, names, X, labels)


# --------------------------------------------------------------------------
# embeddings

def lexicon_forms() -> dict[str, dict[str, list[str]]]:
    """pos -> lemma -> surface forms, from the bundled lexicon."""
    out: dict[str, dict[str, list[str]]] = {}
    for form, (lemma, pos) in sorted(default_lexicon().items()):
        out.setdefault(pos, {}).setdefault(lemma, []).append(form)
    return out


def make_embeddings(dim: int = 50, seed: int = 0, noise: float = 0.35) -> EmbeddingTable:
    """Vectors for every bundled-lexicon lemma, clustered by theme and shifted by affect."""
    rng = np.random.default_rng(seed)
    centers = {t: rng.standard_normal(dim) for t in THEMES}
    affect = rng.standard_normal(dim)
    affect /= np.linalg.norm(affect)
    theme_of = {}
    for theme, words in THEMES.items():
        for w in words.split():
            theme_of.setdefault(w, theme)
    lemmas = sorted({lemma for lemma, _ in default_lexicon().values()})
    mapping = {}
    for lemma in lemmas:
        base = centers[theme_of[lemma]] if lemma in theme_of else np.zeros(dim)
        valence = 1.0 if lemma in POSITIVE else -1.0 if lemma in NEGATIVE else 0.0
        vec = base * 0.6 + valence * 2.5 * affect + noise * rng.standard_normal(dim) * 3
        mapping[lemma] = np.round(vec, 6)
    return EmbeddingTable.from_dict(mapping)


# --------------------------------------------------------------------------
# end-to-end fixture corpus

@dataclass(frozen=True)
class FixturePaths:
    root: Path
    manifest: Path
    embeddings: Path
    positive: Path
    negative: Path
    config: Path


class _TextWriter:
    """Generates English-like sentences from the bundled lexicon."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.forms = lexicon_forms()
        theme_of = {}
        for theme, words in THEMES.items():
            for w in words.split():
                theme_of.setdefault(w, theme)
        self.by_theme = {t: {"NOUN": [], "VERB": []} for t in THEMES}
        for pos in ("NOUN", "VERB"):
            for lemma in self.forms[pos]:
                if lemma in theme_of:
                    self.by_theme[theme_of[lemma]][pos].append(lemma)
        self.adjs = sorted(self.forms["ADJ"])
        self.advs = sorted(self.forms["ADV"])
        self.pos_nouns = [w for w in POSITIVE if w in self.forms["NOUN"]]
        self.neg_nouns = [w for w in NEGATIVE if w in self.forms["NOUN"]]

    def _pick(self, seq, k=None):
        return seq[int(self.rng.integers(len(seq)))] if k is None else [
            seq[int(i)] for i in self.rng.integers(len(seq), size=k)]

    def noun(self, themes, weights, vocab_frac, affect):
        r = self.rng.random()
        if r < abs(affect) * 0.25:
            return self._pick(self.pos_nouns if affect > 0 else self.neg_nouns)
        theme = themes[int(self.rng.choice(len(themes), p=weights))]
        pool = self.by_theme[theme]["NOUN"]
        return pool[int(self.rng.integers(max(1, round(len(pool) * vocab_frac))))]

    def verb(self, themes, weights, vocab_frac):
        theme = themes[int(self.rng.choice(len(themes), p=weights))]
        pool = self.by_theme[theme]["VERB"] or self.by_theme["learning"]["VERB"]
        return pool[int(self.rng.integers(max(1, round(len(pool) * vocab_frac))))]

    def surface(self, pos, lemma, plural_ok=True):
        forms = self.forms[pos][lemma]
        if pos == "NOUN" and not plural_ok:
            return lemma
        return forms[int(self.rng.integers(len(forms)))]

    def sentence(self, themes, weights, vocab_frac, affect, wild):
        n1 = self.surface("NOUN", self.noun(themes, weights, vocab_frac, affect))
        n2 = self.surface("NOUN", self.noun(themes, weights, vocab_frac, affect))
        v = self.surface("VERB", self.verb(themes, weights, vocab_frac))
        parts = ["The"]
        if self.rng.random() < 0.5:
            parts.append(self._pick(self.adjs[: max(3, round(len(self.adjs) * vocab_frac))]))
        parts += [n1, v, "the", n2]
        if self.rng.random() < wild:
            other = list(THEMES)[int(self.rng.integers(len(THEMES)))]
            parts += ["with", "a", self.surface("NOUN", self._pick(self.by_theme[other]["NOUN"]))]
        if self.rng.random() < 0.3:
            parts.append(self._pick(self.advs))
        if self.rng.random() < 0.3:
            parts += ["and", "the", self.surface("NOUN", self.noun(themes, weights, vocab_frac, affect))]
        return " ".join(parts) + "."


def write_fixture_corpus(root: str | Path, seed: int = 1, authors_per_category: int = 2,
                         texts_per_author: int = 5, sentences: int = 360) -> FixturePaths:
    """Write a small deterministic corpus with manifest, embeddings, labels and a run config.

    Chaptered categories get ``CHAPTER <roman>`` headings; plays and poems do
    not. Authors differ in theme weights, affect, topical drift and vocabulary
    contraction toward the end of their texts.
    """
    root = Path(root)
    texts = root / "texts"
    texts.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    writer = _TextWriter(rng)
    rows = []
    for category in CATEGORIES:
        themes = CATEGORY_THEMES[category]
        for a in range(authors_per_category):
            author = f"{category[:3].title()} Author{a + 1}"
            weights = rng.dirichlet([2.0] * len(themes))
            affect = CATEGORY_AFFECT[category] + (0.3 if a == 0 else -0.3)
            wild = 0.15 + 0.5 * a
            contraction = 0.8 if a == 0 else 0.0
            for t in range(texts_per_author):
                n_ch = int(rng.integers(3, 7)) if category in CHAPTERED else 0
                lines = []
                per_ch = sentences // max(n_ch, 1)
                for i in range(sentences):
                    if n_ch and i % per_ch == 0 and i // per_ch < n_ch:
                        lines.append(f"\n\nCHAPTER {ROMAN[i // per_ch]}\n\n")
                        shift = rng.dirichlet([1.0] * len(themes))
                        ch_weights = 0.7 * weights + 0.3 * shift
                    elif not n_ch and i == 0:
                        ch_weights = weights
                    frac = 1.0 - contraction * i / sentences
                    lines.append(writer.sentence(themes, ch_weights, max(frac, 0.15), affect, wild))
                    if i % 6 == 5:
                        lines.append("\n")
                name = f"{category}/{author.replace(' ', '_').lower()}_{t + 1}.txt"
                path = texts / name
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(" ".join(lines).replace(" \n ", "\n").strip() + "\n",
                                encoding="utf-8")
                rows.append((name, author, f"Work {t + 1}", category))

    manifest = root / "manifest.csv"
    with open(manifest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["file", "author", "title", "category"])
        w.writerows(rows)

    emb = root / "embeddings.vec"
    save_embeddings(make_embeddings(seed=seed), emb)
    pos = root / "positive.txt"
    neg = root / "negative.txt"
    pos.write_text("\n".join(read_word_list(asset="positive.txt")) + "\n", encoding="utf-8")
    neg.write_text("\n".join(read_word_list(asset="negative.txt")) + "\n", encoding="utf-8")

    config = root / "run.conf"
    config.write_text(
        "# small-corpus settings for the synthetic fixture\n"
        f"corpus_dir = {texts}\n"
        f"manifest = {manifest}\n"
        f"embeddings = {emb}\n"
        f"positive_labels = {pos}\n"
        f"negative_labels = {neg}\n"
        "chunk_size = 150\n"
        "topics = 9\n"
        "iterations = 150\n"
        "min_freq = 5\n"
        "infer_iterations = 40\n"
        "importance_repeats = 5\n",
        encoding="utf-8")
    return FixturePaths(root, manifest, emb, pos, neg, config)
