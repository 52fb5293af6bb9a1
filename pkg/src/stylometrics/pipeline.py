"""End-to-end stages behind the command line.

Every stage reads its inputs from the output directory written by earlier
stages, writes deterministic CSV/JSON outputs plus a ``stage.json`` stamp
holding the configuration hash, and refuses to overwrite a stamp made with a
different configuration unless forced. Wall-clock timings go to
``timings.log`` so that the CSV/JSON outputs stay byte-identical across runs.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .complexity import (ChapterlessError, ComplexityError, decay_fit,
                         doc_forward_flow, harmony, intra_textual_variance, rank_beauty,
                         BeautyAssessment, segment_entropy, smooth_rolling, standardize,
                         stepwise_distance, variety)
from .corpus import (CATEGORIES, ShortTextError, TaggerConfig, Token, TokenStream,
                     chapter_documents, chunk_fixed, ingest_corpus, read_manifest,
                     read_word_list, segment_equal, split_chapters, tokenize)
from .learn import (FeatureTable, LearnError, MlpConfig, holdout_eval, kfold_cv, train_mlp,
                    write_report)
from .sentiment import (LabelSet, SentimentError, SentimentScorer, aggregate_profiles,
                        text_sentiment, topic_happiness, write_profiles_csv)
from .stats import anova_oneway, pca_2d, welch_t, ZeroVarianceError
from .topics import (TopicModel, TopicModelError, build_vocab, coherence_umass, fit_lda,
                     infer_topics, top_words, write_top_words_csv)
from .vectorspace import AllOOVError, chunk_vector, load_embeddings

log = logging.getLogger(__name__)

FEATURES = ("SWD", "ITV", "FF", "HARM", "VARI")
STAGES = ("ingest", "topics", "sentiment", "complexity", "classify", "report")


class PipelineError(Exception):
    pass


class StaleCacheError(PipelineError):
    pass


class PreflightError(PipelineError):
    pass


@dataclass
class RunConfig:
    corpus_dir: str = ""
    manifest: str = ""
    embeddings: str = ""
    positive_labels: str = ""
    negative_labels: str = ""
    emotion_labels: str = ""  # comma-separated files; empty = bundled happiness, fear
    stopwords: str = ""
    out: str = "out"
    seed: int = 1
    min_per_author_category: int = 5
    keep_propn: bool = True
    segments: int = 100
    decay_buckets: int = 10
    smooth_window: int = 10
    chunk_size: int = 1000
    oov_max: float = 0.5
    topics: int = 50
    iterations: int = 2500
    alpha: float = 0.0  # 0 = 50 / topics
    beta: float = 0.01
    min_freq: int = 100
    topic_scope: str = "category"  # "category" (one model per category) or "global"
    infer_iterations: int = 200
    top_n: int = 50
    coherence_top_n: int = 10
    k_folds: int = 5
    tours: int = 10
    l2_lambda: float = 0.01
    max_epochs: int = 2000
    importance_repeats: int = 10
    jobs: int = 1

    STAGE_KEYS = {
        "ingest": ("corpus_dir", "manifest", "stopwords", "min_per_author_category", "keep_propn"),
        "topics": ("seed", "topics", "iterations", "alpha", "beta", "min_freq", "topic_scope",
                   "infer_iterations", "top_n", "coherence_top_n"),
        "sentiment": ("embeddings", "positive_labels", "negative_labels", "emotion_labels",
                      "top_n"),
        "complexity": ("embeddings", "segments", "decay_buckets", "smooth_window", "chunk_size",
                       "oov_max", "seed"),
        "classify": ("seed", "k_folds", "tours", "l2_lambda", "max_epochs", "importance_repeats"),
        "report": (),
    }
    UPSTREAM = {
        "ingest": (),
        "topics": ("ingest",),
        "sentiment": ("ingest", "topics"),
        "complexity": ("ingest", "topics"),
        "classify": ("complexity",),
        "report": ("ingest", "topics", "sentiment", "complexity", "classify"),
    }

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "RunConfig":
        values = parse_config_file(path)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in fields:
                raise PipelineError(f"unknown config key {key!r}")
            default = fields[key].default
            kwargs[key] = _coerce(raw, type(default), key)
        return cls(**kwargs)

    def stage_hash(self, stage: str) -> str:
        payload = {k: getattr(self, k) for k in self.STAGE_KEYS[stage]}
        payload["_stage"] = stage
        payload["_version"] = __version__
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]

    def mlp_config(self) -> MlpConfig:
        return MlpConfig(l2_lambda=self.l2_lambda, tours=self.tours, max_epochs=self.max_epochs,
                         seed=self.seed)


def _coerce(raw, typ, key):
    if not isinstance(raw, str):
        return typ(raw)
    raw = raw.strip()
    try:
        if typ is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return typ(raw)
    except ValueError:
        raise PipelineError(f"config key {key!r}: cannot parse {raw!r} as {typ.__name__}") from None


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PipelineError(f"{path}:{lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


# --------------------------------------------------------------------------
# IO helpers

def fmt(x) -> str:
    """Shortest round-trip float text; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(x)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def read_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _num(s: str) -> float:
    return float(s) if s not in ("", None) else math.nan


class Stage:
    """Context for one stage: output directory, cache stamp and timing log."""

    def __init__(self, name: str, config: RunConfig, force: bool = False):
        self.name = name
        self.config = config
        self.root = Path(config.out)
        self.dir = self.root / name
        self.force = force
        self.hash = self._combined_hash()

    def _combined_hash(self) -> str:
        parts = [self.config.stage_hash(self.name)]
        for up in RunConfig.UPSTREAM[self.name]:
            stamp = self.root / up / "stage.json"
            if not stamp.exists():
                raise PipelineError(f"stage {self.name!r} needs {up!r} to run first")
            parts.append(json.loads(stamp.read_text())["hash"])
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]

    def cached(self) -> bool:
        stamp = self.dir / "stage.json"
        if not stamp.exists():
            return False
        old = json.loads(stamp.read_text()).get("hash")
        if old == self.hash and not self.force:
            return True
        if old != self.hash and not self.force:
            raise StaleCacheError(
                f"{stamp} was written with a different configuration; rerun with --force")
        return False

    def run(self, body: Callable[["Stage"], None]) -> bool:
        """Run ``body`` unless cached; returns whether it ran."""
        if self.cached():
            log.info("%s: cached (%s)", self.name, self.hash)
            return False
        self.dir.mkdir(parents=True, exist_ok=True)
        start = time.perf_counter()
        body(self)
        elapsed = time.perf_counter() - start
        write_json(self.dir / "stage.json", {
            "stage": self.name, "hash": self.hash, "seed": self.config.seed,
            "version": __version__,
            "config": {k: getattr(self.config, k) for k in RunConfig.STAGE_KEYS[self.name]},
            "upstream": list(RunConfig.UPSTREAM[self.name]),
        })
        with open(self.root / "timings.log", "a", encoding="utf-8") as fh:
            fh.write(f"{self.name}\t{self.hash}\t{elapsed:.3f}s\n")
        return True


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# --------------------------------------------------------------------------
# token stream storage

def _stream_to_json(stream: TokenStream) -> list:
    return [[t.surface, t.lemma, t.pos, t.sentence_index] for t in stream.tokens]


def _stream_from_json(doc_id: str, rows: list) -> TokenStream:
    return TokenStream(doc_id, tuple(Token(s, l, p, i) for s, l, p, i in rows))


@dataclass
class IngestedDoc:
    doc_id: str
    author: str
    title: str
    category: str
    stream: TokenStream
    chapters: list[TokenStream] = field(default_factory=list)


def load_ingested(root: Path) -> list[IngestedDoc]:
    docs = []
    with open(root / "ingest" / "streams.jsonl", encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            docs.append(IngestedDoc(
                rec["doc_id"], rec["author"], rec["title"], rec["category"],
                _stream_from_json(rec["doc_id"], rec["tokens"]),
                [_stream_from_json(f"{rec['doc_id']}#ch{i + 1}", ch)
                 for i, ch in enumerate(rec["chapters"])]))
    return docs


# --------------------------------------------------------------------------
# stages

def preflight(config: RunConfig, stage: str) -> None:
    """Check that every path the stage (and its upstream stages) will read exists."""
    needed = {
        "ingest": ("corpus_dir", "manifest"),
        "sentiment": ("embeddings",),
        "complexity": ("embeddings",),
    }
    missing = []
    for key in needed.get(stage, ()):
        value = getattr(config, key)
        if not value or not Path(value).exists():
            missing.append(f"{key}={value!r}")
    for key in ("positive_labels", "negative_labels", "stopwords"):
        value = getattr(config, key)
        if stage in ("sentiment", "ingest") and value and not Path(value).exists():
            missing.append(f"{key}={value!r}")
    for value in filter(None, (p.strip() for p in config.emotion_labels.split(","))):
        if stage == "sentiment" and not Path(value).exists():
            missing.append(f"emotion_labels={value!r}")
    if missing:
        raise PreflightError(f"{stage}: missing input(s): " + ", ".join(missing))


def _tokenize_job(args):
    doc, keep_propn, stopwords = args
    cfg = TaggerConfig(keep_propn=keep_propn, stopwords=stopwords)
    stream = tokenize(doc, cfg)
    split = split_chapters(doc) if not doc.pretagged else None
    chapters = []
    if split is not None and not split.chapterless:
        chapters = [tokenize(d, cfg) for d in chapter_documents(doc, split)]
    return stream, chapters


def run_ingest(config: RunConfig, force: bool = False) -> bool:
    preflight(config, "ingest")

    def body(st: Stage):
        rows = read_manifest(config.manifest)
        corpus = ingest_corpus(config.corpus_dir, rows, config.min_per_author_category)
        stop = (frozenset(w.lower() for w in read_word_list(config.stopwords))
                if config.stopwords else None)
        results = _map(_tokenize_job, [(d, config.keep_propn, stop) for d in corpus], config.jobs)
        meta = []
        with open(st.dir / "streams.jsonl", "w", encoding="utf-8") as fh:
            for doc, (stream, chapters) in zip(corpus, results):
                fh.write(json.dumps({
                    "doc_id": doc.id, "author": doc.author, "title": doc.title,
                    "category": doc.category, "tokens": _stream_to_json(stream),
                    "chapters": [_stream_to_json(c) for c in chapters],
                }, separators=(",", ":")) + "\n")
                n_sent = len({t.sentence_index for t in stream.tokens})
                meta.append((doc.id, doc.author, doc.title, doc.category, doc.path,
                             len(stream), n_sent, len(chapters), len(chapters) < 2))
        write_csv(st.dir / "documents.csv",
                  ["doc_id", "author", "title", "category", "file", "n_tokens", "n_sentences",
                   "n_chapters", "chapterless"], meta)
        write_csv(st.dir / "dropped.csv", ["doc_id"], [[d] for d in corpus.dropped])

    return Stage("ingest", config, force).run(body)


def _scopes(docs: list[IngestedDoc], scope: str) -> dict[str, list[IngestedDoc]]:
    if scope == "global":
        return {"all": docs}
    if scope != "category":
        raise PipelineError(f"topic_scope must be 'category' or 'global', not {scope!r}")
    out: dict[str, list[IngestedDoc]] = defaultdict(list)
    for d in docs:
        out[d.category].append(d)
    return dict(sorted(out.items()))


def run_topics(config: RunConfig, force: bool = False) -> bool:
    def body(st: Stage):
        docs = load_ingested(st.root)
        dist_rows = []
        coh_rows = []
        for s_idx, (scope, members) in enumerate(_scopes(docs, config.topic_scope).items()):
            try:
                vocab = build_vocab([d.stream for d in members], config.min_freq)
                k = min(config.topics, len(vocab))
                bows = [vocab.encode(d.stream.lemmas) for d in members]
                model = fit_lda(bows, len(vocab), k, config.iterations,
                                alpha=config.alpha or None, beta=config.beta,
                                seed=config.seed + s_idx, vocabulary=vocab.words,
                                doc_ids=[d.doc_id for d in members])
            except TopicModelError as exc:
                log.warning("topics[%s]: %s", scope, exc)
                continue
            model.save(st.dir / f"model_{scope}.json")
            write_top_words_csv(model, st.dir / f"top_words_{scope}.csv", config.top_n)
            vocab_docs = [[w for w in d.stream.lemmas if w in vocab] for d in members]
            coh_rows.append((scope, model.n_topics, len(vocab),
                             coherence_umass(model, vocab_docs, config.coherence_top_n)))
            for j, d in enumerate(members):
                units = [("book", d.stream)] + [(f"ch{i + 1}", c) for i, c in enumerate(d.chapters)]
                for u_idx, (unit, stream) in enumerate(units):
                    try:
                        dist = infer_topics(model, stream.lemmas, config.infer_iterations,
                                            seed=config.seed * 1_000_003 + j * 1_009 + u_idx)
                    except TopicModelError:
                        continue
                    dist_rows.append((d.doc_id, scope, unit, *dist.probabilities))
        if not coh_rows:
            raise PipelineError("no topic model could be fit")
        width = max(len(r) for r in dist_rows) - 3 if dist_rows else 0
        write_csv(st.dir / "doc_topics.csv",
                  ["doc_id", "scope", "unit", *(f"p{i}" for i in range(width))],
                  [r + ("",) * (width + 3 - len(r)) for r in dist_rows])
        write_csv(st.dir / "coherence.csv", ["scope", "n_topics", "vocab_size", "umass"], coh_rows)

    return Stage("topics", config, force).run(body)


def _label_sets(config: RunConfig) -> tuple[LabelSet, LabelSet, list[LabelSet]]:
    pos = (LabelSet.from_file(config.positive_labels, "positive") if config.positive_labels
           else LabelSet.bundled("positive"))
    neg = (LabelSet.from_file(config.negative_labels, "negative") if config.negative_labels
           else LabelSet.bundled("negative"))
    files = [p.strip() for p in config.emotion_labels.split(",") if p.strip()]
    emos = ([LabelSet.from_file(p) for p in files] if files
            else [LabelSet.bundled("happiness"), LabelSet.bundled("fear")])
    return pos, neg, emos


def _load_models(root: Path) -> dict[str, TopicModel]:
    return {p.stem[len("model_"):]: TopicModel.load(p)
            for p in sorted((root / "topics").glob("model_*.json"))}


def run_sentiment(config: RunConfig, force: bool = False) -> bool:
    preflight(config, "sentiment")

    def body(st: Stage):
        docs = load_ingested(st.root)
        table = load_embeddings(config.embeddings)
        pos, neg, emos = _label_sets(config)
        scorer = SentimentScorer(table, pos, neg, emos, z_normalize=True)
        names = scorer.emotion_names
        profiles = []
        for d in docs:
            try:
                profiles.append(text_sentiment(d.stream, scorer))
            except SentimentError as exc:
                log.warning("sentiment: %s", exc)
        meta = {d.doc_id: d for d in docs}
        write_profiles_csv(profiles, st.dir / "doc_profiles.csv", names)
        by_author = aggregate_profiles(
            profiles, {p.subject: f"{meta[p.subject].category}/{meta[p.subject].author}"
                       for p in profiles})
        write_profiles_csv(by_author, st.dir / "author_profiles.csv", names)
        by_cat = aggregate_profiles(profiles, {p.subject: meta[p.subject].category for p in profiles})
        write_profiles_csv(by_cat, st.dir / "category_profiles.csv", names)

        topic_rows = []
        scope_rows = []
        for scope, model in _load_models(st.root).items():
            vals = []
            for t in range(model.n_topics):
                try:
                    happy = topic_happiness(model, t, scorer, config.top_n)
                except SentimentError:
                    continue
                scores = [s for s in (scorer.word_scores(w) for w, _ in
                                      top_words(model, t, config.top_n)) if s is not None]
                emo_means = np.mean(scores, axis=0)[1:]
                vals.append((happy, *emo_means))
                topic_rows.append((scope, t, happy, *emo_means))
            if vals:
                m = np.mean(vals, axis=0)
                scope_rows.append((scope, *m, len(vals)))
        write_csv(st.dir / "topic_sentiment.csv", ["scope", "topic", "aap", *names], topic_rows)
        write_csv(st.dir / "scope_topic_sentiment.csv", ["scope", "aap", *names, "n_topics"],
                  scope_rows)

    return Stage("sentiment", config, force).run(body)


def _doc_topic_table(root: Path) -> dict[str, dict[str, np.ndarray]]:
    out: dict[str, dict[str, np.ndarray]] = defaultdict(dict)
    for row in read_csv(root / "topics" / "doc_topics.csv"):
        probs = np.array([float(v) for k, v in row.items() if k.startswith("p") and v != ""])
        out[row["doc_id"]][row["unit"]] = probs
    return out


def _complexity_job(args):
    d, table, cfg = args
    rec = {"doc_id": d.doc_id, "author": d.author, "category": d.category}
    lemmas = d.stream.lemmas
    try:
        prof = segment_entropy(segment_equal(d.stream, cfg.segments), d.doc_id)
        rec["h"] = prof.h
    except ShortTextError as exc:
        log.warning("complexity: %s (excluded from decay analysis)", exc)
        rec["h"] = None
    rec["oov_rate"] = (1.0 - table.coverage(lemmas)) if lemmas else math.nan
    vectors = []
    for chunk in chunk_fixed(d.stream, cfg.chunk_size):
        try:
            vectors.append(chunk_vector(chunk.lemmas, table)[0])
        except AllOOVError:
            log.info("%s chunk %d: all OOV, skipped", d.doc_id, chunk.index)
    rec["chunks"] = vectors
    usable = lemmas and rec["oov_rate"] <= cfg.oov_max
    rec["ITV"] = intra_textual_variance(vectors) if usable and len(vectors) >= 1 else math.nan
    rec["SWD"] = stepwise_distance(vectors) if usable and len(vectors) >= 2 else math.nan
    try:
        rec["FF"] = doc_forward_flow(d.stream, table) if usable else math.nan
    except ComplexityError:
        rec["FF"] = math.nan
    return rec


def run_complexity(config: RunConfig, force: bool = False) -> bool:
    preflight(config, "complexity")

    def body(st: Stage):
        docs = load_ingested(st.root)
        table = load_embeddings(config.embeddings)
        topic_dists = _doc_topic_table(st.root)
        recs = _map(_complexity_job, [(d, table, config) for d in docs], config.jobs)

        beauty = []
        for rec in recs:
            units = topic_dists.get(rec["doc_id"], {})
            chapters = [units[k] for k in sorted((k for k in units if k.startswith("ch")),
                                                 key=lambda k: int(k[2:]))]
            rec["HARM"] = rec["VARI"] = math.nan
            if "book" in units and len(chapters) >= 2:
                try:
                    rec["HARM"] = harmony(units["book"], chapters)
                    rec["VARI"] = variety(chapters)
                    beauty.append(BeautyAssessment(rec["doc_id"], rec["HARM"], rec["VARI"]))
                except ChapterlessError:
                    pass

        feat_rows = []
        for r in recs:
            h = r["h"]
            feat_rows.append((r["doc_id"], r["author"], r["category"],
                              None if h is None else float(h.mean()),
                              None if h is None else float(h[:10].mean()),
                              None if h is None else float(h[-10:].mean()),
                              r["ITV"], r["SWD"], r["FF"], r["HARM"], r["VARI"], r["oov_rate"]))
        write_csv(st.dir / "features.csv",
                  ["doc_id", "author", "category", "H_mean", "H_first10", "H_last10",
                   "ITV", "SWD", "FF", "HARM", "VARI", "oov_rate"], feat_rows)

        # entropy profiles and decay fits
        prof_rows, fit_rows = [], []
        by_cat: dict[str, list[np.ndarray]] = defaultdict(list)
        for r in recs:
            if r["h"] is None:
                continue
            prof_rows.extend((r["doc_id"], i + 1, v) for i, v in enumerate(r["h"]))
            if config.segments % config.decay_buckets == 0:
                fit = decay_fit(r["h"], config.decay_buckets)
                fit_rows.append((r["doc_id"], r["category"], fit.r2_adj, fit.f_ratio,
                                 fit.p_value, fit.decaying, *fit.coeffs))
            try:
                by_cat[r["category"]].append(standardize(r["h"]))
            except ComplexityError:
                pass
        write_csv(st.dir / "entropy_profiles.csv", ["doc_id", "segment", "h"], prof_rows)
        write_csv(st.dir / "decay_fits.csv",
                  ["doc_id", "category", "r2_adj", "f_ratio", "p_value", "decaying",
                   "c0", "c1", "c2", "c3"], fit_rows)
        curve_rows, cat_fit_rows = [], []
        for cat in sorted(by_cat):
            mean_curve = np.mean(by_cat[cat], axis=0)
            window = min(config.smooth_window, len(mean_curve))
            smooth = smooth_rolling(mean_curve, window)
            curve_rows.extend((cat, i + 1, m, s) for i, (m, s) in enumerate(zip(mean_curve, smooth)))
            if config.segments % config.decay_buckets == 0:
                fit = decay_fit(mean_curve, config.decay_buckets)
                cat_fit_rows.append((cat, len(by_cat[cat]), fit.r2_adj, fit.f_ratio, fit.p_value,
                                     fit.decaying, *fit.coeffs))
        write_csv(st.dir / "entropy_categories.csv", ["category", "segment", "h_std", "h_smooth"],
                  curve_rows)
        write_csv(st.dir / "decay_categories.csv",
                  ["category", "n_texts", "r2_adj", "f_ratio", "p_value", "decaying",
                   "c0", "c1", "c2", "c3"], cat_fit_rows)

        # per-category feature means and FF author ranking
        mean_rows = []
        for cat in CATEGORIES:
            rows = [r for r in recs if r["category"] == cat]
            if not rows:
                continue
            vals = []
            for f in ("ITV", "SWD", "FF", "HARM", "VARI"):
                xs = [r[f] for r in rows if not math.isnan(r[f])]
                vals.append(float(np.mean(xs)) if xs else None)
            mean_rows.append((cat, len(rows), *vals))
        write_csv(st.dir / "category_means.csv",
                  ["category", "n_texts", "ITV", "SWD", "FF", "HARM", "VARI"], mean_rows)
        ff_by_author: dict[str, list[float]] = defaultdict(list)
        for r in recs:
            if not math.isnan(r["FF"]):
                ff_by_author[r["author"]].append(r["FF"])
        ff_rows = sorted(((a, len(v), float(np.mean(v))) for a, v in ff_by_author.items()),
                         key=lambda t: (-t[2], t[0]))
        write_csv(st.dir / "ff_authors.csv", ["author", "n_texts", "mean_ff"], ff_rows)

        # FF by category: ANOVA plus pairwise Welch tests
        groups = {cat: [r["FF"] for r in recs if r["category"] == cat and not math.isnan(r["FF"])]
                  for cat in CATEGORIES}
        groups = {c: g for c, g in groups.items() if len(g) >= 2}
        stat_rows = []
        if len(groups) >= 2:
            try:
                a = anova_oneway(list(groups.values()))
                stat_rows.append(("FF", "anova", "all", a.f_ratio, a.p_value, a.r2))
            except ZeroVarianceError:
                pass
            names = sorted(groups)
            for i, ca in enumerate(names):
                for cb in names[i + 1:]:
                    try:
                        w = welch_t(groups[ca], groups[cb])
                    except ZeroVarianceError:
                        continue
                    stat_rows.append(("FF", "welch_t", f"{ca}|{cb}", w.t, w.p_value, w.df))
        write_csv(st.dir / "ff_tests.csv", ["measure", "test", "groups", "statistic", "p_value",
                                             "extra"], stat_rows)

        # beauty ranking and chunk trajectories
        write_csv(st.dir / "beauty.csv", ["rank", "doc_id", "HARM", "VARI", "beautiful"],
                  [(i + 1, b.doc_id, b.harmony, b.variety, b.beautiful)
                   for i, b in enumerate(rank_beauty(beauty))])
        pca_rows = []
        for cat in CATEGORIES:
            rows = [r for r in recs if r["category"] == cat and r["chunks"]]
            pts = [(r, i, v) for r in rows for i, v in enumerate(r["chunks"])]
            if len(pts) < 3:
                continue
            res = pca_2d([v for _, _, v in pts], seed=config.seed)
            for (r, i, _), (x, y) in zip(pts, res.points):
                pca_rows.append((cat, r["author"], r["doc_id"], i, float(x), float(y)))
        write_csv(st.dir / "pca_chunks.csv", ["category", "author", "doc_id", "chunk", "pc1", "pc2"],
                  pca_rows)

    return Stage("complexity", config, force).run(body)


def load_feature_table(path: Path, label: str = "category") -> tuple[FeatureTable, list[dict]]:
    rows = read_csv(path)
    X = np.array([[_num(r[f]) for f in FEATURES] for r in rows], dtype=float).reshape(len(rows),
                                                                                        len(FEATURES))
    table = FeatureTable(tuple(r["doc_id"] for r in rows), FEATURES, X,
                         tuple(r[label] for r in rows))
    return table, rows


def run_classify(config: RunConfig, force: bool = False) -> bool:
    def body(st: Stage):
        table, rows = load_feature_table(st.root / "complexity" / "features.csv")
        mlp = config.mlp_config()
        summary = []

        cat_table = table.dropna("rows")
        try:
            report = kfold_cv(cat_table, mlp, config.k_folds, config.seed, config.importance_repeats)
            write_report(report, st.dir, "category")
            holdout = holdout_eval(cat_table, mlp, 1.0 / config.k_folds, config.seed,
                                   config.importance_repeats)
            write_report(holdout, st.dir, "category_holdout")
            model = train_mlp(cat_table, mlp)
            write_json(st.dir / "category_model.json", model.to_dict())
            summary.append(("category", "all", len(cat_table), len(report.classes),
                            report.r2_entropy, report.misclassification,
                            *(report.importances.get(f) for f in FEATURES)))
        except LearnError as exc:
            log.warning("classify[category]: %s", exc)
            summary.append(("category", "all", len(cat_table), len(cat_table.classes),
                            None, None, *(None,) * len(FEATURES)))

        authors = tuple(r["author"] for r in rows)
        for cat in CATEGORIES:
            idx = [i for i, r in enumerate(rows) if r["category"] == cat]
            if not idx:
                continue
            sub = FeatureTable(tuple(table.doc_ids[i] for i in idx), FEATURES, table.X[idx],
                               tuple(authors[i] for i in idx)).dropna("features").dropna("rows")
            try:
                if not sub.feature_names:
                    raise LearnError("no complete features")
                report = kfold_cv(sub, mlp, config.k_folds, config.seed, config.importance_repeats)
            except LearnError as exc:
                log.warning("classify[author/%s]: %s", cat, exc)
                summary.append(("author", cat, len(sub), len(sub.classes), None, None,
                                *(None,) * len(FEATURES)))
                continue
            write_report(report, st.dir, f"author_{cat}")
            summary.append(("author", cat, len(sub), len(report.classes), report.r2_entropy,
                            report.misclassification,
                            *(report.importances.get(f) for f in FEATURES)))
        write_csv(st.dir / "summary.csv",
                  ["task", "scope", "n_rows", "n_classes", "r2_entropy", "misclassification",
                   *FEATURES], summary)

    return Stage("classify", config, force).run(body)


def run_report(config: RunConfig, force: bool = False) -> bool:
    from .report import render_all

    def body(st: Stage):
        render_all(st.root, st.dir)

    return Stage("report", config, force).run(body)


RUNNERS = {
    "ingest": run_ingest,
    "topics": run_topics,
    "sentiment": run_sentiment,
    "complexity": run_complexity,
    "classify": run_classify,
    "report": run_report,
}


def run_all(config: RunConfig, force: bool = False) -> None:
    for stage in ("ingest", "sentiment", "complexity"):
        preflight(config, stage)
    for stage in STAGES:
        RUNNERS[stage](config, force)
