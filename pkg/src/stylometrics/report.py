"""Figures and summary tables rendered purely from the cached stage CSVs."""

from __future__ import annotations

import csv
import math
import shutil
from collections import defaultdict
from pathlib import Path

from . import svg


def _rows(path: Path) -> list[dict[str, str]]:
    if not path.exists():
        return []
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _f(s: str) -> float:
    return float(s) if s not in ("", None) else math.nan


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _sentiment(root: Path, out: Path) -> None:
    cats = _rows(root / "sentiment" / "category_profiles.csv")
    if cats:
        _write(out / "sentiment_categories.svg", svg.scatter(
            {"categories": [(_f(r["happiness"]), _f(r["fear"]), r["subject"]) for r in cats]},
            "Category sentiment", "happiness (z)", "fear (z)"))
    authors = _rows(root / "sentiment" / "author_profiles.csv")
    by_cat: dict[str, list] = defaultdict(list)
    for r in authors:
        cat, author = r["subject"].split("/", 1)
        by_cat[cat].append((_f(r["happiness"]), _f(r["fear"]), author))
    for cat in sorted(by_cat):
        _write(out / f"sentiment_authors_{cat}.svg", svg.scatter(
            {cat: by_cat[cat]}, f"Author sentiment: {cat}", "happiness (z)", "fear (z)"))


def _topics(root: Path, out: Path) -> None:
    for path in sorted((root / "topics").glob("top_words_*.csv")):
        shutil.copyfile(path, out / path.name)


def _entropy(root: Path, out: Path) -> None:
    curves = _rows(root / "complexity" / "entropy_categories.csv")
    series: dict[str, list] = defaultdict(list)
    for r in curves:
        series[r["category"]].append((_f(r["segment"]), _f(r["h_smooth"])))
    if series:
        _write(out / "entropy_decay.svg", svg.lines(
            dict(sorted(series.items())), "Smoothed standardized entropy", "segment", "H (z)"))
    fits = _rows(root / "complexity" / "decay_categories.csv")
    if fits:
        fit_series = {}
        for r in fits:
            c = [_f(r[f"c{i}"]) for i in range(4)]
            fit_series[r["category"]] = [
                (x, c[0] + c[1] * x + c[2] * x * x + c[3] * x ** 3)
                for x in (1 + 0.25 * i for i in range(37))]
        _write(out / "entropy_decay_fits.svg", svg.lines(
            fit_series, "Cubic fits to bucket means", "bucket", "H (z)"))
        shutil.copyfile(root / "complexity" / "decay_categories.csv", out / "table_decay.csv")


def _complexity(root: Path, out: Path) -> None:
    feats = _rows(root / "complexity" / "features.csv")
    by_author: dict[str, list] = defaultdict(list)
    for r in feats:
        by_author[r["author"]].append((_f(r["ITV"]), _f(r["SWD"])))
    pts = []
    for author in sorted(by_author):
        vals = [v for v in by_author[author] if not (math.isnan(v[0]) or math.isnan(v[1]))]
        if vals:
            pts.append((sum(v[0] for v in vals) / len(vals), sum(v[1] for v in vals) / len(vals),
                        author))
    if pts:
        _write(out / "itv_swd_authors.svg", svg.scatter(
            {"authors": pts}, "Literariness by author", "ITV", "SWD"))

    pca = _rows(root / "complexity" / "pca_chunks.csv")
    by_cat: dict[str, dict[str, list]] = defaultdict(lambda: defaultdict(list))
    for r in pca:
        by_cat[r["category"]][r["doc_id"]].append((_f(r["pc1"]), _f(r["pc2"])))
    for cat in sorted(by_cat):
        _write(out / f"pca_trajectories_{cat}.svg", svg.lines(
            dict(sorted(by_cat[cat].items())), f"Chunk trajectories: {cat}", "PC1", "PC2"))

    beauty = _rows(root / "complexity" / "beauty.csv")
    if beauty:
        groups = {"beautiful": [], "not beautiful": []}
        for r in beauty:
            key = "beautiful" if r["beautiful"] == "true" else "not beautiful"
            groups[key].append((_f(r["HARM"]), _f(r["VARI"]), r["doc_id"]))
        _write(out / "harmony_variety.svg", svg.scatter(groups, "Harmony and variety",
                                                        "HARM", "VARI"))
    for name, target in (("category_means.csv", "table_features.csv"),
                         ("ff_authors.csv", "table_ff_authors.csv"),
                         ("ff_tests.csv", "table_ff_tests.csv")):
        src = root / "complexity" / name
        if src.exists():
            shutil.copyfile(src, out / target)


def _classify(root: Path, out: Path) -> None:
    for roc in sorted((root / "classify").glob("*_roc.csv")):
        prefix = roc.name[: -len("_roc.csv")]
        series: dict[str, list] = defaultdict(list)
        for r in _rows(roc):
            series[r["class"]].append((_f(r["fpr"]), _f(r["tpr"])))
        if series:
            _write(out / f"roc_{prefix}.svg", svg.lines(series, f"ROC: {prefix}", "FPR", "TPR",
                                                       step=True))
        imp = _rows(root / "classify" / f"{prefix}_importances.csv")
        fp: dict[str, list] = defaultdict(list)
        features: list[str] = []
        for r in imp:
            if r["group"] == "__overall__":
                features.append(r["feature"])
                continue
            fp[r["group"]].append((float(features.index(r["feature"]) + 1), _f(r["importance"])))
        if fp:
            _write(out / f"footprint_{prefix}.svg", svg.lines(
                fp, f"Footprints: {prefix} ({', '.join(features)})", "feature", "importance"))
    summary = root / "classify" / "summary.csv"
    if summary.exists():
        shutil.copyfile(summary, out / "table_classification.csv")


def render_all(root: Path, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    _sentiment(root, out)
    _topics(root, out)
    _entropy(root, out)
    _complexity(root, out)
    _classify(root, out)
