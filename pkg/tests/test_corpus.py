import csv

import pytest
from hypothesis import given, settings, strategies as st

from stylometrics.corpus import (Document, EmptyCorpusError, ManifestError, ManifestRow,
                                 ShortTextError, TaggerConfig, Token, TokenStream,
                                 UndefinedRatioError, avq, chunk_fixed, ingest_corpus,
                                 read_manifest, segment_equal, split_chapters, tokenize, ttr)


def _stream(n, doc_id="d"):
    return TokenStream(doc_id, tuple(Token(f"w{i}", f"w{i}", "NOUN", i // 10) for i in range(n)))


def _write_corpus(tmp_path, rows):
    for name, *_ in rows:
        (tmp_path / name).write_text("The cat sat.\n", encoding="utf-8")
    return [ManifestRow(*r) for r in rows]


# ---- ingestion

def test_ingest_threshold_drops_lone_author(tmp_path):
    rows = [(f"austen{i}.txt", "Austen", f"N{i}", "novels") for i in range(7)]
    rows.append(("lone.txt", "Lone", "L", "novels"))
    corpus = ingest_corpus(tmp_path, _write_corpus(tmp_path, rows), 5)
    assert len(corpus) == 7
    assert corpus.dropped == ["lone"]


def test_ingest_threshold_zero_keeps_all(tmp_path):
    rows = [(f"a{i}.txt", "A", f"T{i}", "novels") for i in range(3)] + [("b.txt", "B", "T", "poems")]
    assert len(ingest_corpus(tmp_path, _write_corpus(tmp_path, rows), 0)) == 4


def test_ingest_threshold_is_per_author_category(tmp_path):
    rows = [(f"n{i}.txt", "A", f"N{i}", "novels") for i in range(5)] + [("e.txt", "A", "E", "essays")]
    corpus = ingest_corpus(tmp_path, _write_corpus(tmp_path, rows), 5)
    assert {d.category for d in corpus} == {"novels"}
    assert len(corpus) == 5


def test_ingest_threshold_monotone(tmp_path):
    rows = ([(f"a{i}.txt", "A", f"T{i}", "novels") for i in range(6)]
            + [(f"b{i}.txt", "B", f"T{i}", "novels") for i in range(4)]
            + [(f"c{i}.txt", "C", f"T{i}", "novels") for i in range(2)])
    manifest = _write_corpus(tmp_path, rows)
    twice = ingest_corpus(tmp_path, manifest, 3)
    kept_rows = [r for r in manifest if r.file_path.rsplit(".", 1)[0] in {d.id for d in twice}]
    assert [d.id for d in ingest_corpus(tmp_path, kept_rows, 5)] == \
        [d.id for d in ingest_corpus(tmp_path, manifest, 5)]


def test_ingest_reports_every_bad_row(tmp_path):
    manifest = _write_corpus(tmp_path, [("ok.txt", "A", "T", "novels")])
    manifest += [ManifestRow("missing.txt", "A", "M", "novels"),
                 ManifestRow("ok.txt", "A", "X", "sagas")]
    with pytest.raises(ManifestError) as exc:
        ingest_corpus(tmp_path, manifest, 0)
    assert len(exc.value.errors) == 2
    assert "missing.txt" in exc.value.errors[0]


def test_ingest_empty_corpus(tmp_path):
    with pytest.raises(EmptyCorpusError):
        ingest_corpus(tmp_path, _write_corpus(tmp_path, [("a.txt", "A", "T", "novels")]), 5)


def test_read_manifest(tmp_path):
    path = tmp_path / "m.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["file", "author", "title", "category"])
        w.writerow(["a.txt", "A", "T", "novels"])
    assert read_manifest(path) == [ManifestRow("a.txt", "A", "T", "novels")]


# ---- tagging

def test_tokenize_hand_tagged_example():
    s = tokenize(Document("d", "a", "t", "novels", "The cat sat. The cat slept.", "d.txt"))
    assert s.lemmas == ["cat", "sit", "cat", "sleep"]
    assert [t.sentence_index for t in s.tokens] == [0, 0, 1, 1]


def test_tokenize_pure_stopwords_is_empty():
    assert len(tokenize(Document("d", "a", "t", "novels", "the and of it", "d.txt"))) == 0


def test_pretagged_tsv_passes_through():
    text = "Cats\tcat\tNOUN\nran\trun\tVERB\n\nquickly\tquickly\tADV\n"
    s = tokenize(Document("d", "a", "t", "novels", text, "d.tsv"))
    assert s.tokens == (Token("Cats", "cat", "NOUN", 0), Token("ran", "run", "VERB", 0),
                        Token("quickly", "quickly", "ADV", 1))


def test_propn_detected_before_lowercasing():
    text = "The captain met Elizabeth. Elizabeth smiled."
    s = tokenize(Document("d", "a", "t", "novels", text, "d.txt"))
    assert ("elizabeth", "PROPN") in [(t.lemma, t.pos) for t in s.tokens]
    strict = tokenize(Document("d", "a", "t", "novels", text, "d.txt"),
                      TaggerConfig(keep_propn=False))
    assert all(t.pos in {"NOUN", "VERB", "ADJ", "ADV"} for t in strict.tokens)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(["cat", "dog", "ran", "The", "happy", "sea", "Mary", ".", "and"]),
                max_size=40))
def test_tokenize_deterministic_and_ordered(words):
    doc = Document("d", "a", "t", "novels", " ".join(words), "d.txt")
    a, b = tokenize(doc), tokenize(doc)
    assert a == b
    idx = [t.sentence_index for t in a.tokens]
    assert idx == sorted(idx)
    assert all(t.lemma for t in a.tokens)


# ---- partitioning

def test_segment_equal_singletons():
    assert [len(s) for s in segment_equal(_stream(100), 100)] == [1] * 100


def test_segment_equal_front_first_remainder():
    assert [len(s) for s in segment_equal(_stream(103), 10)] == [11, 11, 11] + [10] * 7


def test_segment_equal_short_text():
    with pytest.raises(ShortTextError):
        segment_equal(_stream(99), 100)


@given(st.integers(1, 400), st.integers(1, 50))
def test_segments_partition_stream(n_tokens, n):
    stream = _stream(n_tokens)
    if n_tokens < n:
        return
    segs = segment_equal(stream, n)
    assert sum((s.tokens for s in segs), ()) == stream.tokens
    assert max(map(len, segs)) - min(map(len, segs)) <= 1


@pytest.mark.parametrize("n, size, expect", [(2500, 1000, [1000, 1500]), (2000, 1000, [1000, 1000]),
                                             (600, 1000, [600]), (0, 1000, [])])
def test_chunk_fixed(n, size, expect):
    assert [len(c) for c in chunk_fixed(_stream(n), size)] == expect


def test_split_chapters_boundaries():
    text = "CHAPTER I\nThe cat sat.\nCHAPTER II\nThe dog ran."
    split = split_chapters(Document("d", "a", "t", "novels", text, "d.txt"))
    assert len(split.chapters) == 2 and not split.chapterless
    assert split.chapters[0].start == 0
    assert split.chapters[0].text.strip() == "The cat sat."
    assert split.chapters[1].text.strip() == "The dog ran."
    assert split.chapters[0].end == split.chapters[1].start


def test_split_chapters_prologue_is_not_a_chapter():
    text = "Preface here.\nChapter 1\nOne.\nChapter 2\nTwo."
    split = split_chapters(Document("d", "a", "t", "novels", text, "d.txt"))
    assert [c.heading for c in split.chapters] == ["Chapter 1", "Chapter 2"]


def test_split_chapters_chapterless():
    split = split_chapters(Document("d", "a", "t", "novels", "No headings at all.", "d.txt"))
    assert split.chapterless


# ---- lexical diversity

def test_ttr_and_avq():
    assert ttr(["cat", "sit", "cat", "sleep"]) == 0.75
    assert ttr(["a", "b", "c"]) == 1.0
    toks = tuple(Token("x", "x", p, 0) for p in ["ADJ", "ADJ", "VERB", "VERB", "VERB", "VERB"])
    assert avq(TokenStream("d", toks)) == 0.5
    with pytest.raises(UndefinedRatioError):
        avq(TokenStream("d", toks[:2]))
