import math

import numpy as np
import pytest

from stylometrics.corpus import Token, TokenStream
from stylometrics.synthetic import lda_corpus, single_topic_doc
from stylometrics.topics import (TopicDistribution, TopicModel, TopicModelError, build_vocab,
                                 coherence_umass, fit_lda, infer_topics, top_words)


def _stream(pairs):
    return TokenStream("d", tuple(Token(l, l, p, 0) for l, p in pairs))


def test_vocab_frequency_boundary():
    s = _stream([("cat", "NOUN")] * 100 + [("dog", "NOUN")] * 99)
    assert build_vocab([s], 100).words == ("cat",)


def test_vocab_pos_filter():
    s = _stream([("cat", "NOUN")] * 3 + [("red", "ADJ")] * 5 + [("Jane", "PROPN")] * 5)
    assert build_vocab([s], 1).words == ("cat",)


def test_vocab_ties_lexicographic():
    s = _stream([("zebra", "NOUN")] * 100 + [("apple", "VERB")] * 100 + [("mid", "NOUN")] * 150)
    assert build_vocab([s], 100).words == ("mid", "apple", "zebra")


def test_vocab_empty():
    with pytest.raises(TopicModelError):
        build_vocab([_stream([("cat", "NOUN")])], 100)


def test_degenerate_single_word_model():
    beta = 0.01
    model = fit_lda([np.zeros(20, dtype=np.int64)], 1, 1, 10, beta=beta)
    phi = model.topic_word_distribution()
    assert phi[0, 0] == 1.0
    assert top_words(model, 0, 5) == [("0", 1.0)]


def test_k_exceeds_vocab():
    with pytest.raises(TopicModelError):
        fit_lda([np.array([0, 1])], 2, 3, 5)


def test_same_seed_identical_counts():
    docs, _ = lda_corpus(40, seed=2)
    a = fit_lda(docs, 150, 3, 30, seed=7)
    b = fit_lda(docs, 150, 3, 30, seed=7)
    assert np.array_equal(a.topic_word, b.topic_word) and np.array_equal(a.doc_topic, b.doc_topic)


def test_counts_conserved_every_sweep():
    docs, _ = lda_corpus(30, seed=1)
    total = sum(len(d) for d in docs)
    lengths = np.array([len(d) for d in docs])
    word_totals = np.bincount(np.concatenate(docs), minlength=150)

    def check(i, nkw, ndk, nk):
        assert nkw.sum() == total and nk.sum() == total
        assert np.array_equal(nkw.sum(axis=1), nk)
        assert np.array_equal(ndk.sum(axis=1), lengths)
        assert np.array_equal(nkw.sum(axis=0), word_totals)
        assert (nkw >= 0).all() and (ndk >= 0).all()

    fit_lda(docs, 150, 3, 25, seed=1, on_sweep=check)


def test_top_words_hand_counts():
    model = TopicModel(1, 1.0, 0.01, 0, 1, ("a", "b", "c", "d"),
                       np.array([[3, 7, 7, 1]]), np.array([[18]]))
    assert [w for w, _ in top_words(model, 0, 3)] == ["b", "c", "a"]
    assert len(top_words(model, 0, 10)) == 4


def test_infer_single_topic_replica():
    docs, _ = lda_corpus(300, seed=0)
    model = fit_lda(docs, 150, 3, 300, seed=1)
    # the alpha prior caps the mass at (n + alpha) / (n + K alpha), so use a long replica
    doc = single_topic_doc(1, 1000, seed=5)
    lemmas = [model.vocabulary[i] for i in doc]
    dist = infer_topics(model, lemmas, 100, seed=3)
    assert dist.probabilities.max() >= 0.9
    sparse = fit_lda(docs, 150, 3, 300, alpha=0.1, seed=1)
    short = [sparse.vocabulary[i] for i in single_topic_doc(1, 100, seed=5)]
    assert infer_topics(sparse, short, 100, seed=3).probabilities.max() >= 0.9
    assert np.array_equal(dist.probabilities, infer_topics(model, lemmas, 100, seed=3).probabilities)
    with pytest.raises(TopicModelError):
        infer_topics(model, ["not-a-word"])


def test_topic_distribution_threshold():
    d = TopicDistribution(np.array([0.9995, 0.0005]))
    assert list(d.above_threshold) == [True, False]
    with pytest.raises(TopicModelError):
        TopicDistribution(np.array([0.5, 0.6]))


def _model_with_top(words):
    counts = np.arange(len(words), 0, -1)[None, :] * 10
    return TopicModel(1, 1.0, 0.01, 0, 1, tuple(words), counts, np.array([[counts.sum()]]))


def test_coherence_always_cooccurring():
    words = ["a", "b", "c", "d"]
    docs = [words] * 5
    pairs = 6
    assert coherence_umass(_model_with_top(words), docs, 4) == pytest.approx(pairs * math.log(6 / 5))


def test_coherence_never_cooccurring_is_negative():
    words = ["a", "b", "c", "d"]
    docs = [["a"], ["b"], ["c"], ["d"]] * 5
    assert coherence_umass(_model_with_top(words), docs, 4) < 6 * math.log(2 / 5) + 1e-12


def test_coherence_single_doc_hand_value():
    # one doc holding a, b only; c absent: pairs (b|a)=log 2, (c|a)=log 1, (c|b)=log 1
    assert coherence_umass(_model_with_top(["a", "b", "c"]), [["a", "b"]], 3) == pytest.approx(math.log(2))


def test_model_json_roundtrip(tmp_path):
    docs, _ = lda_corpus(20, seed=3)
    m = fit_lda(docs, 150, 3, 10, seed=2, doc_ids=[f"d{i}" for i in range(20)])
    m.save(tmp_path / "m.json")
    back = TopicModel.load(tmp_path / "m.json")
    assert np.array_equal(back.topic_word, m.topic_word)
    assert back.doc_ids == m.doc_ids and back.alpha == m.alpha
