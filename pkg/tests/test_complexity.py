import numpy as np
import pytest

from stylometrics.complexity import (BeautyAssessment, ChapterlessError, ComplexityError,
                                     beauty_predicate, decay_fit, doc_forward_flow, forward_flow,
                                     harmony, hellinger, intra_textual_variance, rank_beauty,
                                     segment_entropy, shannon_entropy, smooth_rolling, standardize,
                                     stepwise_distance, variety)
from stylometrics.corpus import Token, TokenStream
from stylometrics.vectorspace import EmbeddingTable

from . import oracles


def test_entropy_examples():
    assert shannon_entropy(["a", "b", "c", "d"]) == 2.0
    assert shannon_entropy(["a"] * 5) == 0.0
    assert shannon_entropy(["a", "a", "b", "c"]) == 1.5
    with pytest.raises(ComplexityError):
        shannon_entropy([])


def test_segment_entropy_profile():
    prof = segment_entropy([["a", "b"], ["a", "a"]], "d")
    assert prof.doc_id == "d" and list(prof.h) == [1.0, 0.0]


def test_smooth_rolling():
    assert np.allclose(smooth_rolling([1, 2, 3, 4], 2), [1, 1.5, 2.5, 3.5])
    v = np.random.default_rng(0).standard_normal(30)
    assert np.array_equal(smooth_rolling(v, 1), v)
    assert np.allclose(smooth_rolling(np.full(12, 4.2), 10), 4.2)


def test_standardize():
    z = standardize(np.arange(10.0))
    assert abs(z.mean()) < 1e-12 and z.std() == pytest.approx(1.0)
    with pytest.raises(ComplexityError):
        standardize(np.ones(5))


def test_decay_fit_examples():
    x = np.repeat(np.arange(1, 11, dtype=float), 10)
    cubic = 5 - 0.3 * x + 0.04 * x ** 2 - 0.003 * x ** 3
    assert decay_fit(cubic).r2_adj == pytest.approx(1.0, abs=1e-9)
    flat = decay_fit(np.ones(100))
    assert not flat.decaying and flat.r2_adj == 0
    rng = np.random.default_rng(1)
    trend = -0.5 * np.arange(100) + rng.normal(0, 1, 100)
    fit = decay_fit(trend)
    assert fit.decaying and fit.p_value < 0.05


def test_itv_swd_examples():
    assert intra_textual_variance([[1.0, 2], [1.0, 2]]) == 0
    assert intra_textual_variance([[0.0, 0], [2, 0]]) == 1.0
    assert intra_textual_variance([[0.0, 0], [2, 0], [1, 3]]) == pytest.approx(8 / 3)
    assert stepwise_distance([[1.0, 1], [1.0, 1]]) == 0
    assert stepwise_distance([[0.0, 0], [2, 0], [2, 3]]) == 6.5
    assert stepwise_distance([[0.0, 1], [3, 5]]) == 25.0
    with pytest.raises(ComplexityError):
        stepwise_distance([[0.0, 1]])


def test_forward_flow_examples():
    e1, e2 = [1.0, 0.0], [0.0, 1.0]
    assert forward_flow([e1, e1, e1]) == 0
    assert forward_flow([e1, e2, e1]) == pytest.approx(0.75)
    assert forward_flow([e1, e2]) == 1.0
    # zero vectors are skipped
    assert forward_flow([e1, [0.0, 0.0], e2]) == 1.0
    with pytest.raises(ComplexityError):
        forward_flow([e1, [0.0, 0.0]])


def _tok(lemma, s):
    return Token(lemma, lemma, "NOUN", s)


def test_doc_forward_flow():
    table = EmbeddingTable.from_dict({"a": [1, 0], "b": [0, 1], "c": [1, 1]})
    one = TokenStream("d", (_tok("a", 0), _tok("b", 0), _tok("a", 0)))
    assert doc_forward_flow(one, table) == pytest.approx(0.75)
    two = TokenStream("d", one.tokens + (_tok("a", 1), _tok("b", 1)))
    assert doc_forward_flow(two, table) == pytest.approx((0.75 + 1.0) / 2)
    singles = TokenStream("d", (_tok("a", 0), _tok("b", 1)))
    with pytest.raises(ComplexityError):
        doc_forward_flow(singles, table)


def test_hellinger_examples():
    assert hellinger([0.3, 0.7], [0.3, 0.7]) == 0
    assert hellinger([1.0, 0.0], [0.0, 1.0]) == 1.0
    assert hellinger([1.0, 0.0], [0.5, 0.5]) == pytest.approx(0.5412, abs=1e-4)
    with pytest.raises(ComplexityError):
        hellinger([0.5, 0.6], [0.5, 0.5])


def test_harmony_variety_examples():
    book = [0.5, 0.5]
    assert harmony(book, [book, book]) == 0
    assert variety([book, book, book]) == 0
    # chapters placed at chosen distances from the book
    def at_distance(h):
        # distance from (1, 0) to (p, 1 - p) is sqrt(1 - sqrt(p)) -> choose p
        return [(1 - h * h) ** 2, 1 - (1 - h * h) ** 2]
    assert harmony([1.0, 0.0], [at_distance(0.1), at_distance(0.3)]) == pytest.approx(0.2)
    c = [[0.2, 0.8], [0.6, 0.4]]
    assert variety(c) == hellinger(*c)
    with pytest.raises(ChapterlessError):
        harmony(book, [book])
    with pytest.raises(ChapterlessError):
        variety([book])


def test_variety_three_chapters_mean_of_pairs():
    rng = np.random.default_rng(4)
    ch = rng.dirichlet(np.ones(6), size=3)
    pairs = [hellinger(ch[0], ch[1]), hellinger(ch[0], ch[2]), hellinger(ch[1], ch[2])]
    assert variety(ch) == pytest.approx(sum(pairs) / 3, rel=1e-12)


def test_beauty_predicate():
    assert beauty_predicate(0.097, 0.103)
    assert beauty_predicate(0.091, 0.099)
    assert not beauty_predicate(0.1, 0.1)
    assert not beauty_predicate(0.2, 0.1)


def test_rank_beauty_order():
    items = [BeautyAssessment("ugly", 0.2, 0.1), BeautyAssessment("pp", 0.091, 0.099),
             BeautyAssessment("emma", 0.097, 0.103)]
    assert [b.doc_id for b in rank_beauty(items)] == ["emma", "pp", "ugly"]


@pytest.mark.parametrize("seed", range(5))
def test_measures_match_oracles(seed):
    rng = np.random.default_rng(seed)
    chunks = rng.standard_normal((int(rng.integers(2, 9)), 4))
    assert intra_textual_variance(chunks) == pytest.approx(oracles.itv(chunks.tolist()), rel=1e-9)
    assert stepwise_distance(chunks) == pytest.approx(oracles.swd(chunks.tolist()), rel=1e-9)
    assert forward_flow(chunks) == pytest.approx(oracles.ff(chunks.tolist()), rel=1e-9)
