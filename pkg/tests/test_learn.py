import numpy as np
import pytest

from stylometrics.learn import (EvalReport, FeatureTable, LearnError, MlpConfig, auc,
                                feature_importance, footprint, kfold_cv, predict_proba,
                                roc_curve, stratified_folds, train_mlp, write_report)
from stylometrics.synthetic import gaussian_blobs

from .gradcheck import max_relative_error

FAST = MlpConfig(hidden1=20, hidden2=8, tours=2, max_epochs=300)


def _xor():
    X = np.array([[0.0, 0], [0, 1], [1, 0], [1, 1]])
    return FeatureTable(("a", "b", "c", "d"), ("x", "y"), X, ("0", "1", "1", "0"))


def test_gradient_matches_finite_differences():
    for seed in range(3):
        assert max_relative_error(seed) < 1e-5


def test_xor_fits():
    model = train_mlp(_xor(), MlpConfig(l2_lambda=1e-4, tours=3))
    assert [model.classes[i] for i in model.predict(_xor().X)] == ["0", "1", "1", "0"]
    row = _xor().X[1]
    p = predict_proba(model, row)
    assert p.shape == (2,) and p.sum() == pytest.approx(1.0)
    assert model.classes[int(np.argmax(p))] == "1"
    assert np.array_equal(predict_proba(model, row), predict_proba(model, row))
    with pytest.raises(LearnError):
        predict_proba(model, [1.0, 2.0, 3.0])


def test_single_class_rejected():
    t = FeatureTable(("a", "b", "c"), ("x",), np.arange(3.0)[:, None], ("k", "k", "k"))
    with pytest.raises(LearnError):
        train_mlp(t, FAST)


def test_training_is_deterministic():
    t = gaussian_blobs(3, 30, 3, seed=1)
    a, b = train_mlp(t, FAST), train_mlp(t, FAST)
    assert all(np.array_equal(p, q) for p, q in zip(a.params, b.params))


def test_momentum_optimizer_also_trains():
    t = gaussian_blobs(2, 30, 2, seed=2)
    m = train_mlp(t, MlpConfig(hidden1=10, hidden2=5, tours=1, max_epochs=300,
                               optimizer="momentum", learning_rate=0.1))
    assert np.mean(m.predict(t.X) == t.y()) > 0.95


def test_stratified_folds():
    labels = ["a"] * 23 + ["b"] * 12 + ["c"] * 3
    folds = stratified_folds(labels, 5, seed=1)
    for c, n in (("a", 23), ("b", 12)):
        per = np.bincount(folds[[l == c for l in labels]], minlength=5)
        assert per.max() - per.min() <= 1 and per.sum() == n
    assert np.array_equal(folds, stratified_folds(labels, 5, seed=1))
    with pytest.raises(LearnError):
        stratified_folds(["a", "b"], 3)


def test_roc_and_auc_hand_values():
    scores = np.array([0.9, 0.8, 0.7, 0.6])
    assert auc(scores, np.array([1, 1, 0, 0], bool)) == 1.0
    assert auc(scores, np.array([0, 0, 1, 1], bool)) == 0.0
    assert auc(scores, np.array([1, 0, 1, 0], bool)) == 0.75
    assert auc(np.full(4, 0.5), np.array([1, 0, 1, 0], bool)) == 0.5
    fpr, tpr = roc_curve(scores, np.array([1, 0, 1, 0], bool))
    assert list(fpr) == [0, 0, 0.5, 0.5, 1] and list(tpr) == [0, 0.5, 0.5, 1, 1]


def test_kfold_report_shape_and_determinism(tmp_path):
    t = gaussian_blobs(3, 20, 3, separation=6, seed=4)
    a = kfold_cv(t, FAST, 4, seed=2, n_repeats=2)
    b = kfold_cv(t, FAST, 4, seed=2, n_repeats=2)
    assert a.to_dict() == b.to_dict()
    assert np.allclose(a.confusion.sum(axis=1), 1.0)
    assert np.allclose(a.probabilities.sum(axis=1), 1.0)
    assert a.misclassification <= 0.05
    with pytest.raises(LearnError):
        kfold_cv(t, FAST, k=61)
    write_report(a, tmp_path, "x")
    rows = (tmp_path / "x_importances.csv").read_text().strip().splitlines()
    assert len(rows) - 1 == (len(a.classes) + 1) * len(a.feature_names)


def test_footprint_peaks_at_separating_feature():
    rng = np.random.default_rng(0)
    n = 60
    X = rng.standard_normal((3 * n, 3))
    X[:n, 0] += 6  # class A differs from the rest only along feature 0
    X[n:2 * n, 1] += 6
    X[2 * n:, 1] -= 6
    labels = ("A",) * n + ("B",) * n + ("C",) * n
    t = FeatureTable(tuple(f"r{i}" for i in range(3 * n)), ("f0", "f1", "f2"), X, labels)
    report = kfold_cv(t, FAST, 3, seed=1, n_repeats=3)
    fp = dict(footprint(report, "A"))
    assert max(fp, key=fp.get) == "f0"
    with pytest.raises(LearnError):
        footprint(report, "nobody")


def test_identical_classes_have_identical_footprints():
    imp = {"f": 1.0, "g": 0.5}
    r = EvalReport(("a", "b"), ("f", "g"), np.eye(2, dtype=int), 0.0, {}, 1.0, imp,
                   {"a": dict(imp), "b": dict(imp)}, np.eye(2), np.array([0, 1]), ("x", "y"))
    assert footprint(r, "a") == footprint(r, "b")


def test_feature_importance_requires_repeats():
    t = gaussian_blobs(2, 20, 2, seed=0)
    m = train_mlp(t, FAST)
    with pytest.raises(LearnError):
        feature_importance(m, t, n_repeats=0)
    imp = feature_importance(m, t, n_repeats=3)
    assert max(imp.values()) == 1.0 and min(imp.values()) >= 0


def test_dropna_policies():
    X = np.array([[1.0, np.nan], [2.0, 3.0]])
    t = FeatureTable(("a", "b"), ("f", "g"), X, ("x", "y"))
    assert t.dropna("rows").doc_ids == ("b",)
    assert t.dropna("features").feature_names == ("f",)


def test_blob_centres_are_separation_apart():
    t = gaussian_blobs(4, 4000, 5, separation=5.0, seed=3)
    centres = np.array([t.X[np.array(t.labels) == c].mean(axis=0) for c in t.classes])
    d = np.linalg.norm(centres[:, None] - centres[None], axis=-1)[np.triu_indices(4, 1)]
    assert np.allclose(d, 5.0, atol=0.1)


def test_holdout_mode():
    from stylometrics.learn import holdout_eval
    t = gaussian_blobs(3, 30, 3, separation=6, seed=4)
    r = holdout_eval(t, FAST, 0.2, seed=1, n_repeats=2)
    assert r.mode == "holdout" and len(r.doc_ids) == 18
