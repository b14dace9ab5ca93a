import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affecteval.classifiers import (
    ClassifierSpec,
    CvScheme,
    LabeledDataset,
    Standardizer,
    _smo,
    cross_validate,
    knn_predict,
    make_folds,
    rbf_kernel,
    select_hyperparameters,
    svm_predict,
    svm_train,
    threshold_labels,
)
from affecteval.metrics import balanced_accuracy, confusion_matrix

XOR = LabeledDataset(np.array([[0, 0], [1, 1], [0, 1], [1, 0]], dtype=float), np.array([0, 0, 1, 1]))


def blobs(n=100, seed=0, sigma=0.5):
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], n // 2)
    centers = np.where(y[:, None] == 1, 3.0, -3.0)
    return LabeledDataset(centers + sigma * rng.standard_normal((n, 2)), y)


def test_threshold_labels():
    np.testing.assert_array_equal(threshold_labels([4, 5, 9], 9, 5), [0, 1, 1])
    assert threshold_labels([3], 5, 3).tolist() == [1]
    assert threshold_labels([3], 5, 4).tolist() == [0]
    with pytest.raises(ValueError):
        threshold_labels([0.5], 9, 5)
    with pytest.raises(ValueError):
        threshold_labels([10], 9, 5)


@given(st.lists(st.floats(1, 9), min_size=1, max_size=20), st.floats(1, 9), st.data())
def test_threshold_monotone(ratings, split, data):
    i = data.draw(st.integers(0, len(ratings) - 1))
    before = threshold_labels(ratings, 9, split)
    raised = list(ratings)
    raised[i] = data.draw(st.floats(ratings[i], 9))
    after = threshold_labels(raised, 9, split)
    assert np.all(after >= before)


# -- kNN ---------------------------------------------------------------------------

def test_knn_single_point():
    train = LabeledDataset(np.array([[0.3, 2.0]]), np.array([1]))
    assert knn_predict(train, [10.0, -4.0], 1) == 1


def test_knn_majority_of_nine():
    # 5 near neighbours labeled 1, 4 labeled 0, then far points labeled 0
    x = np.concatenate([np.arange(1, 10), np.arange(100, 110)]).astype(float)
    y = np.array([1, 0, 1, 0, 1, 0, 1, 0, 1] + [0] * 10)
    assert knn_predict(LabeledDataset(x, y), [0.0], 9) == 1


def test_knn_errors():
    train = LabeledDataset(np.zeros((3, 2)), np.array([0, 1, 0]))
    with pytest.raises(ValueError):
        knn_predict(train, [0, 0], 0)
    with pytest.raises(ValueError):
        knn_predict(train, [0, 0], 4)
    with pytest.raises(ValueError):
        knn_predict(train, [0, 0, 0], 1)


def test_knn_vote_tie_goes_to_training_majority():
    x = np.array([0.0, 1.0, 10.0, 11.0, 12.0])
    y = np.array([1, 0, 1, 1, 1])
    assert knn_predict(LabeledDataset(x, y), [0.5], 2) == 1
    y = np.array([1, 0, 0, 0, 1])
    assert knn_predict(LabeledDataset(x, y), [0.5], 2) == 0
    # balanced training labels fall back to 0
    y = np.array([1, 0, 0, 1])
    assert knn_predict(LabeledDataset(x[:4], y), [0.5], 2) == 0


def test_knn_distance_tie_lower_index():
    # symmetric about 0, so the query stays equidistant after z-scoring
    x = np.array([-1.0, 1.0, -3.0, 3.0])
    assert knn_predict(LabeledDataset(x, np.array([1, 0, 0, 0])), [0.0], 1) == 1
    assert knn_predict(LabeledDataset(x, np.array([0, 1, 1, 1])), [0.0], 1) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_knn_recovers_training_point(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((15, 3))
    y = rng.integers(0, 2, 15)
    train = LabeledDataset(x, y)
    i = int(rng.integers(0, 15))
    assert knn_predict(train, x[i], 1) == y[i]


# -- SVM ---------------------------------------------------------------------------

def test_svm_solves_xor():
    model = svm_train(XOR, C=10, gamma=1)
    assert model.converged
    np.testing.assert_array_equal(svm_predict(model, XOR.features), XOR.labels)


def test_svm_blobs_held_out():
    train, test = blobs(100, seed=1), blobs(100, seed=2)
    model = svm_train(train, C=1, gamma=0.5)
    pred = svm_predict(model, test.features)
    assert balanced_accuracy(confusion_matrix(test.labels, pred, 2)) >= 0.95
    assert svm_predict(model, [-3.0, -3.0]) == 0
    assert svm_predict(model, [3.0, 3.0]) == 1


def test_svm_strong_support_vector_predicts_own_class():
    data = blobs(60, seed=4, sigma=2.0)
    model = svm_train(data, C=1, gamma=0.5)
    i = int(np.argmax(model.dual_coefficients))
    sv = model.support_vectors[i] * model.scaler.scale + model.scaler.mean
    assert svm_predict(model, sv) == 1


def test_svm_errors():
    with pytest.raises(ValueError):
        svm_train(LabeledDataset(np.zeros((4, 2)), np.ones(4, dtype=int)))
    bad = LabeledDataset(np.array([[0.0, np.nan], [1.0, 1.0]]), np.array([0, 1]))
    with pytest.raises(ValueError):
        svm_train(bad)
    model = svm_train(XOR, C=10, gamma=1)
    with pytest.raises(ValueError):
        svm_predict(model, [1.0, 2.0, 3.0])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([0.1, 1.0, 10.0]), st.sampled_from([0.1, 0.5, 2.0]))
def test_svm_dual_feasibility(seed, C, gamma):
    rng = np.random.default_rng(seed)
    n = 30
    x = rng.standard_normal((n, 3))
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    y[0], y[1] = -1.0, 1.0
    alpha, rho, _, converged = _smo(rbf_kernel(x, x, gamma), y, C, 1e-3, 100_000)
    assert converged
    assert np.all(alpha >= 0) and np.all(alpha <= C)
    assert abs(np.dot(alpha, y)) <= 1e-6 * C * n
    # KKT at tolerance: maximal violating pair gap below tol
    grad = (np.outer(y, y) * rbf_kernel(x, x, gamma)) @ alpha - 1.0
    up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
    low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
    assert np.max(-y[up] * grad[up]) - np.min(-y[low] * grad[low]) <= 1e-3 + 1e-9


def test_svm_duplicate_with_half_c_matches():
    data = blobs(20, seed=3, sigma=2.0)
    doubled = LabeledDataset(np.vstack([data.features] * 2), np.concatenate([data.labels] * 2))
    a = svm_train(data, C=1.0, gamma=0.5, tol=1e-8)
    b = svm_train(doubled, C=0.5, gamma=0.5, tol=1e-8)
    grid = np.random.default_rng(0).uniform(-6, 6, (200, 2))
    np.testing.assert_allclose(a.decision_function(grid), b.decision_function(grid), atol=1e-5)
    np.testing.assert_array_equal(svm_predict(a, data.features), svm_predict(b, data.features))


def test_svm_against_reference_solver():
    # closed-form two-point problem: alphas equal, decision boundary at the midpoint
    data = LabeledDataset(np.array([[-1.0], [1.0]]), np.array([0, 1]))
    model = svm_train(data, C=100.0, gamma=0.5)
    k = np.exp(-0.5 * 4.0)  # z-scored points sit at -1 and +1
    alpha = 2.0 / (2.0 - 2.0 * k)
    np.testing.assert_allclose(np.abs(model.dual_coefficients), [alpha, alpha], rtol=1e-6)
    assert abs(model.bias) < 1e-9


# -- CV ----------------------------------------------------------------------------

def test_folds_leave_one_out():
    folds = make_folds(40, CvScheme("leave_one_out"))
    assert len(folds) == 40 and all(f.size == 1 for f in folds)


def test_folds_k_fold():
    a = make_folds(40, CvScheme("k_fold", 10, seed=7))
    b = make_folds(40, CvScheme("k_fold", 10, seed=7))
    assert [f.size for f in a] == [4] * 10
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert sorted(np.concatenate(a).tolist()) == list(range(40))
    with pytest.raises(ValueError):
        make_folds(5, CvScheme("k_fold", 10))
    with pytest.raises(ValueError):
        CvScheme("k_fold", 1)


def test_cross_validate_covers_each_trial_once():
    data = blobs(40, seed=5)
    out = cross_validate(data, CvScheme("k_fold", 10, seed=1), ClassifierSpec("svm", C=1, gamma=0.5))
    assert sorted(out.trial_ids) == sorted(data.trial_ids)
    assert np.all(out.predicted_labels >= 0)
    assert sorted(np.bincount(out.fold_assignments).tolist()) == [4] * 10
    assert balanced_accuracy(confusion_matrix(out.true_labels, out.predicted_labels, 2)) >= 0.95


def test_cross_validate_loo_knn():
    data = blobs(40, seed=6)
    out = cross_validate(data, CvScheme("leave_one_out"), ClassifierSpec("knn", k=9))
    assert len(set(out.fold_assignments.tolist())) == 40
    assert balanced_accuracy(confusion_matrix(out.true_labels, out.predicted_labels, 2)) >= 0.95


def test_cross_validate_permutation_invariant():
    data = blobs(30, seed=8, sigma=2.5)
    scheme, spec = CvScheme("k_fold", 5, seed=3), ClassifierSpec("svm", C=1, gamma=0.5)
    base = cross_validate(data, scheme, spec)
    perm = np.random.default_rng(0).permutation(len(data))
    shuffled = cross_validate(data.subset(perm), scheme, spec)
    assert base.trial_ids == shuffled.trial_ids
    np.testing.assert_array_equal(base.predicted_labels, shuffled.predicted_labels)


def test_cross_validate_single_class_fold_is_flagged():
    x = np.arange(10, dtype=float)
    y = np.array([0] * 9 + [1])
    out = cross_validate(LabeledDataset(x, y), CvScheme("leave_one_out"), ClassifierSpec("svm", C=1, gamma=1))
    assert any(f.endswith("single_class_training") for f in out.flags)
    assert out.predicted_labels[-1] == 0


def test_scaler_fit_on_training_rows_only():
    rng = np.random.default_rng(2)
    train = rng.standard_normal((20, 3))
    s1 = Standardizer.fit(train)
    s2 = Standardizer.fit(train[rng.permutation(20)])
    np.testing.assert_allclose(s1.mean, s2.mean, rtol=1e-14)
    np.testing.assert_allclose(s1.scale, s2.scale, rtol=1e-14)
    const = Standardizer.fit(np.ones((4, 1)) * 3.0)
    assert const.transform(np.array([[5.0]]))[0, 0] == 2.0


def test_pca_inside_cv():
    data = blobs(40, seed=9)
    wide = LabeledDataset(np.hstack([data.features, data.features @ np.array([[1.0], [2.0]])]), data.labels)
    out = cross_validate(wide, CvScheme("k_fold", 4, seed=0), ClassifierSpec("knn", k=3), pca_fraction=0.98)
    assert balanced_accuracy(confusion_matrix(out.true_labels, out.predicted_labels, 2)) >= 0.95


def test_select_hyperparameters():
    data = blobs(100, seed=10)
    chosen = select_hyperparameters(data, seed=0)
    assert set(chosen) == {"C", "gamma"}
    model = svm_train(data, chosen["C"], chosen["gamma"])
    test = blobs(100, seed=11)
    assert balanced_accuracy(confusion_matrix(test.labels, svm_predict(model, test.features), 2)) >= 0.95
    assert select_hyperparameters(data, [(3.0, 0.2)]) == {"C": 3.0, "gamma": 0.2}
    with pytest.raises(ValueError):
        select_hyperparameters(data, holdout_fraction=0.9)


def test_select_hyperparameters_tie_break():
    # perfectly separable data: every grid point scores 1.0, smallest C and gamma win
    data = blobs(60, seed=12, sigma=0.1)
    chosen = select_hyperparameters(data, [(10, 1), (1, 5), (1, 2)])
    assert chosen == {"C": 1.0, "gamma": 2.0}


def test_classifier_spec_roundtrip():
    spec = ClassifierSpec("svm", C=2.0, gamma=None, seed=3)
    assert ClassifierSpec.from_dict(spec.to_dict()) == spec
    assert spec.to_dict() == {"type": "svm", "C": 2.0, "gamma": None, "k": 9, "seed": 3}
    assert ClassifierSpec("knn").label == "knn(k=9)"
    with pytest.raises(ValueError):
        ClassifierSpec.from_dict({"type": "svm", "kernel": "rbf"})
    with pytest.raises(ValueError):
        ClassifierSpec("tree")
