"""Binary affect classifiers and cross-validation.

Both classifiers z-score features with statistics from the training rows
only.  The SVM is a Gaussian-kernel soft-margin machine trained by sequential
minimal optimisation with maximal-violating-pair working-set selection.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from affecteval.features import PCA_VARIANCE_FRACTION, pca_fit
from affecteval.metrics import balanced_accuracy, confusion_matrix

log = logging.getLogger(__name__)

DIMENSIONS = ("valence", "arousal", "dominance")
DEFAULT_C_GRID = (0.1, 1.0, 10.0, 100.0)
DEFAULT_GAMMA_GRID = (0.01, 0.1, 1.0, 10.0)  # divided by the feature count
KKT_TOL = 1e-3


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    trial_ids: tuple[str, ...] = ()
    dimension: str = "valence"

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.asarray(self.labels).astype(np.int64)
        if x.ndim != 2 or x.shape[0] != y.size:
            raise ValueError(f"{x.shape[0]} feature rows but {y.size} labels")
        if np.any((y != 0) & (y != 1)):
            raise ValueError("labels must be 0 or 1")
        ids = tuple(self.trial_ids) or tuple(f"t{i:05d}" for i in range(y.size))
        if len(ids) != y.size:
            raise ValueError("trial_ids length must match the label count")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "trial_ids", ids)

    def __len__(self):
        return self.labels.size

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset(
            self.features[idx], self.labels[idx], tuple(self.trial_ids[i] for i in idx), self.dimension
        )


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Standardizer":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        # zero-variance columns pass through unscaled
        scale = np.where(std > 0, std, 1.0)
        return cls(mean, scale)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.scale


def threshold_labels(ratings, scale_max: int, split: float) -> np.ndarray:
    """Binarise ratings on a ``1..scale_max`` scale: high (1) iff rating >= split."""
    r = np.asarray(ratings, dtype=float)
    if np.any(r < 1) or np.any(r > scale_max) or np.any(np.isnan(r)):
        raise ValueError(f"ratings must lie within [1, {scale_max}]")
    return (r >= split).astype(np.int64)


def _check_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain non-finite values")


# -- kNN -------------------------------------------------------------------------

def _majority(labels: np.ndarray) -> int:
    ones = int(labels.sum())
    return 1 if ones > labels.size - ones else 0


def knn_predict(train: LabeledDataset, query, k: int = 9) -> int:
    """Plurality vote of the ``k`` Euclidean nearest neighbours.

    Distance ties go to the lower training index; vote ties go to the
    training-set majority class, then to 0.
    """
    if len(train) == 0:
        raise ValueError("empty training set")
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > len(train):
        raise ValueError(f"k={k} exceeds training set size {len(train)}")
    scaler = Standardizer.fit(train.features)
    xs = scaler.transform(train.features)
    q = scaler.transform(np.asarray(query, dtype=float).reshape(1, -1))
    if q.shape[1] != xs.shape[1]:
        raise ValueError(f"query has {q.shape[1]} features, model expects {xs.shape[1]}")
    d2 = ((xs - q) ** 2).sum(axis=1)
    nearest = np.argsort(d2, kind="stable")[:k]
    ones = int(train.labels[nearest].sum())
    zeros = k - ones
    if ones != zeros:
        return int(ones > zeros)
    return _majority(train.labels)


# -- SVM -------------------------------------------------------------------------

@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    dual_coefficients: np.ndarray  # y_i * lambda_i
    bias: float
    kernel_gamma: float
    scaler: Standardizer
    C: float
    n_iter: int = 0
    converged: bool = True

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def decision_function(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.n_features:
            raise ValueError(f"input has {x.shape[1]} features, model expects {self.n_features}")
        z = self.scaler.transform(x)
        k = rbf_kernel(z, self.support_vectors, self.kernel_gamma)
        f = self.bias + k @ self.dual_coefficients
        return f[0] if single else f


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    sq = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
    return np.exp(-gamma * np.clip(sq, 0.0, None))


def _smo(K: np.ndarray, y: np.ndarray, C: float, tol: float, max_iter: int):
    """Solve ``min 1/2 a'Qa - e'a`` s.t. ``0 <= a <= C, y'a = 0``.

    Returns ``(alpha, rho, n_iter, converged)``; the decision function is
    ``sum_i y_i alpha_i K(x_i, x) - rho``.
    """
    n = y.size
    Q = (y[:, None] * y[None, :]) * K
    alpha = np.zeros(n)
    grad = -np.ones(n)
    tau = 1e-12
    stall_limit = 10 * n
    stall = 0
    it = 0
    converged = False
    while it < max_iter:
        yg = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.flatnonzero(up)[np.argmax(yg[up])])
        j = int(np.flatnonzero(low)[np.argmin(yg[low])])
        if yg[i] - yg[j] < tol:
            converged = True
            break
        it += 1
        a_old_i, a_old_j = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(Q[i, i] + Q[j, j] + 2.0 * Q[i, j], tau)
            delta = (-grad[i] - grad[j]) / quad
            diff = alpha[i] - alpha[j]
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            elif alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
        else:
            quad = max(Q[i, i] + Q[j, j] - 2.0 * Q[i, j], tau)
            delta = (grad[i] - grad[j]) / quad
            total = alpha[i] + alpha[j]
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            elif alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = total
        d_i, d_j = alpha[i] - a_old_i, alpha[j] - a_old_j
        if abs(d_i) + abs(d_j) < 1e-14:
            stall += 1
            if stall >= stall_limit:
                log.warning("SMO stalled after %d iterations without progress", it)
                break
        else:
            stall = 0
        grad += Q[:, i] * d_i + Q[:, j] * d_j
    else:
        log.warning("SMO hit the iteration cap (%d) before meeting the KKT tolerance", max_iter)

    yg = -y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(-yg[free].mean())
    else:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        m_up = yg[up].max() if up.any() else 0.0
        m_low = yg[low].min() if low.any() else 0.0
        rho = float(-(m_up + m_low) / 2.0)
    return alpha, rho, it, converged


def svm_train(train: LabeledDataset, C: float = 1.0, gamma: float | None = None,
              tol: float = KKT_TOL, max_iter: int | None = None) -> SvmModel:
    """Fit a Gaussian-kernel SVM, ``k(u, v) = exp(-gamma |u - v|^2)`` on z-scored features."""
    if C <= 0:
        raise ValueError("C must be positive")
    x = train.features
    _check_finite(x)
    if len(train) < 2 or np.unique(train.labels).size < 2:
        raise ValueError("SVM training needs both classes present")
    gamma = 1.0 / x.shape[1] if gamma is None else gamma
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    scaler = Standardizer.fit(x)
    z = scaler.transform(x)
    y = np.where(train.labels == 1, 1.0, -1.0)
    K = rbf_kernel(z, z, gamma)
    n = y.size
    alpha, rho, n_iter, converged = _smo(K, y, C, tol, max_iter or max(100_000, 1000 * n))
    sv = alpha > 0
    return SvmModel(
        support_vectors=z[sv],
        dual_coefficients=(alpha * y)[sv],
        bias=-rho,
        kernel_gamma=gamma,
        scaler=scaler,
        C=C,
        n_iter=n_iter,
        converged=converged,
    )


def svm_predict(model: SvmModel, x):
    """Map the sign of the decision function to {0, 1}; exactly 0 maps to 1."""
    f = model.decision_function(x)
    out = (np.asarray(f) >= 0).astype(np.int64)
    return int(out) if out.ndim == 0 else out


# -- protocol --------------------------------------------------------------------

@dataclass(frozen=True)
class ClassifierSpec:
    """Serializable classifier descriptor.

    For ``svm``, leaving ``C`` or ``gamma`` unset selects them on a stratified
    holdout of each training fold.
    """

    type: str = "svm"
    C: float | None = None
    gamma: float | None = None
    k: int = 9
    seed: int = 0

    def __post_init__(self):
        if self.type not in ("svm", "knn"):
            raise ValueError(f"unknown classifier type {self.type!r}")
        if self.type == "knn" and self.k < 1:
            raise ValueError("kNN needs k >= 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierSpec":
        unknown = set(d) - {"type", "C", "gamma", "k", "seed"}
        if unknown:
            raise ValueError(f"unknown classifier keys: {sorted(unknown)}")
        return cls(**d)

    @property
    def label(self) -> str:
        if self.type == "knn":
            return f"knn(k={self.k})"
        c = "auto" if self.C is None else f"{self.C:g}"
        g = "auto" if self.gamma is None else f"{self.gamma:g}"
        return f"svm(C={c},gamma={g})"


@dataclass(frozen=True)
class CvScheme:
    kind: str = "k_fold"
    k: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("leave_one_out", "k_fold"):
            raise ValueError(f"unknown CV kind {self.kind!r}")
        if self.kind == "k_fold" and self.k < 2:
            raise ValueError("k-fold CV needs k >= 2")


@dataclass
class PredictionSet:
    trial_ids: tuple[str, ...]
    true_labels: np.ndarray
    predicted_labels: np.ndarray
    fold_assignments: np.ndarray
    classifier: dict
    flags: list[str] = field(default_factory=list)


def make_folds(n: int, scheme: CvScheme) -> list[np.ndarray]:
    """Disjoint, exhaustive test folds over ``range(n)``."""
    if scheme.kind == "leave_one_out":
        if n < 2:
            raise ValueError("leave-one-out needs at least 2 samples")
        return [np.array([i]) for i in range(n)]
    if n < scheme.k:
        raise ValueError(f"{scheme.k}-fold CV needs at least {scheme.k} samples, got {n}")
    perm = np.random.default_rng(scheme.seed).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, scheme.k)]


def select_hyperparameters(data: LabeledDataset, grid: Sequence[tuple[float, float]] | None = None,
                           holdout_fraction: float = 0.15, seed: int = 0) -> dict:
    """Pick SVM ``(C, gamma)`` maximising balanced accuracy on a stratified holdout.

    Ties go to the smaller C, then the smaller gamma.
    """
    if not 0.0 < holdout_fraction <= 0.5:
        raise ValueError("holdout fraction must lie in (0, 0.5]")
    d = data.features.shape[1]
    if grid is None:
        grid = [(c, g / d) for c in DEFAULT_C_GRID for g in DEFAULT_GAMMA_GRID]
    grid = sorted((float(c), float(g)) for c, g in grid)
    if not grid:
        raise ValueError("empty hyperparameter grid")
    if len(grid) == 1:
        return {"C": grid[0][0], "gamma": grid[0][1]}

    rng = np.random.default_rng(seed)
    hold, fit = [], []
    for cls in (0, 1):
        idx = np.flatnonzero(data.labels == cls)
        if idx.size < 2:
            raise ValueError(f"class {cls} has {idx.size} samples; a stratified holdout needs 2")
        idx = rng.permutation(idx)
        n_hold = min(idx.size - 1, max(1, int(round(holdout_fraction * idx.size))))
        hold.append(idx[:n_hold])
        fit.append(idx[n_hold:])
    hold_idx = np.sort(np.concatenate(hold))
    fit_idx = np.sort(np.concatenate(fit))
    train, test = data.subset(fit_idx), data.subset(hold_idx)

    best, best_score = grid[0], -1.0
    for c, g in grid:
        model = svm_train(train, c, g)
        pred = svm_predict(model, test.features)
        score = balanced_accuracy(confusion_matrix(test.labels, pred, 2))
        if score > best_score:
            best, best_score = (c, g), score
    return {"C": best[0], "gamma": best[1]}


def _fit_predict(train: LabeledDataset, test_x: np.ndarray, spec: ClassifierSpec, seed: int,
                 flags: list[str], fold: int) -> np.ndarray:
    if spec.type == "knn":
        k = min(spec.k, len(train))
        if k < spec.k:
            flags.append(f"fold{fold}_knn_k_reduced_to_{k}")
        return np.array([knn_predict(train, q, k) for q in test_x], dtype=np.int64)
    C, gamma = spec.C, spec.gamma
    if C is None or gamma is None:
        try:
            chosen = select_hyperparameters(train, seed=seed)
        except ValueError:
            chosen = {"C": 1.0, "gamma": 1.0 / train.features.shape[1]}
            flags.append(f"fold{fold}_hyperparameter_default")
        C = chosen["C"] if C is None else C
        gamma = chosen["gamma"] if gamma is None else gamma
    model = svm_train(train, C, gamma)
    if not model.converged:
        flags.append(f"fold{fold}_svm_not_converged")
    return np.asarray(svm_predict(model, test_x), dtype=np.int64).reshape(-1)


def cross_validate(data: LabeledDataset, scheme: CvScheme, classifier: ClassifierSpec | None = None,
                   pca_fraction: float | None = None) -> PredictionSet:
    """Predict every trial exactly once from a model fit on the other folds.

    The dataset is put into trial-id order first, so folds and predictions
    do not depend on row order.  Scaling (inside each classifier) and the
    optional PCA are fit on training rows only.  A training fold holding a
    single class predicts that class and is flagged.
    """
    classifier = classifier or ClassifierSpec()
    order = np.argsort(np.array(data.trial_ids), kind="stable")
    data = data.subset(order)
    _check_finite(data.features)
    folds = make_folds(len(data), scheme)
    pred = np.full(len(data), -1, dtype=np.int64)
    assign = np.full(len(data), -1, dtype=np.int64)
    flags: list[str] = []
    for f, test_idx in enumerate(folds):
        train_mask = np.ones(len(data), dtype=bool)
        train_mask[test_idx] = False
        train = data.subset(np.flatnonzero(train_mask))
        test_x = data.features[test_idx]
        if pca_fraction is not None:
            proj = pca_fit(train.features, pca_fraction)
            train = LabeledDataset(proj.transform(train.features), train.labels, train.trial_ids, train.dimension)
            test_x = proj.transform(test_x)
        if np.unique(train.labels).size < 2:
            flags.append(f"fold{f}_single_class_training")
            pred[test_idx] = int(train.labels[0])
        else:
            pred[test_idx] = _fit_predict(train, test_x, classifier, scheme.seed + f, flags, f)
        assign[test_idx] = f
    return PredictionSet(data.trial_ids, data.labels.copy(), pred, assign, classifier.to_dict(), flags)


__all__ = [
    "DIMENSIONS", "LabeledDataset", "Standardizer", "SvmModel", "ClassifierSpec", "CvScheme",
    "PredictionSet", "threshold_labels", "knn_predict", "svm_train", "svm_predict", "rbf_kernel",
    "make_folds", "select_hyperparameters", "cross_validate", "PCA_VARIANCE_FRACTION",
]
