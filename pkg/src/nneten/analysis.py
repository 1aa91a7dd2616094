"""Statistical separation machinery.

Separation of signal classes by their entropy features is scored three
ways: the one-way ANOVA F-ratio between classes, the repeated
stratified-K-fold SVM accuracy A_RKF, and the synergy coefficient of a
feature pair over its best single feature.  A soft-margin RBF-kernel
SVM trained by sequential minimal optimization is included so fold
evaluation is fully deterministic and dependency-free.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import stats as _stats

from . import engine as _engine
from .errors import ConvergenceError, DomainError, ShapeError


# ---------------------------------------------------------------------------
# one-way ANOVA
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FRatioResult:
    """F statistic with its degrees of freedom and p-value.

    Degenerate cases are carried as a flag so reports stay serializable:
    `flag` is "infinite" when within-group variance is zero but means
    differ, "undefined" when both variances are zero.
    """

    f: float
    df_between: int
    df_within: int
    p_value: float
    flag: str | None = None

    @property
    def is_infinite(self):
        return self.flag == "infinite"

    @property
    def is_undefined(self):
        return self.flag == "undefined"


def f_ratio(groups):
    """One-way ANOVA F-ratio over two or more observation groups."""
    groups = [np.asarray(g, dtype=np.float64).ravel() for g in groups]
    if len(groups) < 2:
        raise DomainError("need at least two groups")
    for g in groups:
        if g.size < 2:
            raise DomainError("every group needs at least two observations")
    total = np.concatenate(groups)
    grand = total.mean()
    ss_between = sum(g.size * (g.mean() - grand) ** 2 for g in groups)
    ss_within = sum(float(((g - g.mean()) ** 2).sum()) for g in groups)
    df_between = len(groups) - 1
    df_within = total.size - len(groups)
    if ss_within == 0.0:
        if ss_between == 0.0:
            return FRatioResult(float("nan"), df_between, df_within, float("nan"), flag="undefined")
        return FRatioResult(float("inf"), df_between, df_within, 0.0, flag="infinite")
    f = (ss_between / df_between) / (ss_within / df_within)
    p = float(_stats.f.sf(f, df_between, df_within))
    return FRatioResult(float(f), df_between, df_within, p)


# ---------------------------------------------------------------------------
# entropy sweeps and difference grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    nset: int
    metric: str
    method: int
    epochs: int
    class_means: tuple
    class_stds: tuple
    f: FRatioResult


def entropy_sweep(classes, prepared, nsets=range(1, 73), seed=None,
                  learning_rate=None, threads=1):
    """Per-setting class statistics and F-ratio for collections of series.

    `classes` is a list of series collections, one per class.  Every
    series is evaluated at every nset; each row reports the class means,
    sample standard deviations and the between-class F-ratio.
    """
    nsets = list(nsets)
    kwargs = {}
    if seed is not None:
        kwargs["seed"] = seed
    if learning_rate is not None:
        kwargs["learning_rate"] = learning_rate
    per_class = [
        _engine.nset_values_many(prepared, series_list, nsets, threads=threads, **kwargs)
        for series_list in classes
    ]
    rows = []
    for n in nsets:
        groups = [np.array([d[n] for d in cls_vals]) for cls_vals in per_class]
        m1, m2, m3 = _engine.nset_decode(n)
        rows.append(SweepRow(
            nset=n,
            metric=_engine.METRIC_TYPES[m1 - 1],
            method=m2,
            epochs=_engine.EPOCH_STEPS[m3 - 1],
            class_means=tuple(float(g.mean()) for g in groups),
            class_stds=tuple(float(g.std(ddof=1)) for g in groups),
            f=f_ratio(groups),
        ))
    return rows


def difference_grid(values_a, values_b, labels):
    """F-ratio of the feature difference a_i - b_j for every setting pair.

    `values_a` and `values_b` are (settings, observations) matrices over
    the same observations; `labels` assigns each observation to a class.
    """
    values_a = np.asarray(values_a, dtype=np.float64)
    values_b = np.asarray(values_b, dtype=np.float64)
    labels = np.asarray(labels)
    if values_a.shape[1] != values_b.shape[1] or values_a.shape[1] != labels.size:
        raise ShapeError(
            f"observation counts differ: {values_a.shape[1]}, {values_b.shape[1]}, {labels.size}"
        )
    classes = np.unique(labels)
    grid = np.empty((values_a.shape[0], values_b.shape[0]), dtype=object)
    for i in range(values_a.shape[0]):
        for j in range(values_b.shape[0]):
            diff = values_a[i] - values_b[j]
            grid[i, j] = f_ratio([diff[labels == c] for c in classes])
    return grid


# ---------------------------------------------------------------------------
# RBF-kernel SVM trained by sequential minimal optimization
# ---------------------------------------------------------------------------

@dataclass
class SvmModel:
    x: np.ndarray
    y: np.ndarray  # labels mapped to -1/+1
    alphas: np.ndarray
    b: float
    c: float
    gamma: float
    classes: np.ndarray = None


def _rbf_matrix(a, b, gamma):
    sq = (
        np.sum(a ** 2, axis=1)[:, None]
        + np.sum(b ** 2, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@njit(cache=True, nogil=True)
def _smo_solve(kmat, y, c, tol, max_iter):
    """Maximal-violating-pair SMO on the dual problem.

    Returns (alphas, b, converged).  Working-set selection is libsvm's:
    first-order for i, second-order for j; ties break on the lowest
    index, so the solve is deterministic.
    """
    n = y.shape[0]
    alphas = np.zeros(n)
    grad = np.full(n, -1.0)  # gradient of the dual objective at alpha = 0
    converged = False
    m_up = 0.0
    m_low = 0.0
    for _ in range(max_iter):
        i = -1
        m_up = -np.inf
        m_low = np.inf
        for t in range(n):
            s = -y[t] * grad[t]
            if (y[t] > 0 and alphas[t] < c) or (y[t] < 0 and alphas[t] > 0):
                if s > m_up:
                    m_up = s
                    i = t
            if (y[t] < 0 and alphas[t] < c) or (y[t] > 0 and alphas[t] > 0):
                if s < m_low:
                    m_low = s
        if m_up - m_low <= tol:
            converged = True
            break
        # second-order choice of j: largest dual decrease among violators
        j = -1
        best = np.inf
        for t in range(n):
            if not ((y[t] < 0 and alphas[t] < c) or (y[t] > 0 and alphas[t] > 0)):
                continue
            b_it = m_up - (-y[t] * grad[t])
            if b_it <= 0:
                continue
            quad = kmat[i, i] + kmat[t, t] - 2.0 * y[i] * y[t] * kmat[i, t]
            if quad < 1e-12:
                quad = 1e-12
            obj = -(b_it * b_it) / quad
            if obj < best:
                best = obj
                j = t
        if j < 0:
            converged = True
            break
        old_ai, old_aj = alphas[i], alphas[j]
        quad = kmat[i, i] + kmat[j, j] - 2.0 * y[i] * y[j] * kmat[i, j]
        if quad < 1e-12:
            quad = 1e-12
        if y[i] != y[j]:
            delta = (-grad[i] - grad[j]) / quad
            diff = old_ai - old_aj
            ai, aj = old_ai + delta, old_aj + delta
            if diff > 0 and aj < 0:
                ai, aj = diff, 0.0
            elif diff <= 0 and ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0 and ai > c:
                ai, aj = c, c - diff
            elif diff <= 0 and aj > c:
                ai, aj = c + diff, c
        else:
            delta = (grad[i] - grad[j]) / quad
            total = old_ai + old_aj
            ai, aj = old_ai - delta, old_aj + delta
            if total > c and ai > c:
                ai, aj = c, total - c
            elif total <= c and aj < 0:
                ai, aj = total, 0.0
            if total > c and aj > c:
                ai, aj = total - c, c
            elif total <= c and ai < 0:
                ai, aj = 0.0, total
        d_i, d_j = ai - old_ai, aj - old_aj
        alphas[i] = ai
        alphas[j] = aj
        for t in range(n):
            grad[t] += y[t] * (y[i] * kmat[t, i] * d_i + y[j] * kmat[t, j] * d_j)
    # offset from free support vectors, midpoint of the gap otherwise
    b_sum = 0.0
    b_count = 0
    for t in range(n):
        if 1e-12 < alphas[t] < c - 1e-12:
            b_sum += -y[t] * grad[t]
            b_count += 1
    b = b_sum / b_count if b_count else 0.5 * (m_up + m_low)
    return alphas, b, converged


def svm_train(features, labels, c, gamma, seed=0, tol=1e-3, max_iter=None):
    """Train a soft-margin binary RBF SVM by sequential minimal optimization.

    Training stops once the KKT violation gap falls below `tol`.  The
    solver is fully deterministic; `seed` is accepted for interface
    symmetry with the fold machinery but has no effect.  Raises
    ConvergenceError if the gap has not closed after `max_iter` pair
    updates (default 1000 * n, at least 100000).
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    raw_labels = np.asarray(labels)
    classes = np.unique(raw_labels)
    if classes.size != 2:
        raise DomainError(f"need exactly two classes, got {classes.size}")
    y = np.where(raw_labels == classes[1], 1.0, -1.0)
    if max_iter is None:
        max_iter = max(100000, 1000 * len(y))
    kmat = _rbf_matrix(x, x, gamma)
    alphas, b, converged = _smo_solve(kmat, y, float(c), float(tol), int(max_iter))
    if not converged:
        raise ConvergenceError(f"SMO did not converge within {max_iter} pair updates")
    return SvmModel(x=x, y=y, alphas=alphas, b=float(b), c=c, gamma=gamma, classes=classes)


def svm_decision(model, features):
    x = np.asarray(features, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    kmat = _rbf_matrix(x, model.x, model.gamma)
    return kmat @ (model.alphas * model.y) + model.b


def svm_predict(model, features):
    dec = svm_decision(model, features)
    return np.where(dec >= 0, model.classes[1], model.classes[0])


# ---------------------------------------------------------------------------
# repeated stratified K-fold accuracy
# ---------------------------------------------------------------------------

DEFAULT_HYPER_GRID = tuple(
    (c, g) for c in (0.1, 1.0, 10.0, 100.0) for g in (0.01, 0.1, 1.0, 10.0)
)


@dataclass(frozen=True)
class RkfConfig:
    k_folds: int = 5
    n_repeats_search: int = 5
    n_repeats_eval: int = 10
    hyper_grid: tuple = DEFAULT_HYPER_GRID
    seed: int = 0


@dataclass(frozen=True)
class FeatureTable:
    """Observations x named entropy features with class labels."""

    features: np.ndarray
    columns: tuple
    labels: np.ndarray

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        if feats.ndim == 1:
            feats = feats[:, None]
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", np.asarray(self.labels))
        if feats.shape[1] != len(self.columns):
            raise ShapeError(f"{feats.shape[1]} feature columns vs {len(self.columns)} names")
        if len(set(self.columns)) != len(self.columns):
            raise DomainError("feature column names must be unique")
        if not np.all(np.isfinite(feats)):
            raise DomainError("feature table contains non-finite values")
        if len(self.labels) != len(feats):
            raise ShapeError("labels and feature rows differ in length")


@dataclass(frozen=True)
class RkfResult:
    a_rkf: float
    best_c: float
    best_gamma: float
    search_score: float


def stratified_folds(labels, k_folds, rng):
    """Shuffled per-class round-robin assignment: per-fold class counts
    stay within one sample of the global proportion."""
    folds = [[] for _ in range(k_folds)]
    for cls in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == cls))
        for pos, i in enumerate(idx):
            folds[pos % k_folds].append(int(i))
    return [np.sort(np.array(f, dtype=np.int64)) for f in folds]


def _fold_accuracy(features, labels, train_idx, val_idx, c, gamma):
    x_train, x_val = features[train_idx], features[val_idx]
    mean = x_train.mean(axis=0)
    std = x_train.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    model = svm_train((x_train - mean) / std, labels[train_idx], c, gamma)
    pred = svm_predict(model, (x_val - mean) / std)
    return float(np.mean(pred == labels[val_idx]))


def _repeat_scores(features, labels, config, seeds, c, gamma):
    scores = []
    for child in seeds:
        rng = np.random.default_rng(child)
        folds = stratified_folds(labels, config.k_folds, rng)
        everything = np.arange(len(labels))
        for f_idx in range(config.k_folds):
            val_idx = folds[f_idx]
            train_idx = np.setdiff1d(everything, val_idx)
            scores.append(_fold_accuracy(features, labels, train_idx, val_idx, c, gamma))
    return scores


def rkf_accuracy(table, config=None):
    """Two-stage repeated stratified K-fold SVM accuracy.

    Stage one grid-searches (C, gamma) by mean validation accuracy over
    `n_repeats_search` x `k_folds` partitions; stage two re-scores the
    winner on `n_repeats_eval` fresh partitions and returns the mean.
    """
    config = config or RkfConfig()
    features, labels = table.features, table.labels
    counts = np.bincount(labels.astype(np.int64))
    if np.any(counts[np.unique(labels.astype(np.int64))] < config.k_folds):
        raise DomainError(f"every class needs >= {config.k_folds} samples")
    root = np.random.SeedSequence(config.seed)
    children = root.spawn(config.n_repeats_search + config.n_repeats_eval)
    search_seeds = children[:config.n_repeats_search]
    eval_seeds = children[config.n_repeats_search:]

    best = None
    for c, gamma in config.hyper_grid:
        score = float(np.mean(_repeat_scores(features, labels, config, search_seeds, c, gamma)))
        if best is None or score > best[0]:
            best = (score, c, gamma)
    search_score, best_c, best_gamma = best
    a_rkf = float(np.mean(_repeat_scores(features, labels, config, eval_seeds, best_c, best_gamma)))
    return RkfResult(a_rkf=a_rkf, best_c=best_c, best_gamma=best_gamma, search_score=search_score)


# ---------------------------------------------------------------------------
# synergy of a feature pair
# ---------------------------------------------------------------------------

def synergy(a1, a2, a12):
    """Synergy coefficient of combining two features: headroom of the best
    single feature over the headroom left by the pair."""
    for name, value in (("a1", a1), ("a2", a2), ("a12", a12)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"{name}={value} outside [0, 1]")
    return (1.0 - max(a1, a2)) / (1.001 - a12)
