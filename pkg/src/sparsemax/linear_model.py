"""Regularized linear models for distribution targets.

Trains W, b to minimize  lam/2 * ||W||_F^2 + mean_i L(W x_i + b; q_i)
by full-batch gradient descent with a backtracking line search.  The bias
is never regularized.  Three loss kinds are supported: the multinomial
logistic loss, its sparse analogue, and a bank of independent binary
logistic losses (one per label, with targets q_i > 0).

Set-valued prediction is done by a :class:`DecisionRule`: thresholding the
per-label sigmoid, thresholding the softmax, or taking the support of
sparsemax applied to scaled scores.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .datasets import LabeledDataset
from .simplex import softmax, sparsemax

__all__ = [
    "LOSS_LOGISTIC",
    "LOSS_SPARSEMAX",
    "LOSS_BINARY_LOGISTIC",
    "LOSS_KINDS",
    "RULE_LOGISTIC_THRESHOLD",
    "RULE_SOFTMAX_THRESHOLD",
    "RULE_SPARSEMAX_SCALE",
    "LinearModel",
    "TrainConfig",
    "DecisionRule",
    "fit",
    "predict_scores",
    "predict_labels",
    "cross_validate",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
]

LOSS_LOGISTIC = "logistic"
LOSS_SPARSEMAX = "sparsemax"
LOSS_BINARY_LOGISTIC = "independent-binary-logistic"
LOSS_KINDS = (LOSS_LOGISTIC, LOSS_SPARSEMAX, LOSS_BINARY_LOGISTIC)

RULE_LOGISTIC_THRESHOLD = "logistic_threshold"
RULE_SOFTMAX_THRESHOLD = "softmax_threshold"
RULE_SPARSEMAX_SCALE = "sparsemax_scale"

_MAX_HALVINGS = 30


@dataclass(frozen=True)
class LinearModel:
    W: np.ndarray  # (K, D)
    b: np.ndarray  # (K,)
    loss_kind: str

    def __post_init__(self) -> None:
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(f"unknown loss kind {self.loss_kind!r}")
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ValueError("W must be (K, D) and b must be (K,)")
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))):
            raise ValueError("model parameters must be finite")

    @property
    def n_labels(self) -> int:
        return self.W.shape[0]

    @property
    def n_features(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True)
class TrainConfig:
    lam: float = 0.0
    max_epochs: int = 100
    learning_rate: float = 1.0
    convergence_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("regularization strength must be nonnegative")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")


@dataclass(frozen=True)
class DecisionRule:
    """A set-valued prediction rule with one scalar parameter.

    logistic_threshold: labels with sigmoid(z_k) > param, param in [0, 1]
    softmax_threshold:  labels with softmax_k(z) > param, param in [0, 1]
    sparsemax_scale:    support of sparsemax(param * z), param >= 1

    Ties at the threshold stay off (strict comparison) and the predicted
    set may be empty.
    """

    kind: str
    param: float

    def __post_init__(self) -> None:
        if self.kind in (RULE_LOGISTIC_THRESHOLD, RULE_SOFTMAX_THRESHOLD):
            if not 0.0 <= self.param <= 1.0:
                raise ValueError(f"{self.kind} threshold must lie in [0, 1]")
        elif self.kind == RULE_SPARSEMAX_SCALE:
            if not self.param >= 1.0:
                raise ValueError("sparsemax_scale factor must be >= 1")
        else:
            raise ValueError(f"unknown decision rule {self.kind!r}")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    e = np.exp(z[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _row_threshold(scores: np.ndarray):
    """Sparsemax threshold per row of a score matrix: (sorted, k, tau)."""
    z_sorted = -np.sort(-scores, axis=1)
    cssv = np.cumsum(z_sorted, axis=1)
    ks = np.arange(1, scores.shape[1] + 1)
    feasible = 1.0 + ks * z_sorted > cssv
    k = scores.shape[1] - np.argmax(feasible[:, ::-1], axis=1)
    top = np.take_along_axis(cssv, (k - 1)[:, None], axis=1).ravel()
    tau = (top - 1.0) / k
    return z_sorted, k, tau


def _sparsemax_rows(scores: np.ndarray) -> np.ndarray:
    _, _, tau = _row_threshold(scores)
    return np.maximum(scores - tau[:, None], 0.0)


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    e = np.exp(scores - scores.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def _loss_grad_rows(scores: np.ndarray, targets: np.ndarray, loss_kind: str):
    """Per-example loss values (N,) and score gradients (N, K) for a batch."""
    if loss_kind == LOSS_LOGISTIC:
        m = scores.max(axis=1)
        lse = m + np.log(np.exp(scores - m[:, None]).sum(axis=1))
        logq = np.where(targets > 0, np.log(np.where(targets > 0, targets, 1.0)), 0.0)
        entropy = -(targets * logq).sum(axis=1)
        values = -entropy - (targets * scores).sum(axis=1) + lse
        grads = _softmax_rows(scores) - targets
    elif loss_kind == LOSS_SPARSEMAX:
        z_sorted, k, tau = _row_threshold(scores)
        css2 = np.cumsum(z_sorted * z_sorted, axis=1)
        top2 = np.take_along_axis(css2, (k - 1)[:, None], axis=1).ravel()
        values = (
            -(targets * scores).sum(axis=1)
            + 0.5 * (top2 - k * tau * tau)
            + 0.5 * (targets * targets).sum(axis=1)
        )
        grads = np.maximum(scores - tau[:, None], 0.0) - targets
    elif loss_kind == LOSS_BINARY_LOGISTIC:
        on = (targets > 0).astype(np.float64)
        values = (np.logaddexp(0.0, scores) - on * scores).sum(axis=1)
        grads = _sigmoid(scores) - on
    else:
        raise ValueError(f"unknown loss kind {loss_kind!r}")
    return values, grads


def _objective(W, b, X, Q, lam, loss_kind, want_grad=True):
    scores = X @ W.T + b
    values, grads = _loss_grad_rows(scores, Q, loss_kind)
    value = 0.5 * lam * float(np.sum(W * W)) + float(values.mean())
    if not want_grad:
        return value, None, None
    n = X.shape[0]
    grad_W = lam * W + grads.T @ X / n
    grad_b = grads.mean(axis=0)
    return value, grad_W, grad_b


def fit(data: LabeledDataset, cfg: TrainConfig, loss_kind: str, init=None, history=None) -> LinearModel:
    """Train a linear model by batch gradient descent with backtracking.

    Every epoch takes the steepest-descent direction and tries a step of
    the previous accepted size doubled (capped at cfg.learning_rate and
    starting from it), halving up to 30 times until the objective strictly
    decreases.  Training stops at cfg.max_epochs, when the relative
    objective change falls below cfg.convergence_tol, or when no
    decreasing step exists.  Accepted objective values therefore decrease
    monotonically.

    The default start is W = 0, b = 0, which makes the whole procedure
    deterministic; pass init=(W0, b0) to start elsewhere (e.g. for
    convexity checks with random restarts).  If a `history` list is given,
    the objective value after every accepted epoch is appended to it.
    """
    if loss_kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {loss_kind!r}")
    n_labels, n_features = data.n_labels, data.n_features
    if init is None:
        W = np.zeros((n_labels, n_features))
        b = np.zeros(n_labels)
    else:
        W, b = (np.array(init[0], dtype=np.float64), np.array(init[1], dtype=np.float64))
        if W.shape != (n_labels, n_features) or b.shape != (n_labels,):
            raise ValueError("init shapes do not match the data dimensions")
    X, Q = data.X, data.Q
    value, grad_W, grad_b = _objective(W, b, X, Q, cfg.lam, loss_kind)
    if not np.isfinite(value):
        raise FloatingPointError("objective is not finite at the starting point")
    if history is not None:
        history.append(value)
    step = cfg.learning_rate
    for _ in range(cfg.max_epochs):
        trial = step
        accepted = False
        for _ in range(_MAX_HALVINGS + 1):
            W_new = W - trial * grad_W
            b_new = b - trial * grad_b
            value_new, _, _ = _objective(W_new, b_new, X, Q, cfg.lam, loss_kind, want_grad=False)
            if np.isfinite(value_new) and value_new < value:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            break
        rel_change = abs(value - value_new) / max(1.0, abs(value))
        W, b = W_new, b_new
        value, grad_W, grad_b = _objective(W, b, X, Q, cfg.lam, loss_kind)
        if history is not None:
            history.append(value)
        step = min(cfg.learning_rate, 2.0 * trial)
        if rel_change < cfg.convergence_tol:
            break
    return LinearModel(W=W, b=b, loss_kind=loss_kind)


def predict_scores(model: LinearModel, x) -> np.ndarray:
    """Label scores W x + b for a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n_features,):
        raise ValueError(f"expected a feature vector of length {model.n_features}")
    return model.W @ x + model.b


def predict_labels(model: LinearModel, x, rule: DecisionRule) -> set[int]:
    """Set of 0-based labels switched on by the decision rule (may be empty)."""
    z = predict_scores(model, x)
    if rule.kind == RULE_LOGISTIC_THRESHOLD:
        on = _sigmoid(z) > rule.param
    elif rule.kind == RULE_SOFTMAX_THRESHOLD:
        on = softmax(z) > rule.param
    else:
        on = sparsemax(rule.param * z) > 0.0
    return set(np.nonzero(on)[0].tolist())


def cross_validate(data: LabeledDataset, grid, folds: int, evaluate, seed: int = 0):
    """Pick the best (lam, rule_param) pair by mean validation score.

    `grid` is a sequence of (lam, rule_param) pairs; rule_param may be
    None when only lam is swept.  `evaluate(fold_index, train_split,
    val_split, lam, rule_param)` must return a score where higher is
    better.  Folds are a seeded permutation split into near-equal parts,
    so the assignment is reproducible.  Exact score ties go to the
    smaller lam, then the smaller rule parameter.  A single-candidate
    grid is returned immediately without training.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("hyperparameter grid is empty")
    if len(grid) == 1:
        return grid[0]
    if folds < 2:
        raise ValueError("need at least two folds")
    if data.n_examples < folds:
        raise ValueError("fewer examples than folds")
    rng = np.random.default_rng(seed)
    order = rng.permutation(data.n_examples)
    parts = np.array_split(order, folds)
    if any(part.size == 0 for part in parts):
        raise ValueError("fold assignment produced an empty fold")
    splits = []
    for i, part in enumerate(parts):
        rest = np.concatenate([p for j, p in enumerate(parts) if j != i])
        splits.append((data.subset(rest), data.subset(part)))
    best = None
    best_score = -np.inf
    key = lambda cand: (cand[0], cand[1] if cand[1] is not None else 0.0)
    for lam, param in sorted(grid, key=key):
        scores = [
            evaluate(i, train_split, val_split, lam, param)
            for i, (train_split, val_split) in enumerate(splits)
        ]
        mean_score = float(np.mean(scores))
        if mean_score > best_score:
            best = (lam, param)
            best_score = mean_score
    return best


def model_to_dict(model: LinearModel) -> dict:
    return {
        "K": model.n_labels,
        "D": model.n_features,
        "loss_kind": model.loss_kind,
        "W": model.W.ravel().tolist(),  # row-major
        "b": model.b.tolist(),
    }


def model_from_dict(payload: dict) -> LinearModel:
    n_labels = int(payload["K"])
    n_features = int(payload["D"])
    W = np.asarray(payload["W"], dtype=np.float64).reshape(n_labels, n_features)
    b = np.asarray(payload["b"], dtype=np.float64)
    return LinearModel(W=W, b=b, loss_kind=payload["loss_kind"])


def save_model(model: LinearModel, path) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> LinearModel:
    with open(path) as fh:
        return model_from_dict(json.load(fh))
