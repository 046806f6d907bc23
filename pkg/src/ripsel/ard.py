"""Automatic relevance determination with a two-layer Bayesian perceptron.

The network is ``y = logistic(W2 . sigmoid(W1^T x + b1) + b2)``. Each input's
fan-out row of ``W1`` gets its own weight-decay hyperparameter, the hidden to
output weights share one, and all biases share one. Hyperparameters are
re-estimated periodically with MacKay's evidence update using a Gauss-Newton
approximation of the posterior covariance.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .data import Dataset
from .errors import ConfigurationError, DataError, NumericalError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MlpArchitecture:
    n_inputs: int
    n_hidden: int = 8
    n_outputs: int = 1
    hidden_activation: str = "sigmoid"
    output_activation: str = "logistic"

    def __post_init__(self):
        if self.n_inputs < 1 or self.n_hidden < 1:
            raise ConfigurationError("n_inputs and n_hidden must be >= 1")
        if self.n_outputs != 1:
            raise ConfigurationError("only a single logistic output is supported")

    @property
    def n_params(self) -> int:
        return self.n_inputs * self.n_hidden + 2 * self.n_hidden + 1

    def slices(self):
        """Flat-vector slices of W1 (input-major), b1, W2 and b2."""
        a = self.n_inputs * self.n_hidden
        h = self.n_hidden
        return slice(0, a), slice(a, a + h), slice(a + h, a + 2 * h), slice(a + 2 * h, a + 2 * h + 1)

    def groups(self) -> list[np.ndarray]:
        """One group per input's fan-out, then hidden->output weights, then all biases."""
        s_w1, s_b1, s_w2, s_b2 = self.slices()
        h = self.n_hidden
        fan_out = [np.arange(i * h, (i + 1) * h) for i in range(self.n_inputs)]
        biases = np.r_[np.arange(s_b1.start, s_b1.stop), np.arange(s_b2.start, s_b2.stop)]
        return fan_out + [np.arange(s_w2.start, s_w2.stop), biases]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 1000
    learning_rate: float = 1.0
    momentum: float = 0.0
    evidence_period: int = 100
    seed: int = 0
    init_scale: float = 1.0
    alpha_init: float = 0.01
    alpha_clip: tuple[float, float] = (1e-6, 1e6)

    def __post_init__(self):
        if self.epochs < 1 or self.evidence_period < 1:
            raise ConfigurationError("epochs and evidence_period must be >= 1")
        if self.learning_rate <= 0 or not 0 <= self.momentum < 1:
            raise ConfigurationError("need learning_rate > 0 and 0 <= momentum < 1")
        lo, hi = self.alpha_clip
        if not 0 < lo < hi:
            raise ConfigurationError("alpha_clip must satisfy 0 < min < max")
        if self.alpha_init <= 0:
            raise ConfigurationError("alpha_init must be positive")


@dataclass(frozen=True, eq=False)
class ArdModel:
    arch: MlpArchitecture
    weights: np.ndarray
    alphas: np.ndarray
    relevance: np.ndarray
    trained_epochs: int = 0
    input_mean: np.ndarray | None = None
    input_scale: np.ndarray | None = None
    attribute_names: tuple[str, ...] | None = None
    history: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.weights.shape != (self.arch.n_params,):
            raise ConfigurationError("weight vector does not match the architecture")
        if self.alphas.shape != (len(self.arch.groups()),):
            raise ConfigurationError("need one alpha per weight group")

    @property
    def groups(self) -> list[np.ndarray]:
        return self.arch.groups()

    def network_inputs(self, data: Dataset) -> np.ndarray:
        """Z-scored features with missing cells at the training mean (0)."""
        X = data.values
        if self.input_mean is not None:
            X = (X - self.input_mean) / self.input_scale
        return np.where(data.missing, 0.0, X)

    def predict_proba(self, data: Dataset) -> np.ndarray:
        return expit(logits(self.weights, self.arch, self.network_inputs(data)))

    def to_dict(self, kept=None) -> dict:
        return {
            "arch": {"n_inputs": self.arch.n_inputs, "n_hidden": self.arch.n_hidden},
            "weights": self.weights.tolist(),
            "alphas": self.alphas.tolist(),
            "relevance": self.relevance.tolist(),
            "trained_epochs": self.trained_epochs,
            "input_mean": None if self.input_mean is None else self.input_mean.tolist(),
            "input_scale": None if self.input_scale is None else self.input_scale.tolist(),
            "attribute_names": list(self.attribute_names) if self.attribute_names else None,
            "kept": None if kept is None else [int(k) for k in kept],
        }

    @classmethod
    def from_dict(cls, d: dict) -> ArdModel:
        def arr(key):
            return None if d.get(key) is None else np.asarray(d[key], float)
        return cls(MlpArchitecture(**d["arch"]), arr("weights"), arr("alphas"), arr("relevance"),
                   int(d.get("trained_epochs", 0)), arr("input_mean"), arr("input_scale"),
                   tuple(d["attribute_names"]) if d.get("attribute_names") else None)

    def to_json(self, kept=None) -> str:
        return json.dumps(self.to_dict(kept))


def unpack(w, arch: MlpArchitecture):
    s_w1, s_b1, s_w2, s_b2 = arch.slices()
    return (w[s_w1].reshape(arch.n_inputs, arch.n_hidden), w[s_b1], w[s_w2], w[s_b2][0])


def _hidden(w, arch, X):
    W1, b1, W2, b2 = unpack(w, arch)
    return expit(X @ W1 + b1), W2, b2


def logits(w, arch: MlpArchitecture, X) -> np.ndarray:
    h, W2, b2 = _hidden(w, arch, np.atleast_2d(X))
    return h @ W2 + b2


def forward(model: ArdModel, x) -> float:
    """P(class = 1 | x) for one network-space input vector."""
    return float(expit(logits(model.weights, model.arch, np.asarray(x, float)[None, :]))[0])


def alpha_per_param(alphas, groups, n_params) -> np.ndarray:
    out = np.empty(n_params)
    for a, g in zip(alphas, groups):
        out[g] = a
    return out


def data_error(w, arch, X, t) -> float:
    """Cross-entropy summed over rows, computed from logits for stability."""
    a = logits(w, arch, X)
    return float(np.sum(np.logaddexp(0.0, a) - t * a))


def penalty(w, alphas, groups) -> float:
    return float(sum(a * 0.5 * np.dot(w[g], w[g]) for a, g in zip(alphas, groups)))


def objective_value(w, arch, X, t, alphas) -> float:
    return data_error(w, arch, X, t) + penalty(w, alphas, arch.groups())


def data_gradient(w, arch, X, t) -> np.ndarray:
    """Backpropagated gradient of :func:`data_error`."""
    h, W2, b2 = _hidden(w, arch, X)
    delta_out = expit(h @ W2 + b2) - t
    delta_hid = np.outer(delta_out, W2) * h * (1.0 - h)
    return np.concatenate([(X.T @ delta_hid).ravel(), delta_hid.sum(axis=0),
                           h.T @ delta_out, [delta_out.sum()]])


def objective_gradient(w, arch, X, t, alphas) -> np.ndarray:
    return data_gradient(w, arch, X, t) + alpha_per_param(alphas, arch.groups(), arch.n_params) * w


def objective(model: ArdModel, data: Dataset) -> float:
    """Cross-entropy plus grouped weight decay of ``model`` on ``data``."""
    return objective_value(model.weights, model.arch, model.network_inputs(data),
                           binary_targets(data), model.alphas)


def output_jacobian(w, arch, X) -> np.ndarray:
    """d(logit)/dw for every row, shape (n, n_params)."""
    h, W2, _ = _hidden(w, arch, X)
    d_hid = h * (1.0 - h) * W2
    n = X.shape[0]
    J_w1 = (X[:, :, None] * d_hid[:, None, :]).reshape(n, -1)
    return np.hstack([J_w1, d_hid, h, np.ones((n, 1))])


def posterior_group_traces(w, arch, X, alphas) -> np.ndarray:
    """Trace of each group's block of the Gauss-Newton posterior covariance."""
    J = output_jacobian(w, arch, X)
    y = expit(logits(w, arch, X))
    H = (J * (y * (1.0 - y))[:, None]).T @ J
    groups = arch.groups()
    A = H + np.diag(alpha_per_param(alphas, groups, arch.n_params))
    try:
        L = np.linalg.cholesky(A)
        L_inv = np.linalg.solve(L, np.eye(A.shape[0]))
        diag = np.sum(L_inv ** 2, axis=0)
    except np.linalg.LinAlgError:
        diag = np.diag(np.linalg.pinv(A))
    return np.array([diag[g].sum() for g in groups])


def effective_parameters(group_size, alpha, trace) -> float:
    """Well-determined parameter count ``k - alpha * trace(Sigma)`` of one group."""
    return float(group_size - alpha * trace)


GAMMA_TOL = 1e-3


def update_alphas(weights, alphas, group_traces, groups, clip=(1e-6, 1e6),
                  gamma_tol: float = GAMMA_TOL) -> np.ndarray:
    """Evidence re-estimation ``alpha_k = gamma_k / sum_{i in k} w_i^2``.

    Groups whose squared weight sum is below 1e-12, or whose data determine
    fewer than ``gamma_tol * |k|`` parameters, are sent to the upper clip.
    """
    lo, hi = clip
    new = np.empty(len(groups))
    for k, g in enumerate(groups):
        ss = float(np.dot(weights[g], weights[g]))
        gamma = min(max(effective_parameters(len(g), alphas[k], group_traces[k]), 0.0), len(g))
        if ss < 1e-12 or gamma < gamma_tol * len(g):
            new[k] = hi
            continue
        new[k] = gamma / ss
    return np.clip(new, lo, hi)


def relevance_scores(weights, arch: MlpArchitecture) -> np.ndarray:
    """Root-mean-square of each input's fan-out weights."""
    W1 = unpack(weights, arch)[0]
    return np.sqrt(np.mean(W1 ** 2, axis=1))


def binary_targets(data: Dataset) -> np.ndarray:
    if len(data.class_labels) != 2:
        raise DataError("ARD needs a binary class")
    return (data.classes == 1).astype(float)


def standardization(data: Dataset):
    mean = np.zeros(data.n_features)
    scale = np.ones(data.n_features)
    for j in range(data.n_features):
        col = data.values[~data.missing[:, j], j]
        if col.size:
            mean[j] = col.mean()
            sd = col.std(ddof=1) if col.size > 1 else 0.0
            scale[j] = sd if sd > 1e-12 else 1.0
    return mean, scale


def init_weights(arch: MlpArchitecture, scale: float, rng) -> np.ndarray:
    s_w1, s_b1, s_w2, s_b2 = arch.slices()
    w = np.empty(arch.n_params)
    w[s_w1] = rng.normal(0.0, scale / np.sqrt(arch.n_inputs + 1), s_w1.stop - s_w1.start)
    w[s_b1] = rng.normal(0.0, scale / np.sqrt(arch.n_inputs + 1), arch.n_hidden)
    w[s_w2] = rng.normal(0.0, scale / np.sqrt(arch.n_hidden + 1), arch.n_hidden)
    w[s_b2] = rng.normal(0.0, scale / np.sqrt(arch.n_hidden + 1), 1)
    return w


def train(train: Dataset, arch: MlpArchitecture | None = None,
          config: TrainConfig | None = None) -> ArdModel:
    """Fit the network by batch back-propagation with evidence updates of alpha.

    Each step moves along the mean cross-entropy gradient, then applies the
    weight decay implicitly, ``w <- w / (1 + lr * alpha / n)``, which stays
    stable however large alpha grows.
    """
    config = config or TrainConfig()
    arch = arch or MlpArchitecture(train.n_features)
    if arch.n_inputs != train.n_features:
        raise ConfigurationError(f"architecture expects {arch.n_inputs} inputs, data has {train.n_features}")
    t = binary_targets(train)
    mean, scale = standardization(train)
    X = np.where(train.missing, 0.0, (train.values - mean) / scale)
    n = X.shape[0]
    groups = arch.groups()
    rng = np.random.default_rng(config.seed)
    w = init_weights(arch, config.init_scale, rng)
    alphas = np.full(len(groups), config.alpha_init)
    velocity = np.zeros_like(w)
    step = config.learning_rate / n
    history = []
    for epoch in range(1, config.epochs + 1):
        decay = 1.0 + step * alpha_per_param(alphas, groups, arch.n_params)
        velocity = config.momentum * velocity - step * data_gradient(w, arch, X, t)
        w = (w + velocity) / decay
        f = objective_value(w, arch, X, t, alphas)
        if not np.isfinite(f) or not np.all(np.isfinite(w)):
            raise NumericalError(f"training diverged at epoch {epoch}; "
                                 f"try a learning rate below {config.learning_rate}")
        history.append(f)
        if epoch % config.evidence_period == 0 and epoch < config.epochs:
            traces = posterior_group_traces(w, arch, X, alphas)
            alphas = update_alphas(w, alphas, traces, groups, config.alpha_clip)
            log.debug("epoch %d: objective %.3f, alphas %s", epoch, f, np.round(alphas, 3))
    return ArdModel(arch, w, alphas, relevance_scores(w, arch), config.epochs, mean, scale,
                    tuple(train.feature_names), tuple(history))


def select_attributes(model: ArdModel, threshold: float = 0.01) -> list[int]:
    """Inputs whose relevance reaches ``threshold``; the most relevant always survives."""
    rel = model.relevance
    kept = [int(i) for i in np.flatnonzero(rel >= threshold)]
    return kept or [int(np.argmax(rel))]


def split_attribute_groups(n_attributes: int, n_groups: int) -> list[list[int]]:
    """Contiguous, near-equal partition of attribute indices; larger blocks first."""
    if not 1 <= n_groups <= n_attributes:
        raise ConfigurationError(f"n_groups must lie in [1, {n_attributes}]")
    return [[int(i) for i in block] for block in np.array_split(np.arange(n_attributes), n_groups)]


def run_grouped_ard(data: Dataset, n_groups: int = 1, n_hidden: int = 8,
                    config: TrainConfig | None = None, threshold: float = 0.01):
    """Train one ARD network per attribute block and pool the survivors.

    Returns ``(kept, models)`` where ``kept`` indexes ``data``'s attributes.
    """
    kept, models = [], []
    for block in split_attribute_groups(data.n_features, n_groups):
        model = train(data.select_features(block), MlpArchitecture(len(block), n_hidden), config)
        models.append((block, model))
        kept.extend(block[i] for i in select_attributes(model, threshold))
    return sorted(set(kept)), models
