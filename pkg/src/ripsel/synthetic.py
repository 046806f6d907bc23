"""Seeded synthetic datasets for tests and the desk-scale benchmark."""
from __future__ import annotations

import numpy as np
from scipy.special import expit

from .data import Dataset


def make_concept_data(n: int = 500, n_features: int = 6, levels: int = 10, seed: int = 0) -> Dataset:
    """Integer-coded features with a noise-free two-rule concept.

    ``class 1 iff (x0 >= 6 and x1 >= 4) or (x2 <= 2 and x3 <= 3)``.
    """
    rng = np.random.default_rng(seed)
    X = rng.integers(0, levels, size=(n, n_features)).astype(float)
    y = ((X[:, 0] >= 6) & (X[:, 1] >= 4)) | ((X[:, 2] <= 2) & (X[:, 3] <= 3))
    return Dataset.from_arrays(X, y.astype(int), class_labels=["0", "1"], name="concept")


def make_benchmark_data(n_train: int = 2000, n_test: int = 1000, n_features: int = 40,
                        n_informative: int = 10, block_size: int = 5, noise: float = 0.6,
                        seed: int = 0) -> tuple[Dataset, Dataset]:
    """Correlated-block tabular data in the spirit of customer records.

    Features come in blocks of ``block_size`` noisy copies of one latent
    factor. The first ``n_informative`` features form the blocks whose factors
    drive the class through a logistic link; the next blocks follow nuisance
    factors and any remainder is independent noise. Train and test are drawn
    from the same distribution.
    """
    rng = np.random.default_rng(seed)
    n = n_train + n_test
    n_inf_blocks = max(1, n_informative // block_size)
    n_nuisance_blocks = (n_features - n_informative) // (2 * block_size)
    n_blocks = n_inf_blocks + n_nuisance_blocks
    Z = rng.standard_normal((n, n_blocks))
    X = rng.standard_normal((n, n_features))
    for b in range(n_blocks):
        start = b * block_size if b < n_inf_blocks else n_informative + (b - n_inf_blocks) * block_size
        cols = slice(start, start + block_size)
        X[:, cols] = Z[:, [b]] + noise * X[:, cols]
    score = Z[:, :n_inf_blocks].sum(axis=1) / np.sqrt(n_inf_blocks)
    y = (rng.random(n) < expit(3.0 * score - 1.5)).astype(int)
    names = [f"a{j:02d}" for j in range(n_features)]
    train = Dataset.from_arrays(X[:n_train], y[:n_train], names, ["0", "1"], name="synthetic-train")
    test = Dataset.from_arrays(X[n_train:], y[n_train:], names, ["0", "1"], name="synthetic-test")
    return train, test


def make_relevance_data(n: int = 1000, n_features: int = 10, n_relevant: int = 2,
                        strength: float = 2.0, deterministic: bool = False, seed: int = 0) -> Dataset:
    """Standard normal inputs; only the first ``n_relevant`` drive the class.

    The class is Bernoulli with logit ``strength * sum(x[:n_relevant])``, or
    the sign of that sum when ``deterministic``.
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, n_features))
    score = strength * X[:, :n_relevant].sum(axis=1)
    y = score > 0 if deterministic else rng.random(n) < expit(score)
    return Dataset.from_arrays(X, y.astype(int), class_labels=["0", "1"], name="relevance")
