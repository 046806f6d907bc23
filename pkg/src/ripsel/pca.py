"""Principal component analysis with Kaiser component selection."""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError, SchemaError

EIGEN_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Fitted basis.

    ``components`` holds eigenvectors as columns, ordered by descending
    eigenvalue; the first ``kept`` of them span the reduced space.
    """

    mean: np.ndarray
    scale: np.ndarray
    eigenvalues: np.ndarray
    components: np.ndarray
    kept: int

    def __post_init__(self):
        m = self.mean.shape[0]
        if self.components.shape != (m, m) or self.eigenvalues.shape != (m,):
            raise SchemaError("inconsistent PCA model shapes")
        if not 1 <= self.kept <= m:
            raise SchemaError(f"kept must lie in [1, {m}], got {self.kept}")

    @property
    def n_features(self) -> int:
        return self.mean.shape[0]

    @property
    def basis(self) -> np.ndarray:
        return self.components[:, :self.kept]

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "components": self.components.tolist(),
            "kept": self.kept,
        }

    @classmethod
    def from_dict(cls, d: dict) -> PcaModel:
        return cls(np.asarray(d["mean"], float), np.asarray(d["scale"], float),
                   np.asarray(d["eigenvalues"], float), np.asarray(d["components"], float),
                   int(d["kept"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> PcaModel:
        return cls.from_dict(json.loads(text))


def kaiser_count(eigenvalues, cutoff: float = 1.0) -> int:
    """Number of eigenvalues strictly above ``cutoff``, at least one."""
    return max(int(np.sum(np.asarray(eigenvalues) > cutoff)), 1)


def fit(train_features, standardize: bool = True, cutoff: float = 1.0,
        n_components: int | None = None) -> PcaModel:
    """Fit PCA on a complete feature matrix.

    With ``standardize`` the columns are z-scored so the eigenproblem is on the
    correlation matrix, which is where the eigenvalue > 1 cutoff makes sense.
    Zero-variance columns keep scale 1 and contribute a zero eigenvalue.
    ``n_components`` overrides the cutoff rule.
    """
    A = np.asarray(train_features, dtype=float)
    if A.ndim != 2:
        raise SchemaError("features must be a 2-d matrix")
    n, m = A.shape
    if n < 2:
        raise DataError("PCA needs at least two rows")
    if np.isnan(A).any():
        raise DataError("PCA must be fitted on complete data")
    mean = A.mean(axis=0)
    scale = np.ones(m)
    if standardize:
        sd = A.std(axis=0, ddof=1)
        flat = sd <= 1e-12 * np.maximum(1.0, np.abs(mean))
        if flat.any():
            warnings.warn(f"{int(flat.sum())} zero-variance column(s) left unscaled",
                          RuntimeWarning, stacklevel=2)
        scale = np.where(flat, 1.0, sd)
    Z = (A - mean) / scale
    C = Z.T @ Z / (n - 1)
    eigenvalues, components = np.linalg.eigh(C)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    components = components[:, order]
    # deterministic sign: the largest-magnitude loading of each component is positive
    pivot = np.argmax(np.abs(components), axis=0)
    signs = np.sign(components[pivot, np.arange(m)])
    components = components * np.where(signs == 0, 1.0, signs)
    kept = kaiser_count(eigenvalues, cutoff) if n_components is None else int(n_components)
    return PcaModel(mean, scale, eigenvalues, components, kept)


def covariance(model: PcaModel, train_features) -> np.ndarray:
    """The matrix the model was decomposed from, recomputed from ``train_features``."""
    Z = (np.asarray(train_features, float) - model.mean) / model.scale
    return Z.T @ Z / (Z.shape[0] - 1)


def _standardized(model: PcaModel, features, missing=None) -> np.ndarray:
    A = np.asarray(features, dtype=float)
    if A.ndim == 1:
        A = A[None, :]
    if A.shape[1] != model.n_features:
        raise SchemaError(f"expected {model.n_features} columns, got {A.shape[1]}")
    Z = (A - model.mean) / model.scale
    mask = np.isnan(A) if missing is None else (np.asarray(missing, bool) | np.isnan(A))
    # mean substitution: a missing cell sits at the training mean, i.e. 0 after centering
    return np.where(mask, 0.0, Z)


def transform(model: PcaModel, features, missing=None) -> np.ndarray:
    """Project rows onto the kept components. NaN or masked cells count as the mean."""
    return _standardized(model, features, missing) @ model.basis


def inverse_transform(model: PcaModel, projected) -> np.ndarray:
    T = np.asarray(projected, dtype=float)
    if T.ndim == 1:
        T = T[None, :]
    if T.shape[1] != model.kept:
        raise SchemaError(f"expected {model.kept} component columns, got {T.shape[1]}")
    return T @ model.basis.T * model.scale + model.mean
