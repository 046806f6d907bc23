"""Tabular dataset representation, CSV ingestion and grow/prune splitting."""
from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, DataError, ParseError, SchemaError

log = logging.getLogger(__name__)

CONTINUOUS = "continuous"
CATEGORICAL = "categorical-numeric"


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str = CONTINUOUS
    index: int = 0

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, CATEGORICAL):
            raise ConfigurationError(f"unknown attribute kind {self.kind!r}")


def make_schema(names: Sequence[str], categorical: Iterable[str] = ()) -> tuple[AttributeSpec, ...]:
    categorical = set(categorical)
    return tuple(
        AttributeSpec(name, CATEGORICAL if name in categorical else CONTINUOUS, i)
        for i, name in enumerate(names)
    )


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix with an explicit missing mask and one nominal class column.

    ``values[i, j]`` is meaningful only where ``missing[i, j]`` is False; masked
    positions hold 0.0 and must never be read as data.
    """

    schema: tuple[AttributeSpec, ...]
    class_labels: tuple[str, ...]
    values: np.ndarray
    missing: np.ndarray
    classes: np.ndarray
    name: str = field(default="")

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        missing = np.array(self.missing, dtype=bool, copy=True)
        classes = np.array(self.classes, dtype=np.int64, copy=True)
        if values.ndim != 2:
            raise SchemaError("values must be a 2-d matrix")
        if missing.shape != values.shape:
            raise SchemaError("missing mask shape differs from values shape")
        if classes.shape != (values.shape[0],):
            raise SchemaError("row count of cells differs from length of classes")
        if len(self.schema) != values.shape[1]:
            raise SchemaError(f"schema has {len(self.schema)} attributes, matrix has {values.shape[1]}")
        names = [a.name for a in self.schema]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be unique")
        if [a.index for a in self.schema] != list(range(len(self.schema))):
            raise SchemaError("attribute indices must be 0..m-1 in order")
        if len(self.class_labels) < 2:
            raise DataError("need >=2 classes")
        if classes.size and (classes.min() < 0 or classes.max() >= len(self.class_labels)):
            raise SchemaError("class index out of range")
        values[missing] = 0.0
        for arr in (values, missing, classes):
            arr.setflags(write=False)
        object.__setattr__(self, "schema", tuple(self.schema))
        object.__setattr__(self, "class_labels", tuple(str(c) for c in self.class_labels))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "missing", missing)
        object.__setattr__(self, "classes", classes)

    @classmethod
    def from_arrays(cls, X, y, names=None, class_labels=None, missing=None, categorical=(), name=""):
        """Build a dataset from a dense matrix; NaN entries in ``X`` become missing."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        mask = np.isnan(X) if missing is None else np.asarray(missing, dtype=bool) | np.isnan(X)
        y = np.asarray(y)
        if class_labels is None:
            class_labels = [str(c) for c in range(int(y.max()) + 1)] if y.size else ["0", "1"]
            class_labels = class_labels if len(class_labels) >= 2 else ["0", "1"]
        if names is None:
            names = [f"x{j}" for j in range(X.shape[1])]
        return cls(make_schema(names, categorical), tuple(class_labels),
                   np.where(mask, 0.0, X), mask, y.astype(np.int64), name=name)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_features(self) -> int:
        return self.values.shape[1]

    @property
    def feature_names(self) -> list[str]:
        return [a.name for a in self.schema]

    def __len__(self):
        return self.n_rows

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.schema == other.schema and self.class_labels == other.class_labels
                and np.array_equal(self.missing, other.missing)
                and np.array_equal(self.values, other.values)
                and np.array_equal(self.classes, other.classes))

    __hash__ = None

    def as_float(self) -> np.ndarray:
        """Copy of the feature matrix with NaN at missing cells."""
        out = self.values.copy()
        out[self.missing] = np.nan
        return out

    def take(self, rows) -> Dataset:
        rows = np.asarray(rows)
        return Dataset(self.schema, self.class_labels, self.values[rows], self.missing[rows],
                       self.classes[rows], name=self.name)

    def select_features(self, columns: Sequence[int]) -> Dataset:
        columns = [int(c) for c in columns]
        schema = tuple(AttributeSpec(self.schema[c].name, self.schema[c].kind, i)
                       for i, c in enumerate(columns))
        return Dataset(schema, self.class_labels, self.values[:, columns],
                       self.missing[:, columns], self.classes, name=self.name)

    def with_features(self, values, names: Sequence[str], missing=None) -> Dataset:
        values = np.asarray(values, dtype=float)
        missing = np.zeros(values.shape, dtype=bool) if missing is None else missing
        return Dataset(make_schema(names), self.class_labels, values, missing, self.classes,
                       name=self.name)

    def with_missing(self, missing) -> Dataset:
        missing = np.asarray(missing, dtype=bool) | self.missing
        return Dataset(self.schema, self.class_labels, self.values, missing, self.classes,
                       name=self.name)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.classes, minlength=len(self.class_labels))


@dataclass(frozen=True)
class SplitPair:
    grow: Dataset
    prune: Dataset


def _parse_cell(text: str, row: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"non-numeric value {text!r} in column {column!r}", row) from None


def load_csv(path, delimiter: str = ",", missing_marker: str = "?", class_column=None,
             drop_columns: Iterable[str] = (), categorical_columns: Iterable[str] = (),
             column_names: Sequence[str] | None = None, class_map: dict | None = None) -> Dataset:
    """Read a delimited text file into a :class:`Dataset`.

    The first row is the header unless ``column_names`` is given, in which case
    every row is data. ``class_column`` defaults to the last column. Class
    labels are kept in order of first appearance.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: no such file")
    with path.open(newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        if column_names is None:
            try:
                header = [h.strip() for h in next(reader)]
            except StopIteration:
                raise ParseError(f"{path}: empty file") from None
            first_row = 2
        else:
            header = list(column_names)
            first_row = 1
        rows = list(reader)

    if class_column is None:
        class_column = header[-1]
    if class_column not in header:
        raise ConfigurationError(f"class column {class_column!r} not in header")
    drop = set(drop_columns)
    unknown = drop - set(header)
    if unknown:
        raise ConfigurationError(f"drop columns not in header: {sorted(unknown)}")
    class_pos = header.index(class_column)
    keep = [j for j, h in enumerate(header) if j != class_pos and h not in drop]

    labels: dict[str, int] = {}
    values = np.zeros((len(rows), len(keep)))
    missing = np.zeros((len(rows), len(keep)), dtype=bool)
    classes = np.zeros(len(rows), dtype=np.int64)
    for i, row in enumerate(rows):
        lineno = first_row + i
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(row)}", lineno)
        label = row[class_pos].strip()
        if label == missing_marker or label == "":
            raise ParseError("class value is missing", lineno)
        if class_map is not None:
            label = class_map.get(label, label)
        classes[i] = labels.setdefault(label, len(labels))
        for k, j in enumerate(keep):
            cell = row[j].strip()
            if cell == missing_marker:
                missing[i, k] = True
            else:
                values[i, k] = _parse_cell(cell, lineno, header[j])
    if len(labels) < 2:
        raise DataError(f"{path}: need >=2 classes, class column has {len(labels)}")
    names = [header[j] for j in keep]
    log.debug("loaded %s: %d rows, %d attributes", path, len(rows), len(keep))
    return Dataset(make_schema(names, categorical_columns), tuple(labels), values, missing,
                   classes, name=path.stem)


def _format_value(v: float) -> str:
    if float(v).is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def write_csv(data: Dataset, path, delimiter: str = ",", missing_marker: str = "?",
              class_column: str = "class") -> None:
    """Write ``data`` with the class as the last column. Inverse of :func:`load_csv`."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        w.writerow(data.feature_names + [class_column])
        for vals, miss, c in zip(data.values, data.missing, data.classes):
            cells = [missing_marker if m else _format_value(v) for v, m in zip(vals, miss)]
            w.writerow(cells + [data.class_labels[c]])


def stratified_split_indices(labels, ratio: float, rng: np.random.Generator,
                             stratify: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Shuffle-split row indices into (grow, prune) with ``round(ratio*n)`` grow rows.

    Per-class grow counts are allocated by largest remainder so that the total is
    exact and each class is within one instance of its proportional share.
    """
    labels = np.asarray(labels)
    n = labels.size
    n_grow = int(round(ratio * n))
    if not stratify:
        perm = rng.permutation(n)
        return np.sort(perm[:n_grow]), np.sort(perm[n_grow:])
    classes = np.unique(labels)
    members = [np.flatnonzero(labels == c) for c in classes]
    ideal = np.array([ratio * m.size for m in members])
    counts = np.floor(ideal).astype(int)
    short = n_grow - counts.sum()
    if short > 0:
        order = np.argsort(-(ideal - counts), kind="stable")
        counts[order[:short]] += 1
    grow, prune = [], []
    for m, k in zip(members, counts):
        perm = rng.permutation(m)
        grow.append(perm[:k])
        prune.append(perm[k:])
    return np.sort(np.concatenate(grow)), np.sort(np.concatenate(prune))


def split_grow_prune(data: Dataset, ratio: float = 2 / 3, seed: int = 0) -> SplitPair:
    if not 0 < ratio < 1:
        raise ConfigurationError(f"grow ratio must lie in (0, 1), got {ratio}")
    if data.n_rows == 0:
        raise DataError("cannot split an empty dataset")
    counts = data.class_counts()
    stratify = bool(np.all(counts[counts > 0] >= 2))
    if not stratify:
        warnings.warn("a class has fewer than 2 instances; using unstratified split",
                      RuntimeWarning, stacklevel=2)
    rng = np.random.default_rng(seed)
    grow, prune = stratified_split_indices(data.classes, ratio, rng, stratify=stratify)
    return SplitPair(data.take(grow), data.take(prune))


def class_prevalence_order(data: Dataset) -> list[int]:
    """Class indices from least to most prevalent; ties go to the lower index."""
    counts = data.class_counts()
    return [int(c) for c in np.argsort(counts, kind="stable")]
