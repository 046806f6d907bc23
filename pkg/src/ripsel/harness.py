"""Ripper, PCA-Rip and ARD-Rip pipelines and the missingness benchmark."""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import ard, pca
from .data import Dataset
from .errors import ConfigurationError, RipselError, SchemaError
from .missingness import PAPER_LEVELS, SCOPES, build_test_grid
from .ripper import RipperConfig, RuleSet, induce

log = logging.getLogger(__name__)

RIPPER = "ripper"
PCA_RIP = "pca_rip"
ARD_RIP = "ard_rip"
KINDS = (RIPPER, PCA_RIP, ARD_RIP)

CSV_COLUMNS = ("pipeline", "level", "scope", "accuracy", "n_test", "kept_features", "seed",
               "f1", "auc")
MEAN = "mean"
CLEAN = "clean"


@dataclass(frozen=True)
class PcaConfig:
    standardize: bool = True
    cutoff: float = 1.0


@dataclass(frozen=True)
class ArdConfig:
    n_hidden: int = 8
    n_groups: int = 1
    threshold: float = 0.01
    train: ard.TrainConfig = field(default_factory=ard.TrainConfig)


@dataclass(frozen=True)
class Pipeline:
    kind: str
    ripper_config: RipperConfig = field(default_factory=RipperConfig)
    pca_config: PcaConfig | None = None
    ard_config: ArdConfig | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown pipeline kind {self.kind!r}")
        if (self.pca_config is not None) != (self.kind == PCA_RIP):
            raise ConfigurationError("pca_config is required for, and only for, pca_rip")
        if (self.ard_config is not None) != (self.kind == ARD_RIP):
            raise ConfigurationError("ard_config is required for, and only for, ard_rip")

    @classmethod
    def default(cls, kind: str, seed: int = 0) -> Pipeline:
        rc = RipperConfig(seed=seed)
        if kind == PCA_RIP:
            return cls(kind, rc, pca_config=PcaConfig())
        if kind == ARD_RIP:
            return cls(kind, rc, ard_config=ArdConfig(train=ard.TrainConfig(seed=seed)))
        return cls(kind, rc)


@dataclass(frozen=True, eq=False)
class FittedPipeline:
    pipeline: Pipeline
    ruleset: RuleSet
    input_names: tuple[str, ...]
    pca_model: pca.PcaModel | None = None
    ard_models: tuple = ()
    kept: tuple[int, ...] | None = None

    @property
    def kind(self) -> str:
        return self.pipeline.kind

    @property
    def n_features_used(self) -> int:
        return len(self.ruleset.attribute_names or ())

    def features(self, data: Dataset) -> Dataset:
        """Map raw rows into the space the rule set was induced in."""
        if tuple(data.feature_names) != self.input_names:
            raise SchemaError("test attributes do not match the training schema")
        if self.kind == PCA_RIP:
            T = pca.transform(self.pca_model, data.values, data.missing)
            return data.with_features(T, component_names(self.pca_model.kept))
        if self.kind == ARD_RIP:
            return data.select_features(self.kept)
        return data

    def predict(self, data: Dataset) -> np.ndarray:
        return self.ruleset.predict(self.features(data))

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "input_names": list(self.input_names),
             "ruleset": self.ruleset.to_dict()}
        if self.pca_model is not None:
            d["pca"] = self.pca_model.to_dict()
        if self.kind == ARD_RIP:
            d["kept"] = list(self.kept)
            d["ard"] = [{"block": block, "model": m.to_dict()} for block, m in self.ard_models]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> FittedPipeline:
        kind = d["kind"]
        pipe = Pipeline.default(kind)
        ard_models = tuple((list(e["block"]), ard.ArdModel.from_dict(e["model"]))
                           for e in d.get("ard", ()))
        return cls(pipe, RuleSet.from_dict(d["ruleset"]), tuple(d["input_names"]),
                   pca.PcaModel.from_dict(d["pca"]) if "pca" in d else None,
                   ard_models, tuple(d["kept"]) if "kept" in d else None)


def component_names(k: int) -> list[str]:
    return [f"PC{i + 1}" for i in range(k)]


def _observed_mean_fill(data: Dataset) -> np.ndarray:
    X = data.values.copy()
    for j in range(data.n_features):
        col = data.missing[:, j]
        if col.any():
            obs = data.values[~col, j]
            X[col, j] = obs.mean() if obs.size else 0.0
    return X


def fit_pipeline(pipeline: Pipeline, train: Dataset) -> FittedPipeline:
    names = tuple(train.feature_names)
    if pipeline.kind == RIPPER:
        return FittedPipeline(pipeline, induce(train, pipeline.ripper_config), names)
    if pipeline.kind == PCA_RIP:
        cfg = pipeline.pca_config
        model = pca.fit(_observed_mean_fill(train), standardize=cfg.standardize, cutoff=cfg.cutoff)
        projected = train.with_features(pca.transform(model, train.values, train.missing),
                                        component_names(model.kept))
        log.info("pca_rip: kept %d of %d components", model.kept, train.n_features)
        return FittedPipeline(pipeline, induce(projected, pipeline.ripper_config), names,
                              pca_model=model)
    cfg = pipeline.ard_config
    if cfg.threshold <= 0:
        kept, models = list(range(train.n_features)), []
    else:
        kept, models = ard.run_grouped_ard(train, cfg.n_groups, cfg.n_hidden, cfg.train,
                                           cfg.threshold)
    log.info("ard_rip: kept %d of %d attributes", len(kept), train.n_features)
    ruleset = induce(train.select_features(kept), pipeline.ripper_config)
    return FittedPipeline(pipeline, ruleset, names, ard_models=tuple(models), kept=tuple(kept))


def classification_metrics(truth, pred, n_classes: int) -> dict:
    """Accuracy, macro F1, and (binary only) AUC of the hard predictions."""
    truth = np.asarray(truth)
    pred = np.asarray(pred)
    n = truth.size
    out = {"accuracy": float(np.mean(truth == pred)) if n else float("nan")}
    f1s = []
    for c in range(n_classes):
        tp = int(np.sum((pred == c) & (truth == c)))
        denom = int(np.sum(pred == c) + np.sum(truth == c))
        f1s.append(2 * tp / denom if denom else 0.0)
    out["f1"] = float(np.mean(f1s))
    if n_classes == 2 and 0 < np.sum(truth == 1) < n:
        tpr = np.mean(pred[truth == 1] == 1)
        tnr = np.mean(pred[truth == 0] == 0)
        out["auc"] = float((tpr + tnr) / 2)
    else:
        out["auc"] = float("nan")
    return out


def evaluate(fitted: FittedPipeline, test: Dataset) -> float:
    """Fraction of test rows classified correctly."""
    return float(np.mean(fitted.predict(test) == test.classes))


def _score(fitted, test):
    pred = fitted.predict(test)
    return classification_metrics(test.classes, pred, len(test.class_labels))


@dataclass(frozen=True)
class Cell:
    pipeline: str
    level: float
    scope: str
    accuracy: float
    n_test: int
    kept_features: int
    seed: int
    f1: float = float("nan")
    auc: float = float("nan")

    def row(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


def _same(a, b) -> bool:
    return a == b or (isinstance(a, float) and isinstance(b, float) and np.isnan(a) and np.isnan(b))


@dataclass
class ExperimentReport:
    cells: list[Cell] = field(default_factory=list)
    baseline: list[Cell] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def per_cell(self) -> dict:
        return {(c.pipeline, c.level, c.scope): c.accuracy for c in self.cells}

    @property
    def pipelines(self) -> list[str]:
        seen = []
        for c in self.baseline + self.cells:
            if c.pipeline not in seen:
                seen.append(c.pipeline)
        return seen

    @property
    def levels(self) -> list[float]:
        return sorted({c.level for c in self.cells})

    def _mean(self, pred) -> float:
        vals = [c.accuracy for c in self.cells if pred(c)]
        return float(np.mean(vals)) if vals else float("nan")

    @property
    def overall(self) -> dict:
        return {p: self._mean(lambda c: c.pipeline == p) for p in self.pipelines}

    @property
    def by_level(self) -> dict:
        return {(p, lv): self._mean(lambda c: c.pipeline == p and c.level == lv)
                for p in self.pipelines for lv in self.levels}

    @property
    def by_scope(self) -> dict:
        return {(p, s): self._mean(lambda c: c.pipeline == p and c.scope == s)
                for p in self.pipelines for s in SCOPES}

    @property
    def clean_accuracy(self) -> dict:
        return {c.pipeline: c.accuracy for c in self.baseline}

    def to_dict(self) -> dict:
        return {
            "cells": [c.row() for c in self.cells],
            "baseline": [c.row() for c in self.baseline],
            "overall": self.overall,
            "by_level": [{"pipeline": p, "level": lv, "accuracy": a}
                         for (p, lv), a in self.by_level.items()],
            "by_scope": [{"pipeline": p, "scope": s, "accuracy": a}
                         for (p, s), a in self.by_scope.items()],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentReport:
        return cls([Cell(**r) for r in d["cells"]], [Cell(**r) for r in d.get("baseline", [])],
                   dict(d.get("metadata", {})))

    def __eq__(self, other):
        if not isinstance(other, ExperimentReport):
            return NotImplemented
        pairs = list(zip(self.cells + self.baseline, other.cells + other.baseline))
        return (len(self.cells) == len(other.cells) and len(self.baseline) == len(other.baseline)
                and all(_same(getattr(a, k), getattr(b, k)) for a, b in pairs for k in CSV_COLUMNS)
                and self.metadata == other.metadata)


def run_benchmark(train: Dataset, test: Dataset, pipelines: Sequence[Pipeline],
                  levels: Sequence[float] = PAPER_LEVELS, seed: int = 0,
                  include_baseline: bool = True) -> ExperimentReport:
    """Fit every pipeline once on ``train`` and score it on one shared injected grid."""
    if not pipelines:
        raise ConfigurationError("need at least one pipeline")
    if tuple(train.feature_names) != tuple(test.feature_names):
        raise SchemaError("train and test schemas differ")
    grid = build_test_grid(test, levels, seed, include_baseline=include_baseline)
    report = ExperimentReport(metadata={
        "seed": seed, "train": train.name, "test": test.name,
        "n_train": train.n_rows, "n_test": test.n_rows, "n_features": train.n_features,
        "levels": [float(lv) for lv in levels], "kept_features": {},
    })
    for pipe in pipelines:
        fitted = fit_pipeline(pipe, train)
        kept = fitted.n_features_used
        report.metadata["kept_features"][pipe.kind] = kept
        for plan, data in grid:
            m = _score(fitted, data)
            cell = Cell(pipe.kind, plan.rate, plan.scope if plan.rate > 0 else CLEAN, m["accuracy"],
                        data.n_rows, kept, seed, m["f1"], m["auc"])
            (report.cells if plan.rate > 0 else report.baseline).append(cell)
        log.info("%s: overall %.4f", pipe.kind, report.overall[pipe.kind])
    return report


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if np.isnan(v) else repr(v)
    return str(v)


def report_rows(report: ExperimentReport) -> list[list[str]]:
    rows = [[_fmt(c.row()[k]) for k in CSV_COLUMNS] for c in report.baseline + report.cells]
    for (p, lv), a in report.by_level.items():
        rows.append([p, _fmt(lv), MEAN, _fmt(a), "", "", "", "", ""])
    for (p, s), a in report.by_scope.items():
        rows.append([p, MEAN, s, _fmt(a), "", "", "", "", ""])
    for p, a in report.overall.items():
        rows.append([p, MEAN, MEAN, _fmt(a), "", "", "", "", ""])
    return rows


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(report_rows(report))
    return buf.getvalue()


def write_report(report: ExperimentReport, path, format: str = "csv") -> None:
    path = Path(path)
    if format == "csv":
        text = report_csv(report)
    elif format == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    else:
        raise ConfigurationError(f"unknown report format {format!r}")
    try:
        path.write_text(text)
    except OSError as exc:
        raise RipselError(f"cannot write report to {path}: {exc}") from exc


def read_report(path) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(Path(path).read_text()))


def with_seed(pipeline: Pipeline, seed: int) -> Pipeline:
    """Copy of ``pipeline`` with every component seeded by ``seed``."""
    out = replace(pipeline, ripper_config=replace(pipeline.ripper_config, seed=seed))
    if out.ard_config is not None:
        out = replace(out, ard_config=replace(out.ard_config,
                                              train=replace(out.ard_config.train, seed=seed)))
    return out
