"""Conditions, rules and ordered decision lists."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..data import Dataset
from ..errors import ConfigurationError, SchemaError

OPERATORS = ("<=", ">=", "=")


@dataclass(frozen=True)
class Condition:
    attribute: int
    operator: str
    threshold: float

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ConfigurationError(f"unknown operator {self.operator!r}")

    def covers(self, values: np.ndarray, missing: np.ndarray) -> np.ndarray:
        """Boolean mask of rows satisfying the condition. Missing never satisfies."""
        col = values[:, self.attribute]
        if self.operator == "<=":
            hit = col <= self.threshold
        elif self.operator == ">=":
            hit = col >= self.threshold
        else:
            hit = col == self.threshold
        return hit & ~missing[:, self.attribute]

    def holds(self, value) -> bool:
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return False
        if self.operator == "<=":
            return value <= self.threshold
        if self.operator == ">=":
            return value >= self.threshold
        return value == self.threshold

    def describe(self, names: Sequence[str] | None = None) -> str:
        name = names[self.attribute] if names else f"x{self.attribute}"
        return f"({name} {self.operator} {self.threshold:g})"


@dataclass(frozen=True)
class Rule:
    conditions: tuple[Condition, ...]
    target_class: int

    def __post_init__(self):
        object.__setattr__(self, "conditions", tuple(self.conditions))
        keys = [(c.attribute, c.operator) for c in self.conditions]
        if len(set(keys)) != len(keys):
            raise ConfigurationError("a rule may test each (attribute, operator) pair once")

    def __len__(self):
        return len(self.conditions)

    def covers(self, values: np.ndarray, missing: np.ndarray) -> np.ndarray:
        mask = np.ones(values.shape[0], dtype=bool)
        for cond in self.conditions:
            mask &= cond.covers(values, missing)
        return mask

    def truncated(self, k: int) -> Rule:
        return Rule(self.conditions[:k], self.target_class)

    def describe(self, names=None, labels=None) -> str:
        body = " and ".join(c.describe(names) for c in self.conditions) or "(true)"
        target = labels[self.target_class] if labels else str(self.target_class)
        return f"{body} => {target}"


@dataclass(frozen=True)
class RuleSet:
    """Ordered decision list. The first rule that fires decides; otherwise the default."""

    rules: tuple[Rule, ...]
    default_class: int
    attribute_names: tuple[str, ...] | None = field(default=None, compare=False)
    class_labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if any(len(r) == 0 for r in self.rules):
            raise ConfigurationError("empty rules cannot be emitted")
        if self.attribute_names is not None:
            object.__setattr__(self, "attribute_names", tuple(self.attribute_names))
        if self.class_labels is not None:
            object.__setattr__(self, "class_labels", tuple(self.class_labels))

    def __len__(self):
        return len(self.rules)

    def predict_arrays(self, values: np.ndarray, missing: np.ndarray) -> np.ndarray:
        out = np.full(values.shape[0], self.default_class, dtype=np.int64)
        undecided = np.ones(values.shape[0], dtype=bool)
        for rule in self.rules:
            fire = undecided & rule.covers(values, missing)
            out[fire] = rule.target_class
            undecided &= ~fire
        return out

    def predict(self, data: Dataset) -> np.ndarray:
        if self.attribute_names is not None and tuple(data.feature_names) != self.attribute_names:
            raise SchemaError("dataset attributes do not match the rule set's schema")
        return self.predict_arrays(data.values, data.missing)

    def to_text(self) -> str:
        names = self.attribute_names
        labels = self.class_labels
        lines = [r.describe(names, labels) for r in self.rules]
        default = labels[self.default_class] if labels else str(self.default_class)
        lines.append(f"default => {default}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "default_class": self.default_class,
            "attribute_names": list(self.attribute_names) if self.attribute_names else None,
            "class_labels": list(self.class_labels) if self.class_labels else None,
            "rules": [
                {"target_class": r.target_class,
                 "conditions": [[c.attribute, c.operator, c.threshold] for c in r.conditions]}
                for r in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> RuleSet:
        rules = [Rule(tuple(Condition(int(a), op, float(t)) for a, op, t in r["conditions"]),
                      int(r["target_class"])) for r in d["rules"]]
        return cls(tuple(rules), int(d["default_class"]),
                   tuple(d["attribute_names"]) if d.get("attribute_names") else None,
                   tuple(d["class_labels"]) if d.get("class_labels") else None)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> RuleSet:
        return cls.from_dict(json.loads(text))


def classify(ruleset: RuleSet, instance) -> int:
    """Class of one instance. ``None`` or NaN marks a missing cell."""
    for rule in ruleset.rules:
        if all(c.holds(instance[c.attribute]) for c in rule.conditions):
            return rule.target_class
    return ruleset.default_class
