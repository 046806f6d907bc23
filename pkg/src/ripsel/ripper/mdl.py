"""Description length of a rule set: theory bits plus exception bits."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from ..data import Dataset
from .rules import Rule, RuleSet

_LN2 = math.log(2.0)


def log2_binom(n: int, k: int) -> float:
    if k < 0 or k > n:
        raise ValueError(f"invalid binomial ({n} choose {k})")
    return float((gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) / _LN2)


def count_possible_conditions(values: np.ndarray, missing: np.ndarray) -> int:
    """Number of (attribute, operator, midpoint) literals the grower could emit."""
    total = 0
    for j in range(values.shape[1]):
        distinct = np.unique(values[~missing[:, j], j]).size
        total += 2 * max(distinct - 1, 0)
    return max(total, 1)


def theory_bits(rules, n_conditions: int) -> float:
    """Each literal costs log2 of the number of possible conditions."""
    per_literal = math.log2(n_conditions) if n_conditions > 1 else 0.0
    return float(sum(len(r) for r in rules) * per_literal)


def exception_bits(n_covered: int, false_pos: int, n_uncovered: int, false_neg: int) -> float:
    """Bits to single out the misclassified rows among covered and uncovered rows."""
    return log2_binom(n_covered, false_pos) + log2_binom(n_uncovered, false_neg)


def binary_description_length(rules: list[Rule], values, missing, positive, n_conditions) -> float:
    """Description length for a one-class rule list against ``positive`` labels."""
    covered = np.zeros(values.shape[0], dtype=bool)
    for r in rules:
        covered |= r.covers(values, missing)
    return _dl_from_masks(rules, covered, np.asarray(positive, dtype=bool), n_conditions)


def _dl_from_masks(rules, covered, positive, n_conditions) -> float:
    n_cov = int(covered.sum())
    fp = int((covered & ~positive).sum())
    fn = int((~covered & positive).sum())
    return theory_bits(rules, n_conditions) + exception_bits(n_cov, fp, covered.size - n_cov, fn)


def description_length(ruleset: RuleSet, data: Dataset, n_conditions: int | None = None) -> float:
    """Total bits of ``ruleset`` on ``data``.

    A row counts as covered when any rule fires. Covered rows whose predicted
    class is wrong are false positives; uncovered rows whose class differs from
    the default are false negatives.
    """
    if n_conditions is None:
        n_conditions = count_possible_conditions(data.values, data.missing)
    pred = ruleset.predict_arrays(data.values, data.missing)
    covered = np.zeros(data.n_rows, dtype=bool)
    for r in ruleset.rules:
        covered |= r.covers(data.values, data.missing)
    wrong = pred != data.classes
    n_cov = int(covered.sum())
    fp = int((covered & wrong).sum())
    fn = int((~covered & wrong).sum())
    return theory_bits(ruleset.rules, n_conditions) + exception_bits(
        n_cov, fp, data.n_rows - n_cov, fn)
