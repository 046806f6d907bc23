"""RIPPER rule-set induction."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..data import Dataset, class_prevalence_order, stratified_split_indices
from ..errors import ConfigurationError, DataError
from .irep import grow_arrays, prune_arrays
from .mdl import binary_description_length, count_possible_conditions
from .rules import Rule, RuleSet

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RipperConfig:
    grow_ratio: float = 2 / 3
    mdl_slack_bits: float = 64.0
    rule_error_threshold: float = 0.5
    seed: int = 0
    optimize: bool = False
    optimization_passes: int = 2

    def __post_init__(self):
        if not 0 < self.grow_ratio < 1:
            raise ConfigurationError("grow_ratio must lie in (0, 1)")
        if self.mdl_slack_bits <= 0:
            raise ConfigurationError("mdl_slack_bits must be positive")
        if not 0 < self.rule_error_threshold <= 1:
            raise ConfigurationError("rule_error_threshold must lie in (0, 1]")
        if self.optimization_passes < 0:
            raise ConfigurationError("optimization_passes must be >= 0")


class _ClassProblem:
    """One-vs-rest view of the rows still in play while learning rules for one class."""

    def __init__(self, values, missing, positive, target):
        self.values = values
        self.missing = missing
        self.positive = positive
        self.target = target
        self.n_conditions = count_possible_conditions(values, missing)

    def coverage(self, rules, rows=None) -> np.ndarray:
        v = self.values if rows is None else self.values[rows]
        m = self.missing if rows is None else self.missing[rows]
        covered = np.zeros(v.shape[0], dtype=bool)
        for r in rules:
            covered |= r.covers(v, m)
        return covered

    def dl(self, rules) -> float:
        return binary_description_length(rules, self.values, self.missing, self.positive,
                                         self.n_conditions)

    def split(self, rows, ratio, rng):
        grow, prune = stratified_split_indices(self.positive[rows], ratio, rng)
        if not self.positive[rows[grow]].any() and self.positive[rows[prune]].any():
            # keep at least one positive to grow from
            k = int(np.flatnonzero(self.positive[rows[prune]])[0])
            grow = np.sort(np.r_[grow, prune[k]])
            prune = np.delete(prune, k)
        return rows[grow], rows[prune]


def _error_rate(rule, values, missing, positive):
    covered = rule.covers(values, missing)
    n_cov = int(covered.sum())
    if n_cov == 0:
        return None
    return float((covered & ~positive).sum() / n_cov)


def _cover_positives(prob: _ClassProblem, rules: list[Rule], config: RipperConfig, rng) -> list[Rule]:
    """Add IREP rules until positives run out, a rule errs too much, or MDL says stop."""
    rules = list(rules)
    covered = prob.coverage(rules)
    remaining = ~covered
    best_dl = prob.dl(rules)
    while (prob.positive & remaining).any():
        grow, prune = prob.split(np.flatnonzero(remaining), config.grow_ratio, rng)
        rule = grow_arrays(prob.values[grow], prob.missing[grow], prob.positive[grow], prob.target)
        if len(rule) == 0:
            break
        rule = prune_arrays(rule, prob.values[prune], prob.missing[prune], prob.positive[prune])
        err = _error_rate(rule, prob.values[prune], prob.missing[prune], prob.positive[prune])
        if err is None:
            # nothing covered on the pruning rows: judge on the growing rows instead
            err = _error_rate(rule, prob.values[grow], prob.missing[grow], prob.positive[grow])
        if err > config.rule_error_threshold:
            log.debug("class %d: rule rejected, error %.3f", prob.target, err)
            break
        rules.append(rule)
        cov = rule.covers(prob.values, prob.missing)
        covered |= cov
        remaining &= ~cov
        dl = prob.dl(rules)
        log.debug("class %d: rule %d, DL %.1f bits", prob.target, len(rules), dl)
        if dl > best_dl + config.mdl_slack_bits:
            break
        best_dl = min(best_dl, dl)
    return rules


def _prune_against_ruleset(rule: Rule, others_covered, values, missing, positive) -> Rule:
    """Prefix of ``rule`` minimizing the error of the whole rule list on pruning rows."""
    if len(rule) == 0:
        return rule
    covered = np.ones(values.shape[0], dtype=bool)
    errors = []
    for cond in rule.conditions:
        covered &= cond.covers(values, missing)
        total = others_covered | covered
        errors.append(int((total & ~positive).sum() + (~total & positive).sum()))
    k = min(range(len(errors)), key=lambda i: (errors[i], i))
    return rule.truncated(k + 1)


def _optimize(prob: _ClassProblem, rules: list[Rule], config: RipperConfig, rng) -> list[Rule]:
    """Replacement/revision rounds followed by rule deletion, both judged by DL."""
    all_rows = np.arange(prob.values.shape[0])
    for _ in range(config.optimization_passes):
        for i in range(len(rules)):
            grow, prune = prob.split(all_rows, config.grow_ratio, rng)
            others = rules[:i] + rules[i + 1:]
            free = grow[~prob.coverage(others, grow)]
            others_prune = prob.coverage(others, prune)
            pv, pm, pp = prob.values[prune], prob.missing[prune], prob.positive[prune]
            candidates = [rules[i]]
            if prob.positive[free].any():
                gv, gm, gp = prob.values[free], prob.missing[free], prob.positive[free]
                replacement = grow_arrays(gv, gm, gp, prob.target)
                revision = grow_arrays(gv, gm, gp, prob.target, start=rules[i])
                for cand in (replacement, revision):
                    cand = _prune_against_ruleset(cand, others_prune, pv, pm, pp)
                    if len(cand):
                        candidates.append(cand)
            scores = [prob.dl(rules[:i] + [c] + rules[i + 1:]) for c in candidates]
            rules = rules[:i] + [candidates[int(np.argmin(scores))]] + rules[i + 1:]
        rules = _cover_positives(prob, rules, config, rng)
    for j in reversed(range(len(rules))):
        reduced = rules[:j] + rules[j + 1:]
        if prob.dl(reduced) < prob.dl(rules):
            rules = reduced
    return rules


def induce(train: Dataset, config: RipperConfig | None = None) -> RuleSet:
    """Learn an ordered rule list, least prevalent class first.

    The most prevalent class becomes the default. After each class, its rows and
    every row its rules cover leave the training pool.
    """
    config = config or RipperConfig()
    if np.count_nonzero(train.class_counts()) < 2:
        raise DataError("induction needs at least two classes present")
    rng = np.random.default_rng(config.seed)
    order = class_prevalence_order(train)
    order = [c for c in order if train.class_counts()[c] > 0]
    in_play = np.ones(train.n_rows, dtype=bool)
    rules: list[Rule] = []
    for target in order[:-1]:
        rows = np.flatnonzero(in_play)
        positive = train.classes[rows] == target
        if not positive.any():
            continue
        prob = _ClassProblem(train.values[rows], train.missing[rows], positive, target)
        class_rules = _cover_positives(prob, [], config, rng)
        if config.optimize and class_rules:
            class_rules = _optimize(prob, class_rules, config, rng)
        rules.extend(class_rules)
        covered = prob.coverage(class_rules)
        in_play[rows[covered | positive]] = False
    return RuleSet(tuple(rules), int(order[-1]), tuple(train.feature_names),
                   train.class_labels)
