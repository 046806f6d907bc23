"""Growing and pruning of single rules (the inner IREP step)."""
from __future__ import annotations

import numpy as np

from ..data import Dataset
from .rules import Condition, Rule

_GAIN_EPS = 1e-12


def foil_gain(p0, n0, p1, n1):
    """FOIL information gain of refining a rule covering (p0, n0) to (p1, n1).

    Works elementwise on arrays; entries with ``p1 == 0`` get gain 0.
    """
    p0, n0, p1, n1 = (np.asarray(a, dtype=float) for a in (p0, n0, p1, n1))
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = p1 * (np.log2(p1 / (p1 + n1)) - np.log2(p0 / (p0 + n0)))
    gain = np.where(p1 > 0, gain, 0.0)
    return gain if gain.ndim else float(gain)


def prune_value(p: int, n: int) -> float:
    """(p - n) / (p + n) over covered pruning rows; -1 when nothing is covered."""
    if p + n == 0:
        return -1.0
    return (p - n) / (p + n)


def best_condition(values, missing, positive, covered):
    """The single condition with maximal FOIL gain, or ``None`` if no gain is positive.

    Candidate thresholds are midpoints between consecutive distinct values of
    each attribute among currently covered rows. Ties go to the lowest
    attribute, then ``<=`` before ``>=``, then the lowest threshold.
    """
    p0 = int((covered & positive).sum())
    n0 = int(covered.sum()) - p0
    best, best_gain = None, _GAIN_EPS
    for a in range(values.shape[1]):
        sel = covered & ~missing[:, a]
        if not sel.any():
            continue
        v = values[sel, a]
        y = positive[sel]
        order = np.argsort(v, kind="stable")
        v, y = v[order], y[order]
        cut = np.flatnonzero(v[:-1] < v[1:])
        if cut.size == 0:
            continue
        cp = np.cumsum(y)
        cn = np.cumsum(~y)
        P, N = cp[-1], cn[-1]
        le = foil_gain(p0, n0, cp[cut], cn[cut])
        ge = foil_gain(p0, n0, P - cp[cut], N - cn[cut])
        for op, gains in (("<=", le), (">=", ge)):
            i = int(np.argmax(gains))
            if gains[i] > best_gain:
                best_gain = float(gains[i])
                best = Condition(a, op, float((v[cut[i]] + v[cut[i] + 1]) / 2))
    return best, best_gain


def _add_condition(conditions: list[Condition], cond: Condition) -> None:
    for i, c in enumerate(conditions):
        if c.attribute == cond.attribute and c.operator == cond.operator:
            conditions[i] = cond
            return
    conditions.append(cond)


def grow_arrays(values, missing, positive, target: int, start: Rule | None = None) -> Rule:
    """Greedy FOIL-gain growth on array inputs. ``start`` seeds the condition list."""
    positive = np.asarray(positive, dtype=bool)
    conditions = list(start.conditions) if start is not None else []
    covered = np.ones(values.shape[0], dtype=bool)
    for c in conditions:
        covered &= c.covers(values, missing)
    while (covered & ~positive).any() and (covered & positive).any():
        cond, _ = best_condition(values, missing, positive, covered)
        if cond is None:
            break
        _add_condition(conditions, cond)
        covered &= cond.covers(values, missing)
    return Rule(tuple(conditions), target)


def grow_rule(grow_pos: Dataset, grow_neg: Dataset, target: int) -> Rule:
    """Grow a rule separating ``grow_pos`` from ``grow_neg``.

    The result may have no conditions when no literal has positive gain; such
    a rule is an internal state and is never emitted by the learner.
    """
    if grow_pos.n_rows == 0:
        raise ValueError("grow_pos must be non-empty")
    values = np.vstack([grow_pos.values, grow_neg.values])
    missing = np.vstack([grow_pos.missing, grow_neg.missing])
    positive = np.r_[np.ones(grow_pos.n_rows, bool), np.zeros(grow_neg.n_rows, bool)]
    return grow_arrays(values, missing, positive, target)


def prune_arrays(rule: Rule, values, missing, positive) -> Rule:
    """Keep the prefix of ``rule`` maximizing the pruning value.

    Ties favor the shorter prefix. When no prefix covers any pruning row there
    is no evidence to prune on and the rule is returned unchanged.
    """
    if len(rule) == 0:
        raise ValueError("cannot prune an empty rule")
    positive = np.asarray(positive, dtype=bool)
    covered = np.ones(values.shape[0], dtype=bool)
    scores = []
    for cond in rule.conditions:
        covered = covered & cond.covers(values, missing)
        p = int((covered & positive).sum())
        scores.append((prune_value(p, int(covered.sum()) - p), int(covered.sum())))
    if all(n_cov == 0 for _, n_cov in scores):
        return rule
    best_k = max(range(len(scores)), key=lambda k: (scores[k][0], -k))
    return rule.truncated(best_k + 1)


def prune_rule(rule: Rule, prune_pos: Dataset, prune_neg: Dataset) -> Rule:
    values = np.vstack([prune_pos.values, prune_neg.values])
    missing = np.vstack([prune_pos.missing, prune_neg.missing])
    positive = np.r_[np.ones(prune_pos.n_rows, bool), np.zeros(prune_neg.n_rows, bool)]
    return prune_arrays(rule, values, missing, positive)
