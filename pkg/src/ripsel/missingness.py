"""MCAR missing-value injection and the test-set grid built from it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import Dataset
from .errors import ConfigurationError

ALL = "all"
HALF = "half"
SCOPES = (ALL, HALF)
MAX_RATE = 0.95
PAPER_LEVELS = (0.10, 0.25, 0.30, 0.40, 0.50)


@dataclass(frozen=True)
class InjectionPlan:
    rate: float
    scope: str = ALL
    seed: int = 0
    half_selection: tuple[int, ...] | None = None
    exact: bool = False

    def __post_init__(self):
        if not 0.0 <= self.rate <= MAX_RATE:
            raise ConfigurationError(f"missing rate must lie in [0, {MAX_RATE}], got {self.rate}")
        if self.scope not in SCOPES:
            raise ConfigurationError(f"scope must be one of {SCOPES}, got {self.scope!r}")
        if self.half_selection is not None:
            if self.scope != HALF:
                raise ConfigurationError("half_selection only applies to scope='half'")
            object.__setattr__(self, "half_selection", tuple(int(c) for c in self.half_selection))

    @property
    def label(self) -> str:
        return f"{round(self.rate * 100):d}_{self.scope}"


def eligible_columns(n_features: int, plan: InjectionPlan) -> np.ndarray:
    """Feature columns the plan may mask."""
    if plan.scope == ALL:
        return np.arange(n_features)
    k = n_features // 2
    if plan.half_selection is not None:
        cols = np.array(sorted(set(plan.half_selection)), dtype=int)
        if cols.size != k or (cols.size and (cols.min() < 0 or cols.max() >= n_features)):
            raise ConfigurationError(f"half_selection must name {k} distinct valid columns")
        return cols
    col_seq, _ = np.random.SeedSequence(plan.seed).spawn(2)
    return np.sort(np.random.default_rng(col_seq).choice(n_features, size=k, replace=False))


def inject_mcar(data: Dataset, plan: InjectionPlan) -> Dataset:
    """Return a copy of ``data`` with cells masked completely at random.

    Each cell of an eligible column is masked independently with probability
    ``plan.rate``. With ``plan.exact`` exactly ``round(rate * cells)`` eligible
    cells are masked instead. Uniform draws cover the whole matrix and depend
    only on the seed, so for one seed the masks of increasing rates are nested.
    Cells that were already missing stay missing.
    """
    cols = eligible_columns(data.n_features, plan)
    _, mask_seq = np.random.SeedSequence(plan.seed).spawn(2)
    u = np.random.default_rng(mask_seq).random(data.values.shape)
    eligible = np.zeros(data.values.shape, dtype=bool)
    eligible[:, cols] = True
    if plan.exact:
        n_cells = int(eligible.sum())
        k = int(round(plan.rate * n_cells))
        flat = np.flatnonzero(eligible)
        chosen = flat[np.argsort(u.ravel()[flat], kind="stable")[:k]]
        new = np.zeros(data.values.size, dtype=bool)
        new[chosen] = True
        new = new.reshape(data.values.shape)
    else:
        new = eligible & (u < plan.rate)
    return data.with_missing(new)


def build_test_grid(test: Dataset, levels: Sequence[float] = PAPER_LEVELS, seed: int = 0,
                    include_baseline: bool = False, exact: bool = False
                    ) -> list[tuple[InjectionPlan, Dataset]]:
    """Inject every (level, scope) combination into ``test``.

    Plans of one scope share a seed (common random numbers across levels); the
    two scopes get different seeds. The clean baseline, when requested, comes
    first as a rate-0 plan.
    """
    if not levels:
        raise ConfigurationError("levels must be non-empty")
    for lv in levels:
        if not 0.0 < lv <= MAX_RATE:
            raise ConfigurationError(f"level {lv} outside (0, {MAX_RATE}]")
    scope_seeds = {
        scope: int(s.generate_state(1)[0])
        for scope, s in zip(SCOPES, np.random.SeedSequence(seed).spawn(len(SCOPES)))
    }
    grid = []
    if include_baseline:
        plan = InjectionPlan(0.0, ALL, scope_seeds[ALL])
        grid.append((plan, inject_mcar(test, plan)))
    for lv in levels:
        for scope in SCOPES:
            plan = InjectionPlan(float(lv), scope, scope_seeds[scope], exact=exact)
            grid.append((plan, inject_mcar(test, plan)))
    return grid


def measure_missing_rate(data: Dataset, scope: Sequence[int] | None = None) -> float:
    """Fraction of missing cells over the given feature columns (all by default)."""
    cols = np.arange(data.n_features) if scope is None else np.asarray(list(scope), dtype=int)
    if cols.size == 0:
        raise ConfigurationError("scope must name at least one column")
    block = data.missing[:, cols]
    return float(block.sum() / block.size) if block.size else 0.0
