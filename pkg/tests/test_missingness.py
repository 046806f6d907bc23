import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ripsel.data import Dataset
from ripsel.errors import ConfigurationError
from ripsel.missingness import (ALL, HALF, PAPER_LEVELS, InjectionPlan, build_test_grid,
                                eligible_columns, inject_mcar, measure_missing_rate)


def _data(n=100, m=10, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset.from_arrays(rng.normal(size=(n, m)), rng.integers(0, 2, n))


def test_rate_zero_is_identity():
    d = _data()
    assert inject_mcar(d, InjectionPlan(0.0, ALL, 3)) == d


def test_rate_quarter_within_three_sigma():
    # binomial(1000, 0.25): mean 250, sd 13.7
    d = _data()
    for seed in range(10):
        k = inject_mcar(d, InjectionPlan(0.25, ALL, seed)).missing.sum()
        assert 209 <= k <= 291


def test_half_scope_touches_five_of_ten_columns():
    d = _data()
    out = inject_mcar(d, InjectionPlan(0.10, HALF, 1))
    cols = eligible_columns(10, InjectionPlan(0.10, HALF, 1))
    assert len(cols) == 5
    untouched = np.setdiff1d(np.arange(10), cols)
    assert not out.missing[:, untouched].any()


def test_explicit_half_selection():
    plan = InjectionPlan(0.5, HALF, 0, half_selection=(0, 2, 4, 6, 8))
    out = inject_mcar(_data(), plan)
    assert not out.missing[:, 1::2].any()
    with pytest.raises(ConfigurationError):
        eligible_columns(10, InjectionPlan(0.5, HALF, 0, half_selection=(0, 1)))


def test_input_untouched_and_class_never_masked():
    d = _data()
    before = d.values.copy()
    out = inject_mcar(d, InjectionPlan(0.9, ALL, 0))
    np.testing.assert_array_equal(d.values, before)
    assert not d.missing.any()
    np.testing.assert_array_equal(out.classes, d.classes)


@pytest.mark.parametrize("rate", [-0.1, 0.96, 1.0])
def test_rate_outside_range(rate):
    with pytest.raises(ConfigurationError):
        InjectionPlan(rate, ALL, 0)


def test_unknown_scope():
    with pytest.raises(ConfigurationError):
        InjectionPlan(0.1, "some", 0)


def test_injection_composes_with_existing_missingness():
    X = np.ones((50, 4))
    X[:, 0] = np.nan
    d = Dataset.from_arrays(X, np.arange(50) % 2)
    out = inject_mcar(d, InjectionPlan(0.3, ALL, 2))
    assert out.missing[:, 0].all()


def test_exact_mode_hits_count():
    out = inject_mcar(_data(), InjectionPlan(0.25, ALL, 5, exact=True))
    assert out.missing.sum() == 250


def test_measured_rate_on_large_table():
    d = _data(n=10_000, m=10)
    out = inject_mcar(d, InjectionPlan(0.5, ALL, 11))
    assert abs(measure_missing_rate(out) - 0.5) <= 0.005
    assert measure_missing_rate(d) == 0.0


def test_disjoint_scopes_combine_by_weighted_average():
    out = inject_mcar(_data(n=300), InjectionPlan(0.3, ALL, 4))
    a, b = measure_missing_rate(out, [0, 1, 2]), measure_missing_rate(out, range(3, 10))
    assert np.isclose((3 * a + 7 * b) / 10, measure_missing_rate(out))


def test_masks_nested_across_rates():
    d = _data(n=500)
    masks = [inject_mcar(d, InjectionPlan(r, ALL, 8)).missing for r in PAPER_LEVELS]
    for lo, hi in zip(masks, masks[1:]):
        assert np.all(hi[lo])
        assert lo.sum() < hi.sum()


def test_mask_independent_of_values():
    # masked and unmasked means of one column agree in expectation
    rng = np.random.default_rng(0)
    X = rng.exponential(size=(20_000, 1))
    d = Dataset.from_arrays(X, np.arange(X.shape[0]) % 2)
    diffs = []
    for seed in range(20):
        m = inject_mcar(d, InjectionPlan(0.3, ALL, seed)).missing[:, 0]
        diffs.append(X[m, 0].mean() - X[~m, 0].mean())
    assert abs(np.mean(diffs)) < 0.01


def test_grid_sizes_and_order():
    d = _data()
    grid = build_test_grid(d, PAPER_LEVELS, seed=0)
    assert len(grid) == 10
    assert len(build_test_grid(d, [0.5], seed=0)) == 2
    with_base = build_test_grid(d, PAPER_LEVELS, seed=0, include_baseline=True)
    assert len(with_base) == 11
    assert with_base[0][0].rate == 0 and with_base[0][1] == d
    assert [(p.rate, p.scope) for p, _ in grid][:2] == [(0.10, ALL), (0.10, HALF)]


def test_grid_deterministic():
    d = _data()
    a = build_test_grid(d, PAPER_LEVELS, seed=9)
    b = build_test_grid(d, PAPER_LEVELS, seed=9)
    for (pa, da), (pb, db) in zip(a, b):
        assert pa == pb
        assert da.missing.tobytes() == db.missing.tobytes()


def test_grid_rejects_bad_levels():
    with pytest.raises(ConfigurationError):
        build_test_grid(_data(), [], 0)
    with pytest.raises(ConfigurationError):
        build_test_grid(_data(), [0.0], 0)


@settings(max_examples=40, deadline=None)
@given(rate=st.floats(0.0, 0.95), seed=st.integers(0, 2**32 - 1),
       scope=st.sampled_from([ALL, HALF]), m=st.integers(2, 12))
def test_injection_properties(rate, seed, scope, m):
    d = _data(n=40, m=m)
    plan = InjectionPlan(rate, scope, seed)
    out = inject_mcar(d, plan)
    cols = eligible_columns(m, plan)
    outside = np.setdiff1d(np.arange(m), cols)
    assert not out.missing[:, outside].any()
    np.testing.assert_array_equal(out.values[~out.missing], d.values[~out.missing])
    np.testing.assert_array_equal(out.classes, d.classes)
    assert inject_mcar(d, plan) == out
