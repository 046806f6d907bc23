import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ripsel import pca
from ripsel.errors import DataError, SchemaError


def _random_matrix(rng, n, m):
    # correlated columns with uneven scales
    A = rng.normal(size=(n, m)) @ rng.normal(size=(m, m)) * rng.uniform(0.1, 10, m)
    return A + rng.normal(size=m) * 5


def _check_invariants(A, model):
    C = pca.covariance(model, A)
    lam, V = model.eigenvalues, model.components
    residual = np.max(np.abs(C @ V - V * lam))
    assert residual < 1e-8
    assert abs(lam.sum() - np.trace(C)) < 1e-8
    np.testing.assert_allclose(V.T @ V, np.eye(V.shape[1]), atol=1e-10)
    assert np.all(np.diff(lam) <= 1e-12)


def test_perfectly_correlated_pair():
    A = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    model = pca.fit(A)
    np.testing.assert_allclose(pca.covariance(model, A), [[1, 1], [1, 1]], atol=1e-12)
    np.testing.assert_allclose(model.eigenvalues, [2.0, 0.0], atol=1e-12)
    assert model.kept == 1


def test_independent_columns_have_unit_eigenvalues():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(20_000, 5))
    model = pca.fit(A)
    np.testing.assert_allclose(model.eigenvalues, 1.0, atol=0.05)
    _check_invariants(A, model)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(3, 120), m=st.integers(1, 20),
       standardize=st.booleans())
def test_fit_invariants(seed, n, m, standardize):
    rng = np.random.default_rng(seed)
    A = _random_matrix(rng, n, m)
    _check_invariants(A, pca.fit(A, standardize=standardize))


def test_mean_row_maps_to_zero():
    rng = np.random.default_rng(1)
    A = _random_matrix(rng, 50, 6)
    model = pca.fit(A)
    np.testing.assert_allclose(pca.transform(model, A.mean(axis=0)), 0.0, atol=1e-12)


def test_all_missing_row_maps_to_zero():
    rng = np.random.default_rng(2)
    model = pca.fit(_random_matrix(rng, 40, 5))
    out = pca.transform(model, np.full((1, 5), np.nan))
    np.testing.assert_array_equal(out, np.zeros((1, model.kept)))
    out = pca.transform(model, np.ones((1, 5)), missing=np.ones((1, 5), bool))
    np.testing.assert_array_equal(out, np.zeros((1, model.kept)))


def test_zero_matrix_inverts_to_mean():
    rng = np.random.default_rng(3)
    A = _random_matrix(rng, 40, 5)
    model = pca.fit(A)
    out = pca.inverse_transform(model, np.zeros((3, model.kept)))
    np.testing.assert_allclose(out, np.tile(A.mean(axis=0), (3, 1)), atol=1e-10)


def test_full_rank_round_trip():
    rng = np.random.default_rng(4)
    A = _random_matrix(rng, 80, 7)
    model = pca.fit(A, n_components=7)
    back = pca.inverse_transform(model, pca.transform(model, A))
    assert np.max(np.abs(back - A)) < 1e-8


def test_dropped_energy_identity():
    rng = np.random.default_rng(5)
    n, m = 200, 8
    A = _random_matrix(rng, n, m)
    model = pca.fit(A, n_components=3)
    Z = (A - model.mean) / model.scale
    back = pca.inverse_transform(model, pca.transform(model, A))
    Zb = (back - model.mean) / model.scale
    err = np.sum((Z - Zb) ** 2)
    assert err == pytest.approx((n - 1) * model.eigenvalues[3:].sum(), rel=1e-9)


def test_component_variances_equal_eigenvalues():
    rng = np.random.default_rng(6)
    A = _random_matrix(rng, 150, 6)
    model = pca.fit(A, n_components=6)
    T = pca.transform(model, A)
    np.testing.assert_allclose(T.var(axis=0, ddof=1), model.eigenvalues, atol=1e-6)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), k=st.integers(1, 6))
def test_projection_idempotent(seed, k):
    rng = np.random.default_rng(seed)
    A = _random_matrix(rng, 60, 6)
    model = pca.fit(A, n_components=k)
    T = pca.transform(model, A)
    T2 = pca.transform(model, pca.inverse_transform(model, T))
    assert np.max(np.abs(T2 - T)) < 1e-8


def test_kaiser_count():
    assert pca.kaiser_count([3.0, 1.5, 1.0, 0.2]) == 2
    assert pca.kaiser_count([0.9, 0.1]) == 1


def test_errors():
    with pytest.raises(DataError):
        pca.fit(np.ones((1, 3)))
    with pytest.raises(DataError):
        pca.fit(np.array([[1.0, np.nan], [2.0, 3.0]]))
    model = pca.fit(np.random.default_rng(0).normal(size=(10, 3)))
    with pytest.raises(SchemaError):
        pca.transform(model, np.zeros((2, 4)))
    with pytest.raises(SchemaError):
        pca.inverse_transform(model, np.zeros((2, model.kept + 1)))


def test_zero_variance_column_warns():
    A = np.c_[np.random.default_rng(0).normal(size=(20, 2)), np.full(20, 4.0)]
    with pytest.warns(RuntimeWarning):
        model = pca.fit(A)
    assert model.scale[2] == 1.0
    assert np.min(np.abs(model.eigenvalues)) < 1e-12


def test_signs_deterministic_and_json_round_trip():
    A = _random_matrix(np.random.default_rng(7), 30, 4)
    a, b = pca.fit(A), pca.fit(A.copy())
    np.testing.assert_array_equal(a.components, b.components)
    pivots = a.components[np.argmax(np.abs(a.components), axis=0), np.arange(4)]
    assert np.all(pivots > 0)
    back = pca.PcaModel.from_json(a.to_json())
    np.testing.assert_array_equal(back.components, a.components)
    assert back.kept == a.kept
