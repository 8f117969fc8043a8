import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ffkit.errors import NonFinite, NonSymmetric, NotPositiveDefinite, RankDeficient
from ffkit.matcore import (
    DEFAULT_TOLERANCES,
    Tolerances,
    cholesky,
    orthonormalize,
    solve_spd,
    spd_logdet,
    sym_eig,
    thin_svd,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def square(n_min=1, n_max=7):
    return st.integers(n_min, n_max).flatmap(lambda n: arrays(np.float64, (n, n), elements=finite))


@settings(max_examples=150, deadline=None)
@given(square())
def test_sym_eig_matches_numpy_and_reconstructs(X):
    A = X + X.T
    w, V = sym_eig(A)
    assert np.all(np.diff(w) >= 0)
    scale = max(1.0, np.abs(A).max())
    np.testing.assert_allclose(w, np.linalg.eigvalsh(A), atol=1e-10 * scale)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, A, atol=1e-10 * scale)
    np.testing.assert_allclose(V.T @ V, np.eye(len(A)), atol=1e-12)
    assert w.sum() == pytest.approx(np.trace(A), abs=1e-10 * scale * len(A))


def test_sym_eig_diagonal_and_repeated():
    w, V = sym_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(w, [1.0, 2.0, 3.0])
    w, _ = sym_eig(4.0 * np.eye(5))
    np.testing.assert_allclose(w, 4.0)


def test_sym_eig_rejects_bad_input():
    with pytest.raises(NonSymmetric):
        sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NonFinite):
        sym_eig(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(NonSymmetric):
        sym_eig(np.ones((2, 3)))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_orthonormalize_idempotent(d, extra, seed):
    M = d + extra
    V = np.random.default_rng(seed).standard_normal((d, M))
    Q = orthonormalize(V)
    np.testing.assert_allclose(Q @ Q.T, np.eye(d), atol=1e-12)
    np.testing.assert_allclose(orthonormalize(Q), Q, atol=1e-12)
    # same row space
    P = Q.T @ Q
    np.testing.assert_allclose(V @ P, V, atol=1e-10 * np.abs(V).max())


def test_orthonormalize_dependent_rows():
    V = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(RankDeficient):
        orthonormalize(V)
    Q = orthonormalize(V, drop_dependent=True)
    assert Q.shape == (2, 3)
    with pytest.raises(RankDeficient):
        orthonormalize(np.zeros((2, 3)), drop_dependent=True)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_thin_svd_transpose_invariant(r, c, seed):
    A = np.random.default_rng(seed).standard_normal((r, c))
    s = thin_svd(A)
    np.testing.assert_allclose(s, thin_svd(A.T), atol=1e-10)
    np.testing.assert_allclose(s, np.linalg.svd(A, compute_uv=False), atol=1e-10)
    assert np.all(np.diff(s) <= 0)


def _spd(n, seed, cond=10.0):
    rng = np.random.default_rng(seed)
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    return Q @ np.diag(np.linspace(1.0, cond, n)) @ Q.T


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_cholesky_and_solve(n):
    A = _spd(n, n)
    L = cholesky(A)
    assert np.allclose(np.triu(L, 1), 0.0)
    np.testing.assert_allclose(L @ L.T, A, atol=1e-12)
    B = np.random.default_rng(1).standard_normal((n, 3))
    np.testing.assert_allclose(solve_spd(A, B), np.linalg.solve(A, B), atol=1e-10)
    b = B[:, 0]
    assert solve_spd(A, b).shape == (n,)
    sign, logdet = np.linalg.slogdet(A)
    assert spd_logdet(A) == pytest.approx(logdet, abs=1e-10)
    assert np.exp(spd_logdet(A)) == pytest.approx(np.prod(sym_eig(A).eigenvalues), rel=1e-10)


def test_cholesky_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        cholesky(np.diag([1.0, 0.0]))


def test_tolerances_from_env():
    assert Tolerances.from_env({}) == DEFAULT_TOLERANCES
    assert Tolerances.from_env({"FFKIT_TOLERANCE_TIGHT": "1e-6"}).tight == 1e-6
    with pytest.raises(ValueError):
        Tolerances.from_env({"FFKIT_TOLERANCE_TIGHT": "abc"})
    with pytest.raises(ValueError):
        Tolerances.from_env({"FFKIT_TOLERANCE_TIGHT": "-1"})
    assert dataclasses.replace(DEFAULT_TOLERANCES, tight=0.1).tight == 0.1
