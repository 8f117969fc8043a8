"""Dense real linear-algebra kernels.

Everything here works on plain ``numpy.ndarray`` values of dtype float64 and
is sized for small problems (ambient dimension up to a few dozen).  The
eigensolver is a cyclic Jacobi method; singular values come from the
eigenvalues of the smaller Gram matrix.
"""

from __future__ import annotations

import dataclasses
import os
from typing import NamedTuple

import numpy as np

from .errors import NonFinite, NonSymmetric, NotConverged, NotPositiveDefinite, RankDeficient


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the toolkit.

    One instance is threaded through every call that needs a threshold; the
    defaults are the documented ones and can be overridden field by field
    with :func:`dataclasses.replace` or from the environment.
    """

    symmetry: float = 1e-12  # relative asymmetry accepted by sym_eig
    jacobi_offdiag: float = 1e-14  # off(A) / ||A||_F stopping rule
    jacobi_max_sweeps: int = 100
    rank_pivot: float = 1e-10  # relative Gram-Schmidt pivot
    cholesky_pivot: float = 1e-13  # relative to trace(A)/n
    tight: float = 1e-9  # (B - A) <= tight * max(1, B)
    frame: float = 1e-12  # absolute floor on the smallest frame eigenvalue
    equidistance: float = 1e-9  # spread of pairwise d_c^2 and simplex gap
    identical: float = 1e-9  # d_c^2 below which two subspaces coincide
    subspace_orthonormal: float = 1e-10
    load_orthonormal: float = 1e-8
    load_reject: float = 1e-4

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        """Defaults, with ``FFKIT_TOLERANCE_TIGHT`` applied if set."""
        environ = os.environ if environ is None else environ
        raw = environ.get("FFKIT_TOLERANCE_TIGHT")
        if raw is None or raw.strip() == "":
            return cls()
        try:
            value = float(raw)
        except ValueError as exc:
            raise ValueError(f"FFKIT_TOLERANCE_TIGHT must be a decimal, got {raw!r}") from exc
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"FFKIT_TOLERANCE_TIGHT must be finite and >= 0, got {raw!r}")
        return cls(tight=value)


DEFAULT_TOLERANCES = Tolerances()
_EPS = float(np.finfo(np.float64).eps)


class SymEig(NamedTuple):
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns, orthonormal


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a finite 2-D float64 array or raise NonFinite."""
    arr = np.array(A, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} has non-finite entries")
    return arr


def _check_symmetric(A: np.ndarray, tol: Tolerances) -> None:
    if A.shape[0] != A.shape[1]:
        raise NonSymmetric(f"matrix is not square: {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 0.0)
    if A.size and float(np.max(np.abs(A - A.T))) > tol.symmetry * scale:
        raise NonSymmetric("matrix asymmetry exceeds tolerance")


def sym_eig(A, tol: Tolerances = DEFAULT_TOLERANCES) -> SymEig:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Returns eigenvalues in ascending order with matching orthonormal
    eigenvector columns.
    """
    A = as_matrix(A)
    _check_symmetric(A, tol)
    n = A.shape[0]
    # work on the exactly symmetric part
    a = 0.5 * (A + A.T)
    v = np.eye(n)
    fro = float(np.linalg.norm(a))
    target = tol.jacobi_offdiag * fro

    def off_norm() -> float:
        return float(np.linalg.norm(a - np.diag(np.diag(a))))

    sweeps = 0
    while off_norm() > target:
        if sweeps >= tol.jacobi_max_sweeps:
            raise NotConverged(f"Jacobi did not converge in {sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) <= _EPS * np.sqrt(abs(a[p, p] * a[q, q])):
                    # below rounding level of the diagonal
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(1.0 + theta * theta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]

    evals = np.diag(a).copy()
    order = np.argsort(evals, kind="stable")
    return SymEig(evals[order], v[:, order])


def sym_eigvals(A, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    return sym_eig(A, tol).eigenvalues


def orthonormalize(
    V, *, drop_dependent: bool = False, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """Orthonormal rows spanning the row space of ``V``.

    Modified Gram-Schmidt with one re-orthogonalization pass.  A row whose
    residual falls below ``rank_pivot`` times its original norm is dependent:
    it raises :class:`RankDeficient`, or is skipped when ``drop_dependent``.
    """
    V = as_matrix(V, "vectors")
    rows: list[np.ndarray] = []
    for k, row in enumerate(V):
        norm0 = float(np.linalg.norm(row))
        w = row.copy()
        for _ in range(2):
            for u in rows:
                w -= (u @ w) * u
        norm = float(np.linalg.norm(w))
        if norm0 == 0.0 or norm <= tol.rank_pivot * norm0:
            if drop_dependent:
                continue
            raise RankDeficient(f"row {k} is numerically dependent on the previous rows")
        rows.append(w / norm)
    if not rows:
        if drop_dependent:
            raise RankDeficient("all vectors are zero")
        return np.zeros((0, V.shape[1]))
    return np.vstack(rows)


def thin_svd(A, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Singular values of ``A`` in descending order (``min(rows, cols)`` of them)."""
    A = as_matrix(A)
    r, c = A.shape
    if min(r, c) == 0:
        return np.zeros(0)
    gram = A @ A.T if r <= c else A.T @ A
    gram = 0.5 * (gram + gram.T)
    evals = sym_eigvals(gram, tol)
    return np.sqrt(np.clip(evals, 0.0, None))[::-1]


def cholesky(A, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == A``."""
    A = as_matrix(A)
    _check_symmetric(A, tol)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    floor = tol.cholesky_pivot * float(np.trace(A)) / n
    L = np.zeros_like(A)
    for j in range(n):
        d = A[j, j] - L[j, :j] @ L[j, :j]
        if not d > floor or d <= 0.0:
            raise NotPositiveDefinite(f"Cholesky pivot {j} is {d:.3e} (floor {floor:.3e})")
        L[j, j] = np.sqrt(d)
        L[j + 1 :, j] = (A[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def _forward(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    Y = np.zeros_like(B)
    for i in range(L.shape[0]):
        Y[i] = (B[i] - L[i, :i] @ Y[:i]) / L[i, i]
    return Y


def _backward(U: np.ndarray, B: np.ndarray) -> np.ndarray:
    X = np.zeros_like(B)
    for i in range(U.shape[0] - 1, -1, -1):
        X[i] = (B[i] - U[i, i + 1 :] @ X[i + 1 :]) / U[i, i]
    return X


def solve_spd(A, B, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Solve ``A X = B`` for symmetric positive-definite ``A`` via Cholesky."""
    L = cholesky(A, tol)
    B_arr = np.array(B, dtype=np.float64)
    vector = B_arr.ndim == 1
    B2 = as_matrix(B_arr.reshape(-1, 1) if vector else B_arr, "right-hand side")
    if B2.shape[0] != L.shape[0]:
        raise ValueError(f"shape mismatch: A is {L.shape}, B is {B2.shape}")
    X = _backward(L.T, _forward(L, B2))
    return X.ravel() if vector else X


def spd_logdet(A, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    L = cholesky(A, tol)
    return 2.0 * float(np.sum(np.log(np.diag(L))))
