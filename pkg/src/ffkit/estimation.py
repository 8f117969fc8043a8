"""LMMSE estimation from fusion-frame measurements and the cost of erasures.

Measurements are z_i = P_i x + n_i with white noise of variance sigma_n^2.
The estimator is the Wiener filter built for the complete measurement set; an
erasure zeroes the affected blocks but the filter is never recomputed.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidParams,
    NotPositiveDefinite,
    NotTight,
    NotWhiteSignal,
    SingularModel,
)
from .frames import FusionFrame, frame_bounds, frame_operator
from .matcore import DEFAULT_TOLERANCES, Tolerances, as_matrix, cholesky, solve_spd, sym_eig


@dataclasses.dataclass(frozen=True, eq=False)
class SignalModel:
    """Second-order model of x: white (sigma_x^2 I) or a general SPD R_xx."""

    sigma_x2: float | None = None
    rxx: np.ndarray | None = None

    def __post_init__(self):
        if (self.sigma_x2 is None) == (self.rxx is None):
            raise InvalidParams("give exactly one of sigma_x2 or rxx")
        if self.sigma_x2 is not None:
            if not (math.isfinite(self.sigma_x2) and self.sigma_x2 > 0):
                raise InvalidParams(f"sigma_x^2 must be > 0, got {self.sigma_x2!r}")
            object.__setattr__(self, "sigma_x2", float(self.sigma_x2))
        else:
            R = as_matrix(self.rxx, "R_xx")
            try:
                cholesky(R)
            except NotPositiveDefinite as exc:
                raise InvalidParams(f"R_xx is not positive definite: {exc}") from exc
            R = 0.5 * (R + R.T)
            R.setflags(write=False)
            object.__setattr__(self, "rxx", R)

    @classmethod
    def white(cls, sigma_x2: float) -> "SignalModel":
        return cls(sigma_x2=sigma_x2)

    @classmethod
    def general(cls, rxx) -> "SignalModel":
        return cls(rxx=rxx)

    @property
    def is_white(self) -> bool:
        return self.sigma_x2 is not None

    def covariance(self, M: int) -> np.ndarray:
        if self.is_white:
            return self.sigma_x2 * np.eye(M)
        self._check_dim(M)
        return np.array(self.rxx)

    def precision(self, M: int, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
        if self.is_white:
            return np.eye(M) / self.sigma_x2
        self._check_dim(M)
        return solve_spd(self.rxx, np.eye(M), tol)

    def eigenvalues(self, M: int, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
        if self.is_white:
            return np.full(M, self.sigma_x2)
        self._check_dim(M)
        return sym_eig(self.rxx, tol).eigenvalues

    def _check_dim(self, M: int) -> None:
        if self.rxx.shape != (M, M):
            raise DimensionMismatch(f"R_xx is {self.rxx.shape}, frame lives in R^{M}")


@dataclasses.dataclass(frozen=True)
class NoiseModel:
    sigma_n2: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma_n2) and self.sigma_n2 > 0):
            raise InvalidParams(f"sigma_n^2 must be > 0, got {self.sigma_n2!r}")
        object.__setattr__(self, "sigma_n2", float(self.sigma_n2))


@dataclasses.dataclass(frozen=True)
class ErasurePattern:
    """Sorted, duplicate-free indices of erased subspaces."""

    erased: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.erased)
        if len(set(idx)) != len(idx):
            raise InvalidParams(f"duplicate erasure indices in {idx}")
        if any(i < 0 for i in idx):
            raise InvalidParams(f"negative erasure index in {idx}")
        object.__setattr__(self, "erased", tuple(sorted(idx)))

    @classmethod
    def of(cls, indices: Iterable[int] = ()) -> "ErasurePattern":
        return cls(tuple(indices))

    def __len__(self) -> int:
        return len(self.erased)

    def validate(self, N: int) -> None:
        if any(i >= N for i in self.erased):
            raise InvalidParams(f"erasure index out of range for N={N}: {self.erased}")
        if len(self.erased) >= N:
            raise InvalidParams(f"cannot erase {len(self.erased)} of {N} subspaces")

    def mask(self, N: int) -> np.ndarray:
        """Boolean array, True for subspaces that are kept."""
        self.validate(N)
        keep = np.ones(N, dtype=bool)
        keep[list(self.erased)] = False
        return keep


NO_ERASURES = ErasurePattern()


@dataclasses.dataclass(frozen=True)
class MseReport:
    mse_no_erasure: float
    extra_mse: float
    total_mse: float
    lower_bound: float
    upper_bound: float
    alpha: float | None  # defined for tight frames with a white signal
    erased: tuple[int, ...] = ()


def _information_matrix(frame: FusionFrame, sig: SignalModel, noise: NoiseModel, tol) -> np.ndarray:
    M = frame.ambient_dim
    J = sig.precision(M, tol) + frame_operator(frame) / noise.sigma_n2
    return 0.5 * (J + J.T)


def error_covariance(
    frame: FusionFrame, sig: SignalModel, noise: NoiseModel, tol: Tolerances = DEFAULT_TOLERANCES
) -> np.ndarray:
    """R_ee = (R_xx^-1 + sigma_n^-2 sum_i P_i)^-1."""
    J = _information_matrix(frame, sig, noise, tol)
    try:
        R = solve_spd(J, np.eye(frame.ambient_dim), tol)
    except NotPositiveDefinite as exc:
        raise SingularModel(str(exc)) from exc
    return 0.5 * (R + R.T)


def alpha(A: float, sigma_x2: float, sigma_n2: float) -> float:
    """Gain of the closed-form tight-frame estimator, sigma_x^2 / (A sigma_x^2 + sigma_n^2)."""
    return sigma_x2 / (sigma_x2 * A + sigma_n2)


def _tight_bound(frame: FusionFrame, tol: Tolerances) -> float | None:
    b = frame_bounds(frame, tol)
    return float(np.mean(frame.spectrum)) if b.tight else None


def mse_no_erasure(
    frame: FusionFrame, sig: SignalModel, noise: NoiseModel, tol: Tolerances = DEFAULT_TOLERANCES
) -> MseReport:
    """MSE_0 = sum 1/phi_i with its frame-bound sandwich."""
    M = frame.ambient_dim
    J = _information_matrix(frame, sig, noise, tol)
    phi = sym_eig(J, tol).eigenvalues
    if phi[0] <= 0.0:
        raise SingularModel(f"information matrix has eigenvalue {phi[0]!r}")
    mse = float(np.sum(1.0 / phi))
    lam = sig.eigenvalues(M, tol)
    bounds = frame_bounds(frame, tol)
    s2 = noise.sigma_n2
    lower = float(np.sum(1.0 / (1.0 / lam + bounds.upper / s2)))
    upper = float(np.sum(1.0 / (1.0 / lam + bounds.lower / s2)))
    A = _tight_bound(frame, tol)
    a = alpha(A, sig.sigma_x2, s2) if (A is not None and sig.is_white) else None
    return MseReport(mse, 0.0, mse, lower, upper, a)


def tight_frame_mse(lambdas: Sequence[float], total_dim: float, M: int, sigma_n2: float) -> float:
    """Closed-form MSE of a tight frame, sum_i s2 l_i / (s2 + l_i sum(m)/M)."""
    lam = np.asarray(lambdas, dtype=np.float64)
    return float(np.sum(sigma_n2 * lam / (sigma_n2 + lam * total_dim / M)))


def lmmse_estimate(
    frame: FusionFrame,
    sig: SignalModel,
    noise: NoiseModel,
    measurements,
    erasures: ErasurePattern = NO_ERASURES,
    *,
    method: str = "auto",
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Apply the no-erasure Wiener filter to (possibly erased) measurements.

    ``measurements`` has shape (N, M) or (..., N, M); the estimate has shape
    (M,) or (..., M).  ``method`` selects the route: ``"closed"`` uses
    alpha * sum P_i z_i and needs a tight frame and white signal,
    ``"covariance"`` uses R_ee sigma_n^-2 sum P_i z_i, ``"auto"`` picks the
    closed form whenever it applies.
    """
    N, M = len(frame), frame.ambient_dim
    z = np.asarray(measurements, dtype=np.float64)
    if z.ndim < 2 or z.shape[-2:] != (N, M):
        raise DimensionMismatch(f"measurements must end in shape ({N}, {M}), got {z.shape}")
    keep = erasures.mask(N)
    if not keep.all():
        z = z * keep[:, None]
    # sum_i P_i z_i, using P_i = P_i^T
    pooled = z.reshape(*z.shape[:-2], N * M) @ frame.projections.reshape(N * M, M)

    A = _tight_bound(frame, tol)
    closed_ok = A is not None and sig.is_white
    if method == "auto":
        method = "closed" if closed_ok else "covariance"
    if method == "closed":
        if not closed_ok:
            raise NotTight("closed-form estimator needs a tight frame and a white signal")
        return alpha(A, sig.sigma_x2, noise.sigma_n2) * pooled
    if method == "covariance":
        gain = error_covariance(frame, sig, noise, tol) / noise.sigma_n2
        return pooled @ gain.T
    raise InvalidParams(f"unknown method {method!r}")


def _erasure_preconditions(frame: FusionFrame, sig: SignalModel, tol: Tolerances) -> float:
    if not sig.is_white:
        raise NotWhiteSignal("erasure analysis is limited to white signals")
    A = _tight_bound(frame, tol)
    if A is None:
        b = frame_bounds(frame, tol)
        raise NotTight(f"erasure analysis needs a tight frame (A={b.lower!r}, B={b.upper!r})")
    return A


def extra_mse(
    frame: FusionFrame,
    sig: SignalModel,
    noise: NoiseModel,
    erasures: ErasurePattern,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """alpha^2 tr[sigma_x^2 (sum_S P_i)^2 + sigma_n^2 sum_S P_i] by explicit traces."""
    A = _erasure_preconditions(frame, sig, tol)
    erasures.validate(len(frame))
    if not erasures.erased:
        return 0.0
    a = alpha(A, sig.sigma_x2, noise.sigma_n2)
    E = frame.projections[list(erasures.erased)].sum(axis=0)
    value = a * a * (sig.sigma_x2 * np.trace(E @ E) + noise.sigma_n2 * np.trace(E))
    return float(value)


def erasure_report(
    frame: FusionFrame,
    sig: SignalModel,
    noise: NoiseModel,
    erasures: ErasurePattern = NO_ERASURES,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> MseReport:
    base = mse_no_erasure(frame, sig, noise, tol)
    if not erasures.erased:
        return base
    extra = extra_mse(frame, sig, noise, erasures, tol)
    return dataclasses.replace(
        base, extra_mse=extra, total_mse=base.mse_no_erasure + extra, erased=erasures.erased
    )


def _check_positive(**values: float) -> None:
    for name, v in values.items():
        if not (math.isfinite(v) and v > 0):
            raise InvalidParams(f"{name} must be finite and > 0, got {v!r}")


def one_erasure_extra(M: int, total_dim: float, m_i: int, sigma_x2: float, sigma_n2: float) -> float:
    """Extra MSE from erasing one subspace of dimension m_i in a tight frame."""
    denom = sigma_n2 + sigma_x2 * total_dim / M
    return sigma_x2**2 * (sigma_x2 + sigma_n2) * m_i / denom**2


def two_erasure_extra(
    A: float, m: int, trace_pair: float, sigma_x2: float, sigma_n2: float
) -> float:
    """2 a^2 (sx2 + sn2) m + 2 a^2 sx2 tr[P_i P_j] for two m-dimensional subspaces."""
    a = alpha(A, sigma_x2, sigma_n2)
    return 2 * a * a * (sigma_x2 + sigma_n2) * m + 2 * a * a * sigma_x2 * trace_pair


def k_erasure_formula(
    A: float, m: int, d2: float, k: int, sigma_x2: float, sigma_n2: float, M: int
) -> float:
    """Closed-form extra MSE for k erasures in an equi-distance tight frame.

    Each pair of erased m-planes contributes tr[P_i P_j] = m - d_c^2.
    """
    _check_positive(A=A, sigma_x2=sigma_x2, sigma_n2=sigma_n2)
    if not 1 <= m <= M:
        raise InvalidParams(f"need 1 <= m <= M, got m={m}, M={M}")
    if k < 0:
        raise InvalidParams(f"erasure count must be >= 0, got {k}")
    if not -1e-9 <= d2 <= m + 1e-9:
        raise InvalidParams(f"d_c^2 must lie in [0, m], got {d2!r}")
    a = alpha(A, sigma_x2, sigma_n2)
    return a * a * (sigma_x2 + sigma_n2) * k * m + a * a * sigma_x2 * k * (k - 1) * (m - d2)


def min_dimension(M: int, N: int) -> int:
    return -(-M // N)


def one_erasure_mse(M: int, N: int, m: int, sigma_x2: float, sigma_n2: float) -> float:
    """Total MSE after one erasure for N equi-dimensional m-planes forming a tight frame."""
    if M < 1 or N < 2:
        raise InvalidParams(f"need M >= 1 and N >= 2, got M={M}, N={N}")
    if not min_dimension(M, N) <= m <= M:
        raise InvalidParams(f"m={m} outside [{min_dimension(M, N)}, {M}]")
    if not (math.isfinite(sigma_x2) and sigma_x2 >= 0):
        raise InvalidParams(f"sigma_x^2 must be >= 0, got {sigma_x2!r}")
    _check_positive(sigma_n2=sigma_n2)
    denom = N * m * sigma_x2 / M + sigma_n2
    return M * sigma_x2 * sigma_n2 / denom + sigma_x2**2 * (sigma_x2 + sigma_n2) * m / denom**2


@dataclasses.dataclass(frozen=True)
class OptimalDimension:
    m_star: int
    m_min: int
    m_max: int
    table: dict[int, float]
    endpoint_choice: int

    @property
    def endpoint_agrees(self) -> bool:
        return self.endpoint_choice == self.m_star


def optimal_dimension(
    M: int, N: int, sigma_x2: float, sigma_n2: float, m_max: int
) -> OptimalDimension:
    """Best common subspace dimension against one erasure, by exhaustive scan.

    The endpoint rule (keep whichever of m_min, m_max has the smaller MSE) is
    reported alongside so disagreements are visible.
    """
    _check_positive(sigma_x2=sigma_x2, sigma_n2=sigma_n2)
    if N < 2 or M < 1:
        raise InvalidParams(f"need M >= 1 and N >= 2, got M={M}, N={N}")
    m_min = min_dimension(M, N)
    if not m_min <= m_max <= M:
        raise InvalidParams(f"m_max={m_max} outside [{m_min}, {M}]")
    table = {m: one_erasure_mse(M, N, m, sigma_x2, sigma_n2) for m in range(m_min, m_max + 1)}
    m_star = min(table, key=lambda m: (table[m], m))
    endpoint = m_min if table[m_min] <= table[m_max] else m_max
    return OptimalDimension(m_star, m_min, m_max, table, endpoint)
