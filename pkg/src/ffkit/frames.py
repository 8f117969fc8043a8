"""Fusion frames: subspaces, frame operator, chordal geometry and packing certificates."""

from __future__ import annotations

import dataclasses
import itertools
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionMismatch, InvalidParams, NotEquiDimensional, NotTight, RankDeficient
from .matcore import DEFAULT_TOLERANCES, Tolerances, as_matrix, orthonormalize, sym_eig, thin_svd


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclasses.dataclass(frozen=True, eq=False)
class Subspace:
    """An m-dimensional subspace of R^M held as m orthonormal rows."""

    basis: np.ndarray

    def __post_init__(self):
        basis = as_matrix(self.basis, "basis")
        m, M = basis.shape
        if not 1 <= m <= M:
            raise InvalidParams(f"basis must have 1 <= m <= M rows, got {basis.shape}")
        err = float(np.linalg.norm(basis @ basis.T - np.eye(m)))
        if err > DEFAULT_TOLERANCES.subspace_orthonormal:
            raise RankDeficient(f"basis rows are not orthonormal (residual {err:.2e})")
        object.__setattr__(self, "basis", _frozen(basis))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def projection(self) -> np.ndarray:
        return _frozen(self.basis.T @ self.basis)

    @classmethod
    def from_vectors(cls, vectors, *, strict: bool = True, tol: Tolerances = DEFAULT_TOLERANCES):
        return subspace_from_vectors(vectors, strict=strict, tol=tol)


def subspace_from_vectors(
    vectors, *, strict: bool = True, tol: Tolerances = DEFAULT_TOLERANCES
) -> Subspace:
    """Span of a list of vectors.

    In strict mode a dependent vector raises :class:`RankDeficient`; otherwise
    dependent vectors are dropped and the span of the rest is returned.
    """
    V = np.array(vectors, dtype=np.float64)
    if V.ndim != 2 or V.shape[0] == 0:
        raise InvalidParams("need a nonempty list of equal-length vectors")
    return Subspace(orthonormalize(V, drop_dependent=not strict, tol=tol))


@dataclasses.dataclass(frozen=True, eq=False)
class FusionFrame:
    """An ordered, immutable collection of subspaces of a common R^M."""

    subspaces: tuple[Subspace, ...]
    metadata: Mapping[str, str] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        subs = tuple(self.subspaces)
        if not subs:
            raise InvalidParams("a fusion frame needs at least one subspace")
        M = subs[0].ambient_dim
        for i, s in enumerate(subs):
            if s.ambient_dim != M:
                raise DimensionMismatch(f"subspace {i} lives in R^{s.ambient_dim}, expected R^{M}")
        object.__setattr__(self, "subspaces", subs)
        object.__setattr__(self, "metadata", {str(k): str(v) for k, v in dict(self.metadata).items()})
        S = np.zeros((M, M))
        for s in subs:
            S += s.projection
        object.__setattr__(self, "_operator", _frozen(0.5 * (S + S.T)))
        object.__setattr__(self, "spectrum", _frozen(sym_eig(self._operator).eigenvalues))

    @classmethod
    def from_bases(cls, bases: Iterable, metadata: Mapping[str, str] | None = None) -> "FusionFrame":
        return cls(tuple(Subspace(b) for b in bases), metadata or {})

    @property
    def ambient_dim(self) -> int:
        return self.subspaces[0].ambient_dim

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.subspaces]

    def __len__(self) -> int:
        return len(self.subspaces)

    def __iter__(self):
        return iter(self.subspaces)

    def __getitem__(self, i) -> Subspace:
        return self.subspaces[i]

    @cached_property
    def projections(self) -> np.ndarray:
        """Stacked projection matrices, shape (N, M, M)."""
        return _frozen(np.stack([s.projection for s in self.subspaces]))

    def with_metadata(self, **extra: str) -> "FusionFrame":
        meta = dict(self.metadata)
        meta.update({k: str(v) for k, v in extra.items()})
        return FusionFrame(self.subspaces, meta)


@dataclasses.dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    tight: bool
    is_frame: bool


@dataclasses.dataclass(frozen=True)
class DistanceTable:
    """Pairwise squared chordal distances; ``angles`` is filled only on request."""

    d2: np.ndarray
    angles: dict[tuple[int, int], np.ndarray] | None = None

    def off_diagonal(self) -> np.ndarray:
        iu = np.triu_indices(self.d2.shape[0], k=1)
        return self.d2[iu]

    def histogram(self, decimals: int = 9) -> dict[float, int]:
        vals, counts = np.unique(np.round(self.off_diagonal(), decimals), return_counts=True)
        return {float(v): int(c) for v, c in zip(vals, counts)}


def frame_operator(frame: FusionFrame) -> np.ndarray:
    """S = sum_i P_i."""
    return frame._operator


def frame_bounds(frame: FusionFrame, tol: Tolerances = DEFAULT_TOLERANCES) -> FrameBounds:
    lower = float(frame.spectrum[0])
    upper = float(frame.spectrum[-1])
    return FrameBounds(
        lower=lower,
        upper=upper,
        tight=(upper - lower) <= tol.tight * max(1.0, upper),
        is_frame=lower > tol.frame,
    )


def _check_same_ambient(U: Subspace, V: Subspace) -> None:
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatch(f"R^{U.ambient_dim} vs R^{V.ambient_dim}")


def principal_angles(U: Subspace, V: Subspace, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Principal angles in ascending order, one per dimension of the smaller subspace."""
    _check_same_ambient(U, V)
    cosines = np.clip(thin_svd(U.basis @ V.basis.T, tol), 0.0, 1.0)
    return np.arccos(cosines)


def _trace_route(U: Subspace, V: Subspace) -> float:
    G = U.basis @ V.basis.T
    return float(min(U.dim, V.dim) - np.sum(G * G))


def chordal_distance_sq(U: Subspace, V: Subspace, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Squared chordal distance, min(m_U, m_V) - tr(P_U P_V).

    The value is also evaluated as the sum of sin^2 over the principal angles
    and the two routes are required to agree to 1e-10.
    """
    _check_same_ambient(U, V)
    by_trace = _trace_route(U, V)
    by_angles = float(np.sum(np.sin(principal_angles(U, V, tol)) ** 2))
    if abs(by_trace - by_angles) > 1e-10:
        raise ArithmeticError(
            f"chordal distance routes disagree: trace {by_trace!r} vs angles {by_angles!r}"
        )
    return max(by_trace, 0.0)


def same_subspace(U: Subspace, V: Subspace, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    return U.dim == V.dim and _trace_route(U, V) <= tol.identical


def distance_table(
    frame: FusionFrame, *, with_angles: bool = False, tol: Tolerances = DEFAULT_TOLERANCES
) -> DistanceTable:
    """All pairwise d_c^2 via the trace route (each entry computed on its own)."""
    N = len(frame)
    d2 = np.zeros((N, N))
    angles = {} if with_angles else None
    for i, j in itertools.combinations(range(N), 2):
        U, V = frame[i], frame[j]
        d = chordal_distance_sq(U, V, tol) if with_angles else max(_trace_route(U, V), 0.0)
        d2[i, j] = d2[j, i] = d
        if with_angles:
            angles[(i, j)] = principal_angles(U, V, tol)
    d2.setflags(write=False)
    return DistanceTable(d2=d2, angles=angles)


def simplex_bound(m: int, M: int, N: int) -> float:
    """Largest possible common squared chordal distance of N m-planes in R^M."""
    if not (isinstance(m, (int, np.integer)) and isinstance(M, (int, np.integer))):
        raise InvalidParams("m and M must be integers")
    if not 1 <= m <= M or N < 2:
        raise InvalidParams(f"need 1 <= m <= M and N >= 2, got m={m}, M={M}, N={N}")
    return m * (M - m) / M * N / (N - 1)


def _common_dim(frame: FusionFrame) -> int | None:
    dims = set(frame.dims)
    return dims.pop() if len(dims) == 1 else None


@dataclasses.dataclass(frozen=True)
class BoundIdentity:
    """The frame bound of a tight equi-dimensional frame, three ways."""

    spectral: float  # mean eigenvalue of the frame operator
    from_dimensions: float  # N m / M
    from_distances: np.ndarray  # N - sum_{i != j} d_c^2(i, j) / m, one per j

    @property
    def max_deviation(self) -> float:
        devs = np.abs(np.append(self.from_distances, self.from_dimensions) - self.spectral)
        return float(devs.max())


def proposition5_bound(
    frame: FusionFrame, table: DistanceTable | None = None, tol: Tolerances = DEFAULT_TOLERANCES
) -> BoundIdentity:
    bounds = frame_bounds(frame, tol)
    if not bounds.tight:
        raise NotTight(f"frame bounds differ: A={bounds.lower!r}, B={bounds.upper!r}")
    m = _common_dim(frame)
    if m is None:
        raise NotEquiDimensional(f"subspace dimensions {sorted(set(frame.dims))}")
    table = table or distance_table(frame, tol=tol)
    N, M = len(frame), frame.ambient_dim
    return BoundIdentity(
        spectral=float(np.mean(frame.spectrum)),
        from_dimensions=N * m / M,
        from_distances=N - table.d2.sum(axis=0) / m,
    )


@dataclasses.dataclass(frozen=True)
class PackingCertificate:
    equi_dimensional: bool
    equidistant: bool
    tight: bool
    lower: float
    upper: float
    distance_sq: float | None  # mean off-diagonal d_c^2
    spread: float  # max - min off-diagonal d_c^2
    simplex_bound: float | None
    gap: float | None  # distance_sq - simplex_bound
    tolerance: float

    @property
    def positive(self) -> bool:
        """True iff the frame is an equi-distance tight fusion frame at the simplex bound,
        hence an optimal Grassmannian packing."""
        return (
            self.equi_dimensional
            and self.equidistant
            and self.tight
            and self.gap is not None
            and abs(self.gap) <= self.tolerance
        )

    @property
    def verdict(self) -> str:
        return "POSITIVE" if self.positive else "NEGATIVE"


def certify_equidistance_tight(
    frame: FusionFrame, table: DistanceTable | None = None, tol: Tolerances = DEFAULT_TOLERANCES
) -> PackingCertificate:
    bounds = frame_bounds(frame, tol)
    m = _common_dim(frame)
    N, M = len(frame), frame.ambient_dim
    if N < 2:
        return PackingCertificate(
            m is not None, True, bounds.tight, bounds.lower, bounds.upper,
            None, 0.0, None, None, tol.equidistance,
        )
    table = table or distance_table(frame, tol=tol)
    off = table.off_diagonal()
    spread = float(off.max() - off.min())
    mean = float(off.mean())
    bound = simplex_bound(m, M, N) if m is not None else None
    return PackingCertificate(
        equi_dimensional=m is not None,
        equidistant=spread <= tol.equidistance,
        tight=bounds.tight,
        lower=bounds.lower,
        upper=bounds.upper,
        distance_sq=mean,
        spread=spread,
        simplex_bound=bound,
        gap=None if bound is None else mean - bound,
        tolerance=tol.equidistance,
    )


def embed_on_sphere(U: Subspace) -> np.ndarray:
    """Traceless projection P - (m/M) I flattened to M(M+1)/2 coordinates.

    Off-diagonal entries carry a factor sqrt(2), so Euclidean distances between
    embeddings equal Frobenius distances between projections.
    """
    M, m = U.ambient_dim, U.dim
    Q = U.projection - (m / M) * np.eye(M)
    rows, cols = np.triu_indices(M)
    weights = np.where(rows == cols, 1.0, np.sqrt(2.0))
    return Q[rows, cols] * weights


def quadratic_form_range(frame: FusionFrame, xs: np.ndarray) -> np.ndarray:
    """sum_i ||P_i x||^2 for each row x of ``xs``."""
    xs = np.atleast_2d(xs)
    return np.einsum("ki,ij,kj->k", xs, frame_operator(frame), xs)

