"""Explicit fusion frames: quadratic-residue planes, E6* and E8 lattice planes,
plus partition and random frames used as baselines."""

from __future__ import annotations

import itertools
import json
import math

import numpy as np

from .errors import ConstructionFailed, InvalidParams, RankDeficient
from .frames import (
    FusionFrame,
    Subspace,
    certify_equidistance_tight,
    distance_table,
    frame_bounds,
    subspace_from_vectors,
)
from .matcore import DEFAULT_TOLERANCES, Tolerances, orthonormalize

# ---------------------------------------------------------------------------
# quadratic residues


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def quadratic_residues(p: int) -> list[int]:
    return sorted({(i * i) % p for i in range(1, p)})


def smallest_nonresidue(p: int) -> int:
    return next(r for r in range(2, p) if legendre(r, p) == -1)


# 4x4 Hadamard matrix printed with the p = 7 example
HADAMARD_4 = np.array(
    [
        [1, 1, 1, 1],
        [-1, 1, -1, 1],
        [-1, -1, 1, 1],
        [1, -1, -1, 1],
    ]
)


def sylvester_hadamard(n: int) -> np.ndarray:
    H = np.ones((1, 1), dtype=int)
    while H.shape[0] < n:
        H = np.block([[H, H], [-H, H]])
    if H.shape[0] != n:
        raise InvalidParams(f"{n} is not a power of two")
    return H


def paley_hadamard(n: int) -> np.ndarray:
    """Paley construction of order n = q + 1 with q prime, q = 3 (mod 4).

    The first row is all ones.
    """
    q = n - 1
    if not (is_prime(q) and q % 4 == 3):
        raise InvalidParams(f"Paley construction needs n - 1 prime and 3 mod 4, got n={n}")
    S = np.zeros((n, n), dtype=int)
    S[0, 1:] = 1
    S[1:, 0] = -1
    for i in range(q):
        for j in range(q):
            S[i + 1, j + 1] = legendre(j - i, q)
    return S + np.eye(n, dtype=int)


def hadamard_matrix(n: int) -> np.ndarray:
    """A Hadamard matrix of order n whose first row is all ones."""
    if n == 4:
        H = HADAMARD_4
    elif n & (n - 1) == 0:
        H = sylvester_hadamard(n)
    else:
        try:
            H = paley_hadamard(n)
        except InvalidParams:
            raise InvalidParams(f"no Hadamard matrix of order {n} available") from None
    assert (H @ H.T == n * np.eye(n, dtype=int)).all()
    return H


def qr_valid_prime(p: int) -> bool:
    return is_prime(p) and (p == 3 or p % 8 == 7)


def qr_target_distance(p: int) -> float:
    return (p + 1) ** 2 / (4 * (p + 2))


def qr_default_scale(p: int, H: np.ndarray | None = None) -> float:
    """Scaling constant that puts two unshifted base planes at the target distance.

    Two base planes built from columns j, j' of H share their coordinate
    support, so tr[P P'] = (a (1 + t)^2 + b (1 - t)^2) / (1 + t)^2 with t = C^2,
    where a and b count agreeing and disagreeing signs in the rows used.
    Setting m - tr[P P'] to the target distance is a quadratic in t; the larger
    root is returned (sqrt(2) for p = 7).
    """
    H = hadamard_matrix((p + 1) // 2) if H is None else np.asarray(H)
    rows = H[1:]
    m = (p - 1) // 2
    agree = int(np.sum(rows[:, 0] == rows[:, 1]))
    disagree = m - agree
    excess = m - qr_target_distance(p) - agree
    if disagree == 0 or excess < 0:
        raise InvalidParams(f"no real scaling constant for p={p} with this Hadamard matrix")
    u = math.sqrt(excess / disagree)
    if u >= 1:
        raise InvalidParams(f"no positive scaling constant for p={p}")
    return math.sqrt((1 + u) / (1 - u))


def _gate(frame: FusionFrame, what: str, tol: Tolerances, **expected: float):
    """Certify ``frame`` and compare against expected parameters, raising on any miss."""
    table = distance_table(frame, tol=tol)
    cert = certify_equidistance_tight(frame, table, tol)
    diag = {
        "tight": cert.tight,
        "equi_dimensional": cert.equi_dimensional,
        "equidistant": cert.equidistant,
        "A": cert.lower,
        "B": cert.upper,
        "distance_spread": cert.spread,
        "gap": cert.gap,
    }
    if "bound" in expected:
        ok = abs(cert.lower - expected["bound"]) <= 1e-8 * max(1.0, expected["bound"])
        ok = ok and abs(cert.upper - expected["bound"]) <= 1e-8 * max(1.0, expected["bound"])
        if not ok:
            raise ConstructionFailed(f"{what}: frame bound is not {expected['bound']!r}", diag)
    if expected.get("require_positive", False) and not cert.positive:
        raise ConstructionFailed(f"{what}: not an equi-distance tight fusion frame", diag)
    return cert, table


def quadratic_residue_frame(
    p: int = 7,
    C: float | None = None,
    k: int | None = None,
    hadamard: np.ndarray | None = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> FusionFrame:
    """p(p+1)/2 planes of dimension (p-1)/2 in R^p from quadratic residues mod p.

    Base plane L_j is spanned by e_q + C H[i, j] e_{k q mod p} for the nonzero
    residues q (paired with rows 2.. of H, the all-ones first row being
    skipped); every base plane is then cycled through the p coordinate shifts.
    The result must pass certification or ConstructionFailed is raised.
    """
    if not isinstance(p, (int, np.integer)) or not qr_valid_prime(int(p)):
        raise InvalidParams(f"p must be a prime equal to 3 or 7 mod 8, got {p!r}")
    p = int(p)
    n = (p + 1) // 2
    H = hadamard_matrix(n) if hadamard is None else np.asarray(hadamard)
    if H.shape != (n, n) or not (H @ H.T == n * np.eye(n)).all():
        raise InvalidParams(f"hadamard must be a {n}x{n} Hadamard matrix")
    if k is None:
        k = smallest_nonresidue(p)
    if k % p == 0:
        raise InvalidParams("k must be nonzero mod p")
    if C is None:
        C = qr_default_scale(p, H)
    if not (math.isfinite(C) and C > 0):
        raise InvalidParams(f"C must be positive, got {C!r}")

    residues = quadratic_residues(p)
    subspaces = []
    for j in range(n):
        vectors = []
        for i, q in enumerate(residues):
            v = np.zeros(p)
            v[q] += 1.0
            v[(k * q) % p] += C * H[i + 1, j]
            vectors.append(v)
        base = np.array(vectors)
        for shift in range(p):
            try:
                subspaces.append(subspace_from_vectors(np.roll(base, shift, axis=1), tol=tol))
            except RankDeficient as exc:
                raise ConstructionFailed(f"plane {j} shift {shift} is degenerate: {exc}") from exc

    frame = FusionFrame(
        tuple(subspaces),
        {
            "construction": "quadratic_residue",
            "p": str(p),
            "C": repr(float(C)),
            "k": str(k),
            "residues": ",".join(map(str, residues)),
        },
    )
    _gate(frame, f"quadratic residue frame p={p}", tol,
          bound=(p * p - 1) / 4, require_positive=True)
    return frame


# ---------------------------------------------------------------------------
# Eisenstein lattice E6*

OMEGA = complex(-0.5, math.sqrt(3) / 2)

E6_GENERATOR = np.array(
    [
        [complex(0, math.sqrt(3)), 0, 0],
        [1, -1, 0],
        [1, 0, -1],
    ],
    dtype=complex,
)

# the nine minimal vectors used for the planes, as (a, b) pairs meaning a + b*omega
E6_SELECTED = (
    ((1, 0), (-1, 0), (0, 0)),
    ((1, 0), (0, 0), (-1, 0)),
    ((0, 0), (1, 0), (-1, 0)),
    ((0, 1), (-1, 0), (0, 0)),
    ((0, 0), (0, 1), (-1, 0)),
    ((-1, 0), (0, 0), (0, 1)),
    ((0, 1), (0, 0), (-1, 0)),
    ((-1, 0), (0, 1), (0, 0)),
    ((0, 0), (-1, 0), (0, 1)),
)

# In the coordinates of E6_GENERATOR the minimal squared norm is 2; scaling
# squared norms by 2/3 gives the usual normalization (minimum 4/3, determinant 1/3).
E6_NORM_SCALE = 2.0 / 3.0

SIXTH_ROOTS = tuple(complex(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6))


def eisenstein(a: int, b: int) -> complex:
    return a + b * OMEGA


def realify(v) -> np.ndarray:
    """C^n -> R^2n, interleaving (Re z_1, Im z_1, Re z_2, Im z_2, ...)."""
    v = np.asarray(v, dtype=complex)
    return np.column_stack([v.real, v.imag]).ravel()


def e6_selected_vectors() -> list[np.ndarray]:
    return [np.array([eisenstein(a, b) for a, b in v]) for v in E6_SELECTED]


def e6_minimal_vectors(radius: int = 2) -> np.ndarray:
    """Brute-force the shortest nonzero vectors of the realified E6* lattice.

    Integer coefficient vectors in [-radius, radius]^6 over the real basis
    {rho(g), rho(omega g)} are searched; returns the shortest ones as rows of
    complex 3-vectors.
    """
    basis = np.array([realify(g) for g in E6_GENERATOR] + [realify(OMEGA * g) for g in E6_GENERATOR])
    coeffs = np.array(list(itertools.product(range(-radius, radius + 1), repeat=6)))
    points = coeffs @ basis
    norms = np.einsum("ij,ij->i", points, points)
    nonzero = norms > 1e-9
    best = norms[nonzero].min()
    found = points[nonzero & (np.abs(norms - best) <= 1e-9)]
    return found[:, 0::2] + 1j * found[:, 1::2]


def eisenstein_e6_frame(tol: Tolerances = DEFAULT_TOLERANCES) -> FusionFrame:
    """Nine 2-planes in R^6 from minimal vectors of E6* (complex lines, realified)."""
    subspaces = []
    for v in e6_selected_vectors():
        subspaces.append(subspace_from_vectors([realify(v), realify(1j * v)], tol=tol))
    frame = FusionFrame(
        tuple(subspaces),
        {
            "construction": "eisenstein_e6",
            "lattice": "E6*",
            "realification": "interleaved (Re, Im)",
            "selected": json.dumps(E6_SELECTED),
        },
    )
    _gate(frame, "E6* frame", tol, bound=3.0, require_positive=True)
    return frame


# ---------------------------------------------------------------------------
# E8

# 2 * H, where H holds the quaternion coefficients of omega, i*omega, j*omega, k*omega
E8_H_DOUBLED = np.array(
    [
        [-1, 1, 1, 1],
        [-1, -1, -1, 1],
        [-1, 1, -1, -1],
        [-1, -1, 1, -1],
    ]
)
E8_OMEGA_DOUBLED = np.kron(np.eye(2, dtype=int), E8_H_DOUBLED)


def e8_omega() -> np.ndarray:
    return E8_OMEGA_DOUBLED / 2.0


def e8_minimal_vectors() -> list[tuple[int, ...]]:
    """All 240 norm-2 vectors of E8, as doubled integer coordinates, sorted."""
    out = []
    for i, j in itertools.combinations(range(8), 2):
        for si, sj in itertools.product((-2, 2), repeat=2):
            v = [0] * 8
            v[i], v[j] = si, sj
            out.append(tuple(v))
    for signs in itertools.product((-1, 1), repeat=8):
        # coordinate sum must be even: an even number of -1/2 entries
        if signs.count(-1) % 2 == 0:
            out.append(signs)
    return sorted(out)


def _omega_doubled(v: tuple[int, ...]) -> tuple[int, ...]:
    w = E8_OMEGA_DOUBLED @ np.array(v)
    if np.any(w % 2):
        raise ArithmeticError(f"Omega does not preserve the lattice at {v}")
    return tuple(int(x) for x in w // 2)


def e8_unit_orbit(v: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """{+-v, +-Omega v, +-(v + Omega v)} in doubled coordinates."""
    w = _omega_doubled(v)
    s = tuple(a + b for a, b in zip(v, w))
    neg = lambda u: tuple(-x for x in u)  # noqa: E731
    return (v, neg(v), w, neg(w), s, neg(s))


def e8_orbits() -> list[tuple[tuple[int, ...], ...]]:
    """Partition the 240 minimal vectors into unit orbits, in order of first member."""
    vectors = e8_minimal_vectors()
    minimal = set(vectors)
    assigned: set[tuple[int, ...]] = set()
    orbits = []
    for v in vectors:
        if v in assigned:
            continue
        orbit = e8_unit_orbit(v)
        if len(set(orbit)) != 6 or not minimal.issuperset(orbit):
            raise ConstructionFailed(f"orbit of {v} is not six distinct minimal vectors")
        if assigned.intersection(orbit):
            raise ConstructionFailed(f"orbit of {v} overlaps an earlier orbit")
        assigned.update(orbit)
        orbits.append(orbit)
    return orbits


def _e8_orbit_kind(orbit) -> str:
    support = np.any(np.array(orbit) != 0, axis=0)
    if not support[4:].any():
        return "first_half"
    if not support[:4].any():
        return "second_half"
    return "cross"


def e8_frame(tol: Tolerances = DEFAULT_TOLERANCES) -> FusionFrame:
    """Forty 2-planes in R^8, one per unit orbit of E8 minimal vectors."""
    vectors = e8_minimal_vectors()
    if len(vectors) != 240:
        raise ConstructionFailed(f"expected 240 minimal vectors, found {len(vectors)}")
    orbits = e8_orbits()
    if len(orbits) != 40:
        raise ConstructionFailed(f"expected 40 orbits, found {len(orbits)}")
    subspaces = []
    for orbit in orbits:
        sub = subspace_from_vectors(np.array(orbit) / 2.0, strict=False, tol=tol)
        if sub.dim != 2:
            raise ConstructionFailed(f"orbit of {orbit[0]} spans rank {sub.dim}")
        subspaces.append(sub)
    kinds = [_e8_orbit_kind(o) for o in orbits]
    frame = FusionFrame(
        tuple(subspaces),
        {
            "construction": "e8",
            "lattice": "E8",
            "minimal_vectors": "240",
            "units": "I,-I,Omega,-Omega,I+Omega,-I-Omega",
            "orbit_seeds_doubled": json.dumps([list(o[0]) for o in orbits]),
            "orbit_kinds": ",".join(kinds),
        },
    )
    _gate(frame, "E8 frame", tol, bound=10.0)
    return frame


# ---------------------------------------------------------------------------
# baselines


def random_orthogonal(M: int, rng: np.random.Generator) -> np.ndarray:
    return orthonormalize(rng.standard_normal((M, M)))


def partition_frame(
    M: int, m: int, copies: int = 1, *, rotate: bool = False, seed: int | None = None
) -> FusionFrame:
    """Blocks of m consecutive standard basis vectors, repeated ``copies`` times.

    With ``rotate`` each copy is turned by its own seeded random orthogonal
    matrix; the result is tight with bound ``copies`` either way.
    """
    if M < 1 or m < 1 or m > M or M % m:
        raise InvalidParams(f"m must divide M, got M={M}, m={m}")
    if copies < 1:
        raise InvalidParams(f"copies must be >= 1, got {copies}")
    rng = np.random.default_rng(seed)
    eye = np.eye(M)
    subspaces = []
    for _ in range(copies):
        Q = random_orthogonal(M, rng) if rotate else eye
        for b in range(M // m):
            subspaces.append(Subspace(orthonormalize(eye[b * m : (b + 1) * m] @ Q.T)))
    meta = {"construction": "partition", "M": str(M), "m": str(m), "copies": str(copies),
            "rotate": str(rotate).lower()}
    if rotate:
        meta["seed"] = str(seed)
    return FusionFrame(tuple(subspaces), meta)


def random_frame(M: int, dims, seed: int) -> FusionFrame:
    """Subspaces spanned by orthonormalized Gaussian rows; deterministic in ``seed``."""
    dims = [int(d) for d in dims]
    if not dims or any(not 1 <= d <= M for d in dims):
        raise InvalidParams(f"each dimension must be in [1, {M}], got {dims}")
    rng = np.random.default_rng(seed)
    subspaces = [Subspace(orthonormalize(rng.standard_normal((d, M)))) for d in dims]
    return FusionFrame(
        tuple(subspaces),
        {"construction": "random", "M": str(M), "dims": ",".join(map(str, dims)), "seed": str(seed)},
    )


def summary_line(frame: FusionFrame, tol: Tolerances = DEFAULT_TOLERANCES) -> str:
    b = frame_bounds(frame, tol)
    dims = sorted(set(frame.dims))
    m = ",".join(map(str, dims)) if len(dims) > 1 else str(dims[0])
    if b.tight:
        return f"N={len(frame)} m={m} A=B={np.mean(frame.spectrum):.9f}"
    return f"N={len(frame)} m={m} A={b.lower:.9f} B={b.upper:.9f} (not tight)"
