import itertools
import math

import numpy as np
import pytest

from ffkit import certify_equidistance_tight, distance_table, frame_bounds, proposition5_bound, simplex_bound
from ffkit.constructions import (
    HADAMARD_4,
    E6_NORM_SCALE,
    e6_minimal_vectors,
    e6_selected_vectors,
    e8_frame,
    e8_minimal_vectors,
    e8_omega,
    e8_orbits,
    eisenstein_e6_frame,
    hadamard_matrix,
    is_prime,
    legendre,
    paley_hadamard,
    partition_frame,
    qr_default_scale,
    qr_valid_prime,
    quadratic_residue_frame,
    quadratic_residues,
    random_frame,
    realify,
    smallest_nonresidue,
    summary_line,
    sylvester_hadamard,
)
from ffkit.errors import ConstructionFailed, InvalidParams
from ffkit.frameio import dumps_frame
from ffkit.frames import principal_angles


def test_number_theory():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert quadratic_residues(7) == [1, 2, 4]
    assert smallest_nonresidue(7) == 3
    assert legendre(3, 7) == -1 and legendre(2, 7) == 1
    assert [p for p in range(2, 60) if qr_valid_prime(p)] == [3, 7, 23, 31, 47]


@pytest.mark.parametrize("n", [1, 2, 4, 8, 12, 16, 20, 24])
def test_hadamard_orders(n):
    H = hadamard_matrix(n)
    assert (H @ H.T == n * np.eye(n)).all()
    assert (H[0] == 1).all()


def test_hadamard_sources():
    np.testing.assert_array_equal(hadamard_matrix(4), HADAMARD_4)
    assert (sylvester_hadamard(8) @ sylvester_hadamard(8).T == 8 * np.eye(8)).all()
    assert (paley_hadamard(12) @ paley_hadamard(12).T == 12 * np.eye(12)).all()
    with pytest.raises(InvalidParams):
        hadamard_matrix(6)


def test_default_scale_p7_is_sqrt2():
    assert qr_default_scale(7) == pytest.approx(math.sqrt(2), abs=1e-15)


@pytest.mark.parametrize("p", [3, 7, 23])
def test_quadratic_residue_parameters(p):
    fr = quadratic_residue_frame(p)
    m = (p - 1) // 2
    assert len(fr) == p * (p + 1) // 2
    assert set(fr.dims) == {m} and fr.ambient_dim == p
    A = (p * p - 1) / 4
    b = frame_bounds(fr)
    assert abs(b.lower - A) <= 1e-9 * A and abs(b.upper - A) <= 1e-9 * A
    off = distance_table(fr).off_diagonal()
    target = (p + 1) ** 2 / (4 * (p + 2))
    assert np.abs(off - target).max() <= 1e-9
    assert certify_equidistance_tight(fr).positive


def test_qr3_values(qr3):
    assert len(qr3) == 6 and qr3.ambient_dim == 3
    assert distance_table(qr3).off_diagonal() == pytest.approx(0.8, abs=1e-12)


@pytest.mark.parametrize("p", [2, 5, 9, 11, 13, 19])
def test_quadratic_residue_rejects(p):
    with pytest.raises(InvalidParams):
        quadratic_residue_frame(p)


def test_quadratic_residue_bad_scale_fails_loudly():
    with pytest.raises(ConstructionFailed) as info:
        quadratic_residue_frame(7, C=1.0)
    assert "gap" in info.value.diagnostics
    with pytest.raises(InvalidParams):
        quadratic_residue_frame(7, C=-1.0)


def test_qr7_metadata(qr7):
    assert qr7.metadata["p"] == "7" and qr7.metadata["k"] == "3"
    assert float(qr7.metadata["C"]) == pytest.approx(math.sqrt(2))


def test_realify_worked_image():
    from ffkit.constructions import OMEGA

    np.testing.assert_allclose(realify([OMEGA, -1, 0]), [-0.5, math.sqrt(3) / 2, -1, 0, 0, 0])


def test_e6_selected_are_minimal():
    sel = e6_selected_vectors()
    assert len(sel) == 9
    minimal = e6_minimal_vectors()
    assert len(minimal) == 54
    for v in sel:
        assert np.vdot(v, v).real == pytest.approx(2.0)
    # the 54 minimal vectors are exactly the selected ones times the six units
    units = [complex(math.cos(k * math.pi / 3), math.sin(k * math.pi / 3)) for k in range(6)]
    generated = {tuple(np.round(realify(u * v), 9)) for v in sel for u in units}
    found = {tuple(np.round(realify(v), 9)) for v in minimal}
    assert generated == found
    assert E6_NORM_SCALE * 2 == pytest.approx(4 / 3)


def test_e6_frame(e6):
    assert (len(e6), e6.ambient_dim, set(e6.dims)) == (9, 6, {2})
    assert frame_bounds(e6).lower == pytest.approx(3.0, abs=1e-9)
    t = distance_table(e6, with_angles=True)
    assert np.abs(t.off_diagonal() - 1.5).max() <= 1e-9
    for th in t.angles.values():
        np.testing.assert_allclose(th, [math.pi / 3] * 2, atol=1e-8)
    assert t.off_diagonal().mean() == pytest.approx(simplex_bound(2, 6, 9), abs=1e-10)


def test_e8_enumeration():
    vecs = e8_minimal_vectors()
    assert len(vecs) == 240 and len(set(vecs)) == 240
    integer = [v for v in vecs if all(c % 2 == 0 for c in v)]
    assert len(integer) == 112
    for v in vecs:  # doubled coordinates
        assert sum(c * c for c in v) == 8
        assert (sum(v) // 2) % 2 == 0
    W = e8_omega()
    np.testing.assert_allclose(W @ W + W + np.eye(8), 0.0, atol=1e-14)


def test_e8_orbits_partition():
    orbits = e8_orbits()
    assert len(orbits) == 40
    covered = [v for o in orbits for v in o]
    assert len(covered) == 240 and set(covered) == set(e8_minimal_vectors())
    for o in orbits:
        assert np.linalg.matrix_rank(np.array(o, dtype=float)) == 2


def test_e8_frame(e8):
    assert (len(e8), e8.ambient_dim, set(e8.dims)) == (40, 8, {2})
    assert frame_bounds(e8).lower == pytest.approx(10.0, abs=1e-9)
    off = distance_table(e8).off_diagonal()
    near = np.minimum(np.abs(off - 2.0), np.abs(off - 4 / 3))
    assert near.max() <= 1e-9
    assert certify_equidistance_tight(e8).verdict == "NEGATIVE"
    ident = proposition5_bound(e8)
    np.testing.assert_allclose(ident.from_distances, 10.0, atol=1e-9)
    assert ident.from_dimensions == 10.0


def test_partition_frame():
    assert len(partition_frame(4, 2)) == 2
    fr = partition_frame(6, 2, copies=3, rotate=True, seed=1)
    assert len(fr) == 9 and frame_bounds(fr).lower == pytest.approx(3.0, abs=1e-12)
    assert not certify_equidistance_tight(fr).equidistant
    for args in [(4, 3), (4, 0), (4, 2, 0)]:
        with pytest.raises(InvalidParams):
            partition_frame(*args)


def test_random_frame_determinism_and_generic_frames():
    assert dumps_frame(random_frame(5, [1, 2], 3)) == dumps_frame(random_frame(5, [1, 2], 3))
    for seed in range(100):
        assert frame_bounds(random_frame(4, [1, 2, 1], seed)).is_frame
    with pytest.raises(InvalidParams):
        random_frame(3, [4], 0)


def test_constructions_deterministic():
    assert dumps_frame(quadratic_residue_frame(7)) == dumps_frame(quadratic_residue_frame(7))
    assert dumps_frame(eisenstein_e6_frame()) == dumps_frame(eisenstein_e6_frame())
    assert dumps_frame(e8_frame()) == dumps_frame(e8_frame())


def test_summary_line(qr7):
    assert summary_line(qr7) == "N=28 m=3 A=B=12.000000000"
    assert "(not tight)" in summary_line(random_frame(3, [1, 2], 0))


def test_principal_angles_pi_over_3_between_e6_planes(e6):
    for i, j in itertools.combinations(range(3), 2):
        np.testing.assert_allclose(principal_angles(e6[i], e6[j]), [math.pi / 3] * 2, atol=1e-8)
