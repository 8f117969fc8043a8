import numpy as np
import pytest

from ffkit import FusionFrame
from ffkit.constructions import (
    e8_frame,
    eisenstein_e6_frame,
    partition_frame,
    quadratic_residue_frame,
    random_frame,
    random_orthogonal,
)

from oracles import regular_simplex_lines

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def qr7():
    return quadratic_residue_frame(7)


@pytest.fixture(scope="session")
def qr3():
    return quadratic_residue_frame(3)


@pytest.fixture(scope="session")
def e6():
    return eisenstein_e6_frame()


@pytest.fixture(scope="session")
def e8():
    return e8_frame()


def rotated(frame: FusionFrame, seed: int) -> FusionFrame:
    Q = random_orthogonal(frame.ambient_dim, np.random.default_rng(seed))
    return FusionFrame.from_bases([U.basis @ Q.T for U in frame], frame.metadata)


def _lines(rows) -> FusionFrame:
    return FusionFrame.from_bases([np.asarray(r, dtype=float)[None, :] for r in rows])


def certified_fixtures() -> dict[str, FusionFrame]:
    """Equi-distance tight frames meeting the simplex bound."""
    base = {
        "qr3": quadratic_residue_frame(3),
        "qr7": quadratic_residue_frame(7),
        "e6": eisenstein_e6_frame(),
        "basis_lines_R5": _lines(np.eye(5)),
        "simplex_lines_R3": _lines(regular_simplex_lines(3)),
        "simplex_lines_R6": _lines(regular_simplex_lines(6)),
        "orthogonal_planes_R6": partition_frame(6, 2),
    }
    out = dict(base)
    for name, fr in base.items():
        out[name + "_rotated"] = rotated(fr, seed=len(name))
    return out


def non_certified_fixtures() -> dict[str, FusionFrame]:
    return {
        "e8": e8_frame(),
        "two_rotated_partitions": partition_frame(6, 2, copies=2, rotate=True, seed=4),
        "random_lines": random_frame(4, [1] * 6, seed=11),
        "random_planes": random_frame(5, [2] * 5, seed=12),
        "mixed_dims": FusionFrame.from_bases([np.eye(4)[:1], np.eye(4)[1:4]]),
    }
