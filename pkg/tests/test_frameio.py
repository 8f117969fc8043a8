import json

import numpy as np
import pytest

from ffkit import FusionFrame
from ffkit.constructions import random_frame
from ffkit.errors import FrameFormatError
from ffkit.frameio import dumps, dumps_frame, format_float, load_frame, loads_frame, save_frame


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(-0.0) == "0"
    assert format_float(2.0) == "2"
    assert float(format_float(1 / 3)) == 1 / 3


def test_dumps_canonical():
    text = dumps({"b": [1.0, 2.5], "a": {"y": 1, "x": "s"}})
    assert text.endswith("\n")
    assert json.loads(text) == {"a": {"x": "s", "y": 1}, "b": [1.0, 2.5]}
    assert text.index('"a"') < text.index('"b"')
    assert "[1, 2.5]" in text


def test_roundtrip_byte_identical(tmp_path, qr7):
    p = tmp_path / "f.json"
    save_frame(qr7, p)
    first = p.read_bytes()
    again = load_frame(p)
    save_frame(again, tmp_path / "g.json")
    assert (tmp_path / "g.json").read_bytes() == first
    for U, V in zip(qr7, again):
        np.testing.assert_array_equal(U.basis, V.basis)
    assert again.metadata == qr7.metadata


def test_load_corrects_small_drift():
    fr = random_frame(4, [2, 1], seed=3)
    doc = json.loads(dumps_frame(fr))
    doc["subspaces"][0]["basis"][0][0] += 1e-6
    loaded = loads_frame(json.dumps(doc))
    assert "load_correction" in loaded.metadata
    np.testing.assert_allclose(loaded[0].basis @ loaded[0].basis.T, np.eye(2), atol=1e-12)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        '{"subspaces": []}',
        '{"ambient_dim": 2, "subspaces": []}',
        '{"ambient_dim": 2, "subspaces": [{"basis": [[1, 0, 0]]}]}',
        '{"ambient_dim": 2, "subspaces": [{"basis": [[1, 1]]}]}',
        '{"ambient_dim": 2, "subspaces": [{"basis": [["a", 0]]}]}',
        '{"ambient_dim": 2, "subspaces": [{"rows": [[1, 0]]}]}',
        '{"ambient_dim": 2.5, "subspaces": [{"basis": [[1, 0]]}]}',
    ],
)
def test_load_rejects(text):
    with pytest.raises(FrameFormatError):
        loads_frame(text)


def test_loads_minimal_document():
    fr = loads_frame('{"ambient_dim": 2, "subspaces": [{"basis": [[1, 0]]}, {"basis": [[0, 1]]}]}')
    assert isinstance(fr, FusionFrame) and len(fr) == 2
    assert fr.metadata == {}
