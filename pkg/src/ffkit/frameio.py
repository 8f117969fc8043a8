"""Canonical JSON for frames and reports.

Keys are sorted, floats are written with 17 significant digits, and the
output is byte-stable, so files work as golden fixtures.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import FrameFormatError, RankDeficient
from .frames import FusionFrame, Subspace
from .matcore import DEFAULT_TOLERANCES, Tolerances, orthonormalize


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    text = format(x, ".17g")
    if text == "-0":
        text = "0"
    return text


def _emit(obj: Any, indent: int | None, level: int, out: list[str]) -> None:
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        if not items:
            out.append("{}")
            return
        out.append("{")
        for n, (k, v) in enumerate(items):
            if n:
                out.append(",")
            _newline(indent, level + 1, out)
            out.append(json.dumps(k, ensure_ascii=False))
            out.append(": " if indent is not None else ":")
            _emit(v, indent, level + 1, out)
        _newline(indent, level, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        # numeric rows stay on one line
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq)
        out.append("[")
        for n, v in enumerate(seq):
            if n:
                out.append(", " if flat and indent is not None else ",")
            if not flat:
                _newline(indent, level + 1, out)
            _emit(v, indent, level + 1, out)
        if not flat and seq:
            _newline(indent, level, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _newline(indent: int | None, level: int, out: list[str]) -> None:
    if indent is not None:
        out.append("\n" + " " * (indent * level))


def dumps(obj: Any, indent: int | None = 2) -> str:
    """Deterministic JSON text (sorted keys, 17-significant-digit floats)."""
    out: list[str] = []
    _emit(obj, indent, 0, out)
    return "".join(out) + ("\n" if indent is not None else "")


def frame_to_dict(frame: FusionFrame) -> dict:
    return {
        "ambient_dim": frame.ambient_dim,
        "subspaces": [{"basis": s.basis.tolist()} for s in frame],
        "metadata": dict(frame.metadata),
    }


def frame_from_dict(doc: Any, tol: Tolerances = DEFAULT_TOLERANCES) -> FusionFrame:
    """Build a frame from a parsed document.

    Bases within ``load_orthonormal`` of orthonormal are taken verbatim.
    Others are re-orthonormalized and the largest correction is recorded under
    ``metadata["load_correction"]``; a correction above ``load_reject`` is an
    error.
    """
    try:
        M = doc["ambient_dim"]
        raw_subspaces = doc["subspaces"]
        metadata = doc.get("metadata", {}) or {}
    except (TypeError, KeyError, AttributeError) as exc:
        raise FrameFormatError(f"missing frame field: {exc}") from exc
    if not isinstance(M, int) or isinstance(M, bool) or M < 1:
        raise FrameFormatError(f"ambient_dim must be a positive integer, got {M!r}")
    if not isinstance(raw_subspaces, list) or not raw_subspaces:
        raise FrameFormatError("subspaces must be a nonempty list")
    if not isinstance(metadata, dict):
        raise FrameFormatError("metadata must be an object")

    subspaces = []
    worst = 0.0
    for i, entry in enumerate(raw_subspaces):
        try:
            basis = np.array(entry["basis"], dtype=np.float64)
        except (TypeError, KeyError, ValueError) as exc:
            raise FrameFormatError(f"subspace {i}: unreadable basis") from exc
        if basis.ndim != 2 or basis.shape[1] != M or not 1 <= basis.shape[0] <= M:
            raise FrameFormatError(f"subspace {i}: basis shape {basis.shape} does not fit R^{M}")
        if not np.all(np.isfinite(basis)):
            raise FrameFormatError(f"subspace {i}: non-finite entries")
        residual = float(np.linalg.norm(basis @ basis.T - np.eye(basis.shape[0])))
        if residual > tol.load_orthonormal:
            try:
                fixed = orthonormalize(basis, tol=tol)
            except RankDeficient as exc:
                raise FrameFormatError(f"subspace {i}: {exc}") from exc
            correction = float(np.linalg.norm(fixed - basis))
            if correction > tol.load_reject:
                raise FrameFormatError(
                    f"subspace {i}: basis is {correction:.2e} away from orthonormal"
                )
            worst = max(worst, correction)
            basis = fixed
        subspaces.append(Subspace(basis))

    meta = {str(k): str(v) for k, v in metadata.items()}
    if worst > 0.0:
        meta["load_correction"] = format_float(worst)
    return FusionFrame(tuple(subspaces), meta)


def dumps_frame(frame: FusionFrame) -> str:
    return dumps(frame_to_dict(frame))


def loads_frame(text: str, tol: Tolerances = DEFAULT_TOLERANCES) -> FusionFrame:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FrameFormatError(f"invalid JSON: {exc}") from exc
    return frame_from_dict(doc, tol)


def save_frame(frame: FusionFrame, path: str | Path) -> None:
    Path(path).write_text(dumps_frame(frame), encoding="utf-8")


def load_frame(path: str | Path, tol: Tolerances = DEFAULT_TOLERANCES) -> FusionFrame:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FrameFormatError(f"cannot read {path}: {exc}") from exc
    return loads_frame(text, tol)
