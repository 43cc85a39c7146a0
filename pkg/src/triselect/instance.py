"""Instance files: ``{"points": [[x, y], ...], "triangles": [[i, j, k], ...]}``.

Coordinates are JSON integers or ``"p/q"`` strings; indices are 0-based.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .errors import InputError
from .geometry import PointSet, Triangle, TriangleSet, rational_str, to_rational


def _coord_out(q: Fraction) -> Any:
    return q.numerator if q.denominator == 1 else rational_str(q)


def instance_to_dict(s: PointSet, t: Iterable[Triangle]) -> dict:
    return {
        "points": [[_coord_out(p.x), _coord_out(p.y)] for p in s],
        "triangles": [[tri.a, tri.b, tri.c] for tri in t],
    }


def dumps_instance(s: PointSet, t: Iterable[Triangle]) -> str:
    return json.dumps(instance_to_dict(s, t), separators=(",", ":")) + "\n"


def _coord_in(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InputError(f"{where}: expected an integer or a \"p/q\" string, got {value!r}")
    try:
        return to_rational(value)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from None


def instance_from_dict(doc: Any, label: str = "instance") -> tuple[PointSet, TriangleSet]:
    if not isinstance(doc, dict):
        raise InputError("instance: top level must be an object")
    for key in ("points", "triangles"):
        if key not in doc:
            raise InputError(f"instance: missing field {key!r}")
        if not isinstance(doc[key], list):
            raise InputError(f"{key}: expected a list")
    coords = []
    for i, pt in enumerate(doc["points"]):
        if not isinstance(pt, list) or len(pt) != 2:
            raise InputError(f"points[{i}]: expected [x, y]")
        coords.append((_coord_in(pt[0], f"points[{i}][0]"), _coord_in(pt[1], f"points[{i}][1]")))
    s = PointSet.of(coords, label)
    tris = []
    for k, tri in enumerate(doc["triangles"]):
        if (not isinstance(tri, list) or len(tri) != 3
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in tri)):
            raise InputError(f"triangles[{k}]: expected three integer indices")
        if not all(0 <= v < len(s) for v in tri):
            raise InputError(f"triangles[{k}]: vertex index out of range 0..{len(s) - 1}")
        try:
            tris.append(Triangle(*tri))
        except InputError as exc:
            raise InputError(f"triangles[{k}]: {exc}") from None
    return s, tuple(tris)


def load_instance(path: str | Path) -> tuple[PointSet, TriangleSet]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(doc, label=path.stem)


def instance_digest(s: PointSet, t: Iterable[Triangle]) -> str:
    """SHA-256 over the canonical instance (triangle order ignored)."""
    doc = {
        "points": [[rational_str(p.x), rational_str(p.y)] for p in s],
        "triangles": sorted([tri.a, tri.b, tri.c] for tri in t),
    }
    blob = json.dumps(doc, separators=(",", ":"), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()
