"""Certificate JSON round-trip and re-verification against an instance."""
from __future__ import annotations

import json
from dataclasses import fields
from fractions import Fraction
from pathlib import Path
from typing import Any, NamedTuple

from .errors import InputError, TriselectError
from .geometry import Point2, PointSet, TriangleSet, count_containing, rational_str, strictly_inside, y_at
from .instance import instance_digest
from .selection import (
    RELATIONS,
    ChainCheck,
    ProjectedPair,
    SelectionCertificate,
    trace_selection,
)

RATIONAL_FIELDS = {"shear", "z0", "bound_rhs"}
POINT_FIELDS = {"x0", "x0_input"}

# Which chain check a recorded quantity feeds; a mismatch is reported under it.
FIELD_CHECK = {
    "n": "instance",
    "m": "instance",
    "instance_digest": "instance",
    "shear": "instance",
    "m_discarded": "C1.discard",
    "j_star": "C3",
    "j_max_slack": "C3",
    "m_j": "C3",
    "M0_size": "C4",
    "n0": "C5",
    "M1_size": "C5",
    "n1": "C5",
    "levels_used": "C5",
    "n2": "C6",
    "M2_size": "C7",
    "z0": "C8",
    "z0_retries": "C8",
    "x0": "C8",
    "x0_input": "C8",
    "depth_pairs": "C8",
    "depth_triangles": "C8",
    "covering": "C8",
    "bound_rhs": "bound_rhs",
    "oracle_depth": "C10",
}


def _parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InputError(f"{where}: expected a \"p/q\" string")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{where}: not a rational: {value!r}") from None


def _point_out(p: Point2) -> list[str]:
    return [rational_str(p.x), rational_str(p.y)]


def cert_to_dict(cert: SelectionCertificate) -> dict:
    doc: dict[str, Any] = {}
    for f in fields(cert):
        value = getattr(cert, f.name)
        if f.name in RATIONAL_FIELDS:
            value = rational_str(value)
        elif f.name in POINT_FIELDS:
            value = _point_out(value)
        elif f.name == "covering":
            value = [list(w) for w in value]
        elif f.name == "chain_checks":
            value = [
                {"name": c.name, "lhs": rational_str(c.lhs), "relation": c.relation,
                 "rhs": rational_str(c.rhs), "passed": c.passed, "what": c.what}
                for c in value
            ]
        doc[f.name] = value
    return doc


def cert_from_dict(doc: Any) -> SelectionCertificate:
    if not isinstance(doc, dict):
        raise InputError("certificate: top level must be an object")
    kwargs: dict[str, Any] = {}
    for f in fields(SelectionCertificate):
        if f.name not in doc:
            if f.name == "oracle_depth":
                kwargs[f.name] = None
                continue
            raise InputError(f"certificate: missing field {f.name!r}")
        value = doc[f.name]
        try:
            if f.name in RATIONAL_FIELDS:
                value = _parse_rational(value, f.name)
            elif f.name in POINT_FIELDS:
                value = Point2(_parse_rational(value[0], f"{f.name}[0]"), _parse_rational(value[1], f"{f.name}[1]"))
            elif f.name == "covering":
                value = [ProjectedPair(*map(int, w)) for w in value]
            elif f.name == "chain_checks":
                value = [
                    ChainCheck(c["name"], _parse_rational(c["lhs"], f"chain_checks[{k}].lhs"), c["relation"],
                               _parse_rational(c["rhs"], f"chain_checks[{k}].rhs"), bool(c["passed"]),
                               c.get("what", ""))
                    for k, c in enumerate(value)
                ]
            elif f.name == "instance_digest":
                value = str(value)
            elif value is not None:
                if isinstance(value, bool) or not isinstance(value, int):
                    raise InputError(f"{f.name}: expected an integer")
        except (TypeError, KeyError, IndexError) as exc:
            raise InputError(f"certificate: malformed field {f.name!r} ({exc})") from None
        kwargs[f.name] = value
    return SelectionCertificate(**kwargs)


def dumps_certificate(cert: SelectionCertificate) -> str:
    return json.dumps(cert_to_dict(cert), indent=2) + "\n"


def loads_certificate(text: str) -> SelectionCertificate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"certificate: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return cert_from_dict(doc)


def load_certificate(path: str | Path) -> SelectionCertificate:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return loads_certificate(text)


class Failure(NamedTuple):
    check: str
    message: str

    def __str__(self) -> str:
        return f"{self.check}: {self.message}"


def verify_certificate(s: PointSet, t: TriangleSet, cert: SelectionCertificate) -> list[Failure]:
    """Every reason ``cert`` does not certify instance ``(s, t)``; empty if it does.

    Recorded checks are re-evaluated from their own numbers, the pipeline
    is re-run and compared field by field, and x0's depth and the covering
    pairs are re-derived directly from the input geometry.
    """
    failures: list[Failure] = []
    if cert.n != len(s) or cert.m != len(t) or cert.instance_digest != instance_digest(s, t):
        failures.append(Failure("instance", "certificate was issued for a different instance"))
        return failures

    for c in cert.chain_checks:
        if c.relation not in RELATIONS:
            failures.append(Failure(c.name, f"unknown relation {c.relation!r}"))
        elif RELATIONS[c.relation](c.lhs, c.rhs) != c.passed or not c.passed:
            failures.append(Failure(c.name, f"{c.lhs} {c.relation} {c.rhs} does not hold as recorded"))

    try:
        trace = trace_selection(s, t, oracle=cert.oracle_depth is not None)
    except TriselectError as exc:
        failures.append(Failure("pipeline", f"re-run failed: {exc}"))
        return failures
    fresh = trace.certificate

    for f in fields(SelectionCertificate):
        if f.name == "chain_checks":
            continue
        got, want = getattr(cert, f.name), getattr(fresh, f.name)
        if got != want:
            failures.append(Failure(FIELD_CHECK[f.name], f"{f.name} recorded {_show(got)}, recomputed {_show(want)}"))

    recorded = {c.name: c for c in cert.chain_checks}
    for c in fresh.chain_checks:
        r = recorded.get(c.name)
        if r is None:
            failures.append(Failure(c.name, "check missing from certificate"))
        elif (r.lhs, r.relation, r.rhs) != (c.lhs, c.relation, c.rhs):
            failures.append(Failure(c.name, f"recorded {r.lhs} {r.relation} {r.rhs}, "
                                            f"recomputed {c.lhs} {c.relation} {c.rhs}"))
    extra = set(recorded) - {c.name for c in fresh.chain_checks}
    failures.extend(Failure(name, "check not produced by this instance") for name in sorted(extra))

    # Direct geometry in the input frame, independent of the pipeline's bookkeeping.
    t_j = trace.bucket.triangles()
    if count_containing(cert.x0_input, t_j, s) != cert.depth_triangles:
        failures.append(Failure("C8", "depth_triangles disagrees with a direct count at x0"))
    work = trace.work
    for w in cert.covering:
        a, b, c, d = (s[v] for v in w)
        if not (strictly_inside(cert.x0_input, a, b, c) or strictly_inside(cert.x0_input, a, b, d)):
            failures.append(Failure("C8", f"x0 not inside either triangle of covering pair {tuple(w)}"))
            break
        wa, wb, wc, wd = (work[v] for v in w)
        ys = sorted((y_at(wa, wd, cert.z0), y_at(wb, wc, cert.z0)))
        if not ys[0] < cert.x0.y < ys[1]:
            failures.append(Failure("C8", f"x0 not on the lift of covering pair {tuple(w)}"))
            break
    return failures


def _show(value: Any) -> str:
    if isinstance(value, Fraction):
        return rational_str(value)
    if isinstance(value, Point2):
        return f"({rational_str(value.x)}, {rational_str(value.y)})"
    if isinstance(value, list) and len(value) > 4:
        return f"[{len(value)} items]"
    return str(value)
