"""JSON readers and writers for polytopes, fixed-point data and classes.

Rationals travel as ``"p/q"`` or integer strings (bare JSON integers are
accepted too). Floating-point literals are rejected wherever they appear.
"""

from __future__ import annotations

import json
from pathlib import Path

from .cohomology import EquivariantClass
from .delzant import DelzantPolytope, HalfSpace
from .exact import as_rational, format_rational
from .fixedpoints import FixedPointDatum, FixedPointSet


class FormatError(ValueError):
    """Input file does not match its declared schema."""


class _FloatLiteral:
    __slots__ = ("text",)

    def __init__(self, text):
        self.text = text


def loads(text: str):
    try:
        return json.loads(text, parse_float=_FloatLiteral, parse_constant=_FloatLiteral)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _line_of(text: str | None, literal: str) -> str:
    if not text:
        return ""
    for i, line in enumerate(text.splitlines(), 1):
        if literal in line:
            return f" (line {i})"
    return ""


class _Reader:
    def __init__(self, text=None):
        self.text = text

    def rational(self, x, where):
        if isinstance(x, _FloatLiteral):
            raise FormatError(f"{where}: floating-point literal {x.text} not allowed{_line_of(self.text, x.text)}; "
                              f"write an exact rational such as \"1/2\"")
        try:
            return as_rational(x)
        except (TypeError, ValueError) as exc:
            raise FormatError(f"{where}: {exc}") from None

    def integer(self, x, where):
        if isinstance(x, _FloatLiteral):
            raise FormatError(f"{where}: floating-point literal {x.text} not allowed{_line_of(self.text, x.text)}")
        if isinstance(x, bool) or not isinstance(x, int):
            raise FormatError(f"{where}: expected an integer, got {x!r}")
        return x

    def field(self, obj, key, where):
        if not isinstance(obj, dict):
            raise FormatError(f"{where}: expected an object")
        if key not in obj:
            raise FormatError(f"{where}: missing field {key!r}")
        return obj[key]

    def array(self, x, where):
        if not isinstance(x, list):
            raise FormatError(f"{where}: expected an array")
        return x


def rational_field(x, where="value"):
    return _Reader().rational(x, where)


def polytope_from_obj(obj, text=None) -> DelzantPolytope:
    r = _Reader(text)
    dim = r.integer(r.field(obj, "dim", "polytope"), "dim")
    hs = []
    for i, h in enumerate(r.array(r.field(obj, "halfspaces", "polytope"), "halfspaces")):
        where = f"halfspaces[{i}]"
        normal = [r.integer(a, f"{where}.normal[{j}]")
                  for j, a in enumerate(r.array(r.field(h, "normal", where), f"{where}.normal"))]
        offset = r.rational(r.field(h, "offset", where), f"{where}.offset")
        try:
            hs.append(HalfSpace(tuple(normal), offset))
        except ValueError as exc:
            raise FormatError(f"{where}: {exc}") from None
    try:
        return DelzantPolytope(dim, tuple(hs))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def fixed_points_from_obj(obj, text=None) -> FixedPointSet:
    r = _Reader(text)
    dim = r.integer(r.field(obj, "dim", "fixed point set"), "dim")
    pts = []
    for i, p in enumerate(r.array(r.field(obj, "points", "fixed point set"), "points")):
        where = f"points[{i}]"
        pid = r.field(p, "id", where)
        if not isinstance(pid, str):
            raise FormatError(f"{where}.id: expected a string")
        H = r.rational(r.field(p, "H", where), f"{where}.H")
        ws = [r.integer(w, f"{where}.weights[{j}]")
              for j, w in enumerate(r.array(r.field(p, "weights", where), f"{where}.weights"))]
        pts.append(FixedPointDatum(pid, H, tuple(ws)))
    try:
        return FixedPointSet(dim, tuple(pts))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def class_from_obj(obj, where="class", text=None) -> EquivariantClass:
    r = _Reader(text)
    upow = r.integer(r.field(obj, "upow", where), f"{where}.upow")
    coeffs = r.field(obj, "coeffs", where)
    if not isinstance(coeffs, dict):
        raise FormatError(f"{where}.coeffs: expected an object")
    try:
        return EquivariantClass(upow, {k: r.rational(v, f"{where}.coeffs.{k}") for k, v in coeffs.items()})
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def parse_obj(obj, text=None):
    """Dispatch on the schema: ``halfspaces`` means polytope, ``points`` means fixed-point data."""
    if not isinstance(obj, dict):
        raise FormatError("top level must be a JSON object")
    if "halfspaces" in obj and "points" in obj:
        raise FormatError("ambiguous input: both 'halfspaces' and 'points' present")
    if "halfspaces" in obj:
        return polytope_from_obj(obj, text)
    if "points" in obj:
        return fixed_points_from_obj(obj, text)
    raise FormatError("unrecognised input: expected a 'halfspaces' or 'points' key")


def parse_input(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_obj(loads(text), text)


def polytope_to_obj(p: DelzantPolytope) -> dict:
    return {
        "dim": p.dim,
        "halfspaces": [{"normal": list(h.normal), "offset": format_rational(h.offset)} for h in p.halfspaces],
    }


def fixed_points_to_obj(s: FixedPointSet) -> dict:
    return {
        "dim": s.dim,
        "points": [{"id": p.id, "H": format_rational(p.moment_value), "weights": list(p.weights)}
                   for p in s.points],
    }


def serialize(x) -> dict:
    if isinstance(x, DelzantPolytope):
        return polytope_to_obj(x)
    if isinstance(x, FixedPointSet):
        return fixed_points_to_obj(x)
    if isinstance(x, EquivariantClass):
        return x.to_dict()
    raise TypeError(f"no serializer for {type(x).__name__}")


def dumps(obj) -> str:
    """Canonical output: sorted keys, compact separators."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
