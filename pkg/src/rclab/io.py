"""JSON instance parsing and CSV/JSON result emission.

Every parser raises ``ValidationError`` whose message starts with the path of
the offending field, e.g. ``components[1].space.norm.q: ...``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .direct_sum import Component, ProductInstance
from .errors import RCLabError, ValidationError
from .geometry import BoundedSet, Subspace
from .property_lab import NORMALIZATIONS, SetFamily
from .spaces import CNorm, LqNorm, Space, SumNorm

__all__ = [
    "parse_norm",
    "parse_space",
    "parse_set",
    "parse_subspace",
    "parse_instance",
    "parse_product",
    "parse_family",
    "detect_kind",
    "load_json",
    "rows_to_csv",
    "rows_to_json",
    "format_float",
]


def _field(obj, key, path):
    if not isinstance(obj, dict):
        raise ValidationError(f"{path or 'instance'}: expected a JSON object")
    if key not in obj:
        raise ValidationError(f"{_join(path, key)}: missing field")
    return obj[key]


def _join(path, key):
    return f"{path}.{key}" if path else key


def _real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{path}: expected a number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise ValidationError(f"{path}: must be finite")
    return float(value)


def _prefix(path, msg):
    # library messages start with the local field name ("norm.q: ..."); replace
    # that leading segment by the full path of the field in the document
    last = path.rsplit(".", 1)[-1]
    if msg.startswith(last + ".") or msg.startswith(last + ":"):
        msg = msg[len(last):]
        return f"{path}{msg}"
    return f"{path}.{msg}"


def _wrap(path, fn, *args):
    try:
        return fn(*args)
    except ValidationError as exc:
        raise ValidationError(_prefix(path, str(exc))) from None
    except RCLabError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def parse_norm(obj, path="norm"):
    kind = _field(obj, "kind", path)
    if kind == "lq":
        return _wrap(path, LqNorm, _real(_field(obj, "q", path), _join(path, "q")))
    if kind == "cnorm":
        return CNorm()
    if kind == "sum":
        p = _real(_field(obj, "p", path), _join(path, "p"))
        parts = _field(obj, "parts", path)
        if not isinstance(parts, list):
            raise ValidationError(f"{_join(path, 'parts')}: expected a list")
        out = []
        for i, part in enumerate(parts):
            pp = f"{path}.parts[{i}]"
            dim = _field(part, "dim", pp)
            out.append((dim, parse_norm(_field(part, "norm", pp), _join(pp, "norm"))))
        return _wrap(path, SumNorm, p, tuple(out))
    raise ValidationError(f"{_join(path, 'kind')}: unknown norm kind {kind!r}")


def parse_space(obj, path="space"):
    dim = _field(obj, "dim", path)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ValidationError(f"{_join(path, 'dim')}: expected a positive integer")
    norm = parse_norm(_field(obj, "norm", path), _join(path, "norm"))
    return _wrap(path, Space, dim, norm)


def _matrix(value, path, dim, allow_empty=False):
    if not isinstance(value, list) or (not value and not allow_empty):
        raise ValidationError(f"{path}: expected a nonempty list of points")
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != dim:
            raise ValidationError(f"{path}[{i}]: expected {dim} coordinates")
        for j, c in enumerate(row):
            _real(c, f"{path}[{i}][{j}]")
    return np.array(value, dtype=float).reshape(-1, dim)


def parse_set(obj, space, path="set"):
    pts = _matrix(_field(obj, "points", path), _join(path, "points"), space.dim)
    return BoundedSet(pts, space)


def parse_subspace(obj, space, path="subspace"):
    basis = _matrix(_field(obj, "basis", path), _join(path, "basis"), space.dim, allow_empty=True)
    return _wrap(path, Subspace, basis, space)


def parse_point(value, space, path):
    return _matrix([value] if isinstance(value, list) else value, path, space.dim)[0]


def parse_instance(obj):
    """``{space, subspace, set, tol?}`` into ``(space, V, F, tol)``."""
    space = parse_space(_field(obj, "space", ""))
    V = parse_subspace(_field(obj, "subspace", ""), space)
    F = parse_set(_field(obj, "set", ""), space)
    tol = obj.get("tol")
    if tol is not None and _real(tol, "tol") <= 0:
        raise ValidationError("tol: must be > 0")
    return space, V, F, tol


def parse_product(obj):
    p = _real(_field(obj, "p", ""), "p")
    comps = _field(obj, "components", "")
    if not isinstance(comps, list) or not comps:
        raise ValidationError("components: expected a nonempty list")
    out = []
    for i, c in enumerate(comps):
        path = f"components[{i}]"
        space = parse_space(_field(c, "space", path), f"{path}.space")
        V = parse_subspace(_field(c, "subspace", path), space, f"{path}.subspace")
        F = parse_set(_field(c, "set", path), space, f"{path}.set")
        out.append(Component(space, V, F))
    return ProductInstance(out, p)


def parse_family(obj):
    """``{space, subspace, members, normalization?, anchor?}``.

    ``anchor`` is either a member index or a set object.
    """
    space = parse_space(_field(obj, "space", ""))
    V = parse_subspace(_field(obj, "subspace", ""), space)
    members = _field(obj, "members", "")
    if not isinstance(members, list) or not members:
        raise ValidationError("members: expected a nonempty list of sets")
    sets = [parse_set(m, space, f"members[{i}]") for i, m in enumerate(members)]
    norm = obj.get("normalization", "none")
    if norm not in NORMALIZATIONS:
        raise ValidationError(f"normalization: unknown value {norm!r}")
    fam = SetFamily(sets, norm)
    anchor = obj.get("anchor")
    if anchor is not None:
        if isinstance(anchor, int) and not isinstance(anchor, bool):
            if not 0 <= anchor < len(sets):
                raise ValidationError(f"anchor: index {anchor} out of range")
            anchor = sets[anchor]
        else:
            anchor = parse_set(anchor, space, "anchor")
    return space, V, fam, anchor


def detect_kind(obj):
    if not isinstance(obj, dict):
        raise ValidationError("instance: expected a JSON object")
    if "components" in obj:
        return "product"
    if "members" in obj:
        return "family"
    if "set" in obj:
        return "instance"
    if "z" in obj or ("subspace" in obj and "eps" in obj):
        return "probe"
    raise ValidationError("instance: cannot tell the schema (expected set, components, members or z)")


def load_json(path):
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"instance: file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"instance: malformed JSON at line {exc.lineno}: {exc.msg}") from None


def format_float(x):
    """17 significant digits, enough to round-trip a double."""
    return format(float(x), ".17g")


def _flatten(row):
    out = {}
    for key, value in row.items():
        if isinstance(value, np.ndarray) or isinstance(value, (list, tuple)):
            for i, v in enumerate(np.ravel(np.asarray(value, dtype=float))):
                out[f"{key}_{i}"] = v
        else:
            out[key] = value
    return out


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def rows_to_csv(rows):
    """CSV text with a header row; floats at 17 significant digits."""
    flat = [_flatten(r) for r in rows]
    header = []
    for r in flat:
        for k in r:
            if k not in header:
                header.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in flat:
        w.writerow([_cell(r.get(k)) for k in header])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in (v.tolist() if isinstance(v, np.ndarray) else v)]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def rows_to_json(rows, **meta):
    return json.dumps({**_jsonable(meta), "rows": _jsonable(list(rows))}, indent=2) + "\n"
