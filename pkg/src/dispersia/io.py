"""
Reading and writing densities, toy models, configurations, surfaces and paths.

Parsing is strict: a malformed file raises :class:`ParseError` naming the
file and the offending line (for CSV and JSON syntax errors) or field (for
JSON content errors).
"""

import csv
import json
import math
import numbers
from pathlib import Path

import numpy as np

from .density import ChargeDensity, Configuration
from .energy import EnergySurface, ToyMolecule
from .pathopt.path import PathOnConfigSpace
from .rotations import RotationError, check_rotation, rotation_to_list

CSV_HEADER = ["x", "y", "z", "w"]


class ParseError(ValueError):
    """Malformed input. ``line`` and ``field`` locate the problem when known."""

    def __init__(self, message, source=None, line=None, field=None):
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        super().__init__(f"{': '.join([', '.join(where), message]) if where else message}")
        self.source, self.line, self.field = source, line, field


def _number(value, field, source):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ParseError(f"expected a number, got {json.dumps(value)}", source, field=field)
    if not math.isfinite(value):
        raise ParseError("number must be finite", source, field=field)
    return float(value)


def _vector3(value, field, source):
    if not isinstance(value, list) or len(value) != 3:
        raise ParseError("expected a list of 3 numbers", source, field=field)
    return [_number(v, f"{field}[{i}]", source) for i, v in enumerate(value)]


def load_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise FileNotFoundError(f"no such file: {path}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, line=exc.lineno) from None


# densities ---------------------------------------------------------------

def density_from_dict(obj, source=None):
    """Build a density from ``{"label": str, "points": [[x, y, z], ...], "weights": [w, ...]}``."""
    if not isinstance(obj, dict):
        raise ParseError("density must be a JSON object", source)
    unknown = set(obj) - {"label", "points", "weights"}
    if unknown:
        raise ParseError("unknown key", source, field=sorted(unknown)[0])
    for key in ("points", "weights"):
        if key not in obj:
            raise ParseError("missing", source, field=key)
        if not isinstance(obj[key], list) or not obj[key]:
            raise ParseError("expected a nonempty list", source, field=key)
    label = obj.get("label", "")
    if not isinstance(label, str):
        raise ParseError("expected a string", source, field="label")
    points = [_vector3(p, f"points[{i}]", source) for i, p in enumerate(obj["points"])]
    weights = [_number(w, f"weights[{i}]", source) for i, w in enumerate(obj["weights"])]
    if len(points) != len(weights):
        raise ParseError(f"length mismatch: {len(points)} points but {len(weights)} weights", source,
                         field="weights")
    return ChargeDensity(np.array(points), np.array(weights), label)


def density_to_dict(rho):
    return {"label": rho.label, "points": rho.points.tolist(), "weights": rho.weights.tolist()}


def read_density_csv(path):
    """CSV with header ``x,y,z,w`` and one point per row; the label is the file stem."""
    path = Path(path)
    try:
        handle = path.open(newline="")
    except FileNotFoundError:
        raise FileNotFoundError(f"no such file: {path}") from None
    with handle:
        rows = list(csv.reader(handle))
    if not rows or [c.strip() for c in rows[0]] != CSV_HEADER:
        raise ParseError(f"header must be {','.join(CSV_HEADER)}", path, line=1)
    points, weights = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", path, line=lineno)
        vals = []
        for name, cell in zip(CSV_HEADER, row):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"not a number: {cell!r}", path, line=lineno, field=name) from None
            if not math.isfinite(v):
                raise ParseError("number must be finite", path, line=lineno, field=name)
            vals.append(v)
        points.append(vals[:3])
        weights.append(vals[3])
    if not points:
        raise ParseError("no data rows", path)
    return ChargeDensity(np.array(points), np.array(weights), path.stem)


def read_density(path):
    """Density from a ``.csv`` file or a JSON file (any other suffix)."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return read_density_csv(path)
    return density_from_dict(load_json(path), path)


def write_density(rho, path):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for p, w in zip(rho.points, rho.weights):
                writer.writerow([repr(float(v)) for v in (*p, w)])
    else:
        path.write_text(json.dumps(density_to_dict(rho), indent=2, sort_keys=True) + "\n")


# toy molecules -------------------------------------------------------------

def _complex_matrix(value, field, source):
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ParseError("expected a nonempty matrix (list of rows)", source, field=field)
    n = len(value[0])
    out = np.zeros((len(value), n), dtype=complex)
    for i, row in enumerate(value):
        if len(row) != n:
            raise ParseError("rows of unequal length", source, field=f"{field}[{i}]")
        for j, z in enumerate(row):
            f = f"{field}[{i}][{j}]"
            if isinstance(z, list):
                if len(z) != 2:
                    raise ParseError("complex entries are [re, im] pairs", source, field=f)
                out[i, j] = complex(_number(z[0], f, source), _number(z[1], f, source))
            else:
                out[i, j] = _number(z, f, source)
    return out


def toy_from_dict(obj, source=None):
    """Toy molecule from ``{"H": ..., "Dx": ..., "Dy": ..., "Dz": ...}``."""
    if not isinstance(obj, dict):
        raise ParseError("toy model must be a JSON object", source)
    mats = {}
    for key in ("H", "Dx", "Dy", "Dz"):
        if key not in obj:
            raise ParseError("missing", source, field=key)
        mats[key] = _complex_matrix(obj[key], key, source)
    shape = mats["H"].shape
    for key in ("Dx", "Dy", "Dz"):
        if mats[key].shape != shape:
            raise ParseError(f"shape {mats[key].shape} differs from H {shape}", source, field=key)
    try:
        return ToyMolecule.from_hamiltonian(mats["H"], np.stack([mats["Dx"], mats["Dy"], mats["Dz"]]))
    except ValueError as exc:
        raise ParseError(str(exc), source) from None


def read_toy(path):
    return toy_from_dict(load_json(path), Path(path))


# configurations and paths ---------------------------------------------------

def _rotation(value, field, source):
    if not isinstance(value, list) or len(value) != 3:
        raise ParseError("expected a 3x3 matrix", source, field=field)
    R = np.array([_vector3(r, f"{field}[{i}]", source) for i, r in enumerate(value)])
    try:
        return check_rotation(R)
    except RotationError as exc:
        raise ParseError(str(exc), source, field=field) from None


def configuration_from_dict(obj, source=None, field="configuration"):
    """``{"L": float, "U": 3x3, "V": 3x3}``; missing rotations default to the identity."""
    if not isinstance(obj, dict):
        raise ParseError("configuration must be a JSON object", source, field=field)
    if "L" not in obj:
        raise ParseError("missing", source, field=f"{field}.L")
    L = _number(obj["L"], f"{field}.L", source)
    U = _rotation(obj["U"], f"{field}.U", source) if "U" in obj else np.eye(3)
    V = _rotation(obj["V"], f"{field}.V", source) if "V" in obj else np.eye(3)
    try:
        return Configuration(L, U, V)
    except (RotationError, ValueError) as exc:
        raise ParseError(str(exc), source, field=field) from None


def configuration_to_dict(tau):
    return {"L": float(tau.L), "U": rotation_to_list(tau.U), "V": rotation_to_list(tau.V)}


def parse_configuration(text):
    """Configuration from inline JSON or from a JSON file path."""
    text = text.strip()
    if text.startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, "inline configuration", line=exc.lineno) from None
        return configuration_from_dict(obj, "inline configuration")
    return configuration_from_dict(load_json(text), Path(text))


def path_from_dict(obj, source=None):
    if not isinstance(obj, dict) or not isinstance(obj.get("nodes"), list):
        raise ParseError("path must be an object with a 'nodes' list", source, field="nodes")
    nodes = [configuration_from_dict(n, source, f"nodes[{i}]") for i, n in enumerate(obj["nodes"])]
    try:
        return PathOnConfigSpace(nodes)
    except ValueError as exc:
        raise ParseError(str(exc), source, field="nodes") from None


def read_path(path):
    return path_from_dict(load_json(path), Path(path))


# surfaces ------------------------------------------------------------------

def _density_ref(value, field, source):
    if isinstance(value, str):
        base = Path(source).parent if source is not None else Path(".")
        return read_density(base / value)
    try:
        return density_from_dict(value, source)
    except ParseError as exc:
        raise ParseError(str(exc), source, field=field) from None


def surface_from_dict(obj, source=None):
    """Energy surface description.

    ``{"rho1": density or file name, "rho2": ..., "E_infinity": float,
    "vdw": float or {"mol1": toy, "mol2": toy}, "orders": [[n, m], ...],
    "L_min": float}``. File names are resolved relative to the surface file.
    """
    if not isinstance(obj, dict):
        raise ParseError("surface must be a JSON object", source)
    allowed = {"rho1", "rho2", "E_infinity", "vdw", "orders", "L_min"}
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError("unknown key", source, field=sorted(unknown)[0])
    for key in ("rho1", "rho2"):
        if key not in obj:
            raise ParseError("missing", source, field=key)
    rho1 = _density_ref(obj["rho1"], "rho1", source)
    rho2 = _density_ref(obj["rho2"], "rho2", source)
    vdw = obj.get("vdw", 0.0)
    if isinstance(vdw, dict):
        vdw = (toy_from_dict(vdw.get("mol1"), source), toy_from_dict(vdw.get("mol2"), source))
    else:
        vdw = _number(vdw, "vdw", source)
    orders = obj.get("orders", [[1, 1]])
    if not isinstance(orders, list) or not all(
        isinstance(o, list) and len(o) == 2 and all(isinstance(k, int) and not isinstance(k, bool) for k in o)
        for o in orders
    ):
        raise ParseError("expected a list of [n, m] integer pairs", source, field="orders")
    try:
        return EnergySurface(
            rho1, rho2,
            E_infinity=_number(obj.get("E_infinity", 0.0), "E_infinity", source),
            vdw=vdw,
            orders=tuple(tuple(o) for o in orders),
            L_min=_number(obj.get("L_min", 1.0), "L_min", source),
        )
    except ValueError as exc:
        raise ParseError(str(exc), source) from None


def read_surface(path):
    return surface_from_dict(load_json(path), Path(path))


def surface_to_dict(surface):
    vdw = surface.vdw
    if isinstance(vdw, (tuple, list)):
        vdw = {"mol1": vdw[0].to_json(), "mol2": vdw[1].to_json()}
    else:
        vdw = float(vdw)
    return {
        "rho1": density_to_dict(surface.rho1),
        "rho2": density_to_dict(surface.rho2),
        "E_infinity": float(surface.E_infinity),
        "vdw": vdw,
        "orders": [list(nm) for nm in surface.orders],
        "L_min": float(surface.L_min),
    }
