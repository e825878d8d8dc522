"""JSON documents, measure parsing and run manifests."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from . import catalog
from . import grid as _grid
from .errors import InputError
from .measures import VectorMeasure
from .operators import HomogeneousOperator, parse_operator


def tool_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def to_jsonable(obj):
    """Plain JSON types; complex numbers become ``{"re", "im"}`` and non-finite floats strings."""
    if hasattr(obj, "to_document"):
        return to_jsonable(obj.to_document())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dict(vars(obj)))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(float(obj.real)), "im": to_jsonable(float(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(doc) -> str:
    """Deterministic serialisation: sorted keys, shortest round-trip floats."""
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2) + "\n"


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def read_json(path) -> dict:
    try:
        return json.loads(read_text(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed document {path}: {exc}") from None


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# --- operators -------------------------------------------------------------

def operator_preset(name: str) -> HomogeneousOperator:
    """``grad:N``, ``div:N``, ``laplace:N``, ``curl:N``, ``partial:N:j`` or ``Dm:N``."""
    parts = name.split(":")
    try:
        kind, N = parts[0], int(parts[1])
        if kind in catalog.PRESETS:
            return catalog.PRESETS[kind](N)
        if kind == "partial":
            return catalog.partial(N, int(parts[2]) - 1 if len(parts) > 2 else 0)
        if kind.startswith("D") and kind[1:].isdigit():
            return catalog.total_derivative(N, int(kind[1:]))
    except (IndexError, ValueError):
        pass
    raise InputError(f"unknown operator preset {name!r}")


def load_operator(arg: str) -> HomogeneousOperator:
    """An operator document path, or a preset name when no such file exists."""
    if Path(arg).is_file():
        return parse_operator(read_text(arg))
    if ":" in arg:
        return operator_preset(arg)
    raise InputError(f"no operator document at {arg!r}")


# --- measures --------------------------------------------------------------

MEASURE_PRESETS = ("example", "line", "lebesgue", "delta", "empty")


def measure_preset(name: str, N: int = 2, resolution: int = 128, dimE: int = 1) -> VectorMeasure:
    """Named measures on ``[-1, 1]^N``.

    ``example``: ``|x|^-1 dx``; ``line``: arc length on ``[-1, 1] x {0}``
    (atoms); ``lebesgue``: ``dx``; ``delta``: unit atom at the origin;
    ``empty``: the zero measure.
    """
    lo, hi, res = _grid.centered_box(1.0, resolution, N)
    if name == "example":
        mu = VectorMeasure.from_density(lambda x: 1 / np.sqrt(np.sum(x**2, axis=0)), lo, hi, res)
    elif name == "line":
        mu = VectorMeasure.line(N)
    elif name == "lebesgue":
        mu = VectorMeasure.gridded(lo, hi, np.ones((1,) + res))
    elif name == "delta":
        mu = VectorMeasure.delta(np.zeros(N))
    elif name == "empty":
        return VectorMeasure.zero(N, dimE)
    else:
        raise InputError(f"unknown measure preset {name!r}; choose from {MEASURE_PRESETS}")
    if dimE > 1:
        mu = _lift(mu, dimE)
    return mu


def _lift(mu: VectorMeasure, dimE: int) -> VectorMeasure:
    """Copy a scalar measure into the first of ``dimE`` components."""
    if mu.kind == "gridded":
        d = np.zeros((dimE,) + mu.resolution, dtype=complex)
        d[0] = mu.density[0]
        return VectorMeasure.gridded(mu.lo, mu.hi, d)
    w = np.zeros((len(mu.weights), dimE), dtype=complex)
    w[:, 0] = mu.weights[:, 0]
    return VectorMeasure.atomic(mu.points, w, mu.spacing)


def rasterize(mu: VectorMeasure, resolution: int = 128) -> VectorMeasure:
    """Deposit atoms into the nearest cell of a centred grid (gridded measures pass through)."""
    if mu.kind == "gridded":
        return mu
    reach = float(np.max(np.abs(mu.points))) if len(mu.points) else 0.0
    lo, hi, res = _grid.centered_box(max(1.0, 1.25 * reach), resolution, mu.dim_N)
    h = (hi - lo) / np.asarray(res)
    d = np.zeros((mu.dimE,) + res, dtype=complex)
    if len(mu.points):
        idx = np.clip(np.rint((mu.points - lo) / h).astype(int), 0, np.asarray(res) - 1)
        for e in range(mu.dimE):
            np.add.at(d[e], tuple(idx.T), mu.weights[:, e])
    return VectorMeasure.gridded(lo, hi, d / float(np.prod(h)))


def parse_measure(doc) -> VectorMeasure:
    """Inverse of :meth:`VectorMeasure.to_document`, plus ``{"preset": name, ...}``."""
    if not isinstance(doc, dict):
        raise InputError("malformed measure document: expected an object")
    try:
        if "preset" in doc:
            return measure_preset(doc["preset"], int(doc.get("N", 2)), int(doc.get("resolution", 128)),
                                  int(doc.get("dimE", 1)))
        kind = doc["kind"]
        N, dimE = int(doc["N"]), int(doc["dimE"])
        if kind == "atomic":
            atoms = doc["atoms"]
            if not atoms:
                return VectorMeasure.zero(N, dimE)
            pts = [a["point"] for a in atoms]
            w = [np.asarray(a["weight_re"], float) + 1j * np.asarray(a.get("weight_im", [0.0] * dimE), float)
                 for a in atoms]
            return VectorMeasure.atomic(pts, np.array(w).reshape(len(atoms), dimE))
        if kind == "gridded":
            box = np.asarray(doc["box"], float)
            res = tuple(int(n) for n in doc["resolution"])
            re = np.asarray(doc["density_re"], float).reshape((dimE,) + res)
            im = np.asarray(doc.get("density_im", np.zeros_like(re)), float).reshape((dimE,) + res)
            return VectorMeasure.gridded(box[:, 0], box[:, 1], re + 1j * im)
    except InputError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"malformed measure document: {exc}") from None
    raise InputError(f"malformed measure document: unknown kind {doc.get('kind')!r}")


def load_measure(arg: str, N: int = 2, resolution: int = 128, dimE: int = 1) -> VectorMeasure:
    if Path(arg).is_file():
        return parse_measure(read_json(arg))
    return measure_preset(arg, N, resolution, dimE)


# --- manifests -------------------------------------------------------------

@dataclass
class RunManifest:
    command: str
    arguments: dict
    input_digests: dict = field(default_factory=dict)
    seed: int | None = None
    grid: dict = field(default_factory=dict)
    output_paths: list = field(default_factory=list)
    tool_version: str = field(default_factory=tool_version)

    def to_document(self) -> dict:
        return dict(vars(self))


def digests(*args) -> dict:
    """sha256 of every argument that names an existing file."""
    return {str(a): sha256(a) for a in args if a is not None and Path(str(a)).is_file()}
