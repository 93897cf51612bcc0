"""CSV and JSON serialization for measures, images and scenes.

CSV files carry a header row, use '.' decimals and format floats with
``%.12g``. Each JSON document type has a schema in `SCHEMAS`; loaders
validate against it.
"""

import csv
import io
import json
import math

import jsonschema
import numpy as np

from .model import DiscreteMeasure, NoiseSpec, SamplingGrid, Scene

_number = {"type": "number"}
_positive = {"type": "number", "exclusiveMinimum": 0}

SCENE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "scene",
    "type": "object",
    "required": ["sources", "grid"],
    "properties": {
        "sources": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["position", "amplitude"],
                "properties": {"position": _number, "amplitude": _number},
                "additionalProperties": False,
            },
        },
        "grid": {
            "type": "object",
            "required": ["R", "h"],
            "properties": {"R": _positive, "h": _positive, "omega": _positive},
            "additionalProperties": False,
        },
        "noise": {
            "type": "object",
            "required": ["sigma"],
            "properties": {
                "sigma": {"type": "number", "minimum": 0},
                "model": {"enum": ["uniform", "gaussian", "uniform-experiment", "scaled-gaussian-clipped"]},
                "seed": {"type": "integer"},
            },
            "additionalProperties": False,
        },
    },
}

CONSTRUCTION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "construction",
    "type": "object",
    "required": ["kind", "n", "target", "decoy", "d_solved", "image_distance", "sigma"],
    "properties": {
        "kind": {"enum": ["number", "support"]},
        "n": {"type": "integer", "minimum": 1},
        "target": SCENE_SCHEMA,
        "decoy": SCENE_SCHEMA,
        "d_solved": _positive,
        "image_distance": {"type": "number", "minimum": 0},
        "sigma": _positive,
        "multiple_roots": {"type": "boolean"},
    },
}

DETECTION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "detection",
    "type": "object",
    "required": ["estimated_n", "singular_values", "threshold", "s_used", "coefficients"],
    "properties": {
        "estimated_n": {"type": "integer", "minimum": 0},
        "singular_values": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "threshold": {"type": "number", "minimum": 0},
        "s_used": {"type": "integer", "minimum": 1},
        "coefficients": {"type": "array", "items": _number},
        "moments": {"type": "array", "items": _number},
        "sigma_min": _positive,
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "limit report",
    "type": "object",
    "required": ["n", "s_star", "sigma_min_s_star", "number_upper_bound", "stability_separation",
                 "position_error_constant", "position_error", "srf", "omega"],
    "properties": {
        "n": {"type": "integer", "minimum": 2},
        "s_star": {"type": "integer", "minimum": 0},
        "sigma_min_s_star": _positive,
        "number_upper_bound": _positive,
        "stability_separation": _positive,
        "position_error_constant": _positive,
        "position_error": _positive,
        "music_s": {"type": ["integer", "null"]},
        "music_separation": {"type": ["number", "null"]},
        "d_min": _positive,
        "srf": _positive,
        "omega": _positive,
    },
}

SCHEMAS = {
    "scene": SCENE_SCHEMA,
    "construction": CONSTRUCTION_SCHEMA,
    "detection": DETECTION_SCHEMA,
    "report": REPORT_SCHEMA,
}


def validate(doc, kind):
    jsonschema.validate(doc, SCHEMAS[kind])
    return doc


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12g" % value
    return "" if value is None else str(value)


def write_csv(stream, header, rows):
    writer = csv.writer(stream)
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])


def csv_text(header, rows):
    buf = io.StringIO()
    write_csv(buf, header, rows)
    return buf.getvalue()


def read_csv(stream):
    reader = csv.reader(stream)
    header = next(reader)
    rows = [r for r in reader if r]
    return header, rows


def measure_csv(measure):
    return csv_text(["position", "amplitude"], zip(measure.positions, measure.amplitudes))


def image_csv(grid, values):
    return csv_text(["x", "value"], zip(grid.points, values))


def read_measure_csv(stream):
    header, rows = read_csv(stream)
    if header[:2] != ["position", "amplitude"]:
        raise ValueError("measure CSV needs a 'position,amplitude' header")
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    return DiscreteMeasure(arr[:, 0], arr[:, 1])


def read_image_csv(stream):
    """Read ``x,value`` rows and infer the sampling grid from the first two abscissae."""
    header, rows = read_csv(stream)
    if header[:2] != ["x", "value"]:
        raise ValueError("image CSV needs an 'x,value' header")
    arr = np.array(rows, dtype=float).reshape(-1, 2)
    x = arr[:, 0]
    if x.size < 2:
        raise ValueError("image needs at least two samples")
    h = x[1] - x[0]
    grid = SamplingGrid(-x[0], h)
    if grid.size != x.size or not np.allclose(grid.points, x, rtol=0, atol=1e-9 * max(1.0, abs(x[0]))):
        raise ValueError("image abscissae are not the grid -R, -R+h, ..., R")
    return grid, arr[:, 1]


def scene_to_dict(scene):
    grid = {"R": scene.grid.radius, "h": scene.grid.spacing}
    if scene.grid.omega != 1:
        grid["omega"] = scene.grid.omega
    return {
        "sources": [{"position": float(y), "amplitude": float(a)}
                    for y, a in zip(scene.measure.positions, scene.measure.amplitudes)],
        "grid": grid,
        "noise": {"sigma": scene.noise.sigma, "model": scene.noise.model, "seed": int(scene.noise.seed)},
    }


def scene_from_dict(doc):
    validate(doc, "scene")
    src = doc["sources"]
    measure = DiscreteMeasure([s["position"] for s in src], [s["amplitude"] for s in src])
    g = doc["grid"]
    grid = SamplingGrid(g["R"], g["h"], g.get("omega", 1.0))
    nz = doc.get("noise", {"sigma": 0.0})
    noise = NoiseSpec(nz["sigma"], nz.get("model", "uniform"), nz.get("seed", 0))
    return Scene(measure, grid, noise)


def load_scene(path):
    with open(path) as fh:
        return scene_from_dict(json.load(fh))


def construction_to_dict(pair, kind, n):
    noiseless = NoiseSpec(0.0)
    doc = {
        "kind": kind,
        "n": n,
        "target": scene_to_dict(Scene(pair.target, pair.grid, noiseless)),
        "decoy": scene_to_dict(Scene(pair.decoy, pair.grid, noiseless)),
        "d_solved": pair.d_solved,
        "image_distance": pair.image_distance,
        "sigma": pair.sigma,
        "multiple_roots": pair.multiple_roots,
    }
    return validate(doc, "construction")


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(doc):
    return json.dumps(_clean(doc), indent=2, sort_keys=False) + "\n"
