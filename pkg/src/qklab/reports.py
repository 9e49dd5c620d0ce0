"""Scenario and report JSON: schema, validation, conversion, persistence.

Complex scalars are ``[re, im]`` pairs and projective points are arrays of
such pairs (a raw lift; it need not be normalized).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .errors import SchemaError
from .lab import Tolerances, UnionScenario
from .sections import ProductSpace, product_space

EXPERIMENTS = ("product_check", "union_check", "separability", "zero_set", "covariant", "lemmas", "selftest")

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_POINT = {"type": "array", "items": _COMPLEX, "minItems": 2}
_POINTS = {"type": "array", "items": _POINT, "minItems": 1}
_PAIR_POINT = {
    "type": "object",
    "required": ["x", "y"],
    "properties": {"x": _POINT, "y": _POINT},
    "additionalProperties": False,
}
_POS_INT = {"type": "integer", "minimum": 1}

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["model", "experiment"],
    "properties": {
        "model": {
            "type": "object",
            "required": ["d1", "k1", "d2", "k2"],
            "properties": {"d1": _POS_INT, "k1": _POS_INT, "d2": _POS_INT, "k2": _POS_INT},
            "additionalProperties": False,
        },
        "experiment": {"enum": list(EXPERIMENTS)},
        "pairs": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["U", "V"],
                "properties": {"U": _POINTS, "V": _POINTS},
                "additionalProperties": False,
            },
        },
        "points": {"type": "array", "items": _PAIR_POINT, "minItems": 1},
        "s0": {"type": "array", "items": _COMPLEX, "minItems": 1},
        "sample_count": _POS_INT,
        "m": _POS_INT,
        "tolerances": {
            "type": "object",
            "properties": {
                "rank_tol": {"type": "number", "exclusiveMinimum": 0},
                "equality_tol": {"type": "number", "exclusiveMinimum": 0},
                "residual_tol": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
        "trials": _POS_INT,
        "exact": {"type": "boolean"},
    },
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"experiment": {"const": "product_check"}}},
         "then": {"required": ["pairs"], "properties": {"pairs": {"maxItems": 1}}}},
        {"if": {"properties": {"experiment": {"const": "union_check"}}},
         "then": {"required": ["pairs"]}},
        {"if": {"properties": {"experiment": {"const": "separability"}}},
         "then": {"anyOf": [{"required": ["pairs"]}, {"required": ["points"]}]}},
    ],
}


@dataclass
class Scenario:
    model: dict
    experiment: str
    payload: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    trials: int | None = None

    def to_json(self) -> dict:
        out = {"model": dict(self.model), "experiment": self.experiment, **self.payload, "seed": self.seed}
        if self.tolerances:
            out["tolerances"] = dict(self.tolerances)
        if self.trials is not None:
            out["trials"] = self.trials
        return out

    @property
    def product(self) -> ProductSpace:
        m = self.model
        return product_space(m["d1"], m["k1"], m["d2"], m["k2"])

    def tolerance_set(self) -> Tolerances:
        return Tolerances(**self.tolerances)


def _pointer(error: jsonschema.ValidationError) -> str:
    path = list(error.absolute_path)
    if error.validator == "required" and isinstance(error.instance, dict):
        missing = [k for k in error.validator_value if k not in error.instance]
        if missing:
            path.append(missing[0])
    return "/" + "/".join(str(p) for p in path) if path else ""


def validate(doc: Any) -> None:
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = list(validator.iter_errors(doc))
    if errors:
        # report the most specific field: deepest pointer, then schema order
        best = max(errors, key=lambda e: (_pointer(e).count("/"), -errors.index(e)))
        raise SchemaError(_pointer(best), best.message)


def scenario_from_json(doc: Any) -> Scenario:
    validate(doc)
    payload = {k: v for k, v in doc.items()
               if k not in ("model", "experiment", "tolerances", "seed", "trials")}
    return Scenario(dict(doc["model"]), doc["experiment"], payload,
                    dict(doc.get("tolerances", {})), int(doc.get("seed", 0)), doc.get("trials"))


def load_scenario(path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from exc
    return scenario_from_json(doc)


def write_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(dumps(scenario.to_json()))


def complex_from_pair(pair) -> complex:
    return complex(pair[0], pair[1])


def complex_to_pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def point_from_json(p) -> list[complex]:
    return [complex_from_pair(c) for c in p]


def point_to_json(p) -> list[list[float]]:
    coords = p.coords if hasattr(p, "coords") else p
    return [complex_to_pair(c) for c in coords]


def section_from_json(coeffs) -> np.ndarray:
    return np.array([complex_from_pair(c) for c in coeffs], dtype=complex)


def section_to_json(coeffs) -> list[list[float]]:
    return [complex_to_pair(c) for c in np.asarray(coeffs).ravel()]


def union_scenario(scenario: Scenario) -> UnionScenario:
    pairs = [([point_from_json(p) for p in pair["U"]], [point_from_json(p) for p in pair["V"]])
             for pair in scenario.payload["pairs"]]
    return UnionScenario(scenario.product, pairs, scenario.tolerance_set(), scenario.seed)


def product_points(scenario: Scenario) -> list[tuple[list[complex], list[complex]]]:
    return [(point_from_json(p["x"]), point_from_json(p["y"])) for p in scenario.payload["points"]]


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_pair(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def write_report(report: dict, path) -> None:
    Path(path).write_text(dumps(report))


def read_report(path) -> dict:
    return json.loads(Path(path).read_text())
