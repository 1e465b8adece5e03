"""JSON data documents, published schemas, and deterministic serialization."""

from __future__ import annotations

import csv
import io
import json
from typing import Any

import jsonschema
import numpy as np

from .core import ElementSequence
from .errors import DomainError
from .spaces import DiscreteMeasure1D, FiniteCompactSet, HermitePair

NUMBER_ARRAY = {"type": "array", "items": {"type": "number"}, "minItems": 1}

POINTS_SCHEMA = {
    "type": "object",
    "required": ["space", "dim", "closed", "points"],
    "properties": {
        "space": {"enum": ["euclidean", "sphere"]},
        "dim": {"type": "integer", "minimum": 1},
        "closed": {"type": "boolean"},
        "points": {"type": "array", "items": NUMBER_ARRAY, "minItems": 1},
    },
    "additionalProperties": False,
}

HERMITE_SCHEMA = {
    "type": "object",
    "required": ["pairs"],
    "properties": {
        "space": {"enum": ["hermite", "hermite-product"]},
        "closed": {"type": "boolean"},
        "pairs": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "required": ["p", "v"], "additionalProperties": False,
                      "properties": {"p": NUMBER_ARRAY, "v": NUMBER_ARRAY}},
        },
    },
    "additionalProperties": False,
}

SETS_SCHEMA = {
    "type": "object",
    "required": ["sets"],
    "properties": {
        "space": {"const": "sets"},
        "closed": {"type": "boolean"},
        "sets": {"type": "array", "minItems": 1,
                 "items": {"type": "array", "minItems": 1, "items": NUMBER_ARRAY}},
    },
    "additionalProperties": False,
}

MEASURES_SCHEMA = {
    "type": "object",
    "required": ["measures"],
    "properties": {
        "space": {"const": "wasserstein"},
        "closed": {"type": "boolean"},
        "measures": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "required": ["atoms"], "additionalProperties": False,
                      "properties": {"atoms": {
                          "type": "array", "minItems": 1,
                          "items": {"type": "object", "required": ["x", "w"],
                                    "additionalProperties": False,
                                    "properties": {"x": {"type": "number"},
                                                   "w": {"type": "number", "exclusiveMinimum": 0}}},
                      }}},
        },
    },
    "additionalProperties": False,
}

DATA_SCHEMAS = {"points": POINTS_SCHEMA, "hermite": HERMITE_SCHEMA, "sets": SETS_SCHEMA,
                "measures": MEASURES_SCHEMA}

SPACE_FORMAT = {"euclidean": "points", "sphere": "points", "hermite": "hermite",
                "hermite-product": "hermite", "sets": "sets", "wasserstein": "measures"}

_NUM_OR_NULL = {"type": ["number", "null"]}
_NUM_LIST = {"type": "array", "items": _NUM_OR_NULL}
_TABLE = {"type": "object", "additionalProperties": _NUM_OR_NULL}


def _obj(required: dict, optional: dict | None = None) -> dict:
    props = dict(required, **(optional or {}))
    return {"type": "object", "required": sorted(required), "properties": props}


REPORT_SCHEMAS = {
    "contractivity": _obj({"mu": _TABLE, "best_L": {"type": ["integer", "null"]},
                           "best_mu": _NUM_OR_NULL, "deltas": _NUM_LIST, "C_P": _NUM_OR_NULL,
                           "degenerate": {"type": "boolean"}}),
    "displacement": _obj({"C_S": {"type": "number", "minimum": 0}, "per_level": _NUM_LIST}),
    "proximity1": _obj({"scales": _NUM_LIST, "deltas": _NUM_LIST, "sups": _NUM_LIST,
                        "exponent": _NUM_OR_NULL, "constant": _NUM_OR_NULL,
                        "residual": _NUM_OR_NULL, "identical": {"type": "boolean"},
                        "mu": {"type": "number"}, "admissible_delta": _NUM_OR_NULL,
                        "mu_W": _NUM_OR_NULL},
                       {"bound_constant": _NUM_OR_NULL, "bound_exponent": _NUM_OR_NULL,
                        "bound_ok": {"type": "array", "items": {"type": "boolean"}}}),
    "proximity2": _obj({"errors": _NUM_LIST, "ratios": _NUM_LIST, "eta": _NUM_OR_NULL,
                        "order": {"type": ["integer", "null"]}, "E": _NUM_OR_NULL,
                        "burn_in": {"type": "integer"}, "L": {"type": "integer"},
                        "identical": {"type": "boolean"}}),
    "cauchy": _obj({"distances": _NUM_LIST, "ratios": _NUM_LIST, "rate": _NUM_OR_NULL}),
    "divided-diff": _obj({"mu_delta": _TABLE, "deltas": _NUM_LIST, "start": {"type": "integer"},
                          "degenerate": {"type": "boolean"}},
                         {"level_distances": _NUM_LIST}),
    "approx-order": _obj({"hs": _NUM_LIST, "errors": _NUM_LIST, "bounds": _NUM_LIST,
                          "violations": {"type": "array", "items": {"type": "integer"}},
                          "ratios": _NUM_LIST, "slope": _NUM_OR_NULL,
                          "lipschitz_checked": {"type": "boolean"}}),
    "locality": _obj({"spread": {"type": "integer"}, "differing": {"type": "integer"},
                      "bound": {"type": "integer"}}),
}

ANALYSIS_KINDS = tuple(REPORT_SCHEMAS)

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["space", "scheme", "data"],
    "properties": {
        "space": {"type": "object", "required": ["id"],
                  "properties": {"id": {"type": "string"}, "params": {"type": "object"}}},
        "scheme": {"type": "object", "required": ["id"],
                   "properties": {"id": {"type": "string"}, "params": {"type": "object"}}},
        "data": {"oneOf": [
            {"type": "object", "required": ["inline"],
             "properties": {"inline": {"type": "object"}}},
            {"type": "object", "required": ["file"], "properties": {"file": {"type": "string"}}},
            {"type": "object", "required": ["generator", "seed"],
             "properties": {"generator": {"type": "string"},
                            "seed": {"type": "integer", "minimum": 0,
                                     "maximum": 2**64 - 1},
                            "params": {"type": "object"}}},
        ]},
        "levels": {"type": "integer", "minimum": 0},
        "analyses": {"type": "array", "items": {
            "type": "object", "required": ["kind"],
            "properties": {"kind": {"enum": list(ANALYSIS_KINDS)},
                           "params": {"type": "object"}}}},
        "output": {"type": "object", "properties": {
            "dir": {"type": "string"}, "dump_levels": {"type": "boolean"},
            "traces": {"type": "boolean"}}},
    },
    "additionalProperties": False,
}

BUNDLE_SCHEMA = {
    "type": "object",
    "required": ["config_echo", "config", "reports", "version"],
    "properties": {
        "config_echo": {"type": "string"},
        "config": {"type": "object"},
        "version": {"type": "string"},
        "levels": {"type": "array"},
        "trims": {"type": "array"},
        "reports": {"type": "object",
                    "properties": {k: v for k, v in REPORT_SCHEMAS.items()}},
    },
}


def all_schemas() -> dict:
    return {"data": DATA_SCHEMAS, "reports": REPORT_SCHEMAS, "config": CONFIG_SCHEMA,
            "bundle": BUNDLE_SCHEMA}


_VALIDATORS: dict[int, tuple[dict, Any]] = {}


def _validator(schema: dict):
    # keyed by identity; the cached entry keeps the schema alive so ids are never reused
    hit = _VALIDATORS.get(id(schema))
    if hit is None or hit[0] is not schema:
        cls = jsonschema.validators.validator_for(schema)
        cls.check_schema(schema)
        hit = _VALIDATORS[id(schema)] = (schema, cls(schema))
    return hit[1]


def validate(instance: Any, schema: dict, what: str = "document"):
    err = jsonschema.exceptions.best_match(_validator(schema).iter_errors(instance))
    if err is not None:
        path = "/".join(str(p) for p in err.absolute_path)
        raise DomainError(f"invalid {what}: {err.message}", path=path)


def dumps(obj: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _floats(a) -> list:
    return np.asarray(a, dtype=float).tolist()


def detect_format(doc: dict) -> str:
    for fmt, key in (("points", "points"), ("hermite", "pairs"), ("sets", "sets"),
                     ("measures", "measures")):
        if key in doc:
            return fmt
    raise DomainError("unrecognized data document", keys=sorted(doc))


def encode(space_id: str, P: ElementSequence) -> dict:
    """Data document for a sequence of elements of the given space."""
    fmt = SPACE_FORMAT.get(space_id)
    if fmt is None:
        raise DomainError(f"unknown space id {space_id!r}", space=space_id)
    closed = bool(P.closed)
    if fmt == "points":
        pts = [_floats(p) for p in P]
        return {"space": space_id, "dim": len(pts[0]), "closed": closed, "points": pts}
    if fmt == "hermite":
        return {"space": space_id, "closed": closed,
                "pairs": [{"p": _floats(x.p), "v": _floats(x.v)} for x in P]}
    if fmt == "sets":
        return {"space": space_id, "closed": closed, "sets": [_floats(A.points) for A in P]}
    return {"space": space_id, "closed": closed,
            "measures": [{"atoms": [{"x": x, "w": w} for x, w in
                                    zip(_floats(m.locations), _floats(m.masses))]} for m in P]}


def decode(doc: dict) -> tuple[str, ElementSequence]:
    """Parse and validate a data document; returns (space id, sequence)."""
    if not isinstance(doc, dict):
        raise DomainError("data document must be a JSON object")
    fmt = detect_format(doc)
    validate(doc, DATA_SCHEMAS[fmt], f"{fmt} document")
    closed = doc.get("closed", False)
    if fmt == "points":
        if any(len(p) != doc["dim"] for p in doc["points"]):
            raise DomainError("point dimension disagrees with 'dim'", dim=doc["dim"])
        els = [np.asarray(p, dtype=float) for p in doc["points"]]
        return doc["space"], ElementSequence(els, closed)
    if fmt == "hermite":
        els = [HermitePair(np.asarray(q["p"], float), np.asarray(q["v"], float))
               for q in doc["pairs"]]
        return doc.get("space", "hermite"), ElementSequence(els, closed)
    if fmt == "sets":
        return "sets", ElementSequence([FiniteCompactSet(np.asarray(s, float))
                                        for s in doc["sets"]], closed)
    els = [DiscreteMeasure1D([a["x"] for a in m["atoms"]], [a["w"] for a in m["atoms"]])
           for m in doc["measures"]]
    return "wasserstein", ElementSequence(els, closed)


def roundtrip(text: str) -> str:
    space_id, P = decode(json.loads(text))
    return dumps(encode(space_id, P))


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else repr(float(v)) if isinstance(v, float) else v
                    for v in row])
    return buf.getvalue()
