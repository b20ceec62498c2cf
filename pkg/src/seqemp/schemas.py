"""JSON schemas of the documents written by the command-line interface."""

from __future__ import annotations

import jsonschema

from .report import SCHEMA_VERSION

_NUM = {"type": ["number", "null"]}
_NUM_MAP = {"type": "object", "additionalProperties": _NUM}
_SEED = {"type": ["array", "null"], "items": {"type": "integer", "minimum": 0}}
_VERSION = {"const": SCHEMA_VERSION}

TEST_REPORT = {
    "type": "object",
    "required": [
        "schema_version", "test", "n", "level", "statistics", "critical_values",
        "p_values", "decisions", "locator", "seed", "config", "warnings", "diagnostics",
    ],
    "properties": {
        "schema_version": _VERSION,
        "test": {"enum": ["setar-threshold", "changepoint"]},
        "n": {"type": "integer", "minimum": 1},
        "level": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "statistics": _NUM_MAP,
        "critical_values": _NUM_MAP,
        "p_values": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0, "maximum": 1}},
        "decisions": {"type": "object", "additionalProperties": {"enum": ["reject", "retain"]}},
        "sigma2": _NUM,
        "locator": {"type": "object"},
        "seed": _SEED,
        "config": {"type": "object"},
        "warnings": {"type": "array", "items": {"type": "string"}},
        "diagnostics": {"type": "object"},
    },
}

QUANTILE_TABLE = {
    "type": "object",
    "required": ["schema_version", "functional", "levels", "quantiles", "reps", "resolution", "seed"],
    "properties": {
        "schema_version": _VERSION,
        "functional": {"enum": ["KS-sup", "CvM-integral", "custom-sup"]},
        "levels": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
        "quantiles": {"type": "array", "items": {"type": "number"}},
        "reps": {"type": "integer", "minimum": 1},
        "resolution": {"type": "integer", "minimum": 1},
        "seed": _SEED,
    },
}

GEN_SIDECAR = {
    "type": "object",
    "required": ["schema_version", "kind", "data_path", "n", "seed", "parameters", "artifact_version"],
    "properties": {
        "schema_version": _VERSION,
        "kind": {"enum": ["setar", "regression"]},
        "data_path": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "seed": _SEED,
        "parameters": {"type": "object"},
        "artifact_version": {"type": "string"},
    },
}

VERIFY_REPORT = {
    "type": "object",
    "required": ["schema_version", "check", "result"],
    "properties": {
        "schema_version": _VERSION,
        "check": {"enum": ["moment", "modulus", "fidi", "entropy"]},
        "result": {"type": ["object", "array"]},
    },
}

SCHEMAS = {
    "test-report": TEST_REPORT,
    "quantile-table": QUANTILE_TABLE,
    "gen-sidecar": GEN_SIDECAR,
    "verify-report": VERIFY_REPORT,
}


def validate(doc: dict, kind: str) -> None:
    """Raise :class:`jsonschema.ValidationError` unless ``doc`` matches schema ``kind``."""
    jsonschema.validate(doc, SCHEMAS[kind])
