"""Equation-spec files: a JSON document describing one equation, its
history, simulation settings, analysis ranges and an optional certificate.

Example::

    {
      "label": "constant delay",
      "terms": [{"a": "0.25", "h": "t - 1"}],
      "history": {"expr": "2^(-t)", "start": -1},
      "sim": {"T": 30, "Q": 64},
      "analysis": {"n_range": [0, 30], "alpha_grid": 16,
                   "t_scan": {"from": 1, "to": 30, "step": 1}},
      "reference": "2^(-t)"
    }
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import jsonschema

from .analysis.certificate import Certificate
from .engine import EquationSpec, InitialCondition, SimConfig
from .expr import Expression, ExprError, parse
from .trajectory import DEFAULT_Q, GridSpec

__all__ = ["SCHEMA", "SpecFile", "SpecFileError", "load", "loads", "dump", "dumps"]

_EXPR = {"type": "string", "minLength": 1}
_TAIL = {"oneOf": [{"type": "number"}, {"const": "extend"}]}
_SEQ = {"oneOf": [_EXPR, {"type": "array", "items": {"type": "number"}, "minItems": 1}]}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["terms"],
    "additionalProperties": False,
    "properties": {
        "label": {"type": "string"},
        "terms": {
            "type": "array", "minItems": 1,
            "items": {"type": "object", "required": ["a", "h"], "additionalProperties": False,
                      "properties": {"a": _EXPR, "h": _EXPR}},
        },
        "history": {"type": "object", "required": ["expr"], "additionalProperties": False,
                    "properties": {"expr": _EXPR, "start": {"type": "integer", "maximum": 0}}},
        "sim": {"type": "object", "additionalProperties": False,
                "properties": {"T": {"type": "integer", "minimum": 2},
                               "Q": {"type": "integer", "minimum": 2}}},
        "analysis": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "n_range": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                "alpha_grid": {"type": "integer", "minimum": 1},
                "t_scan": {"type": "object", "required": ["from", "to"], "additionalProperties": False,
                           "properties": {"from": {"type": "number", "minimum": 1},
                                         "to": {"type": "number"},
                                         "step": {"type": "number", "exclusiveMinimum": 0}}},
                "g_expr": _EXPR,
            },
        },
        "certificate": {"type": "object", "required": ["u", "V"], "additionalProperties": False,
                        "properties": {"u": _SEQ, "V": _SEQ,
                                       "u_tail": _TAIL, "V_tail": _TAIL}},
        "reference": _EXPR,
    },
}

_DEFAULTS = {
    "label": "",
    "history": {"expr": "1", "start": 0},
    "sim": {"T": 30, "Q": DEFAULT_Q},
    "analysis": {"n_range": [0, 30], "alpha_grid": 16},
}


class SpecFileError(ValueError):
    """Schema violation or an expression that does not parse."""


@dataclass
class SpecFile:
    doc: dict                      # canonical document, defaults filled in
    equation: EquationSpec
    initial: InitialCondition
    sim: SimConfig
    certificate: Certificate | None
    reference: Expression | None
    g_expr: Expression | None

    @property
    def label(self) -> str:
        return self.doc["label"]

    @property
    def n_range(self) -> tuple[int, int]:
        lo, hi = self.doc["analysis"]["n_range"]
        return lo, hi

    @property
    def alpha_grid(self) -> tuple:
        N = self.doc["analysis"]["alpha_grid"]
        return tuple(Fraction(j, N) for j in range(N))

    @property
    def t_scan(self) -> dict | None:
        scan = self.doc["analysis"].get("t_scan")
        if scan is None:
            return None
        return {"from": scan["from"], "to": scan["to"], "step": scan.get("step", 1)}

    def with_overrides(self, T=None, Q=None, alpha_grid=None) -> "SpecFile":
        doc = copy.deepcopy(self.doc)
        if T is not None:
            doc["sim"]["T"] = T
        if Q is not None:
            doc["sim"]["Q"] = Q
        if alpha_grid is not None:
            doc["analysis"]["alpha_grid"] = alpha_grid
        return from_dict(doc)


def _merge_defaults(doc: dict) -> dict:
    out = copy.deepcopy(doc)
    for key, value in _DEFAULTS.items():
        if isinstance(value, dict):
            merged = copy.deepcopy(value)
            merged.update(out.get(key, {}))
            out[key] = merged
        else:
            out.setdefault(key, value)
    return out


def _expr(text: str, where: str) -> Expression:
    try:
        return parse(text)
    except ExprError as exc:
        raise SpecFileError(f"{where}: {exc}") from exc


def from_dict(doc: dict) -> SpecFile:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SpecFileError(f"schema violation at {path}: {exc.message}") from exc
    doc = _merge_defaults(doc)
    terms = tuple((_expr(t["a"], f"terms[{i}].a"), _expr(t["h"], f"terms[{i}].h"))
                  for i, t in enumerate(doc["terms"]))
    lo, hi = doc["analysis"]["n_range"]
    if hi < lo:
        raise SpecFileError(f"analysis.n_range is empty: [{lo}, {hi}]")
    hist = doc["history"]
    initial = InitialCondition(_expr(hist["expr"], "history.expr"), hist.get("start", 0))
    sim = SimConfig(doc["sim"]["T"], GridSpec(doc["sim"]["Q"]))
    cert = None
    if "certificate" in doc:
        c = doc["certificate"]
        seq = [(_expr(c[k], f"certificate.{k}") if isinstance(c[k], str) else c[k]) for k in ("u", "V")]
        cert = Certificate(seq[0], seq[1], c.get("u_tail"), c.get("V_tail"))
    ref = _expr(doc["reference"], "reference") if "reference" in doc else None
    g = doc["analysis"].get("g_expr")
    g = _expr(g, "analysis.g_expr") if g is not None else None
    return SpecFile(doc, EquationSpec(terms, doc["label"]), initial, sim, cert, ref, g)


def loads(text: str) -> SpecFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"not valid JSON: {exc}") from exc
    return from_dict(doc)


def load(path) -> SpecFile:
    return loads(Path(path).read_text())


def dumps(spec: SpecFile) -> str:
    return json.dumps(spec.doc, indent=2, sort_keys=True) + "\n"


def dump(spec: SpecFile, path) -> None:
    Path(path).write_text(dumps(spec))
