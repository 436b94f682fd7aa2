"""Job configuration: schema validation and conversion to library objects."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np
import yaml

from .hardy import Symbol
from .operators import (INFINITE_SPACE, BlockOperator, Coupling, IdempotentOperator,
                        SpaceDim, StructuredOperator)
from .spectra import SpectralSequence, TailStrand, TailTerm, exact

DEFAULT_NS = (8, 32, 128, 512)
DEFAULT_SEED = 0xA11
KINDS = ("classify-structured", "classify-block", "classify-idempotent", "hardy", "gallery", "converge")


class ConfigError(ValueError):
    """Config failed validation."""


_number = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?\d+(\.\d+)?(\s*/\s*\d+)?\s*$"}]}
_complex = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_space = {"oneOf": [{"const": "infinite"}, {"type": "integer", "minimum": 1}]}
_term = {
    "type": "object",
    "additionalProperties": False,
    "required": ["c"],
    "properties": {
        "c": _number,
        "p": {"type": "integer", "minimum": 1},
        "sign": {"enum": [-1, 0, 1]},
        "scale": {"type": "integer", "minimum": 1},
        "shift": {"type": "integer"},
    },
}
_strand = {
    "type": "object",
    "additionalProperties": False,
    "required": ["limit"],
    "properties": {"limit": _number, "terms": {"type": "array", "items": _term}},
}
_sequence = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "head": {"type": "array", "items": _number},
        "strands": {"type": "array", "items": _strand},
    },
}
_matrix = {"type": "array", "items": {"type": "array", "items": _complex}}
_operator = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "space": _space,
        "head": {"type": "array", "items": _number},
        "strands": {"type": "array", "items": _strand},
        "corr": _matrix,
    },
}
_coupling = {
    "type": "object",
    "additionalProperties": False,
    "required": ["type"],
    "properties": {
        "type": {"enum": ["zero", "finite", "diagonal"]},
        "payload": {"oneOf": [_matrix, _sequence]},
    },
}
SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "operator": _operator,
        "a1": _operator,
        "a2": _operator,
        "coupling": _coupling,
        "range_dim": _space,
        "cokernel_dim": _space,
        "symbol": {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                              "minItems": 2, "maxItems": 3}},
        "ns": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "seed": {"type": "integer", "minimum": 0},
        "n_probe": {"type": "integer", "minimum": 1},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "classify-structured"}}},
         "then": {"required": ["operator"]}},
        {"if": {"properties": {"kind": {"const": "classify-block"}}},
         "then": {"required": ["a1", "a2"]}},
        {"if": {"properties": {"kind": {"const": "classify-idempotent"}}},
         "then": {"required": ["coupling"]}},
        {"if": {"properties": {"kind": {"const": "hardy"}}},
         "then": {"required": ["symbol"]}},
    ],
}


@dataclass
class JobConfig:
    kind: str
    raw: dict = field(repr=False)
    ns: tuple[int, ...] = DEFAULT_NS
    seed: int = DEFAULT_SEED
    n_probe: int = 64

    def operator(self) -> StructuredOperator:
        return parse_operator(self.raw["operator"])

    def block(self) -> BlockOperator:
        a1, a2 = parse_operator(self.raw["a1"]), parse_operator(self.raw["a2"])
        x = parse_coupling(self.raw.get("coupling", {"type": "zero"}))
        return BlockOperator(a1, a2, x, n_probe=self.n_probe)

    def idempotent(self) -> IdempotentOperator:
        return IdempotentOperator(parse_coupling(self.raw["coupling"]),
                                  parse_space(self.raw.get("range_dim", "infinite")),
                                  parse_space(self.raw.get("cokernel_dim", "infinite")))

    def symbol(self) -> Symbol:
        return Symbol.from_triples(self.raw["symbol"])


def parse_space(v) -> SpaceDim:
    return INFINITE_SPACE if v == "infinite" else SpaceDim.finite(int(v))


def _parse_complex(v) -> complex:
    if isinstance(v, list):
        return complex(float(exact(v[0])), float(exact(v[1])))
    return complex(float(exact(v)))


def _parse_matrix(rows) -> np.ndarray:
    if not rows:
        return np.zeros((0, 0), complex)
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise ConfigError("matrix rows must have equal length")
    return np.array([[_parse_complex(v) for v in r] for r in rows], dtype=complex)


def _parse_strand(d: dict) -> TailStrand:
    terms = tuple(TailTerm.power(exact(t["c"]), t.get("p", 1), t.get("sign", 1),
                                 t.get("scale", 1), t.get("shift", 0))
                  for t in d.get("terms", ()))
    return TailStrand(exact(d["limit"]), terms)


def parse_sequence(d: dict) -> SpectralSequence:
    return SpectralSequence(tuple(exact(h) for h in d.get("head", ())),
                            tuple(_parse_strand(s) for s in d.get("strands", ())))


def parse_operator(d: dict) -> StructuredOperator:
    space = parse_space(d.get("space", "infinite"))
    seq = parse_sequence(d)
    if space.is_finite and seq.strands:
        raise ConfigError("finite spaces take a head only; tails are not allowed")
    if not space.is_finite and not seq.strands:
        raise ConfigError("infinite spaces need at least one strand")
    try:
        return StructuredOperator(seq, _parse_matrix(d.get("corr", [])), space)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def parse_coupling(d: dict) -> Coupling:
    kind = d["type"]
    payload = d.get("payload")
    if kind == "zero":
        return Coupling.zero()
    if kind == "finite":
        if not isinstance(payload, list):
            raise ConfigError("finite coupling payload must be a matrix")
        return Coupling.finite(_parse_matrix(payload))
    if not isinstance(payload, dict):
        raise ConfigError("diagonal coupling payload must be a sequence")
    seq = parse_sequence(payload)
    if not seq.strands:
        raise ConfigError("diagonal coupling sequences need at least one strand")
    return Coupling.diagonal(seq)


def validate(raw: Any) -> JobConfig:
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {e.message}") from e
    ns = tuple(raw.get("ns", DEFAULT_NS))
    if list(ns) != sorted(ns):
        raise ConfigError("ns must be ascending")
    return JobConfig(raw["kind"], raw, ns, raw.get("seed", DEFAULT_SEED), raw.get("n_probe", 64))


def load(path: str | Path) -> JobConfig:
    """Read a YAML or JSON job file (JSON is a subset of YAML)."""
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {path}: {e}") from e
    return validate(raw)
