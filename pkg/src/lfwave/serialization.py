"""Versioned JSON documents for trees, sets, masks, families and systems.

Every document carries ``"format": "lfwave/1"`` and a ``"kind"``; the
payload is checked against a small JSON Schema before it is decoded.
Output is deterministic: keys sorted, floats written by ``repr``.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .errors import SchemaError
from .mra import Mask, MRAFamily
from .spectral import ElementarySet, SpectralStepFunction
from .trees import ValidTree
from .wavelets import WaveletSystem

FORMAT = "lfwave/1"

_digits = {"type": "array", "items": {"type": "integer", "minimum": 0}}
_addr = {
    "type": "object",
    "required": ["base", "digits"],
    "properties": {
        "base": {"type": "integer"},
        "digits": {"type": "object", "additionalProperties": _digits},
    },
}
_step = {
    "type": "object",
    "required": ["p", "s", "base", "values"],
    "properties": {
        "p": {"type": "integer", "minimum": 2},
        "s": {"type": "integer", "minimum": 1},
        "base": {"type": "integer"},
        "values": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["addr", "re", "im"],
                "properties": {"addr": _addr, "re": {"type": "number"}, "im": {"type": "number"}},
            },
        },
    },
}
_params = {
    "p": {"type": "integer", "minimum": 2},
    "s": {"type": "integer", "minimum": 1},
    "N": {"type": "integer", "minimum": 1},
}
_tree = {
    "type": "object",
    "required": ["p", "s", "N", "nodes"],
    "properties": {
        **_params,
        "nodes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["id", "label", "parent", "children"],
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "label": _digits,
                    "parent": {"type": ["integer", "null"]},
                    "children": {"type": "array", "items": {"type": "integer"}},
                },
            },
        },
    },
}
_mask = {
    "type": "object",
    "required": ["N", "A", "B", "values"],
    "properties": {
        "N": {"type": "integer", "minimum": 1},
        "A": {"type": "number", "exclusiveMinimum": 0},
        "B": {"type": "number", "exclusiveMinimum": 0},
        "tree_id": {"type": ["string", "null"]},
        "values": _step,
    },
}
_family = {
    "type": "object",
    "required": ["H", "mask", "dual", "phi_hat", "dual_phi_hat"],
    "properties": {
        "H": {"type": "integer", "minimum": 1},
        "mask": _mask,
        "dual": _mask,
        "phi_hat": _step,
        "dual_phi_hat": _step,
        "tree": {"anyOf": [_tree, {"type": "null"}]},
    },
}
_labelled = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["label", "mask", "dual_mask", "psi_hat", "dual_psi_hat"],
        "properties": {
            "label": _digits,
            "mask": _step,
            "dual_mask": _step,
            "psi_hat": _step,
            "dual_psi_hat": _step,
        },
    },
}

SCHEMAS = {
    "tree": _tree,
    "set": {
        "type": "object",
        "required": ["p", "s", "N", "M", "cosets"],
        "properties": {**_params, "M": {"type": "integer"}, "cosets": {"type": "array", "items": _addr}},
    },
    "mask": _mask,
    "family": _family,
    "system": {
        "type": "object",
        "required": ["family", "wavelets"],
        "properties": {"family": _family, "wavelets": _labelled},
    },
    "report": {"type": "object", "required": ["passed", "checks"]},
}


def family_to_json(f: MRAFamily) -> dict:
    return {
        "H": f.H,
        "mask": f.mask.to_json(),
        "dual": f.dual.to_json(),
        "phi_hat": f.phi_hat.to_json(),
        "dual_phi_hat": f.dual_phi_hat.to_json(),
        "tree": None if f.tree is None else f.tree.to_json(),
        "riesz_bounds": list(f.bounds()),
    }


def family_from_json(data: dict) -> MRAFamily:
    tree = data.get("tree")
    return MRAFamily(
        Mask.from_json(data["mask"]),
        Mask.from_json(data["dual"]),
        SpectralStepFunction.from_json(data["phi_hat"]),
        SpectralStepFunction.from_json(data["dual_phi_hat"]),
        int(data["H"]),
        None if tree is None else ValidTree.from_json(tree),
    )


def system_to_json(sys: WaveletSystem) -> dict:
    return {
        "family": family_to_json(sys.family),
        "wavelets": [
            {
                "label": list(l),
                "mask": sys.masks[l].to_json(),
                "dual_mask": sys.dual_masks[l].to_json(),
                "psi_hat": sys.psi_hat[l].to_json(),
                "dual_psi_hat": sys.dual_psi_hat[l].to_json(),
            }
            for l in sys.labels
        ],
    }


def system_from_json(data: dict) -> WaveletSystem:
    fam = family_from_json(data["family"])
    parts = {k: {} for k in ("mask", "dual_mask", "psi_hat", "dual_psi_hat")}
    for item in data["wavelets"]:
        l = tuple(int(d) for d in item["label"])
        for k in parts:
            parts[k][l] = SpectralStepFunction.from_json(item[k])
    return WaveletSystem(fam, parts["mask"], parts["dual_mask"], parts["psi_hat"], parts["dual_psi_hat"])


_ENCODE = {
    "tree": lambda x: x.to_json(),
    "set": lambda x: x.to_json(),
    "mask": lambda x: x.to_json(),
    "family": family_to_json,
    "system": system_to_json,
    "report": lambda x: x.to_json() if hasattr(x, "to_json") else x,
}
_DECODE = {
    "tree": ValidTree.from_json,
    "set": ElementarySet.from_json,
    "mask": Mask.from_json,
    "family": family_from_json,
    "system": system_from_json,
    "report": lambda d: d,
}


def envelope(kind: str, obj) -> dict:
    return {"format": FORMAT, "kind": kind, **_ENCODE[kind](obj)}


def dumps(kind: str, obj) -> str:
    return json.dumps(envelope(kind, obj), sort_keys=True, indent=2) + "\n"


def validate_document(data, kind: str | None = None) -> str:
    """Check header and schema; returns the document kind."""
    if not isinstance(data, dict):
        raise SchemaError("document must be a JSON object")
    if data.get("format") != FORMAT:
        raise SchemaError(f"expected format {FORMAT!r}, got {data.get('format')!r}")
    found = data.get("kind")
    if found not in SCHEMAS:
        raise SchemaError(f"unknown kind {found!r}")
    if kind is not None and found != kind:
        raise SchemaError(f"expected a {kind} document, got {found}")
    try:
        jsonschema.validate(data, SCHEMAS[found])
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"{found}: {exc.message} at /{'/'.join(map(str, exc.absolute_path))}") from None
    return found


def loads(text: str, kind: str | None = None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    found = validate_document(data, kind)
    try:
        return _DECODE[found](data)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{found}: malformed payload ({exc})") from None


def load(path, kind: str | None = None):
    return loads(Path(path).read_text(encoding="utf-8"), kind)


def save(path, kind: str, obj) -> None:
    Path(path).write_text(dumps(kind, obj), encoding="utf-8")
