"""Canonical JSON files for functions and certificates."""
from __future__ import annotations

import json
from pathlib import Path

from .core import DecompositionCertificate, ShapeError, TernaryFunction


class FormatError(ValueError):
    pass


def dumps(obj) -> str:
    """Compact, key-sorted JSON so equal objects give identical bytes."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def function_to_json(T: TernaryFunction) -> dict:
    return {"p": T.p, "q": T.q, "r": T.r, "s": T.s, "table": T.bitstring()}


def function_from_json(data: dict) -> TernaryFunction:
    try:
        return TernaryFunction.from_bitstring(
            int(data["p"]), int(data["q"]), int(data["r"]), int(data.get("s", 1)), data["table"])
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed function file: {exc}") from exc
    except ShapeError as exc:
        raise FormatError(str(exc)) from exc


def certificate_to_json(D: DecompositionCertificate) -> dict:
    return {"u": D.u, "v": D.v, "a": D.a.tolist(), "b": D.b.tolist(), "t": D.t.tolist()}


def certificate_from_json(data: dict) -> DecompositionCertificate:
    try:
        return DecompositionCertificate(int(data["u"]), int(data["v"]), data["a"], data["b"], data["t"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed certificate file: {exc}") from exc


def read_json(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object")
    return data


def load_function(path) -> TernaryFunction:
    return function_from_json(read_json(path))


def load_certificate(path) -> DecompositionCertificate:
    return certificate_from_json(read_json(path))


def save(path, obj: dict) -> None:
    Path(path).write_text(dumps(obj))
