"""Deterministic serialization for reports and manifests.

Floating-point values are rendered with 17 significant digits so that a
run is byte-reproducible from its configuration and inputs.
"""
from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np


def _normalize(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_normalize(v) for v in obj.tolist()]
    # bool is a subclass of int, so it must be tested first
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _write(obj: Any, parts: list[str]) -> None:
    if obj is None:
        parts.append("null")
    elif isinstance(obj, bool):
        parts.append("true" if obj else "false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        parts.append(format(obj, ".17g"))
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, list):
        parts.append("[")
        for i, v in enumerate(obj):
            if i:
                parts.append(",")
            _write(v, parts)
        parts.append("]")
    elif isinstance(obj, dict):
        parts.append("{")
        for i, k in enumerate(sorted(obj)):
            if i:
                parts.append(",")
            parts.append(json.dumps(k))
            parts.append(":")
            _write(obj[k], parts)
        parts.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def json_text(obj: Any) -> str:
    parts: list[str] = []
    _write(_normalize(obj), parts)
    return "".join(parts)


def json_load(text: str) -> Any:
    return json.loads(text)


def stable_hash(obj: Any) -> str:
    return hashlib.sha256(json_text(obj).encode()).hexdigest()


def csv_text(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(format(float(v), ".17g"))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
