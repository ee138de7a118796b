"""Matrix files and report documents.

Both are JSON objects. A matrix file reads::

    {"m": 2, "entries": [[[1.0, 0.0], [0.5, -0.25]],
                         [[0.5, 0.25], [2.0, 0.0]]]}

with every entry a ``[re, im]`` pair, rows in order. Floats are written with
17 significant digits so a write/read round trip is bit-exact; non-finite
values use the ``NaN``/``Infinity`` tokens that :mod:`json` accepts.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
import numbers
from pathlib import Path

import numpy as np

from .errors import InvalidInput, ParseError
from .spectra import HpsmMatrix, validate_hpsm


def _float_token(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def to_plain(obj):
    """Convert results (dataclasses, enums, numpy values, complex numbers)
    into JSON-compatible Python objects. Complex numbers become ``[re, im]``."""
    if isinstance(obj, HpsmMatrix):
        return matrix_document(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_plain(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
            if not f.name.startswith("_")
        }
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        return float(obj)
    if isinstance(obj, numbers.Complex):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def _emit(obj, indent, level, out):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float_token(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, list):
        # short lists of scalars stay on one line (entry pairs, spectra)
        if not obj or all(not isinstance(v, (list, dict)) for v in obj):
            parts = []
            for v in obj:
                _emit(v, indent, level, parts)
            out.append("[" + ", ".join(parts) + "]")
            return
        pad = " " * (indent * (level + 1))
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(" " * (indent * level) + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        pad = " " * (indent * (level + 1))
        out.append("{\n")
        items = list(obj.items())
        for i, (k, v) in enumerate(items):
            out.append(pad + json.dumps(str(k)) + ": ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(" " * (indent * level) + "}")
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    out: list[str] = []
    _emit(to_plain(obj), indent, 0, out)
    return "".join(out) + "\n"


def loads(text: str, source: str = "<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"parse check: {source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def matrix_document(mat) -> dict:
    a = np.asarray(mat, dtype=complex)
    return {
        "m": int(a.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def parse_matrix_document(doc, source: str = "<document>") -> np.ndarray:
    """Turn a decoded matrix document into a complex array, reporting the
    offending field on malformed input."""
    if not isinstance(doc, dict):
        raise ParseError(f"parse check: {source}: top level must be an object with 'm' and 'entries'")
    if "m" not in doc or "entries" not in doc:
        missing = [k for k in ("m", "entries") if k not in doc]
        raise ParseError(f"parse check: {source}: missing field(s) {missing}")
    m = doc["m"]
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ParseError(f"parse check: {source}: field 'm' must be a positive integer, got {m!r}")
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != m:
        raise ParseError(f"parse check: {source}: field 'entries' must hold {m} rows")
    a = np.empty((m, m), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != m:
            raise ParseError(f"parse check: {source}: entries[{i}] must hold {m} [re, im] pairs")
        for j, pair in enumerate(row):
            if not (isinstance(pair, list) and len(pair) == 2 and all(_is_number(v) for v in pair)):
                raise ParseError(f"parse check: {source}: entries[{i}][{j}] must be a [re, im] pair of numbers")
            a[i, j] = complex(pair[0], pair[1])
    return a


def read_matrix_file(path) -> HpsmMatrix:
    """Read and validate a matrix file.

    Raises
    ------
    InvalidInput
        The file cannot be read.
    ParseError
        Malformed JSON or fields; the message gives line/column or the field.
    NotHermitian, NotPositiveSemidefinite, NonFiniteEntry
        Passed through from :func:`permest.spectra.validate_hpsm`.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInput(f"io check: cannot read {path}: {exc.strerror or exc}") from exc
    a = parse_matrix_document(loads(text, str(path)), str(path))
    try:
        return validate_hpsm(a)
    except InvalidInput as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def write_matrix_file(path, mat) -> None:
    Path(path).write_text(dumps(matrix_document(mat)))
