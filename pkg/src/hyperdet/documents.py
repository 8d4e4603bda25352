"""JSON tensor documents read and written by the command line.

A document is ``{"shape": [...], "data": [...], "symmetric": bool?}`` where
``data`` lists the entries with the first axis varying fastest.  Entries are
all plain numbers, all exact rationals (``"p/q"`` strings, optionally mixed
with integers) or all ``[real, imag]`` pairs.
"""

from __future__ import annotations

import json
import math
import numbers
from fractions import Fraction

import numpy as np

from . import core
from .core import Hypermatrix
from .errors import BackendError, HyperdetError, ShapeError

FIRST_AXIS_FASTEST = "first-axis-fastest"
LAST_AXIS_FASTEST = "last-axis-fastest"
LAYOUTS = (FIRST_AXIS_FASTEST, LAST_AXIS_FASTEST)


class DocumentError(HyperdetError, ValueError):
    """A tensor or state document could not be parsed."""


def _entry_kind(x) -> str:
    if isinstance(x, bool):
        return "invalid"
    if isinstance(x, numbers.Integral):
        return "integer"
    if isinstance(x, numbers.Real):
        return "float"
    if isinstance(x, str):
        return "rational"
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, numbers.Real) and not isinstance(v, bool) for v in x
    ):
        return "complex"
    return "invalid"


def loads_json(text: str, source: str = "<input>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DocumentError(f"{source}: top level must be a JSON object")
    return doc


def parse_tensor(doc: dict, backend: str | None = None, layout: str = FIRST_AXIS_FASTEST):
    """Return ``(hypermatrix, symmetric_hint)`` from a parsed document."""
    if layout not in LAYOUTS:
        raise DocumentError(f"unknown layout {layout!r}")
    for field in ("shape", "data"):
        if field not in doc:
            raise DocumentError(f"missing field {field!r}")
    shape, data = doc["shape"], doc["data"]
    if not isinstance(shape, list) or not shape or not all(
        isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in shape
    ):
        raise DocumentError(f"field 'shape' must be a nonempty list of positive integers, got {shape!r}")
    if not isinstance(data, list):
        raise DocumentError("field 'data' must be a list")
    if len(data) != math.prod(shape):
        raise DocumentError(
            f"field 'data' has {len(data)} entries, shape {shape} needs {math.prod(shape)}"
        )
    hint = doc.get("symmetric")
    if hint is not None and not isinstance(hint, bool):
        raise DocumentError("field 'symmetric' must be a boolean")

    kinds = [_entry_kind(x) for x in data]
    for k, kind in enumerate(kinds):
        if kind == "invalid":
            raise DocumentError(f"data[{k}] = {data[k]!r} is not a number, 'p/q' string or [re, im] pair")
    present = set(kinds)
    # integers are exact, so they may accompany "p/q" strings
    if len(present - {"integer"}) > 1 or ("complex" in present and len(present) > 1):
        raise DocumentError(f"data mixes entry kinds {sorted(present)}")

    if "complex" in kinds:
        natural = core.COMPLEX128
        values = [complex(re, im) for re, im in data]
    elif "float" in kinds:
        natural = core.FLOAT64
        values = [float(x) for x in data]
    else:
        natural = core.RATIONAL
        values = []
        for k, x in enumerate(data):
            try:
                values.append(Fraction(x) if isinstance(x, str) else Fraction(int(x)))
            except (ValueError, ZeroDivisionError):
                raise DocumentError(f"data[{k}] = {x!r} is not a valid rational 'p/q'") from None

    target = backend or natural
    if target != natural:
        if natural == core.RATIONAL and target in (core.FLOAT64, core.COMPLEX128):
            values = [float(v) if target == core.FLOAT64 else complex(v) for v in values]
        elif natural == core.FLOAT64 and target == core.COMPLEX128:
            values = [complex(v) for v in values]
        else:
            raise DocumentError(f"{natural} entries cannot be read with the {target} backend")

    try:
        if layout == LAST_AXIS_FASTEST:
            arr = np.empty(len(values), dtype=object)
            arr[:] = values
            A = Hypermatrix(arr.reshape(shape, order="C"), target)
        else:
            A = Hypermatrix.from_flat(shape, values, target)
    except (BackendError, ShapeError) as exc:
        raise DocumentError(str(exc)) from None
    return A, hint


def tensor_document(A: Hypermatrix, symmetric: bool | None = None) -> dict:
    """Inverse of :func:`parse_tensor` for the first-axis-fastest layout."""
    if A.backend == core.RATIONAL:
        data = [
            int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
            for x in A.tolist()
        ]
    elif A.backend == core.FLOAT64:
        data = A.tolist()
    else:
        data = [[x.real, x.imag] for x in A.tolist()]
    doc = {"shape": list(A.shape), "data": data}
    if symmetric is not None:
        doc["symmetric"] = symmetric
    return doc


def format_scalar(x) -> str:
    """``p/q`` for rationals (``p`` when integral); shortest round-trip repr for floats."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, complex):
        return repr(x)
    return repr(float(x))
