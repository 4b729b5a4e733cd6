"""Number formatting and a small JSON writer with fixed float precision."""

from __future__ import annotations

import json
import math

import numpy as np

JSON_DIGITS = 17


def fmt_sig(value, digits: int = 6) -> str:
    """``value`` with ``digits`` significant digits; non-finite values print as ``nan``/``inf``."""
    v = float(value)
    if not math.isfinite(v):
        return str(v)
    return f"{v:.{digits}g}"


def _encode(obj) -> str:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        # JSON has no NaN or infinity
        return fmt_sig(obj, JSON_DIGITS) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    """Serialize with every float written to 17 significant digits (round-trip exact)."""
    return _encode(obj) + "\n"
