"""Report records and their JSON / CSV serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np


def _finite_exp(log_value: float) -> float:
    if log_value > 709.0:
        return math.inf
    return math.exp(log_value)


@dataclass
class BoundReport:
    """Closed-form bound evaluated in natural-log space.

    ``value`` is the raw expression (``inf`` when it overflows a double), never
    clamped. ``vacuous`` marks probability bounds >= 1 and packing counts below
    two states.
    """

    group: str
    formula_id: str
    log_value: float
    inputs: dict
    vacuous: bool = False
    details: dict = field(default_factory=dict)
    sign: int = 1

    @property
    def value(self) -> float:
        if self.log_value == -math.inf:
            return 0.0
        return self.sign * _finite_exp(self.log_value)

    @property
    def log10_value(self) -> float:
        return self.log_value / math.log(10.0)

    @property
    def clamped(self) -> float:
        """Probability view of the bound, clipped to [0, 1]."""
        return min(max(self.value, 0.0), 1.0)

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "formula_id": self.formula_id,
            "value": _jsonable(self.value),
            "log_value": _jsonable(self.log_value),
            "log10_value": _jsonable(self.log10_value),
            "vacuous": self.vacuous,
            "inputs": _jsonable(self.inputs),
            "details": _jsonable(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _jsonable(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    if hasattr(obj, "to_record"):
        return _jsonable(obj.to_record())
    return obj


def to_jsonable(obj: Any):
    return _jsonable(obj)


def dumps(obj: Any) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False)


def rows_to_csv(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(list(header))
    for row in rows:
        w.writerow([_jsonable(x) for x in row])
    return buf.getvalue()
