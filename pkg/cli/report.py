"""
Analysis Report
Serializable summary of bounds, existence verdict, dominant point and certificate.
Floats are written with 17 significant digits, so a report reloads to
bit-identical values.
"""

import json
import math
import re
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from solver.steady_state import Bounds, ExistenceVerdict, StabilityCertificate


def _list(v) -> Optional[List[float]]:
    return None if v is None else [float(x) for x in v]


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be written to JSON")
    text = format(x, ".17g")
    # keep integral values recognisable as reals
    return text if ("." in text or "e" in text) else text + ".0"


def dumps(data: Any, indent: Optional[int] = 2) -> str:
    """json.dumps with every float printed at 17 significant digits"""
    floats: List[str] = []

    def mark(value: Any) -> Any:
        if isinstance(value, float):
            floats.append(_format_float(value))
            return f"__float_{len(floats) - 1}__"
        if isinstance(value, dict):
            return {key: mark(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [mark(item) for item in value]
        return value

    text = json.dumps(mark(data), indent=indent)
    return re.sub(r'"__float_(\d+)__"', lambda m: floats[int(m.group(1))], text)


@dataclass
class Report:
    problem: Dict[str, Any]
    tol: float
    budget: int
    bounds: Dict[str, Any]
    verdict: Dict[str, Any]
    dominant: Optional[List[float]] = None
    certificate: Optional[Dict[str, Any]] = None
    fixed_points: Optional[List[List[float]]] = None
    timing: Dict[str, float] = field(default_factory=dict)

    # ==============================
    # BUILDERS
    # ==============================

    @staticmethod
    def bounds_section(b: Bounds) -> Dict[str, Any]:
        return {
            "delta": _list(b.delta),
            "y_min": _list(b.y_min),
            "y_max": _list(b.y_max),
            "necessary_ok": b.necessary_ok,
            "diagonal_fixed": b.diagonal_fixed,
        }

    @staticmethod
    def verdict_section(v: ExistenceVerdict) -> Dict[str, Any]:
        return {
            "outcome": v.outcome.value,
            "reason": v.reason,
            "witness_step": v.witness_step,
            "witness": _list(v.witness),
            "iterations": v.trace.iterations if v.trace is not None else None,
        }

    @staticmethod
    def certificate_section(c: Optional[StabilityCertificate]) -> Optional[Dict[str, Any]]:
        if c is None:
            return None
        return {"rho": float(c.rho), "classification": c.classification.value}

    # ==============================
    # SERIALIZATION
    # ==============================

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Report":
        return cls(**data)

    def to_json(self, indent: Optional[int] = 2) -> str:
        return dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def without_timing(self) -> Dict[str, Any]:
        data = self.to_dict()
        data.pop("timing")
        return data
