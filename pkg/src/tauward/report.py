"""Residual records shared by the verification suites."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def jsonable(v):
    """Convert numpy/complex values to plain JSON types; complex -> [re, im]."""
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [jsonable(x) for x in v.tolist()] if v.dtype != object else [jsonable(x) for x in v]
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


@dataclass(frozen=True)
class Check:
    """One identity: |lhs - rhs| (or a supplied residual) against a tolerance."""

    name: str
    lhs: object
    rhs: object
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": jsonable(self.lhs),
            "rhs": jsonable(self.rhs),
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }


def check(name: str, lhs, rhs, tol: float, residual: float | None = None) -> Check:
    if residual is None:
        residual = float(np.max(np.abs(np.asarray(lhs) - np.asarray(rhs))))
    return Check(name, lhs, rhs, float(residual), float(tol))
