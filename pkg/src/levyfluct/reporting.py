"""Empirical comparability reports for the paper-style two-sided estimates.

A BoundReport holds, for one inequality, the grid of inputs with both
sides evaluated, the observed ratio range, and a pass/fail verdict against
a declared acceptance band.  Constants in the source estimates are not
numeric, so verdicts are statements about boundedness of ratios across
scales, never about specific values.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["BoundReport"]


def _as_floats(a):
    return [float(v) for v in np.asarray(a).ravel()]


@dataclass
class BoundReport:
    """Grid evidence for one comparability inequality.

    ratio is the per-grid-point quantity whose spread (or range) the
    verdict constrains; band is (lo, hi) on the admissible ratios, where
    either end may be None for one-sided checks.
    """

    inequality: str
    inputs: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    ratio: np.ndarray
    band: tuple = (None, None)
    verdict: bool = False
    extras: dict = field(default_factory=dict)

    @property
    def min_ratio(self) -> float:
        return float(np.min(self.ratio))

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratio))

    @property
    def spread(self) -> float:
        """max/min of the ratio column; the operational reading of "≈"."""
        lo = self.min_ratio
        return float(np.inf) if lo <= 0 else self.max_ratio / lo

    @classmethod
    def from_band(cls, inequality, inputs, lhs, rhs, ratio, band, extras=None):
        ratio = np.asarray(ratio, dtype=float)
        lo, hi = band
        ok = bool(np.all(np.isfinite(ratio)))
        if ok and lo is not None:
            ok = bool(np.min(ratio) >= lo)
        if ok and hi is not None:
            ok = bool(np.max(ratio) <= hi)
        return cls(inequality, np.asarray(inputs, dtype=float),
                   np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float),
                   ratio, band, ok, dict(extras or {}))

    @classmethod
    def from_spread(cls, inequality, inputs, lhs, rhs, ratio, max_spread, extras=None):
        """Verdict: max(ratio)/min(ratio) below max_spread across the grid."""
        ratio = np.asarray(ratio, dtype=float)
        rep = cls(inequality, np.asarray(inputs, dtype=float),
                  np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float),
                  ratio, (None, None), False, dict(extras or {}))
        rep.extras["max_spread"] = float(max_spread)
        rep.verdict = bool(np.all(np.isfinite(ratio)) and np.all(ratio > 0)
                           and rep.spread <= max_spread)
        return rep

    # -- serialization ------------------------------------------------------

    def to_json_dict(self) -> dict:
        out = {
            "inequality": self.inequality,
            "grid": {
                "input": _as_floats(self.inputs),
                "lhs": _as_floats(self.lhs),
                "rhs": _as_floats(self.rhs),
                "ratio": _as_floats(self.ratio),
            },
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "band": [None if b is None else float(b) for b in self.band],
            "verdict": "pass" if self.verdict else "fail",
        }
        if self.extras:
            out["extras"] = _jsonable(self.extras)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    def write_csv(self, path) -> None:
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        if inputs.shape[0] == 1:
            inputs = inputs.T
        n_in = inputs.shape[1]
        header = [f"input{i+1}" for i in range(n_in)] if n_in > 1 else ["input"]
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(header + ["lhs", "rhs", "ratio"])
            for k in range(inputs.shape[0]):
                row = [repr(float(v)) for v in inputs[k]]
                wr.writerow(row + [repr(float(self.lhs.ravel()[k])),
                                   repr(float(self.rhs.ravel()[k])),
                                   repr(float(self.ratio.ravel()[k]))])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _as_floats(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj
