"""Performance-curve data types and curve mathematics.

A curve is a sequence of values sampled once per aggregation interval.  The
two operations every flexibility metric is built from live here: min-max
mapping of a curve onto a target range, and the dynamic-time-warp distance
between two curves.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateCurveError

CUMULATIVE = "cumulative"
INTERVAL_RATE = "interval_rate"
_KINDS = (CUMULATIVE, INTERVAL_RATE)


@dataclass(frozen=True)
class TimeGrid:
    """Shared time discretization: total duration split into equal intervals.

    Every curve entering a single analysis must live on the same grid.
    """

    total_duration: float
    num_intervals: int

    def __post_init__(self):
        if self.total_duration <= 0:
            raise ValueError("total_duration must be positive")
        if self.num_intervals < 2:
            raise ValueError("num_intervals must be >= 2")

    @property
    def interval_seconds(self) -> float:
        return self.total_duration / self.num_intervals

    def times(self) -> np.ndarray:
        """Left-edge time of each interval, in seconds."""
        return np.arange(self.num_intervals) * self.interval_seconds


@dataclass(frozen=True)
class PerformanceCurve:
    """Timestep-indexed performance values plus their sampling metadata."""

    values: tuple
    interval_seconds: float
    kind: str

    def __init__(self, values: Iterable[float], interval_seconds: float,
                 kind: str = INTERVAL_RATE):
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("curve must be non-empty")
        if any(v < 0 for v in vals):
            raise ValueError("curve values must be non-negative")
        if interval_seconds <= 0:
            raise ValueError("interval_seconds must be positive")
        if kind not in _KINDS:
            raise ValueError(f"unknown curve kind {kind!r}")
        if kind == CUMULATIVE:
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise ValueError("cumulative curve must be non-decreasing")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "interval_seconds", float(interval_seconds))
        object.__setattr__(self, "kind", kind)

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def to_rate(self) -> "PerformanceCurve":
        """First difference of a cumulative curve (value at index 0 is kept)."""
        if self.kind != CUMULATIVE:
            return self
        v = self.as_array()
        rate = np.empty_like(v)
        rate[0] = v[0]
        rate[1:] = np.diff(v)
        return PerformanceCurve(rate, self.interval_seconds, INTERVAL_RATE)

    # ------------------------------------------------------------------
    # serialization: CSV `t_index,t_seconds,value` and a small JSON object.
    # Values are printed with 17 significant digits so readers round-trip
    # bit-exactly.
    # ------------------------------------------------------------------
    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_index", "t_seconds", "value"])
        for i, v in enumerate(self.values):
            w.writerow([i, f"{(i + 1) * self.interval_seconds:.17g}",
                        f"{v:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, kind: str) -> "PerformanceCurve":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != ["t_index", "t_seconds", "value"]:
            raise ValueError("bad curve CSV header")
        values = [float(r[2]) for r in rows[1:]]
        if len(rows) < 2:
            raise ValueError("curve CSV has no data rows")
        interval = float(rows[1][1])
        return cls(values, interval, kind)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind,
                           "interval_seconds": self.interval_seconds,
                           "values": list(self.values)})

    @classmethod
    def from_json(cls, text: str) -> "PerformanceCurve":
        d = json.loads(text)
        return cls(d["values"], d["interval_seconds"], d["kind"])


def minmax_map(x: Sequence[float], a: float, b: float) -> np.ndarray:
    """Affine-map curve ``x`` so its minimum lands on ``a`` and its maximum
    on ``b``.  Endpoints are exact: the blend ``a*(1-s) + b*s`` returns ``a``
    and ``b`` bit-for-bit at the extremes.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ValueError("minmax_map: empty curve")
    if b < a:
        raise ValueError("minmax_map: need b >= a")
    lo = x.min()
    hi = x.max()
    if hi == lo:
        if a == b:
            return np.full(x.shape, float(a))
        raise DegenerateCurveError(
            "minmax_map: constant curve has zero range; mapping onto "
            f"[{a}, {b}] is undefined")
    s = (x - lo) / (hi - lo)
    return a * (1.0 - s) + b * s


def dtw(x: Sequence[float], y: Sequence[float]) -> float:
    """Dynamic-time-warp distance with local cost ``|x_i - y_j|``.

    Unconstrained (no warping window); O(len(x) * len(y)).  Zero iff a
    warping path of all-zero local costs exists; symmetric in its arguments.
    """
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    n, m = len(xs), len(ys)
    if n == 0 or m == 0:
        raise ValueError("dtw: curves must be non-empty")
    prev = [0.0] * m
    prev[0] = abs(xs[0] - ys[0])
    for j in range(1, m):
        prev[j] = prev[j - 1] + abs(xs[0] - ys[j])
    for i in range(1, n):
        xi = xs[i]
        cur = [0.0] * m
        cur[0] = prev[0] + abs(xi - ys[0])
        for j in range(1, m):
            best = prev[j]
            if prev[j - 1] < best:
                best = prev[j - 1]
            if cur[j - 1] < best:
                best = cur[j - 1]
            cur[j] = abs(xi - ys[j]) + best
        prev = cur
    return prev[-1]
