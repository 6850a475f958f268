"""Temporally varying environmental conditions.

Two step-shaped deviation waveforms (sudden increase / sudden decrease in
adversity) are applied to the simulation as a carry-speed throttle, and are
exposed to the metrics engine as relative-action-cost signals: ideal
conditions cost 1.0, a throttle of v costs 1/(1-v) per carry traverse.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import TimeGrid

STEP_UP = "step_up"
STEP_DOWN = "step_down"
KINDS = (STEP_UP, STEP_DOWN)

COST_LIKE = "cost_like"
PERFORMANCE_LIKE = "performance_like"


def _check_beta(beta: float) -> None:
    if not 0.0 < beta < 1.0:
        raise ValueError(f"amplitude beta must lie in (0, 1), got {beta}")


def step_up(t: float, alpha: float, beta: float) -> float:
    """Sudden increase in adversity at onset ``alpha``: 0 before, beta/2 at
    the onset instant, beta after."""
    _check_beta(beta)
    d = t - alpha
    if d < 0:
        return 0.0
    if d == 0:
        return beta / 2.0
    return beta


def step_down(t: float, alpha: float, beta: float) -> float:
    """Sudden decrease in adversity: the amplitude complement of step_up."""
    return beta - step_up(t, alpha, beta)


_STEP_FUNCS = {STEP_UP: step_up, STEP_DOWN: step_down}


@dataclass(frozen=True, eq=False)
class VarianceProfile:
    """Ideal-condition and deviated-condition signals on one time grid.

    ``ideal`` and ``deviation`` are relative action costs (cost_like:
    larger value = more adverse), so the ideal signal is strictly positive
    and a beneficial deviation is literally ``deviation < ideal``.
    """

    kind: str
    beta: float
    alpha: float
    grid: TimeGrid
    ideal: np.ndarray = field(repr=False)
    deviation: np.ndarray = field(repr=False)
    orientation: str = COST_LIKE

    def __post_init__(self):
        if len(self.ideal) != self.grid.num_intervals \
                or len(self.deviation) != self.grid.num_intervals:
            raise ValueError("profile signals must match the time grid")
        if np.any(self.ideal <= 0):
            raise ValueError("ideal-condition signal must be positive")


def condition_signals(kind: str, beta: float, alpha: float,
                      grid: TimeGrid) -> VarianceProfile:
    """Build the 1-D condition signals for a step profile on ``grid``.

    The signals are sampled at interval left edges.  Throttle v maps to
    relative time cost 1/(1-v) of a carry traverse; v >= 1 would be an
    infinite cost and is rejected.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown variance kind {kind!r}")
    _check_beta(beta)
    f = _STEP_FUNCS[kind]
    times = grid.times()
    vk = np.array([f(t, alpha, beta) for t in times])
    if np.any(vk >= 1.0):
        raise ValueError("throttle >= 1 gives infinite action cost")
    deviation = 1.0 / (1.0 - vk)
    ideal = np.ones_like(deviation)
    return VarianceProfile(kind=kind, beta=beta, alpha=alpha, grid=grid,
                           ideal=ideal, deviation=deviation)


def throttle_series(kind: str | None, beta: float, alpha: float,
                    num_ticks: int, dt: float) -> np.ndarray:
    """Per-tick carry-speed throttle fraction for the simulation loop.

    ``kind`` None (or "none") means no variance: all zeros.
    """
    if kind is None or kind == "none":
        return np.zeros(num_ticks)
    if kind not in KINDS:
        raise ValueError(f"unknown variance kind {kind!r}")
    _check_beta(beta)
    f = _STEP_FUNCS[kind]
    return np.array([f(i * dt, alpha, beta) for i in range(num_ticks)])


def throttled_speed(base_speed: float, carrying: np.ndarray,
                    v: float) -> np.ndarray:
    """Effective per-robot speed cap under throttle fraction ``v``.

    Only robots currently carrying a block are slowed; positions and task
    state are untouched by construction.
    """
    if not 0.0 <= v < 1.0:
        raise ValueError(f"throttle fraction must lie in [0, 1), got {v}")
    caps = np.full(len(carrying), float(base_speed))
    caps[np.asarray(carrying) >= 0] = base_speed * (1.0 - v)
    return caps
