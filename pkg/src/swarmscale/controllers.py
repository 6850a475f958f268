"""The three candidate swarm controllers: CRW, DPO and GP-DPO.

Each controller maps a robot's local observations (own state, sighted
blocks, per-robot pheromone memory, the nest light bearing) to a motion /
task decision.  The decision primitives are numba-compiled so the
simulation loop can call them per robot per tick; they are ordinary
functions from Python's point of view and are unit-tested directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

CRW = "CRW"
DPO = "DPO"
GPDPO = "GP-DPO"
KINDS = (CRW, DPO, GPDPO)

KIND_CODES = {CRW: 0, DPO: 1, GPDPO: 2}

PHEROMONE_CULL = 0.01  # entries below this density are forgotten


@dataclass(frozen=True)
class ControllerParams:
    """Controller kind plus its per-kind parameters.

    sigma_turn: per-tick spread (radians) of the correlated-walk turn noise.
    gamma: pheromone decay factor applied once per aggregation interval.
    p_part: probability of choosing the partitioned task at a task boundary
            (GP-DPO only).
    """

    kind: str
    sigma_turn: float = 0.1
    gamma: float = 0.9
    p_part: float = 0.3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown controller kind {self.kind!r}")
        if self.sigma_turn <= 0:
            raise ValueError("sigma_turn must be positive")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")
        if not 0.0 <= self.p_part <= 1.0:
            raise ValueError("p_part must lie in [0, 1]")

    @property
    def code(self) -> int:
        return KIND_CODES[self.kind]


@njit(cache=True)
def wrap_angle(a):
    """Wrap an angle into (-pi, pi]."""
    while a <= -math.pi:
        a += 2.0 * math.pi
    while a > math.pi:
        a -= 2.0 * math.pi
    return a


@njit(cache=True)
def bearing_to(x, y, tx, ty):
    return math.atan2(ty - y, tx - x)


@njit(cache=True)
def crw_heading(heading, sigma_turn, noise):
    """Correlated random walk: perturb the previous heading by a zero-mean
    wrapped-normal draw.  ``noise`` is a standard-normal sample."""
    return wrap_angle(heading + sigma_turn * noise)


@njit(cache=True)
def turn_toward(heading, desired, max_step):
    """Rotate ``heading`` toward ``desired`` by at most ``max_step`` rad."""
    d = wrap_angle(desired - heading)
    if d > max_step:
        d = max_step
    elif d < -max_step:
        d = -max_step
    return wrap_angle(heading + d)


@njit(cache=True)
def pheromone_sight(dens, seen_x, seen_y, i, block_x, block_y, bstate,
                    x, y, sense_radius):
    """Reinforce robot i's memory with every free block in sensing range:
    density resets to 1.0 at the observed position."""
    r2 = sense_radius * sense_radius
    for b in range(len(bstate)):
        if bstate[b] != 0:  # only free blocks are sighted
            continue
        dx = block_x[b] - x
        dy = block_y[b] - y
        if dx * dx + dy * dy <= r2:
            dens[i, b] = 1.0
            seen_x[i, b] = block_x[b]
            seen_y[i, b] = block_y[b]


@njit(cache=True)
def pheromone_decay(dens, gamma):
    """One interval of exponential decay; cull entries below the threshold."""
    n, m = dens.shape
    for i in range(n):
        for b in range(m):
            if dens[i, b] > 0.0:
                d = dens[i, b] * gamma
                dens[i, b] = d if d >= PHEROMONE_CULL else 0.0


@njit(cache=True)
def best_pheromone_target(dens, seen_x, seen_y, i, x, y):
    """Index of the entry maximizing relevance density/(1+distance), or -1
    if robot i remembers nothing."""
    best = -1
    best_rel = 0.0
    for b in range(dens.shape[1]):
        if dens[i, b] <= 0.0:
            continue
        dx = seen_x[i, b] - x
        dy = seen_y[i, b] - y
        rel = dens[i, b] / (1.0 + math.sqrt(dx * dx + dy * dy))
        if rel > best_rel:
            best_rel = rel
            best = b
    return best


def relevance(density: float, distance: float) -> float:
    """The DPO information-relevance score (isolated so the reading can be
    swapped out in one place)."""
    return density / (1.0 + distance)


def phototaxis_heading(pos: np.ndarray, light: np.ndarray) -> float:
    """Heading straight toward the nest light."""
    return float(bearing_to(pos[0], pos[1], light[0], light[1]))
