"""Deterministic discrete-time 2D kinematic foraging simulation.

One `World` is one run: a bounded rectangular arena with a nest region at
the west wall, a block source region at the east wall, an optional central
cache, and N unicycle robots.  Robots are permeable; interference shows up
purely as time spent in avoidance maneuvers, which is exactly what the
interference accounting records.

The hot loop is numba-compiled and consumes pre-generated random-number
buffers drawn from independent child streams (init / movement / role /
respawn) of the run seed, so identical seeds give bit-identical traces and
controllers that ignore a stream leave the others untouched.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .controllers import (ControllerParams, best_pheromone_target,
                          crw_heading, pheromone_decay, pheromone_sight,
                          turn_toward)
from .curves import CUMULATIVE, INTERVAL_RATE, PerformanceCurve, TimeGrid

STATE_EXPLORE = 0
STATE_ACQUIRE = 1
STATE_HOMING = 2
STATE_AVOID = 3

CAUSE_NONE = 0
CAUSE_WALL = 1
CAUSE_ROBOT = 2

DEST_NEST = 0
DEST_CACHE = 1

BLOCK_FREE = 0
BLOCK_CARRIED = 1
BLOCK_CACHED = 2


@dataclass(frozen=True)
class Arena:
    """Rectangular obstacle-free arena with west nest and east block source."""

    width: float
    height: float
    nest_depth: float = 2.0
    source_depth: float = 2.0
    num_blocks: int = 32
    has_cache: bool = False

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("arena dimensions must be positive")
        if self.nest_depth <= 0 or self.source_depth <= 0:
            raise ValueError("region depths must be positive")
        if self.nest_depth + self.source_depth >= self.width:
            raise ValueError("nest and source regions must be disjoint and "
                             "inside the arena")
        if self.num_blocks < 1:
            raise ValueError("num_blocks must be positive")

    @property
    def nest_region(self):
        """(xmin, ymin, xmax, ymax) of the delivery region."""
        return (0.0, 0.0, self.nest_depth, self.height)

    @property
    def source_region(self):
        return (self.width - self.source_depth, 0.0, self.width, self.height)

    @property
    def cache_position(self):
        return (self.width / 2.0, self.height / 2.0)

    @property
    def nest_light(self):
        return (0.0, self.height / 2.0)


@dataclass(frozen=True)
class SimParams:
    """Kinematic and sensing parameters, stated once and overridable."""

    dt: float = 0.1
    interval_seconds: float = 10.0
    speed: float = 1.0
    body_radius: float = 0.1
    pickup_radius: float = 0.2
    sense_radius: float = 2.0
    max_turn_rate: float = 3.0    # rad/s toward a goal bearing
    avoid_turn_rate: float = 3.0  # rad/s away from a threat

    def __post_init__(self):
        if self.dt <= 0 or self.interval_seconds <= 0:
            raise ValueError("dt and interval_seconds must be positive")
        ratio = self.interval_seconds / self.dt
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("interval_seconds must be a multiple of dt")

    @property
    def r_prox(self) -> float:
        """Avoidance trigger radius: twice the robot body radius."""
        return 2.0 * self.body_radius

    @property
    def ticks_per_interval(self) -> int:
        return int(round(self.interval_seconds / self.dt))


@dataclass
class RunTrace:
    """Per-interval record of one run: deliveries and avoidance bookkeeping."""

    config_digest: str
    seed: int
    n_robots: int
    interval_seconds: float
    cum_delivered: np.ndarray
    delivered: np.ndarray
    avoid_robot_s: np.ndarray
    avoid_wall_s: np.ndarray
    avoiding_count: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.cum_delivered) < 0):
            raise ValueError("cumulative delivery sequence must be "
                             "non-decreasing")
        cap = self.n_robots * self.interval_seconds + 1e-9
        if np.any(self.avoid_robot_s + self.avoid_wall_s > cap):
            raise ValueError("per-interval avoidance seconds exceed "
                             "N * interval_seconds")

    @property
    def num_intervals(self) -> int:
        return len(self.cum_delivered)

    def cumulative_curve(self) -> PerformanceCurve:
        return PerformanceCurve(self.cum_delivered, self.interval_seconds,
                                CUMULATIVE)

    def rate_curve(self) -> PerformanceCurve:
        return PerformanceCurve(self.delivered, self.interval_seconds,
                                INTERVAL_RATE)

    CSV_HEADER = ["interval", "cum_delivered", "delivered",
                  "avoid_robot_s", "avoid_wall_s", "avoiding_count"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_HEADER)
        for i in range(self.num_intervals):
            w.writerow([i, int(self.cum_delivered[i]), int(self.delivered[i]),
                        f"{self.avoid_robot_s[i]:.17g}",
                        f"{self.avoid_wall_s[i]:.17g}",
                        int(self.avoiding_count[i])])
        return buf.getvalue()

    def sidecar_json(self) -> str:
        return json.dumps({"config_digest": self.config_digest,
                           "seed": int(self.seed),
                           "n_robots": int(self.n_robots),
                           "interval_seconds": self.interval_seconds},
                          sort_keys=True)

    @classmethod
    def from_csv(cls, text: str, sidecar: str) -> "RunTrace":
        meta = json.loads(sidecar)
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0] != cls.CSV_HEADER:
            raise ValueError("bad trace CSV header")
        data = np.array([[float(v) for v in r] for r in rows[1:]])
        return cls(config_digest=meta["config_digest"], seed=meta["seed"],
                   n_robots=meta["n_robots"],
                   interval_seconds=meta["interval_seconds"],
                   cum_delivered=data[:, 1], delivered=data[:, 2],
                   avoid_robot_s=data[:, 3], avoid_wall_s=data[:, 4],
                   avoiding_count=data[:, 5])


def interference_curve(trace: RunTrace,
                       grid: TimeGrid | None = None) -> PerformanceCurve:
    """Robot-seconds lost to avoidance (any cause) per interval.

    For N = 1 this is wall-only interference by construction.
    """
    if grid is not None:
        if grid.num_intervals != trace.num_intervals or \
                abs(grid.interval_seconds - trace.interval_seconds) > 1e-9:
            raise ValueError("trace does not match the analysis time grid")
    return PerformanceCurve(trace.avoid_robot_s + trace.avoid_wall_s,
                            trace.interval_seconds, INTERVAL_RATE)


@njit(cache=True)
def _run_ticks(kind, n_steps, tick0, dt, ticks_per_interval,
               width, height, nest_depth, source_depth,
               has_cache, cache_x, cache_y, light_x, light_y,
               speed, r_prox, pickup_radius, sense_radius,
               max_turn, avoid_turn, sigma_turn, gamma, p_part,
               throttle, move_noise, role_u, respawn_u, counters,
               pos_x, pos_y, heading, carrying, carry_dest, state, cause,
               mode, dens, seen_x, seen_y, block_x, block_y, bstate,
               cache_ids, cache_meta,
               delivered_i, avoid_robot_s, avoid_wall_s, avoiding_count,
               cum_delivered_i):
    n = pos_x.shape[0]
    nb = bstate.shape[0]
    r_prox2 = r_prox * r_prox
    pick2 = pickup_radius * pickup_radius
    tick_cause = np.zeros(n, dtype=np.int8)
    tick_away = np.zeros(n)
    for step in range(n_steps):
        tick = tick0 + step
        interval = tick // ticks_per_interval
        v_throttle = throttle[tick]

        # -- threat detection against the start-of-tick snapshot.  The
        #    nearest robot wins over a nearby wall so inter-robot
        #    interference is never undercounted.
        for i in range(n):
            xi = pos_x[i]
            yi = pos_y[i]
            nn_j = -1
            nn_d2 = 1.0e30
            for j in range(n):
                if j == i:
                    continue
                dx = pos_x[j] - xi
                dy = pos_y[j] - yi
                d2 = dx * dx + dy * dy
                if d2 < nn_d2:
                    nn_d2 = d2
                    nn_j = j
            if nn_j >= 0 and nn_d2 < r_prox2:
                tick_cause[i] = CAUSE_ROBOT
                tick_away[i] = math.atan2(yi - pos_y[nn_j], xi - pos_x[nn_j])
                continue
            dw = xi
            away = 0.0
            if width - xi < dw:
                dw = width - xi
                away = math.pi
            if yi < dw:
                dw = yi
                away = math.pi / 2.0
            if height - yi < dw:
                dw = height - yi
                away = -math.pi / 2.0
            if dw < r_prox:
                tick_cause[i] = CAUSE_WALL
                tick_away[i] = away
            else:
                tick_cause[i] = CAUSE_NONE

        # -- decisions and kinematic integration
        for i in range(n):
            if tick_cause[i] != CAUSE_NONE:
                state[i] = STATE_AVOID
                cause[i] = tick_cause[i]
                heading[i] = turn_toward(heading[i], tick_away[i],
                                         avoid_turn * dt)
            else:
                cause[i] = CAUSE_NONE
                if carrying[i] >= 0:
                    state[i] = STATE_HOMING
                    if carry_dest[i] == DEST_CACHE:
                        tx = cache_x
                        ty = cache_y
                    else:
                        tx = light_x
                        ty = light_y
                    desired = math.atan2(ty - pos_y[i], tx - pos_x[i])
                    heading[i] = turn_toward(heading[i], desired,
                                             max_turn * dt)
                else:
                    explore = True
                    if kind >= 1:
                        if kind == 2 and mode[i] == 0:
                            # idle task boundary: partition draw
                            if role_u[tick, i, 0] < p_part:
                                if cache_meta[0] > 0:
                                    mode[i] = 2  # collector
                                # empty cache: stay undecided, re-draw next
                                # boundary
                            else:
                                mode[i] = 1  # full-task forager
                        if kind == 2 and mode[i] == 2:
                            desired = math.atan2(cache_y - pos_y[i],
                                                 cache_x - pos_x[i])
                            heading[i] = turn_toward(heading[i], desired,
                                                     max_turn * dt)
                            state[i] = STATE_ACQUIRE
                            explore = False
                        else:
                            t = best_pheromone_target(dens, seen_x, seen_y,
                                                      i, pos_x[i], pos_y[i])
                            if t >= 0:
                                dx = seen_x[i, t] - pos_x[i]
                                dy = seen_y[i, t] - pos_y[i]
                                if dx * dx + dy * dy <= pick2:
                                    bx = block_x[t] - seen_x[i, t]
                                    by = block_y[t] - seen_y[i, t]
                                    stale = bstate[t] != BLOCK_FREE or \
                                        bx * bx + by * by > pick2
                                    if stale:
                                        # arrived and the block is gone
                                        dens[i, t] = 0.0
                                        t = -1
                            if t >= 0:
                                desired = math.atan2(seen_y[i, t] - pos_y[i],
                                                     seen_x[i, t] - pos_x[i])
                                heading[i] = turn_toward(heading[i], desired,
                                                         max_turn * dt)
                                state[i] = STATE_ACQUIRE
                                explore = False
                    if explore:
                        state[i] = STATE_EXPLORE
                        heading[i] = crw_heading(heading[i], sigma_turn,
                                                 move_noise[tick, i])
            sp = speed
            if carrying[i] >= 0:
                sp = speed * (1.0 - v_throttle)
            nx = pos_x[i] + sp * dt * math.cos(heading[i])
            ny = pos_y[i] + sp * dt * math.sin(heading[i])
            clamped = False
            if nx < 0.0:
                nx = 0.0
                clamped = True
            elif nx > width:
                nx = width
                clamped = True
            if ny < 0.0:
                ny = 0.0
                clamped = True
            elif ny > height:
                ny = height
                clamped = True
            pos_x[i] = nx
            pos_y[i] = ny
            if clamped and cause[i] == CAUSE_NONE:
                cause[i] = CAUSE_WALL
                state[i] = STATE_AVOID

        # -- task events, in robot-index order (first robot wins contention)
        for i in range(n):
            if carrying[i] >= 0:
                if carry_dest[i] == DEST_NEST and pos_x[i] <= nest_depth:
                    b = carrying[i]
                    counters[1] += 1
                    delivered_i[interval] += 1
                    carrying[i] = -1
                    mode[i] = 0
                    k = counters[0]
                    counters[0] += 1
                    block_x[b] = width - source_depth + \
                        respawn_u[k, 0] * source_depth
                    block_y[b] = respawn_u[k, 1] * height
                    bstate[b] = BLOCK_FREE
                elif carry_dest[i] == DEST_CACHE:
                    dx = pos_x[i] - cache_x
                    dy = pos_y[i] - cache_y
                    if dx * dx + dy * dy <= pick2:
                        b = carrying[i]
                        carrying[i] = -1
                        mode[i] = 0
                        bstate[b] = BLOCK_CACHED
                        block_x[b] = cache_x
                        block_y[b] = cache_y
                        cache_ids[cache_meta[0]] = b
                        cache_meta[0] += 1
            if carrying[i] < 0:
                if kind == 2 and mode[i] == 2:
                    dx = pos_x[i] - cache_x
                    dy = pos_y[i] - cache_y
                    if dx * dx + dy * dy <= pick2:
                        if cache_meta[0] > 0:
                            cache_meta[0] -= 1
                            b = cache_ids[cache_meta[0]]
                            carrying[i] = b
                            carry_dest[i] = DEST_NEST
                            bstate[b] = BLOCK_CARRIED
                            mode[i] = 0
                        else:
                            mode[i] = 0  # raced to an emptied cache
                else:
                    best = -1
                    bd2 = pick2
                    for b in range(nb):
                        if bstate[b] != BLOCK_FREE:
                            continue
                        dx = block_x[b] - pos_x[i]
                        dy = block_y[b] - pos_y[i]
                        d2 = dx * dx + dy * dy
                        if d2 <= bd2:
                            bd2 = d2
                            best = b
                    if best >= 0:
                        carrying[i] = best
                        bstate[best] = BLOCK_CARRIED
                        dens[i, best] = 0.0
                        dest = DEST_NEST
                        if kind == 2 and has_cache:
                            # acquisition task boundary: partition draw
                            if role_u[tick, i, 1] < p_part:
                                dest = DEST_CACHE
                        carry_dest[i] = dest

        # -- passive sensing feeds the pheromone maps
        if kind >= 1:
            for i in range(n):
                pheromone_sight(dens, seen_x, seen_y, i, block_x, block_y,
                                bstate, pos_x[i], pos_y[i], sense_radius)

        # -- interference accounting
        for i in range(n):
            if state[i] == STATE_AVOID:
                if cause[i] == CAUSE_ROBOT:
                    avoid_robot_s[interval] += dt
                else:
                    avoid_wall_s[interval] += dt
        if (tick + 1) % ticks_per_interval == 0:
            cnt = 0
            for i in range(n):
                if state[i] == STATE_AVOID:
                    cnt += 1
            avoiding_count[interval] = cnt
            cum_delivered_i[interval] = counters[1]
            if kind >= 1:
                pheromone_decay(dens, gamma)


class World:
    """One seeded simulation run, steppable in tick batches."""

    def __init__(self, arena: Arena, params: SimParams,
                 controller: ControllerParams, n_robots: int,
                 duration: float, seed: int,
                 throttle: np.ndarray | None = None,
                 config_digest: str = ""):
        if n_robots < 1:
            raise ValueError("need at least one robot")
        self.arena = arena
        self.params = params
        self.controller = controller
        self.n_robots = n_robots
        self.seed = int(seed)
        self.config_digest = config_digest
        self.total_ticks = int(round(duration / params.dt))
        tpi = params.ticks_per_interval
        if self.total_ticks % tpi != 0:
            raise ValueError("duration must be a whole number of intervals")
        self.num_intervals = self.total_ticks // tpi
        if throttle is None:
            throttle = np.zeros(self.total_ticks)
        if len(throttle) != self.total_ticks:
            raise ValueError("throttle series must cover every tick")
        self._throttle = np.asarray(throttle, dtype=np.float64)
        self._tick = 0

        ss = np.random.SeedSequence(self.seed)
        init_rng, move_rng, role_rng, respawn_rng = (
            np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(4))

        n = n_robots
        self.pos_x = init_rng.uniform(0.0, arena.nest_depth, n)
        self.pos_y = init_rng.uniform(0.0, arena.height, n)
        self.heading = init_rng.uniform(-math.pi, math.pi, n)
        self.carrying = np.full(n, -1, dtype=np.int64)
        self.carry_dest = np.zeros(n, dtype=np.int8)
        self.state = np.zeros(n, dtype=np.int8)
        self.cause = np.zeros(n, dtype=np.int8)
        self.mode = np.zeros(n, dtype=np.int8)

        nb = arena.num_blocks
        sx0 = arena.width - arena.source_depth
        self.block_x = init_rng.uniform(sx0, arena.width, nb)
        self.block_y = init_rng.uniform(0.0, arena.height, nb)
        self.bstate = np.zeros(nb, dtype=np.int8)
        self.cache_ids = np.zeros(nb, dtype=np.int64)
        self.cache_meta = np.zeros(1, dtype=np.int64)

        self.dens = np.zeros((n, nb))
        self.seen_x = np.zeros((n, nb))
        self.seen_y = np.zeros((n, nb))

        self._move_noise = move_rng.standard_normal((self.total_ticks, n))
        self._role_u = role_rng.random((self.total_ticks, n, 2))
        trip = arena.width - arena.nest_depth - arena.source_depth
        min_trip_ticks = max(1, int(trip / (params.speed * params.dt)))
        cap = 2 * (n * (self.total_ticks // min_trip_ticks + 2) + 16)
        self._respawn_u = respawn_rng.random((cap, 2))
        self.counters = np.zeros(2, dtype=np.int64)  # respawn draws, deliveries

        self.delivered_i = np.zeros(self.num_intervals, dtype=np.int64)
        self.avoid_robot_s = np.zeros(self.num_intervals)
        self.avoid_wall_s = np.zeros(self.num_intervals)
        self.avoiding_count = np.zeros(self.num_intervals, dtype=np.int64)
        self.cum_delivered_i = np.zeros(self.num_intervals, dtype=np.int64)

    def step(self, n_ticks: int = 1) -> None:
        """Advance the world by ``n_ticks`` simulation ticks."""
        if self._tick + n_ticks > self.total_ticks:
            raise ValueError("cannot step past the configured duration")
        a, p, c = self.arena, self.params, self.controller
        _run_ticks(c.code, n_ticks, self._tick, p.dt, p.ticks_per_interval,
                   a.width, a.height, a.nest_depth, a.source_depth,
                   a.has_cache, a.cache_position[0], a.cache_position[1],
                   a.nest_light[0], a.nest_light[1],
                   p.speed, p.r_prox, p.pickup_radius, p.sense_radius,
                   p.max_turn_rate, p.avoid_turn_rate,
                   c.sigma_turn, c.gamma, c.p_part,
                   self._throttle, self._move_noise, self._role_u,
                   self._respawn_u, self.counters,
                   self.pos_x, self.pos_y, self.heading, self.carrying,
                   self.carry_dest, self.state, self.cause, self.mode,
                   self.dens, self.seen_x, self.seen_y,
                   self.block_x, self.block_y, self.bstate,
                   self.cache_ids, self.cache_meta,
                   self.delivered_i, self.avoid_robot_s, self.avoid_wall_s,
                   self.avoiding_count, self.cum_delivered_i)
        self._tick += n_ticks
        if self.counters[0] >= len(self._respawn_u):
            raise RuntimeError("respawn RNG buffer exhausted")

    def run(self) -> "RunTrace":
        """Run to the configured duration and return the trace."""
        if self._tick < self.total_ticks:
            self.step(self.total_ticks - self._tick)
        return self.trace()

    def trace(self) -> RunTrace:
        if self._tick != self.total_ticks:
            raise ValueError("trace requested before the run completed")
        return RunTrace(config_digest=self.config_digest, seed=self.seed,
                        n_robots=self.n_robots,
                        interval_seconds=self.params.interval_seconds,
                        cum_delivered=self.cum_delivered_i.astype(float),
                        delivered=self.delivered_i.astype(float),
                        avoid_robot_s=self.avoid_robot_s.copy(),
                        avoid_wall_s=self.avoid_wall_s.copy(),
                        avoiding_count=self.avoiding_count.astype(float))


def simulate_run(arena: Arena, params: SimParams,
                 controller: ControllerParams, n_robots: int,
                 duration: float, seed: int,
                 throttle: np.ndarray | None = None,
                 config_digest: str = "") -> RunTrace:
    world = World(arena, params, controller, n_robots, duration, seed,
                  throttle=throttle, config_digest=config_digest)
    return world.run()
