"""Experiment configuration: INI-style file with sections
[arena], [controller], [experiment], [variance], plus key=value overrides.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, replace

from . import controllers, variance
from .controllers import ControllerParams
from .curves import TimeGrid
from .errors import ConfigError
from .metrics import SizeLadder
from .sim import Arena, SimParams


def _parse_sizes(text: str):
    try:
        return tuple(int(v) for v in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"bad size list {text!r}") from exc


def _parse_kinds(text: str):
    return tuple(k.strip() for k in str(text).split(","))


def _parse_bool(text: str):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    # [arena]
    width: float = 32.0
    height: float = 16.0
    nest_depth: float = 2.0
    source_depth: float = 2.0
    num_blocks: int = 32
    # [controller]
    kinds: tuple = (controllers.CRW,)
    sigma_turn: float = 0.1
    gamma: float = 0.9
    p_part: float = 0.3
    # [experiment]
    sizes: tuple = (1, 2, 4, 8, 16, 32, 64)
    runs: int = 10
    duration: float = 2000.0
    dt: float = 0.1
    interval_seconds: float = 10.0
    master_seed: int = 20260823
    speed: float = 1.0
    body_radius: float = 0.1
    pickup_radius: float = 0.2
    sense_radius: float = 2.0
    max_turn_rate: float = 3.0
    avoid_turn_rate: float = 3.0
    # [variance]
    variance_kind: str = "none"
    beta: float = 0.4
    alpha_fraction: float = 0.5

    def validate(self) -> "ExperimentConfig":
        try:
            SizeLadder(self.sizes)  # powers of two, 1 included
            for kind in self.kinds:
                self.to_controller(kind)
                self.to_arena(kind)
            self.to_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.duration <= 0:
            raise ConfigError("duration must be positive")
        n_int = self.duration / self.interval_seconds
        if abs(n_int - round(n_int)) > 1e-9:
            raise ConfigError("duration must be divisible by the "
                              "aggregation interval")
        if round(n_int) < 2:
            raise ConfigError("need at least two aggregation intervals")
        if self.variance_kind not in ("none",) + variance.KINDS:
            raise ConfigError(f"unknown variance kind "
                              f"{self.variance_kind!r}")
        if self.variance_kind != "none" and not 0.0 < self.beta < 1.0:
            raise ConfigError("beta must lie in (0, 1)")
        if not 0.0 < self.alpha_fraction < 1.0:
            raise ConfigError("alpha_fraction must lie in (0, 1)")
        return self

    # -- derived pieces ------------------------------------------------
    def to_arena(self, kind: str) -> Arena:
        return Arena(width=self.width, height=self.height,
                     nest_depth=self.nest_depth,
                     source_depth=self.source_depth,
                     num_blocks=self.num_blocks,
                     has_cache=(kind == controllers.GPDPO))

    def to_params(self) -> SimParams:
        return SimParams(dt=self.dt, interval_seconds=self.interval_seconds,
                         speed=self.speed, body_radius=self.body_radius,
                         pickup_radius=self.pickup_radius,
                         sense_radius=self.sense_radius,
                         max_turn_rate=self.max_turn_rate,
                         avoid_turn_rate=self.avoid_turn_rate)

    def to_controller(self, kind: str) -> ControllerParams:
        return ControllerParams(kind=kind, sigma_turn=self.sigma_turn,
                                gamma=self.gamma, p_part=self.p_part)

    @property
    def alpha(self) -> float:
        return self.alpha_fraction * self.duration

    @property
    def num_intervals(self) -> int:
        return int(round(self.duration / self.interval_seconds))

    def grid(self) -> TimeGrid:
        return TimeGrid(self.duration, self.num_intervals)

    def throttle_series(self):
        return variance.throttle_series(
            self.variance_kind, self.beta, self.alpha,
            int(round(self.duration / self.dt)), self.dt)

    def variance_profile(self):
        if self.variance_kind == "none":
            return None
        return variance.condition_signals(self.variance_kind, self.beta,
                                          self.alpha, self.grid())

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(asdict(self), sort_keys=True).encode()).hexdigest()

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        d["kinds"] = tuple(d["kinds"])
        d["sizes"] = tuple(d["sizes"])
        return cls(**d)


# field name -> (config attribute, parser), per INI section
_SCHEMA = {
    "arena": {
        "width": ("width", float),
        "height": ("height", float),
        "nest_depth": ("nest_depth", float),
        "source_depth": ("source_depth", float),
        "num_blocks": ("num_blocks", int),
    },
    "controller": {
        "kind": ("kinds", _parse_kinds),
        "sigma_turn": ("sigma_turn", float),
        "gamma": ("gamma", float),
        "p_part": ("p_part", float),
    },
    "experiment": {
        "sizes": ("sizes", _parse_sizes),
        "runs": ("runs", int),
        "duration": ("duration", float),
        "dt": ("dt", float),
        "interval": ("interval_seconds", float),
        "master_seed": ("master_seed", int),
        "speed": ("speed", float),
        "body_radius": ("body_radius", float),
        "pickup_radius": ("pickup_radius", float),
        "sense_radius": ("sense_radius", float),
        "max_turn_rate": ("max_turn_rate", float),
        "avoid_turn_rate": ("avoid_turn_rate", float),
    },
    "variance": {
        "kind": ("variance_kind", str),
        "beta": ("beta", float),
        "alpha_fraction": ("alpha_fraction", float),
    },
}


def _apply(cfg: ExperimentConfig, section: str, key: str,
           value: str) -> ExperimentConfig:
    sect = _SCHEMA.get(section)
    if sect is None:
        raise ConfigError(f"unknown config section [{section}]")
    entry = sect.get(key)
    if entry is None:
        raise ConfigError(f"unknown config field {section}.{key}")
    attr, parse = entry
    try:
        parsed = parse(value)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value for {section}.{key}: {value!r}") \
            from exc
    return replace(cfg, **{attr: parsed})


def load_config(path: str | None = None,
                overrides: dict | None = None) -> ExperimentConfig:
    """Read an INI config file and apply ``section.key=value`` overrides.

    Unknown sections, fields or override keys are errors, never silently
    ignored.  Returns a validated config.
    """
    cfg = ExperimentConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise ConfigError(f"cannot read config file {path}")
        for section in parser.sections():
            for key, value in parser.items(section):
                cfg = _apply(cfg, section, key, value)
    for dotted, value in (overrides or {}).items():
        if "." not in dotted:
            raise ConfigError(f"override key must be section.key, "
                              f"got {dotted!r}")
        section, key = dotted.split(".", 1)
        cfg = _apply(cfg, section, key, value)
    return cfg.validate()
