"""Batch orchestration: seeded repeated runs over the size ladder and
controllers, pointwise-mean averaging, and the on-disk batch layout

    out/<batch-id>/<controller>/<N>/run-<k>.csv (+ run-<k>.json sidecar)
                                avg-cumulative.csv, avg-rate.csv,
                                avg-interference.csv
    out/<batch-id>/manifest.json
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .curves import CUMULATIVE, INTERVAL_RATE, PerformanceCurve, TimeGrid
from .sim import RunTrace, World

MANIFEST_NAME = "manifest.json"
_AVG_FILES = {"cumulative": ("avg-cumulative.csv", CUMULATIVE),
              "rate": ("avg-rate.csv", INTERVAL_RATE),
              "interference": ("avg-interference.csv", INTERVAL_RATE)}


def derive_seed(master_seed: int, kind: str, n: int, run_index: int) -> int:
    """Collision-resistant per-run seed: the first 8 bytes of the SHA-256 of
    the tuple rendered as ``master|kind|N|run``."""
    tag = f"{master_seed}|{kind}|{n}|{run_index}".encode()
    return int.from_bytes(hashlib.sha256(tag).digest()[:8], "big")


@dataclass
class CellResult:
    """One (controller, N) cell: its traces and averaged curves."""

    kind: str
    n: int
    seeds: list
    traces: list
    cumulative: PerformanceCurve
    rate: PerformanceCurve
    interference: PerformanceCurve


def _average(traces, attr: str) -> np.ndarray:
    return np.mean(np.stack([getattr(t, attr) for t in traces]), axis=0)


def run_cell(cfg: ExperimentConfig, kind: str, n: int,
             out_dir: Path | None = None) -> CellResult:
    """Execute runs_per_cell seeded runs of one cell and average them.

    When ``out_dir`` is given, every trace and the three averaged curves are
    written there.
    """
    arena = cfg.to_arena(kind)
    params = cfg.to_params()
    controller = cfg.to_controller(kind)
    throttle = cfg.throttle_series()
    digest = cfg.digest()
    seeds = [derive_seed(cfg.master_seed, kind, n, k)
             for k in range(cfg.runs)]
    traces = []
    for seed in seeds:
        world = World(arena, params, controller, n, cfg.duration, seed,
                      throttle=throttle, config_digest=digest)
        traces.append(world.run())
    interval = cfg.interval_seconds
    avg_cum = PerformanceCurve(_average(traces, "cum_delivered"), interval,
                               CUMULATIVE)
    avg_rate = PerformanceCurve(_average(traces, "delivered"), interval,
                                INTERVAL_RATE)
    avg_intf = PerformanceCurve(
        _average(traces, "avoid_robot_s") + _average(traces, "avoid_wall_s"),
        interval, INTERVAL_RATE)
    cell = CellResult(kind=kind, n=n, seeds=seeds, traces=traces,
                      cumulative=avg_cum, rate=avg_rate,
                      interference=avg_intf)
    if out_dir is not None:
        _write_cell(cell, Path(out_dir))
    return cell


def _write_cell(cell: CellResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for k, trace in enumerate(cell.traces):
        (out_dir / f"run-{k}.csv").write_text(trace.to_csv())
        (out_dir / f"run-{k}.json").write_text(trace.sidecar_json())
    for name, (fname, _) in _AVG_FILES.items():
        (out_dir / fname).write_text(getattr(cell, name).to_csv())


@dataclass
class BatchResult:
    batch_dir: Path
    config: ExperimentConfig
    cells: dict = field(default_factory=dict)  # (kind, n) -> CellResult

    @property
    def batch_id(self) -> str:
        return self.batch_dir.name


def batch_id_for(cfg: ExperimentConfig) -> str:
    return "batch-" + cfg.digest()[:12]


def run_batch(cfg: ExperimentConfig, out_root: Path,
              force: bool = False) -> BatchResult:
    """Run every (controller, N) cell, smallest sizes first so the N = 1
    baselines exist before anything that consumes them."""
    cfg.validate()
    out_root = Path(out_root)
    batch_dir = out_root / batch_id_for(cfg)
    if batch_dir.exists():
        if not force:
            raise FileExistsError(
                f"batch directory {batch_dir} already exists "
                "(pass force to overwrite)")
        import shutil
        shutil.rmtree(batch_dir)
    batch_dir.mkdir(parents=True)
    result = BatchResult(batch_dir=batch_dir, config=cfg)
    seed_table: dict = {}
    for kind in cfg.kinds:
        seed_table[kind] = {}
        for n in cfg.sizes:
            cell = run_cell(cfg, kind, n, out_dir=batch_dir / kind / str(n))
            result.cells[(kind, n)] = cell
            seed_table[kind][str(n)] = cell.seeds
    manifest = {"schema": 1,
                "batch_id": result.batch_id,
                "config": cfg.to_dict(),
                "config_digest": cfg.digest(),
                "seed_table": seed_table}
    (batch_dir / MANIFEST_NAME).write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return result


class BatchData:
    """Read-only view of a stored batch, as the metrics engine consumes it."""

    def __init__(self, batch_dir: Path):
        self.batch_dir = Path(batch_dir)
        manifest_path = self.batch_dir / MANIFEST_NAME
        if not manifest_path.exists():
            raise FileNotFoundError(
                f"no {MANIFEST_NAME} in {self.batch_dir}; not a batch "
                "directory (or the batch did not complete)")
        self.manifest = json.loads(manifest_path.read_text())
        self.config = ExperimentConfig.from_dict(self.manifest["config"])
        self.config_digest = self.manifest["config_digest"]
        self._curves: dict = {}

    @property
    def kinds(self):
        return tuple(self.config.kinds)

    @property
    def sizes(self):
        return tuple(self.config.sizes)

    def grid(self) -> TimeGrid:
        return self.config.grid()

    def variance_profile(self):
        return self.config.variance_profile()

    def has_cell(self, kind: str, n: int) -> bool:
        return (self.batch_dir / kind / str(n)).is_dir()

    def curve(self, kind: str, n: int, which: str) -> PerformanceCurve:
        key = (kind, n, which)
        if key not in self._curves:
            fname, curve_kind = _AVG_FILES[which]
            path = self.batch_dir / kind / str(n) / fname
            if not path.exists():
                raise FileNotFoundError(
                    f"missing averaged curve {path} (is the N = 1 baseline "
                    "present? the loss metric requires it)")
            self._curves[key] = PerformanceCurve.from_csv(path.read_text(),
                                                          curve_kind)
        return self._curves[key]

    def trace(self, kind: str, n: int, run_index: int) -> RunTrace:
        cell = self.batch_dir / kind / str(n)
        return RunTrace.from_csv(
            (cell / f"run-{run_index}.csv").read_text(),
            (cell / f"run-{run_index}.json").read_text())
