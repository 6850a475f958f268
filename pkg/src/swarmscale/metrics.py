"""The four swarm measures: scalability, self-organization, reactivity and
adaptability, plus the report object that carries them with provenance.

Scalability is the Karp-Flatt serial fraction applied to swarm sizes:
projected vs. observed performance when the swarm doubles.  Self-organization
sums a sigmoid of how sub- or super-linearly interference-induced
performance loss grows between adjacent ladder sizes.  The two flexibility
measures are DTW distances between observed performance and an optimal
tracking / adapting curve built from the condition signals.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .curves import INTERVAL_RATE, PerformanceCurve, dtw, minmax_map
from .errors import DegenerateCurveError, UndefinedMetricError
from .variance import COST_LIKE, VarianceProfile

PHI_MEAN = "mean"
PHI_LITERAL_SUM = "sum"


@dataclass(frozen=True)
class SizeLadder:
    """Powers-of-two swarm sizes starting at 1."""

    sizes: tuple

    def __init__(self, sizes: Iterable[int]):
        sizes = tuple(int(s) for s in sizes)
        if not sizes or sizes[0] != 1:
            raise ValueError("size ladder must start at 1")
        for a, b in zip(sizes, sizes[1:]):
            if b != 2 * a:
                raise ValueError("each ladder size must double its "
                                 f"predecessor, got {a} -> {b}")
        object.__setattr__(self, "sizes", sizes)

    def pairs(self):
        """Adjacent (smaller, larger) size pairs."""
        return list(zip(self.sizes, self.sizes[1:]))


@dataclass(frozen=True, eq=False)
class LossCurve:
    """Per-timestep fraction of performance lost to inter-robot
    interference, for one swarm size."""

    values: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.asarray(self.values, dtype=np.float64))
        if self.n < 1:
            raise ValueError("swarm size must be positive")


def _vals(curve) -> np.ndarray:
    if isinstance(curve, PerformanceCurve):
        return curve.as_array()
    return np.asarray(curve, dtype=np.float64)


def phi(curve_n1, curve_n2, n1: int, n2: int,
        mode: str = PHI_MEAN) -> float:
    """Projected-vs-observed performance ratio between two swarm sizes.

    Per-timestep ratio P(N2,t) / ((N2/N1) P(N1,t)) over all t with positive
    denominator.  The default aggregates by mean; ``mode="sum"`` returns the
    literal sum of the ratios for fidelity audits.
    """
    if not n2 > n1 >= 1:
        raise ValueError("need N2 > N1 >= 1")
    p1 = _vals(curve_n1)
    p2 = _vals(curve_n2)
    if p1.shape != p2.shape:
        raise ValueError("curves must share one time grid")
    mask = p1 > 0
    if not mask.any():
        raise UndefinedMetricError(
            "phi undefined: no timestep has positive baseline performance")
    ratios = p2[mask] / ((n2 / n1) * p1[mask])
    if mode == PHI_MEAN:
        return float(ratios.mean())
    if mode == PHI_LITERAL_SUM:
        return float(ratios.sum())
    raise ValueError(f"unknown phi mode {mode!r}")


def scalability_e(n1: int, n2: int, phi_val: float) -> float:
    """Karp-Flatt serial fraction; smaller values mean better scaling."""
    if n1 == 1:
        raise UndefinedMetricError(
            "scalability undefined at N1 = 1 (denominator 1 - 1/N1 is zero)")
    if n1 < 1 or n2 <= n1:
        raise ValueError("need N2 > N1 >= 2")
    if phi_val <= 0:
        raise ValueError("phi must be positive")
    return (1.0 / phi_val - 1.0 / n1) / (1.0 - 1.0 / n1)


def perf_lost(curve_n, t_lost_n, n: int,
              baseline: LossCurve | None = None) -> LossCurve:
    """Interference-induced performance loss for swarm size ``n``.

    For n > 1 the N-scaled N=1 baseline is subtracted, removing the
    interference a non-interactive swarm of n robots would have had with the
    arena walls alone.
    """
    p = _vals(curve_n)
    t_lost = _vals(t_lost_n)
    if p.shape != t_lost.shape:
        raise ValueError("performance and interference curves must share "
                         "one time grid")
    if n == 1:
        return LossCurve(p * t_lost, 1)
    if baseline is None or baseline.n != 1:
        raise ValueError("perf_lost for N > 1 requires the N = 1 baseline")
    if baseline.values.shape != p.shape:
        raise ValueError("baseline loss curve must share the time grid")
    return LossCurve(p * t_lost - n * baseline.values, n)


def self_org_Z(loss_prev: LossCurve, loss_cur: LossCurve):
    """Self-organization between adjacent ladder sizes.

    Returns (Z, theta) where theta(t) is the super-linearity of the loss
    growth and Z sums 1 - sigmoid(theta) over the grid: sublinear loss
    growth pushes each term toward 1.
    """
    if loss_cur.n != 2 * loss_prev.n:
        raise ValueError("self_org_Z needs adjacent ladder sizes "
                         f"(got {loss_prev.n} -> {loss_cur.n})")
    if loss_prev.values.shape != loss_cur.values.shape:
        raise ValueError("loss curves must share one time grid")
    ratio = loss_cur.n / loss_prev.n
    theta = loss_cur.values - ratio * loss_prev.values
    # 1 - sigmoid(theta), written via tanh for numerical stability
    terms = 0.5 * (1.0 - np.tanh(theta / 2.0))
    return float(terms.sum()), theta


def _oriented_deviation(profile: VarianceProfile) -> np.ndarray:
    """Deviation signal with higher values meaning better conditions, so
    min-max mapping sends adversity to low expected performance."""
    if profile.orientation == COST_LIKE:
        return -profile.deviation
    return profile.deviation


def reactivity_R(p_ideal, p_observed, profile: VarianceProfile):
    """DTW distance from observed performance to the curve of a maximally
    reactive swarm.  Returns (R, optimal curve).  Lower is more reactive.
    """
    ideal = _vals(p_ideal)
    obs = _vals(p_observed)
    for c in (p_ideal, p_observed):
        if isinstance(c, PerformanceCurve) and c.kind != INTERVAL_RATE:
            raise ValueError("flexibility metrics consume interval-rate "
                             "curves (a cumulative curve cannot track a "
                             "step-down)")
    if len(ideal) != profile.grid.num_intervals or \
            len(obs) != profile.grid.num_intervals:
        raise ValueError("curves must share the profile's time grid")
    if ideal.max() == ideal.min():
        raise DegenerateCurveError(
            "reactivity undefined for constant ideal-conditions performance")
    w = _oriented_deviation(profile)
    p_r_star = minmax_map(w, float(ideal.min()), float(ideal.max()))
    return dtw(p_r_star, obs), p_r_star


ADAPT_LITERAL = "literal"
ADAPT_SCALED_IDEAL = "scaled_ideal"


def adaptability_A(p_ideal, p_observed, profile: VarianceProfile,
                   r_value: float, mode: str = ADAPT_LITERAL):
    """DTW distance from observed performance to the optimal-adaptability
    curve.  Returns (A, optimal curve).  Lower is more adaptive.

    The literal construction multiplies the condition ratio by the scalar
    reactivity on beneficial timesteps; ``mode="scaled_ideal"`` instead
    scales the ideal performance by the inverse condition ratio.
    """
    if r_value is None:
        raise ValueError("adaptability requires the reactivity value")
    if r_value < 0:
        raise ValueError("reactivity must be non-negative")
    ideal = _vals(p_ideal)
    obs = _vals(p_observed)
    if len(ideal) != profile.grid.num_intervals or \
            len(obs) != profile.grid.num_intervals:
        raise ValueError("curves must share the profile's time grid")
    beneficial = profile.deviation < profile.ideal
    if mode == ADAPT_LITERAL:
        branch = (profile.deviation / profile.ideal) * r_value
    elif mode == ADAPT_SCALED_IDEAL:
        branch = (profile.ideal / profile.deviation) * ideal
    else:
        raise ValueError(f"unknown adaptability mode {mode!r}")
    p_a_star = np.where(beneficial, branch, ideal)
    return dtw(p_a_star, obs), p_a_star


# ----------------------------------------------------------------------
# Report assembly over stored batches
# ----------------------------------------------------------------------

SCALABILITY = "scalability"
SELFORG = "selforg"
REACTIVITY = "reactivity"
ADAPTABILITY = "adaptability"
ALL_METRICS = (SCALABILITY, SELFORG, REACTIVITY, ADAPTABILITY)


@dataclass
class MetricReport:
    provenance: dict = field(default_factory=dict)
    scalability: list = field(default_factory=list)
    selforg: list = field(default_factory=list)
    reactivity: list = field(default_factory=list)
    adaptability: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"provenance": self.provenance,
                           "scalability": self.scalability,
                           "selforg": self.selforg,
                           "reactivity": self.reactivity,
                           "adaptability": self.adaptability},
                          sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "MetricReport":
        d = json.loads(text)
        return cls(provenance=d["provenance"],
                   scalability=d["scalability"], selforg=d["selforg"],
                   reactivity=d["reactivity"],
                   adaptability=d["adaptability"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["metric", "controller", "N1", "N2", "beta", "value"])
        for row in self.scalability:
            w.writerow([SCALABILITY, row["controller"], row["N1"],
                        row["N2"], "", f"{row['e']:.17g}"])
        for row in self.selforg:
            w.writerow([SELFORG, row["controller"], row["m_prev"],
                        row["m"], "", f"{row['Z']:.17g}"])
        for row in self.reactivity:
            w.writerow([REACTIVITY, row["controller"], row["N"], "",
                        f"{row['beta']:.17g}", f"{row['R']:.17g}"])
        for row in self.adaptability:
            w.writerow([ADAPTABILITY, row["controller"], row["N"], "",
                        f"{row['beta']:.17g}", f"{row['A']:.17g}"])
        return buf.getvalue()


def build_report(batch, which: Sequence[str] = ALL_METRICS,
                 ideal=None, phi_mode: str = PHI_MEAN) -> MetricReport:
    """Compute the requested metric families over a loaded batch.

    ``batch`` and ``ideal`` are runner.BatchData objects.  Scalability and
    self-organization read the batch alone; the flexibility metrics treat
    ``batch`` as the variance batch and need the matching ideal-conditions
    batch for the baseline performance scale.
    """
    for name in which:
        if name not in ALL_METRICS:
            raise ValueError(f"unknown metric {name!r}")
    report = MetricReport(provenance={"batch": batch.config_digest})
    ladder = SizeLadder(batch.sizes)

    if SCALABILITY in which or SELFORG in which:
        for kind in batch.kinds:
            # the loss measure is per-timestep, so it consumes the
            # interval-rate performance; phi below projects the cumulative
            baseline = perf_lost(batch.curve(kind, 1, "rate"),
                                 batch.curve(kind, 1, "interference"), 1)
            losses = {1: baseline}
            for n_prev, n_cur in ladder.pairs():
                losses[n_cur] = perf_lost(
                    batch.curve(kind, n_cur, "rate"),
                    batch.curve(kind, n_cur, "interference"),
                    n_cur, baseline=baseline)
                if SCALABILITY in which and n_prev >= 2:
                    f = phi(batch.curve(kind, n_prev, "cumulative"),
                            batch.curve(kind, n_cur, "cumulative"),
                            n_prev, n_cur, mode=phi_mode)
                    report.scalability.append(
                        {"controller": kind, "N1": n_prev, "N2": n_cur,
                         "phi": f, "e": scalability_e(n_prev, n_cur, f)})
                if SELFORG in which:
                    z, theta = self_org_Z(losses[n_prev], losses[n_cur])
                    report.selforg.append(
                        {"controller": kind, "m_prev": n_prev, "m": n_cur,
                         "Z": z, "theta": [float(v) for v in theta]})

    if REACTIVITY in which or ADAPTABILITY in which:
        if ideal is None:
            raise ValueError("reactivity/adaptability need an "
                             "ideal-conditions batch")
        profile = batch.variance_profile()
        if profile is None:
            raise ValueError("reactivity/adaptability need a batch run "
                             "under applied variance")
        report.provenance["ideal_batch"] = ideal.config_digest
        report.provenance["orientation_corrected"] = \
            profile.orientation == COST_LIKE
        for kind in batch.kinds:
            for n in batch.sizes:
                if not ideal.has_cell(kind, n):
                    continue
                p_ideal = ideal.curve(kind, n, "rate")
                p_obs = batch.curve(kind, n, "rate")
                r, p_r_star = reactivity_R(p_ideal, p_obs, profile)
                if REACTIVITY in which:
                    report.reactivity.append(
                        {"controller": kind, "N": n, "beta": profile.beta,
                         "R": r,
                         "p_r_star": [float(v) for v in p_r_star]})
                if ADAPTABILITY in which:
                    a, p_a_star = adaptability_A(p_ideal, p_obs, profile, r)
                    report.adaptability.append(
                        {"controller": kind, "N": n, "beta": profile.beta,
                         "A": a,
                         "p_a_star": [float(v) for v in p_a_star]})
    return report
