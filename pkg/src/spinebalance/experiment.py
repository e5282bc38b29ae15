"""Experiment configuration and the frequency-sweep protocol.

A sweep runs every (frequency, repetition) cell for a controller kind. Each
cell samples the gait on a cell-centred grid ``t_j = (j + 1/2) dt`` with
``dt = T / N``, starts at a seeded random grid offset (the only random
initial state the model has), integrates through the remainder of the
current half stride as warm-up and then records ``half_strides`` complete
half strides.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .balance import ComPosition, balance_state
from .errors import ConfigError
from .gait import GaitParams, stride_arrays
from .kinematics import R_MAX, R_MIN, RobotGeometry
from .solver import BalanceProblem, SolveResult, solve_balance_flexion
from .spine_controller import ControllerKind, SpineControllerParams, flexion_trajectory
from .tilt import BalanceMetrics, TiltParams, half_stride_metrics, simulate_tilt
from .trace_io import COLUMNS, ExperimentRecord

AUTO = "auto"
METRIC_NAMES = tuple(f.name for f in fields(BalanceMetrics))


def default_frequencies():
    return [round(0.5 + 0.4 * m, 10) for m in range(11)]


@dataclass(frozen=True)
class ControllerSettings:
    """Controller parameters shared by every frequency of a sweep.

    ``initial_phase`` is a number or ``"auto"``: 0 when the solved balancing
    flexion is non-negative and pi otherwise, so that the cosine reaches the
    root itself (not its negative) at the first balance instant.
    """

    amplitude: float = 0.1
    initial_phase: float | str = AUTO
    steps_per_period: int = 1000

    def __post_init__(self):
        if not (isinstance(self.amplitude, (int, float)) and math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise ConfigError(f"controller.amplitude must be >= 0, got {self.amplitude!r}")
        if self.initial_phase != AUTO and not (
            isinstance(self.initial_phase, (int, float)) and math.isfinite(self.initial_phase)
        ):
            raise ConfigError(f"controller.initial_phase must be a number or 'auto', got {self.initial_phase!r}")
        if not (isinstance(self.steps_per_period, int) and self.steps_per_period >= 100):
            raise ConfigError("controller.steps_per_period must be an integer >= 100")

    def phase_for(self, root: float) -> float:
        if self.initial_phase == AUTO:
            return 0.0 if root >= 0 else math.pi
        return float(self.initial_phase)


@dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-9
    max_iter: int = 200
    search_range: tuple = (R_MIN, R_MAX)
    probe_samples: int = 1001


@dataclass(frozen=True)
class SweepSettings:
    frequencies: tuple = field(default_factory=lambda: tuple(default_frequencies()))
    repetitions: int = 10
    seed: int = 0
    samples_per_period: int = 256
    half_strides: int = 4

    def __post_init__(self):
        freqs = tuple(float(f) for f in self.frequencies)
        if not freqs or not all(math.isfinite(f) and f > 0 for f in freqs):
            raise ConfigError("sweep.frequencies must be a non-empty list of positive numbers")
        object.__setattr__(self, "frequencies", freqs)
        if not (isinstance(self.repetitions, int) and self.repetitions >= 1):
            raise ConfigError("sweep.repetitions must be an integer >= 1")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ConfigError("sweep.seed must be a non-negative integer")
        n = self.samples_per_period
        if not (isinstance(n, int) and n >= 8 and n % 4 == 0):
            raise ConfigError("sweep.samples_per_period must be a multiple of 4 and >= 8")
        if not (isinstance(self.half_strides, int) and self.half_strides >= 1):
            raise ConfigError("sweep.half_strides must be an integer >= 1")


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: RobotGeometry = field(default_factory=RobotGeometry)
    gait: GaitParams = field(default_factory=GaitParams)
    controller: ControllerSettings = field(default_factory=ControllerSettings)
    com: ComPosition = field(default_factory=ComPosition)
    tilt: TiltParams = field(default_factory=TiltParams)
    solver: SolverSettings = field(default_factory=SolverSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    output_dir: str = "out"

    def to_dict(self) -> dict:
        g = self.gait
        return {
            "geometry": self.geometry.to_dict(),
            "gait": {
                "period": g.period,
                "stride_amplitude": g.stride_amplitude,
                "duty": g.duty,
                "hind_phase": g.hind_phase,
                "phase_offsets": dict(g.phase_offsets),
            },
            "controller": {
                "amplitude": self.controller.amplitude,
                "initial_phase": self.controller.initial_phase,
                "steps_per_period": self.controller.steps_per_period,
            },
            "com": self.com.to_dict(),
            "tilt": self.tilt.to_dict(),
            "solver": {
                "tolerance": self.solver.tolerance,
                "max_iter": self.solver.max_iter,
                "search_range": list(self.solver.search_range),
                "probe_samples": self.solver.probe_samples,
            },
            "sweep": {
                "frequencies": list(self.sweep.frequencies),
                "repetitions": self.sweep.repetitions,
                "seed": self.sweep.seed,
                "samples_per_period": self.sweep.samples_per_period,
                "half_strides": self.sweep.half_strides,
            },
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """Build a config from a (possibly partial) mapping; missing keys keep defaults."""
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {"geometry", "gait", "controller", "com", "tilt", "solver", "sweep", "output_dir"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        section = "?"
        try:
            section = "geometry"
            geom = RobotGeometry.from_dict({**RobotGeometry().to_dict(), **data.get("geometry", {})})
            section = "gait"
            gait = GaitParams(**data.get("gait", {}))
            section = "controller"
            ctrl = ControllerSettings(**data.get("controller", {}))
            section = "com"
            com = ComPosition.from_dict(data.get("com", {}))
            section = "tilt"
            tilt = TiltParams.from_dict(data.get("tilt", {}))
            section = "solver"
            s = dict(data.get("solver", {}))
            if "search_range" in s:
                s["search_range"] = tuple(s["search_range"])
            solver = SolverSettings(**s)
            section = "sweep"
            sweep = SweepSettings(**data.get("sweep", {}))
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid '{section}' section: {exc}") from exc
        out = data.get("output_dir", "out")
        if not isinstance(out, str):
            raise ConfigError("output_dir must be a string")
        return cls(geom, gait, ctrl, com, tilt, solver, sweep, out)


def solve_for_config(config: ExperimentConfig, period: float | None = None) -> SolveResult:
    """Solve the balancing flexion at ``t_b = T/4`` on the LF+RH diagonal."""
    gait = config.gait if period is None else config.gait.with_period(period)
    s = config.solver
    problem = BalanceProblem.at_balance_instant(
        config.geometry, gait, config.com, search_range=s.search_range, tolerance=s.tolerance
    )
    return solve_balance_flexion(problem, max_iter=s.max_iter, probe_samples=s.probe_samples)


def controller_for(config: ExperimentConfig, kind, period: float, solution: SolveResult | None = None):
    """Controller parameters for one frequency.

    The phase rule and the balance target both come from the solved root, so
    ``spine`` and ``balance_spine`` share the same initial phase.
    """
    kind = ControllerKind.parse(kind)
    c = config.controller
    need_root = kind is ControllerKind.BALANCE_SPINE or c.initial_phase == AUTO
    root = 0.0
    if need_root and kind is not ControllerKind.NON_SPINE:
        solution = solution or solve_for_config(config, period)
        root = solution.root
    return SpineControllerParams(
        kind=kind,
        amplitude=c.amplitude,
        period=period,
        initial_phase=c.phase_for(root),
        time_step=period / c.steps_per_period,
        balance_target=abs(root) if kind is ControllerKind.BALANCE_SPINE else 0.0,
    )


def cell_rng(seed: int, freq_index: int, repetition: int) -> np.random.Generator:
    return np.random.default_rng([seed, freq_index, repetition])


def run_cell(config: ExperimentConfig, kind, freq_index: int, repetition: int, solution=None, keep_trace=True):
    """Simulate one (frequency, repetition) cell.

    Returns an :class:`ExperimentRecord`; its ``data`` is empty when
    ``keep_trace`` is false.
    """
    kind = ControllerKind.parse(kind)
    sw = config.sweep
    freq = sw.frequencies[freq_index]
    period = 1.0 / freq
    gait = config.gait.with_period(period)
    ctrl = controller_for(config, kind, period, solution)

    n = sw.samples_per_period
    m = n // 2
    dt = period / n
    offset = int(cell_rng(sw.seed, freq_index, repetition).integers(0, n))
    start = -(-offset // m) * m  # first half-stride boundary at or after the offset
    total = start - offset + sw.half_strides * m
    g = offset + np.arange(total)
    t = (g + 0.5) * dt
    diag = (g // m) % 2
    l_f, l_h = stride_arrays(gait, t, diagonal=diag)
    R, f_T, k = flexion_trajectory(ctrl, t)
    st = balance_state(config.geometry, l_f, l_h, R, config.com, diag)

    tp = config.tilt
    roll = simulate_tilt(st.dis, dt, tp, tp.roll_gain, m, first_sample=offset)
    pitch = simulate_tilt(st.offset_x, dt, tp, tp.pitch_gain, m, first_sample=offset)

    w = slice(start - offset, None)
    half_diag = diag[w][::m]
    metrics = half_stride_metrics(
        roll[w], st.dis[w], dt, m, pitch=pitch[w], half_stride_signs=np.where(half_diag == 0, 1.0, -1.0)
    )
    if keep_trace:
        cols = (t, l_f, l_h, R, f_T, k, st.fx, st.fy, st.hx, st.hy, st.dis, roll, pitch)
        data = np.column_stack([np.broadcast_to(np.asarray(c, dtype=float), t.shape)[w] for c in cols])
    else:
        data = np.empty((0, len(COLUMNS)))
    return ExperimentRecord(
        config=config.to_dict(),
        controller=kind.value,
        frequency=freq,
        seed=sw.seed,
        repetition=repetition,
        data=data,
        metrics=metrics,
    )


def _run_cell_job(args):
    config, kind, fi, rep, solution, keep = args
    return fi, rep, run_cell(config, kind, fi, rep, solution, keep)


def run_sweep(config: ExperimentConfig, kind, jobs: int = 1, keep_traces=True):
    """Run every cell for ``kind``; returns records ordered by (frequency, repetition).

    With ``jobs > 1`` cells run in worker processes and are merged back in
    index order, so the result does not depend on scheduling.
    """
    kind = ControllerKind.parse(kind)
    sw = config.sweep
    solutions = {}
    if kind is not ControllerKind.NON_SPINE:
        for fi, f in enumerate(sw.frequencies):
            solutions[fi] = solve_for_config(config, 1.0 / f)
    tasks = [
        (config, kind, fi, rep, solutions.get(fi), keep_traces)
        for fi in range(len(sw.frequencies))
        for rep in range(sw.repetitions)
    ]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell_job, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_run_cell_job(task) for task in tasks]
    results.sort(key=lambda r: (r[0], r[1]))
    return [r[2] for r in results]


def summarize(records, frequencies) -> dict:
    """Per-frequency mean and standard deviation of every metric."""
    by_freq = {}
    for rec in records:
        by_freq.setdefault(rec.frequency, []).append(rec.metrics)
    out = {}
    for f in frequencies:
        ms = by_freq.get(f, [])
        if not ms:
            continue
        entry = {"repetitions": len(ms)}
        for name in METRIC_NAMES:
            vals = np.array([getattr(x, name) for x in ms])
            entry[name] = {"mean": float(vals.mean()), "std": float(vals.std())}
        out[frequency_key(f)] = entry
    return out


def frequency_key(f: float) -> str:
    return format(f, ".10g")


def compare(config: ExperimentConfig, jobs: int = 1) -> dict:
    """Run all three controllers and rank them per frequency and metric.

    The winner of a metric is the controller with the smallest mean
    magnitude. Returns ``{"rows": [...], "winners": {...}}`` with one row per
    (frequency, controller).
    """
    kinds = list(ControllerKind)
    summaries = {
        kind.value: summarize(run_sweep(config, kind, jobs, keep_traces=False), config.sweep.frequencies)
        for kind in kinds
    }
    rows, winners = [], {}
    for f in config.sweep.frequencies:
        key = frequency_key(f)
        for kind in kinds:
            s = summaries[kind.value][key]
            rows.append(
                {
                    "frequency": f,
                    "controller": kind.value,
                    **{name: s[name]["mean"] for name in METRIC_NAMES},
                }
            )
        winners[key] = {
            name: min(kinds, key=lambda kd: abs(summaries[kd.value][key][name]["mean"])).value
            for name in METRIC_NAMES
        }
    return {"rows": rows, "winners": winners}


def ordering_holds(comparison: dict, metric: str, order) -> dict:
    """Frequency -> whether mean magnitudes strictly increase along ``order``."""
    table = {}
    for row in comparison["rows"]:
        table.setdefault(frequency_key(row["frequency"]), {})[row["controller"]] = abs(row[metric])
    names = [ControllerKind.parse(o).value for o in order]
    return {f: all(v[a] < v[b] for a, b in zip(names, names[1:])) for f, v in table.items()}

