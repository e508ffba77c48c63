"""Experiment orchestration: multi-seed runs, aggregation, rate fits, CSV output.

Every run is determined by its config (game, schedules, horizon, seed list);
aggregation over seeds is a fixed-order reduction, so identical configs
produce byte-identical CSV files regardless of how the seeds were executed.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .games import GameSpec, resolve_game
from .learner import TrajectoryRecord, run
from .schedules import Schedules

__all__ = [
    "ExperimentConfig",
    "MetricsTable",
    "RateFit",
    "run_experiment",
    "fit_rate",
    "emit_plot_script",
    "reproduce_fig1",
    "write_raw_csv",
    "write_aggregate_csv",
]

RAW_HEADER = "t,seed,err_primal_sq,err_dual_sq,gamma,eps,sigma"
AGG_HEADER = ("t,mean_err_primal_sq,sem_err_primal_sq,"
              "mean_err_dual_sq,sem_err_dual_sq,num_seeds")


@dataclass
class ExperimentConfig:
    """Everything a reproducible experiment depends on."""

    game: GameSpec | str
    schedules: Schedules
    T: int
    seeds: list[int]
    record_every: object = "log"
    outdir: Path | str | None = None
    label: str = "run"
    allow_invalid_schedules: bool = False
    workers: int = 1

    def __post_init__(self):
        self.seeds = [int(s) for s in self.seeds]
        if not self.seeds:
            raise ValueError("seed list must be nonempty")
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")


@dataclass
class MetricsTable:
    """Per-checkpoint aggregate statistics across seeds, plus the raw records."""

    label: str
    t: np.ndarray
    mean_err_primal_sq: np.ndarray
    sem_err_primal_sq: np.ndarray
    mean_err_dual_sq: np.ndarray
    sem_err_dual_sq: np.ndarray
    num_seeds: int
    records: list[TrajectoryRecord] = field(default_factory=list, repr=False)
    raw_csv: Path | None = None
    agg_csv: Path | None = None


def _fmt(x) -> str:
    return repr(float(x))


def write_raw_csv(records: list[TrajectoryRecord], path: Path):
    lines = [RAW_HEADER]
    for rec in records:
        for j in range(rec.t.shape[0]):
            lines.append(",".join([
                str(int(rec.t[j])), str(rec.seed),
                _fmt(rec.err_primal_sq[j]), _fmt(rec.err_dual_sq[j]),
                _fmt(rec.gamma[j]), _fmt(rec.eps[j]), _fmt(rec.sigma[j]),
            ]))
    path.write_text("\n".join(lines) + "\n")


def write_aggregate_csv(table: MetricsTable, path: Path):
    lines = [AGG_HEADER]
    for j in range(table.t.shape[0]):
        lines.append(",".join([
            str(int(table.t[j])),
            _fmt(table.mean_err_primal_sq[j]), _fmt(table.sem_err_primal_sq[j]),
            _fmt(table.mean_err_dual_sq[j]), _fmt(table.sem_err_dual_sq[j]),
            str(table.num_seeds),
        ]))
    path.write_text("\n".join(lines) + "\n")


def _run_one(args) -> TrajectoryRecord:
    game, sched, T, seed, record_every, allow_invalid = args
    return run(game, sched, T, seed, record_every=record_every,
               allow_invalid_schedules=allow_invalid)


def _aggregate(label: str, records: list[TrajectoryRecord]) -> MetricsTable:
    # canonical seed order makes the reduction invariant to seed-list shuffles
    records = sorted(records, key=lambda rec: rec.seed)
    grid = records[0].t
    for rec in records[1:]:
        if not np.array_equal(rec.t, grid):
            raise RuntimeError("runs produced different checkpoint grids")
    ep = np.stack([rec.err_primal_sq for rec in records])  # (seeds, checkpoints)
    ed = np.stack([rec.err_dual_sq for rec in records])
    k = len(records)
    sem_p = ep.std(axis=0, ddof=1) / np.sqrt(k) if k > 1 else np.zeros(grid.shape[0])
    sem_d = ed.std(axis=0, ddof=1) / np.sqrt(k) if k > 1 else np.zeros(grid.shape[0])
    return MetricsTable(
        label=label,
        t=grid,
        mean_err_primal_sq=ep.mean(axis=0),
        sem_err_primal_sq=sem_p,
        mean_err_dual_sq=ed.mean(axis=0),
        sem_err_dual_sq=sem_d,
        num_seeds=k,
        records=records,
    )


def run_experiment(cfg: ExperimentConfig) -> MetricsTable:
    """Run every seed, aggregate, and (when an output directory is set) write CSVs.

    Seeds may fan out to a process pool (cfg.workers > 1); the aggregate is a
    reduction in seed-list order, so results do not depend on completion
    order. The output directory is validated before any run starts.
    """
    game = resolve_game(cfg.game) if isinstance(cfg.game, str) else cfg.game

    outdir = None
    if cfg.outdir is not None:
        outdir = Path(cfg.outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        if not os.access(outdir, os.W_OK):
            raise PermissionError(f"output directory {outdir} is not writable")

    jobs = [(game, cfg.schedules, cfg.T, seed, cfg.record_every,
             cfg.allow_invalid_schedules) for seed in cfg.seeds]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(job) for job in jobs]

    table = _aggregate(cfg.label, records)
    if outdir is not None:
        table.raw_csv = outdir / f"{cfg.label}_raw.csv"
        table.agg_csv = outdir / f"{cfg.label}_agg.csv"
        write_raw_csv(records, table.raw_csv)
        write_aggregate_csv(table, table.agg_csv)
    return table


@dataclass(frozen=True)
class RateFit:
    """Least-squares power-law fit of an error series in log-log space."""

    slope: float
    intercept: float
    t_min: float
    t_max: float
    r_squared: float


def fit_rate(t, err, t_min: float, t_max: float) -> RateFit:
    """Ordinary least squares of log(err) against log(t) on a window.

    Needs at least five checkpoints inside [t_min, t_max], all with strictly
    positive error values (the log is undefined otherwise).
    """
    if not t_min < t_max:
        raise ValueError(f"need t_min < t_max, got {t_min} >= {t_max}")
    t = np.asarray(t, dtype=float)
    err = np.asarray(err, dtype=float)
    mask = (t >= t_min) & (t <= t_max)
    if int(mask.sum()) < 5:
        raise ValueError(
            f"need at least 5 checkpoints in [{t_min:g}, {t_max:g}], found {int(mask.sum())}"
        )
    window_err = err[mask]
    if np.any(window_err <= 0):
        raise ValueError("error values must be positive for a log-log fit")
    x = np.log(t[mask])
    y = np.log(window_err)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(resid @ resid)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(float(slope), float(intercept), float(t_min), float(t_max),
                   float(r_squared))


_PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Log-log convergence plot over the aggregate CSVs listed below."""

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
SERIES = {series}

fig, ax = plt.subplots(figsize=(6.0, 4.5))
for label, rel_path in SERIES:
    ts, means = [], []
    with open(HERE / rel_path) as fh:
        for row in csv.DictReader(fh):
            ts.append(float(row["t"]))
            means.append(float(row["mean_err_primal_sq"]))
    ax.loglog(ts, means, label=label)
ax.set_xlabel("iteration t")
ax.set_ylabel("mean squared primal error")
ax.legend()
ax.grid(True, which="both", alpha=0.3)
fig.tight_layout()
out = HERE / "{png_name}"
fig.savefig(out, dpi=150)
print(f"wrote {{out}}")
'''


def emit_plot_script(tables: list[MetricsTable], script_path: Path | str) -> Path:
    """Write a self-contained plot script referencing the aggregate CSVs.

    One curve per table; CSV paths are stored relative to the script so the
    output directory can be moved as a unit.
    """
    if not tables:
        raise ValueError("need at least one metrics table to plot")
    script_path = Path(script_path)
    series = []
    for table in tables:
        if table.agg_csv is None:
            raise ValueError(f"table {table.label!r} has no aggregate CSV on disk")
        rel = os.path.relpath(table.agg_csv, script_path.parent)
        series.append((table.label, rel))
    png_name = script_path.stem + ".png"
    script_path.write_text(_PLOT_TEMPLATE.format(series=repr(series), png_name=png_name))
    return script_path


def reproduce_fig1(
    outdir: Path | str,
    T: int = 100_000,
    num_seeds: int = 20,
    seed_base: int = 0,
    s_values: tuple[float, ...] = (4.0 / 7.0, 2.0, 10.0),
    game: str = "paper-example",
    workers: int = 1,
) -> list[MetricsTable]:
    """Convergence comparison across sampling-spread schedules on one game.

    Runs the learning iteration for each spread exponent s (the step-size and
    regularization exponents stay at their standard values), aggregates over
    seeds, writes CSVs, and emits a plot script drawing one curve per s.
    """
    outdir = Path(outdir)
    tables = []
    for s in s_values:
        sched = Schedules(s=float(s))
        label = f"s_{s:g}".replace(".", "p").replace("/", "_")
        cfg = ExperimentConfig(
            game=game, schedules=sched, T=T,
            seeds=[seed_base + k for k in range(num_seeds)],
            outdir=outdir, label=label, workers=workers,
        )
        table = run_experiment(cfg)
        table.label = f"s={s:g}"
        tables.append(table)
    emit_plot_script(tables, outdir / "convergence_plot.py")
    return tables
