"""Monte Carlo sweeps over SNR setpoints and methods, plus file emission.

Every (snr index, replication) cell draws a fresh scenario from a sub-seed
split off the sweep seed with numpy's SeedSequence spawn keys, so appending
SNR points or replications never perturbs existing cells, and all methods
inside a cell score the same draw. Aggregation is an ordered reduction,
which keeps parallel and serial execution byte-identical.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .methods import METHOD_IDS, MethodResult, run_method
from .scenario import Scenario, ScenarioConfig, generate

CSV_HEADER = "snr_db,method,mean_energy_j,failure_probability,mean_ts_s,replications"


@dataclass(frozen=True)
class SweepSpec:
    """One experiment matrix: methods x SNR setpoints x replications."""

    config: ScenarioConfig
    methods: tuple[str, ...] = METHOD_IDS
    snr_points_db: tuple[float, ...] | None = None  # None: use the config's list
    replications: int = 100
    seed: int = 42
    config_path: str | None = None

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("methods: need at least one method")
        unknown = [m for m in self.methods if m not in METHOD_IDS]
        if unknown:
            raise ConfigError(f"methods: unknown {unknown}, expected subset of {METHOD_IDS}")
        if self.replications < 1:
            raise ConfigError(f"replications: must be >= 1, got {self.replications}")

    @property
    def snr_points(self) -> tuple[float, ...]:
        return self.snr_points_db if self.snr_points_db else self.config.target_snr_db


@dataclass(frozen=True)
class SweepRow:
    """Aggregate for one (snr, method) cell.

    mean_energy_j averages the per-replication device-energy totals (failed
    tasks contribute zero). failure_probability is failed tasks over total
    tasks across all users and replications. mean_ts_s averages the makespan
    of user runs that produced a schedule; 0 when none did.
    """

    snr_db: float
    method: str
    mean_energy_j: float
    failure_probability: float
    mean_ts_s: float
    replications: int


def cell_seed(seed: int, snr_index: int, replication: int) -> np.random.SeedSequence:
    """Deterministic per-cell sub-seed: the sweep seed split by spawn key."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(snr_index, replication))


def _run_cell(spec: SweepSpec, snr_index: int, replication: int) -> dict[str, list[MethodResult]]:
    scenario: Scenario = generate(
        spec.config,
        snr_db=spec.snr_points[snr_index],
        seed=cell_seed(spec.seed, snr_index, replication),
    )
    return {
        m: [run_method(m, scenario, u) for u in range(len(scenario.users))]
        for m in spec.methods
    }


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Run the full matrix; deterministic for a fixed spec regardless of
    `workers` (cells are independent and reduced in index order)."""
    snrs = spec.snr_points
    cells = [(si, ri) for si in range(len(snrs)) for ri in range(spec.replications)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda c: _run_cell(spec, *c), cells))
    else:
        outcomes = [_run_cell(spec, si, ri) for si, ri in cells]

    by_cell = dict(zip(cells, outcomes))
    rows: list[SweepRow] = []
    for si, snr_db in enumerate(snrs):
        for m in spec.methods:
            energy_per_rep: list[float] = []
            ts_values: list[float] = []
            failed = 0
            total = 0
            for ri in range(spec.replications):
                results = by_cell[(si, ri)][m]
                energy_per_rep.append(sum(r.energy for r in results))
                failed += sum(r.failed_tasks for r in results)
                total += sum(r.total_tasks for r in results)
                ts_values.extend(r.ts for r in results if r.solution is not None)
            rows.append(
                SweepRow(
                    snr_db=float(snr_db),
                    method=m,
                    mean_energy_j=sum(energy_per_rep) / len(energy_per_rep),
                    failure_probability=(failed / total) if total else 0.0,
                    mean_ts_s=(sum(ts_values) / len(ts_values)) if ts_values else 0.0,
                    replications=spec.replications,
                )
            )
    return rows


def render_csv(rows: list[SweepRow]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.snr_db!r},{r.method},{r.mean_energy_j!r},"
            f"{r.failure_probability!r},{r.mean_ts_s!r},{r.replications}"
        )
    return "\n".join(lines) + "\n"


def load_rows(path: str | Path) -> list[SweepRow]:
    """Parse a results.csv written by emit (round-trips exactly)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"{path}: not a sweep results file")
    rows = []
    for line in lines[1:]:
        snr, method, energy, fail, ts, reps = line.split(",")
        rows.append(
            SweepRow(
                snr_db=float(snr),
                method=method,
                mean_energy_j=float(energy),
                failure_probability=float(fail),
                mean_ts_s=float(ts),
                replications=int(reps),
            )
        )
    return rows


def emit(rows: list[SweepRow], fmt: str, out_dir: str | Path) -> list[Path]:
    """Write the result table; returns the created paths.

    csv:      results.csv with the documented header.
    json:     results.json, a list of row objects.
    plotdata: per-method two-column series (snr value) for energy and
              failure probability, ready for bar/line plotting.
    """
    if not rows:
        raise ConfigError("emit: empty result table")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if fmt == "csv":
        path = out / "results.csv"
        path.write_text(render_csv(rows))
        written.append(path)
    elif fmt == "json":
        path = out / "results.json"
        payload = [
            {
                "snr_db": r.snr_db,
                "method": r.method,
                "mean_energy_j": r.mean_energy_j,
                "failure_probability": r.failure_probability,
                "mean_ts_s": r.mean_ts_s,
                "replications": r.replications,
            }
            for r in rows
        ]
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        written.append(path)
    elif fmt == "plotdata":
        methods = []
        for r in rows:
            if r.method not in methods:
                methods.append(r.method)
        for m in methods:
            series = [r for r in rows if r.method == m]
            for stem, attr in (("energy", "mean_energy_j"), ("failure", "failure_probability")):
                path = out / f"plot_{stem}_{m}.dat"
                lines = [f"# snr_db {stem} ({m})"] + [
                    f"{r.snr_db!r} {getattr(r, attr)!r}" for r in series
                ]
                path.write_text("\n".join(lines) + "\n")
                written.append(path)
    else:
        raise ConfigError(f"emit: unknown format {fmt!r} (csv|json|plotdata)")
    return written
