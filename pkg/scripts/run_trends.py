#!/usr/bin/env python3
"""Run the five-method SNR sweep and export energy/failure trend data.

Reproduces the benchmark shape discussed in the README: per-method mean
device energy and task-failure probability across the 10..50 dB setpoints,
100 replications, 4 users. Writes results.csv plus per-method plotdata
series, and a bar chart when matplotlib is importable.
"""

import argparse
import time
from pathlib import Path

from mecoff.harness import SweepSpec, emit, run_sweep
from mecoff.methods import METHOD_IDS
from mecoff.scenario import demo_config, load_config, save_config


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=None, help="scenario config (default: demo preset)")
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--out", default="results/trends")
    args = parser.parse_args()

    config = load_config(args.config) if args.config else demo_config(seed=args.seed)
    spec = SweepSpec(
        config=config,
        methods=METHOD_IDS,
        snr_points_db=(10.0, 20.0, 30.0, 40.0, 50.0),
        replications=args.reps,
        seed=args.seed,
    )
    t0 = time.perf_counter()
    rows = run_sweep(spec)
    print(f"sweep finished in {time.perf_counter() - t0:.1f}s")

    out = Path(args.out)
    written = emit(rows, "csv", out) + emit(rows, "plotdata", out)
    save_config(config, out / "scenario.cfg")
    for path in written:
        print(f"wrote {path}")

    for r in rows:
        print(
            f"snr={r.snr_db:4.0f}dB {r.method}: "
            f"energy={r.mean_energy_j:.4g} J  failure={r.failure_probability:.4f}"
        )

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping chart")
        return 0

    snrs = sorted({r.snr_db for r in rows})
    fig, (ax_e, ax_f) = plt.subplots(1, 2, figsize=(11, 4))
    width = 0.16
    for i, m in enumerate(METHOD_IDS):
        series = [r for r in rows if r.method == m]
        xs = [s + (i - 2) * width * 10 for s in snrs]
        ax_e.bar(xs, [r.mean_energy_j for r in series], width=width * 10, label=m)
        ax_f.plot(snrs, [r.failure_probability for r in series], marker="o", label=m)
    ax_e.set_yscale("log")
    ax_e.set_xlabel("SNR setpoint (dB)")
    ax_e.set_ylabel("mean device energy (J)")
    ax_f.set_xlabel("SNR setpoint (dB)")
    ax_f.set_ylabel("task failure probability")
    ax_e.legend()
    ax_f.legend()
    fig.tight_layout()
    chart = out / "trends.png"
    fig.savefig(chart, dpi=130)
    print(f"wrote {chart}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
