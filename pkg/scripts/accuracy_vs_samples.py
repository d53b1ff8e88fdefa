"""Accuracy against the number of observed samples, each format at its own OSNR.

Default OSNRs are 12, 15, 19, 22 and 24 dB for 4- to 64-QAM, 32 GBd.
"""

import argparse
from pathlib import Path

from cdfmc import ExperimentSpec, ModulationFormat, merge_results, run_sweep

DEFAULT_OSNR = {
    ModulationFormat.QAM4: 12.0,
    ModulationFormat.QAM8: 15.0,
    ModulationFormat.QAM16: 19.0,
    ModulationFormat.QAM32: 22.0,
    ModulationFormat.QAM64: 24.0,
}
SAMPLE_COUNTS = (100, 250, 500, 1000, 1500, 2000, 2500, 3000, 3500, 4500, 5500, 7000, 10_000)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/accuracy_vs_samples.csv"))
    args = ap.parse_args()

    results = [
        run_sweep(ExperimentSpec(formats=(fmt,), osnr_grid_db=(osnr,), sample_counts=SAMPLE_COUNTS,
                                 trials=args.trials, master_seed=args.seed), jobs=args.jobs)
        for fmt, osnr in DEFAULT_OSNR.items()
    ]
    res = merge_results(results)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(res.to_csv())
    for r in res.rows:
        print(f"{r.format.name:>6} K={r.k_samples:<6} {r.accuracy:.3f}")


if __name__ == "__main__":
    main()
