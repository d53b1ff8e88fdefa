"""Classification accuracy of every format against OSNR at a fixed sample count."""

import argparse
from pathlib import Path

import numpy as np

from cdfmc import ExperimentSpec, run_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--osnr-min", type=float, default=0.0)
    ap.add_argument("--osnr-max", type=float, default=30.0)
    ap.add_argument("--osnr-step", type=float, default=1.0)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/accuracy_vs_osnr.csv"))
    args = ap.parse_args()

    osnrs = np.round(np.arange(args.osnr_min, args.osnr_max + 1e-9, args.osnr_step), 6)
    spec = ExperimentSpec(osnr_grid_db=tuple(osnrs), sample_counts=(args.samples,),
                          trials=args.trials, master_seed=args.seed)
    res = run_sweep(spec, jobs=args.jobs)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(res.to_csv())
    for r in res.rows:
        print(f"{r.format.name:>6} {r.osnr_db:5.1f} dB  {r.accuracy:.3f}")


if __name__ == "__main__":
    main()
