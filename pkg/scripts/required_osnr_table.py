"""Required OSNR for (near) error-free classification at K = 10^4.

Prints the measured values next to published reference numbers for the same
quantity: the amplitude-CDF method and an earlier amplitude-feature classifier
(Liu et al., 2014).
"""

import argparse
import json
from pathlib import Path

from cdfmc import ExperimentSpec, ModulationFormat, required_osnr

F = ModulationFormat
PUBLISHED = {
    "amplitude-CDF method": {F.QAM4: 9.0, F.QAM16: 18.0, F.QAM32: 21.0, F.QAM64: 15.0},
    "Liu et al. 2014": {F.QAM4: 11.2, F.QAM16: 16.5, F.QAM32: 22.0, F.QAM64: 24.0},
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--target", type=float, default=499 / 500)
    ap.add_argument("--mismatch", type=float, default=0.0, help="bank OSNR offset, dB")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results/required_osnr.json"))
    args = ap.parse_args()

    spec = ExperimentSpec(trials=args.trials, master_seed=args.seed, osnr_mismatch_db=args.mismatch)
    results = {f: required_osnr(f, args.samples, args.target, (0.0, 30.0), spec) for f in PUBLISHED["Liu et al. 2014"]}
    print(f"{'':24}" + "".join(f"{f.name:>8}" for f in results))
    print(f"{'this simulation':24}" + "".join(
        f"{r.osnr_db:8.1f}" if r.achieved else f"{'n/a':>8}" for r in results.values()))
    for name, row in PUBLISHED.items():
        print(f"{name:24}" + "".join(f"{row[f]:8.1f}" for f in results))
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps({"spec": spec.to_dict(), "results": [r.to_dict() for r in results.values()]},
                                   indent=2) + "\n")


if __name__ == "__main__":
    main()
