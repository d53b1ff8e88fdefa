"""Command-line entry point: ``cdfmc <subcommand> ...``.

Exit codes: 0 success, 2 invalid arguments, 3 input-data format error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from cdfmc import __version__
from cdfmc.channel import ChannelConfig, SampleFormatError, read_samples, simulate_block, write_samples
from cdfmc.classifier import DEFAULT_N_REF, build_reference_bank, classify
from cdfmc.constellation import QAM8_GEOMETRIES, ModulationFormat, constellation_points, geometry_ids
from cdfmc.features import AmplitudeGrid, DegenerateInputError
from cdfmc.harness import ExperimentSpec, merge_results, required_osnr, run_sweep

EXIT_USAGE = 2
EXIT_DATA = 3

log = logging.getLogger("cdfmc")


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    """``"10,12,15"`` or a range ``"10:20:0.5"`` (stop inclusive)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1.0)
            start, stop, step = parts
            if step <= 0 or stop < start:
                raise ValueError
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 6) for i in range(n)]
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list 'a,b,c' or range 'start:stop[:step]', got {text!r}")


def _ints(text: str) -> list[int]:
    vals = _floats(text)
    if any(v != int(v) or v < 1 for v in vals):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {text!r}")
    return [int(v) for v in vals]


def _pair(text: str) -> tuple[float, float]:
    parts = text.replace(",", ":").split(":")
    try:
        lo, hi = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo:hi', got {text!r}")
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _format(text: str) -> ModulationFormat:
    try:
        return ModulationFormat.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _format_list(values: list[str] | None) -> list[tuple[ModulationFormat, float | None]]:
    """Expand ``--format`` values; ``QAM16:19`` pins an OSNR for that format."""
    if not values:
        return [(f, None) for f in ModulationFormat]
    out = []
    for item in values:
        for part in item.split(","):
            if part.strip().lower() == "all":
                out += [(f, None) for f in ModulationFormat]
                continue
            name, _, osnr = part.partition(":")
            try:
                out.append((ModulationFormat.parse(name), float(osnr) if osnr else None))
            except ValueError as exc:
                raise UsageError(str(exc))
    return out


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser, *, trials: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--baud", type=float, default=32e9, help="symbol rate in Bd (default 32e9)")
    p.add_argument("--bank", choices=["analytic", "mc"], default="analytic")
    p.add_argument("--nref", type=int, default=DEFAULT_N_REF, help="symbols per Monte Carlo reference")
    p.add_argument("--qam8-geometry", choices=QAM8_GEOMETRIES, default="circular")
    p.add_argument("--distance-mode", choices=["grid", "samples"], default="grid")
    p.add_argument("--out", help="output path (default stdout)")
    if trials:
        p.add_argument("--trials", type=int, default=500)
        p.add_argument("--osnr-mismatch", type=float, default=0.0,
                       help="bank OSNR offset in dB relative to the true OSNR")
        p.add_argument("--freq-offset", type=float, default=200e6, help="Hz")
        p.add_argument("--linewidth", type=float, default=100e3, help="combined laser linewidth, Hz")
        p.add_argument("--jobs", type=int, default=1)
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--csv", dest="as_json", action="store_false", default=False)
        fmt.add_argument("--json", dest="as_json", action="store_true")


def _bank_method(args) -> str:
    return "monte_carlo" if args.bank == "mc" else "analytic"


def _spec(args, formats, osnrs, counts) -> ExperimentSpec:
    return ExperimentSpec(
        formats=tuple(formats),
        osnr_grid_db=tuple(osnrs),
        sample_counts=tuple(counts),
        trials=args.trials,
        symbol_rate_baud=args.baud,
        freq_offset_hz=args.freq_offset,
        linewidth_hz=args.linewidth,
        master_seed=args.seed,
        bank_method=_bank_method(args),
        n_ref=args.nref,
        osnr_mismatch_db=args.osnr_mismatch,
        distance_mode=args.distance_mode,
        qam8_geometry=args.qam8_geometry,
    )


def _run_grouped(args, default_osnrs, counts):
    groups: dict[tuple[float, ...], list[ModulationFormat]] = {}
    for fmt, pinned in _format_list(args.format):
        osnrs = (pinned,) if pinned is not None else tuple(default_osnrs or ())
        if not osnrs:
            raise UsageError(f"no OSNR given for {fmt.name}; use --osnr or FORMAT:OSNR")
        groups.setdefault(osnrs, []).append(fmt)
    results = [run_sweep(_spec(args, fmts, osnrs, counts), jobs=args.jobs) for osnrs, fmts in groups.items()]
    res = merge_results(results)
    _emit(res.to_json() if args.as_json else res.to_csv(), args.out)


def cmd_sweep_osnr(args) -> None:
    _run_grouped(args, args.osnr, args.samples)


def cmd_sweep_samples(args) -> None:
    _run_grouped(args, args.osnr, args.samples)


def cmd_required_osnr(args) -> None:
    spec = _spec(args, list(ModulationFormat), [0.0], [args.samples])
    results = []
    for fmt, _ in _format_list(args.format):
        res = required_osnr(fmt, args.samples, args.target, tuple(args.range), spec, args.step)
        log.info(res.describe())
        results.append(res.to_dict())
    payload = {"software": f"cdfmc {__version__}", "spec": spec.to_dict(),
               "geometry": geometry_ids(args.qam8_geometry), "results": results}
    if args.as_json:
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        lines = ["format,k_samples,target,required_osnr_db"]
        for r in results:
            osnr = r["required_osnr_db"]
            osnr = f"{osnr:.2f}" if isinstance(osnr, float) else osnr
            lines.append(f"{r['format']},{r['k_samples']},{r['target']:.4f},{osnr}")
        _emit("\n".join(lines) + "\n", args.out)


def cmd_classify(args) -> None:
    block = read_samples(args.path)
    bank = build_reference_bank(
        args.osnr, args.baud, _bank_method(args), args.nref, args.seed,
        AmplitudeGrid(), args.qam8_geometry,
    )
    result = classify(block, bank, mode=args.distance_mode)
    config = {
        "path": str(args.path), "osnr_db": args.osnr, "symbol_rate_baud": args.baud,
        "bank": bank.method, "n_ref": bank.n_ref, "seed": bank.seed,
        "distance_mode": args.distance_mode, "geometry": geometry_ids(args.qam8_geometry),
    }
    _emit(result.to_json(config) + "\n", args.out)


def cmd_reference_cdf(args) -> None:
    formats = [f for f, _ in _format_list(args.format)]
    bank = build_reference_bank(
        args.osnr, args.baud, _bank_method(args), args.nref, args.seed,
        AmplitudeGrid(), args.qam8_geometry,
    )
    if len(formats) == 1:
        text = bank.entries[formats[0]].to_csv()
    else:
        lines = ["z," + ",".join(f.name for f in formats)]
        for i, z in enumerate(bank.grid.points):
            lines.append(f"{z:.17g}," + ",".join(f"{bank.entries[f].values[i]:.17g}" for f in formats))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)


def cmd_gen(args) -> None:
    config = ChannelConfig(
        osnr_db=args.osnr, symbol_rate_baud=args.baud, freq_offset_hz=args.freq_offset,
        linewidth_hz=args.linewidth, amplitude_scale=args.scale, seed=args.seed,
        qam8_geometry=args.qam8_geometry,
    )
    block = simulate_block(args.format, args.samples, config)
    if Path(args.out).suffix.lower() not in (".csv", ".iq"):
        raise UsageError("--out must end in .csv or .iq")
    write_samples(args.out, block.samples)


def cmd_constellation(args) -> None:
    _emit(constellation_points(args.format, args.qam8_geometry).to_csv(), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cdfmc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cdfmc {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    verbose = argparse.ArgumentParser(add_help=False)
    verbose.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-osnr", parents=[verbose], help="accuracy vs OSNR")
    p.add_argument("--format", action="append", help="format(s), e.g. QAM16 or QAM4,QAM64; default all")
    p.add_argument("--osnr", type=_floats, required=True, help="dB list or start:stop:step")
    p.add_argument("--samples", type=_ints, default=[10_000])
    _add_common(p)
    p.set_defaults(func=cmd_sweep_osnr)

    p = sub.add_parser("sweep-samples", parents=[verbose], help="accuracy vs number of samples")
    p.add_argument("--format", action="append", help="FORMAT or FORMAT:OSNR")
    p.add_argument("--osnr", type=_floats, help="OSNR(s) for formats without a pinned value")
    p.add_argument("--samples", type=_ints, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_sweep_samples)

    p = sub.add_parser("required-osnr", parents=[verbose], help="lowest OSNR reaching a target accuracy")
    p.add_argument("--format", action="append")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--target", type=float, default=1.0)
    p.add_argument("--range", type=_pair, default=(0.0, 30.0), help="lo:hi in dB (default 0:30)")
    p.add_argument("--step", type=float, default=0.5)
    _add_common(p)
    p.set_defaults(func=cmd_required_osnr)

    p = sub.add_parser("classify", parents=[verbose], help="classify a .csv or .iq sample file")
    p.add_argument("path")
    p.add_argument("--osnr", type=float, required=True)
    _add_common(p, trials=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reference-cdf", parents=[verbose], help="reference CDF(s) as CSV")
    p.add_argument("--format", action="append", required=True, help="format, or 'all'")
    p.add_argument("--osnr", type=float, required=True)
    _add_common(p, trials=False)
    p.set_defaults(func=cmd_reference_cdf)

    p = sub.add_parser("gen", parents=[verbose], help="write a simulated sample file")
    p.add_argument("--format", type=_format, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--osnr", type=float, required=True, help="dB; 'inf' for noiseless")
    p.add_argument("--freq-offset", type=float, default=0.0)
    p.add_argument("--linewidth", type=float, default=0.0)
    p.add_argument("--scale", type=float, default=1.0)
    _add_common(p, trials=False)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("constellation", parents=[verbose], help="constellation points as CSV (re,im)")
    p.add_argument("--format", type=_format, required=True)
    p.add_argument("--qam8-geometry", choices=QAM8_GEOMETRIES, default="circular")
    p.add_argument("--out")
    p.set_defaults(func=cmd_constellation)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "gen" and not args.out:
        parser.error("gen requires --out")
    try:
        args.func(args)
    except (SampleFormatError, DegenerateInputError) as exc:
        print(f"cdfmc: input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, ValueError) as exc:
        print(f"cdfmc: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
