"""Command-line entry point: ``aamemory {echo,report,sweep,phase-scan,oracle-check}``."""

from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from .dynamics import TimeGrid, decoherence_series
from .lattice import GOLDEN_RATIO, LatticeConfig
from .memory import refine_until_stable
from .oracle import many_body_oracle
from .recipes import R_CURVE_DELTAS
from .sweep import (
    GridSpec,
    SweepSpec,
    emit_echo_series,
    emit_phase_scan,
    fmt,
    load_sweep_config,
    run_sweep,
)


def _lattice_args(p: argparse.ArgumentParser):
    p.add_argument("-L", "--length", type=int, default=233)
    p.add_argument("--delta", type=float, default=2.5, help="Delta/J")
    p.add_argument("--epsilon", type=float, default=1e-2, help="epsilon/J")
    p.add_argument("--phase", type=float, default=0.0, help="phi in radians")
    p.add_argument("--beta", type=float, default=GOLDEN_RATIO)
    p.add_argument("--site", type=int, default=1, help="impurity site label")
    p.add_argument("--boundary", choices=["periodic", "open"], default="periodic")
    p.add_argument("--t-max", type=float, default=None,
                   help="time horizon in 1/J (default: horizon/epsilon)")
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--horizon", type=float, default=None,
                   help="horizon in units of 1/epsilon when --t-max is not given")


def _config(args) -> LatticeConfig:
    return LatticeConfig(
        length=args.length, potential_strength=args.delta, incommensuration=args.beta,
        phase=args.phase, impurity_coupling=args.epsilon, impurity_site=args.site,
        boundary=args.boundary,
    )


def _grid(args, config: LatticeConfig) -> TimeGrid:
    spec = GridSpec(n_samples=args.samples, t_max=args.t_max)
    if args.horizon is not None:
        spec = GridSpec(n_samples=args.samples, t_max=args.t_max, horizon=args.horizon)
    return spec.for_config(config)


def cmd_echo(args) -> int:
    config = _config(args)
    series = emit_echo_series(config, _grid(args, config), args.output)
    print(f"wrote {len(series)} samples to {args.output}; "
          f"min |chi| = {fmt(float(series.magnitude.min()))}")
    return 0


def cmd_report(args) -> int:
    config = _config(args)
    rep = refine_until_stable(config, _grid(args, config), args.rel_tol, args.max_doublings)
    fields = {
        "backflow": rep.backflow, "outflow": rep.outflow, "ratio": rep.ratio,
        "abs_chi_final": rep.final_magnitude, "t_max": rep.t_max,
        "n_samples": rep.n_samples, "converged": rep.converged,
    }
    for k, v in fields.items():
        print(f"{k} = {fmt(v)}")
    print("ladder = " + "; ".join(f"{n}:{fmt(r)}" for n, r in rep.history))
    return 0 if rep.converged else 3


def cmd_sweep(args) -> int:
    spec = load_sweep_config(args.config, seed=args.seed)
    out = args.output or spec.output_path
    if out is None:
        raise SystemExit("sweep: no output path (use -o or [output] path)")
    records = run_sweep(spec, out, workers=args.workers, resume=args.resume)
    bad = sum(r.status != "ok" for r in records)
    print(f"wrote {len(records)} records to {out} ({bad} errors)")
    return 0 if bad == 0 else 2


def cmd_phase_scan(args) -> int:
    deltas = R_CURVE_DELTAS
    if args.delta_range:
        start, stop, step = args.delta_range
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        deltas = tuple(round(start + k * step, 12) for k in range(n))
    spec = SweepSpec(deltas, (args.epsilon,), (args.length,), phase_count=args.count,
                     seed=args.seed, grid=GridSpec(n_samples=args.samples))
    records = emit_phase_scan(spec, args.output, workers=args.workers)
    print(f"wrote {len(records)} records to {args.output}")
    return 0


def oracle_check(lengths=(5, 8), draws: int = 20, seed: int = 0, samples: int = 20,
                 t_max: float = 5.0) -> float:
    """Largest deviation between the determinant formula and the many-body reference."""
    rng = np.random.default_rng(seed)
    grid = TimeGrid(t_max, samples)
    worst = 0.0
    for length in lengths:
        for _ in range(draws):
            config = LatticeConfig(
                length, potential_strength=rng.uniform(0, 3),
                impurity_coupling=10 ** rng.uniform(-3, 0),
                phase=rng.uniform(0, 2 * math.pi),
            )
            a = decoherence_series(config, grid).chi
            b = many_body_oracle(config, grid).chi
            worst = max(worst, float(np.abs(a - b).max()))
    return worst


def cmd_oracle_check(args) -> int:
    worst = oracle_check(args.lengths, args.draws, args.seed, args.samples, args.t_max)
    ok = worst <= args.tol
    print(f"max deviation = {worst:.3e} ({'ok' if ok else 'FAIL'}, tol {args.tol:.0e})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aamemory", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("echo", help="write chi(t) of one configuration")
    _lattice_args(p)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_echo)

    p = sub.add_parser("report", help="backflow report with grid refinement")
    _lattice_args(p)
    p.add_argument("--rel-tol", type=float, default=0.01)
    p.add_argument("--max-doublings", type=int, default=3)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="run a sweep described by a config file")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None, help="default: all cores")
    p.add_argument("--resume", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("phase-scan", help="ratio curves for random potential phases")
    p.add_argument("-L", "--length", type=int, default=233)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--delta-range", type=float, nargs=3, metavar=("START", "STOP", "STEP"))
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_phase_scan)

    p = sub.add_parser("oracle-check", help="compare against exact many-body propagation")
    p.add_argument("--lengths", type=int, nargs="+", default=[5, 8])
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"aamemory {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
