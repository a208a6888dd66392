"""Command line: ``vqx run``, ``vqx spectrum`` and ``vqx plot``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .cases import bond_length_grid, get_molecule
from .encoding import build_observables, qubit_hamiltonian
from .integrals import molecular_problem
from .oracle import fci_spectrum
from .sweep import ConfigError, RunConfig, emit_tables, run_case, variational_violations


def _config_from_args(args) -> RunConfig:
    """Start from ``--config`` (or the ``--case`` preset) and apply command-line overrides."""
    if args.config:
        d = RunConfig.from_json(args.config).to_dict()
    elif args.case is not None:
        d = RunConfig.for_case(args.case).to_dict()
        if args.molecule and d["molecule"] != args.molecule:
            raise ConfigError(f"case {args.case} is a {d['molecule']} case, not {args.molecule}")
    else:
        raise ConfigError("give --config or --case")
    if args.config and args.molecule and d["molecule"] != args.molecule:
        raise ConfigError(f"config is for {d['molecule']}, not {args.molecule}")
    if args.r_min is not None or args.r_max is not None or args.step is not None:
        lo, hi, step = get_molecule(d["molecule"]).grid
        d["bond_lengths"] = bond_length_grid(lo if args.r_min is None else args.r_min,
                                             hi if args.r_max is None else args.r_max,
                                             step if args.step is None else args.step)
    for key in ("samples", "seed", "encoding", "depth", "out"):
        if getattr(args, key) is not None:
            d[key] = getattr(args, key)
    if args.samples is not None and d.get("seeds") is not None:
        d["seeds"] = None
    if args.deflation is not None:
        d["objective"]["deflation_coefficient"] = args.deflation
    if args.no_deflation_shift:
        d["objective"]["deflation_shift"] = False
    if args.max_updates is not None:
        d["optimizer"]["max_updates"] = args.max_updates
    return RunConfig.from_dict(d)


def cmd_run(args) -> int:
    cfg = _config_from_args(args)
    if args.print_config:
        print(cfg.to_json())
        return 0
    records, traces = run_case(cfg)
    files = emit_tables(records, traces, cfg.out)
    failed = sum(r.status != "ok" for r in records)
    low = variational_violations(records)
    print(f"case {cfg.case_id}: {len(records)} records ({failed} failed) -> {cfg.out}/ ({len(files)} files)")
    if low:
        print(f"warning: {len(low)} records below their sector ground energy", file=sys.stderr)
    return 1 if failed == len(records) else 0


def cmd_spectrum(args) -> int:
    mol = get_molecule(args.molecule)
    problem = molecular_problem(mol.geometry(args.r))
    H = qubit_hamiltonian(problem, args.encoding)
    spec = fci_spectrum(H, build_observables(problem.n_spatial, args.encoding))
    if args.csv:
        spec.to_csv(Path(args.csv))
    print("index,energy,N,Sz,S2")
    for k, e, n, sz, s2 in spec.rows():
        n, sz, s2 = (round(float(v), 4) + 0.0 for v in (n, sz, s2))
        print(f"{k},{e:.10f},{n:.4f},{sz:+.4f},{s2:.4f}")
    return 0


def cmd_plot(args) -> int:
    from .plots import plot_results

    for p in plot_results(args.results):
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vqx", description="Variational eigensolver sweeps for H2 and HeH.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one numbered case over a bond-length grid")
    run.add_argument("--config", type=Path, help="JSON run config")
    run.add_argument("--molecule", choices=["H2", "HeH"], help="checked against the case")
    run.add_argument("--case", type=int, help="case number 1-12")
    run.add_argument("--r-min", type=float)
    run.add_argument("--r-max", type=float)
    run.add_argument("--step", type=float)
    run.add_argument("--samples", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--encoding", choices=["bk", "jw"])
    run.add_argument("--depth", type=int)
    run.add_argument("--max-updates", type=int)
    run.add_argument("--deflation", type=float, help="deflation coefficient A")
    run.add_argument("--no-deflation-shift", action="store_true",
                     help="use the bare coefficient A without lifting it above the spectrum")
    run.add_argument("--out")
    run.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    run.set_defaults(func=cmd_run)

    spec = sub.add_parser("spectrum", help="exact labeled spectrum at one bond length")
    spec.add_argument("--molecule", default="H2", choices=["H2", "HeH"])
    spec.add_argument("--r", type=float, required=True, help="bond length in Å")
    spec.add_argument("--encoding", default="bk", choices=["bk", "jw"])
    spec.add_argument("--csv", help="also write the spectrum to this CSV file")
    spec.set_defaults(func=cmd_spectrum)

    plot = sub.add_parser("plot", help="render SVG figures from a results directory")
    plot.add_argument("results", type=Path)
    plot.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError, json.JSONDecodeError) as exc:
        print(f"vqx: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
