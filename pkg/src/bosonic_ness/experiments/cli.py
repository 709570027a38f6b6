"""Command-line entry point: ``bosonic-ness {solve,sweep,fit,kato,presets}``.

Exit status is 0 on success, 1 for invalid input (config, parameters, paths)
and 2 when a solver fails.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import OrderedDict

from bosonic_ness.experiments.config import ConfigError, load_config
from bosonic_ness.experiments.export import export, read, to_csv, to_json
from bosonic_ness.experiments.fit import fit_cmi_decay, fit_cmi_scaling, loglog_slope
from bosonic_ness.experiments.presets import PRESETS, run_preset
from bosonic_ness.experiments.sweep import SweepSpec, resolve_workers, run_sweep, spec_from_config
from bosonic_ness.ness import (SolverError, analytic_ness, lyapunov_residual,
                               solve_self_consistent)
from bosonic_ness.transport import transport_report

log = logging.getLogger("bosonic_ness")

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


def _emit(rows, columns, args) -> None:
    if args.out:
        export(rows, args.format, args.out, columns)
        log.info("wrote %d rows to %s", len(rows), args.out)
    else:
        text = (to_csv if args.format == "csv" else to_json)(rows, columns)
        sys.stdout.write(text)


def _spec(args) -> SweepSpec:
    if args.preset:
        raise ConfigError("--preset cannot be combined with this subcommand")
    if not args.config:
        raise ConfigError("--config is required")
    return spec_from_config(load_config(args.config))


def cmd_solve(args) -> int:
    spec = _spec(args)
    if spec.axes:
        raise ConfigError("solve takes single parameter values; use sweep for lists")
    params = spec.base
    m = analytic_ness(params) if args.method == "closed_form" else solve_self_consistent(params, args.method)
    report = transport_report(params, m)
    rC, rB = lyapunov_residual(params, m)
    row = OrderedDict(L=params.L, Gamma=params.Gamma, regime=report.regime, current=report.J,
                      profile=[float(x) for x in report.profile], residual=max(rC, rB), error="")
    _emit([row], list(row), args)
    return EXIT_OK


def cmd_sweep(args) -> int:
    workers = resolve_workers(args.workers)
    if args.preset:
        if args.config:
            raise ConfigError("give either --config or --preset, not both")
        rows, columns = run_preset(args.preset, workers)
    else:
        spec = _spec(args)
        rows, columns = run_sweep(spec, workers), spec.columns
    _emit(rows, columns, args)
    failed = sum(1 for r in rows if r.get("error"))
    if failed:
        log.warning("%d of %d grid points failed; see the error column", failed, len(rows))
    return EXIT_OK


def _input_rows(args):
    if args.input:
        return read(args.input)
    if args.preset:
        return run_preset(args.preset, resolve_workers(args.workers))[0]
    return run_sweep(_spec(args), resolve_workers(args.workers))


def cmd_fit(args) -> int:
    rows = _input_rows(args)
    if args.kind == "scaling":
        if args.b is None:
            raise ConfigError("scaling fit needs --b")
        groups = _group(rows, exclude=("Gamma", "L", "cmi", "error"), require=("b", args.b))
        out = []
        for key, members in groups.items():
            f = fit_cmi_scaling(members, args.b)
            out.append(OrderedDict(list(key) + [("b", args.b), ("u", f.u), ("v", f.v),
                                                ("exponent_used", f.exponent_used),
                                                ("r_squared", f.r_squared), ("error", "")]))
    elif args.kind == "decay":
        groups = _group(rows, exclude=("b", "cmi", "error"))
        out = []
        for key, members in groups.items():
            members = [r for r in members if not r.get("error")]
            f = fit_cmi_decay([r["b"] for r in members], [r["cmi"] for r in members])
            out.append(OrderedDict(list(key) + [("R", f.R), ("amplitude", f.amplitude),
                                                ("r", f.r), ("error", "")]))
    else:
        measure = args.measure
        groups = _group(rows, exclude=("L", measure, "error"),
                        require=("b", args.b) if args.b is not None else None)
        out = []
        for key, members in groups.items():
            members = [r for r in members if not r.get("error")]
            slope = loglog_slope([r["L"] for r in members], [r[measure] for r in members])
            out.append(OrderedDict(list(key) + [("measure", measure), ("slope", slope),
                                                ("L_max", max(r["L"] for r in members)),
                                                ("error", "")]))
    if not out:
        raise ConfigError("no rows to fit")
    _emit(out, list(out[0]), args)
    return EXIT_OK


def _group(rows, exclude, require=None):
    groups: "OrderedDict[tuple, list]" = OrderedDict()
    for row in rows:
        if require is not None and row.get(require[0]) is not None and int(row[require[0]]) != require[1]:
            continue
        key = tuple((k, v) for k, v in row.items()
                    if k not in exclude and not k.startswith("kato") and k != "b"
                    and not isinstance(v, list) and k in _AXES)
        groups.setdefault(key, []).append(row)
    return groups


_AXES = ("N1", "NL", "Gamma", "lambda", "gamma", "k", "L")


def cmd_kato(args) -> int:
    workers = resolve_workers(args.workers)
    if args.preset:
        if args.preset != "kato":
            raise ConfigError("the kato subcommand only runs the 'kato' preset")
        rows, columns = run_preset("kato", workers)
    else:
        spec = _spec(args)
        spec = SweepSpec(base=spec.base, axes=spec.axes, measures=("kato",))
        rows, columns = run_sweep(spec, workers), spec.columns
    _emit(rows, columns, args)
    return EXIT_OK


def cmd_presets(args) -> int:
    for p in PRESETS.values():
        points = sum(len(list(s.grid())) for s in p.parts)
        print(f"{p.name:7s} {points:4d} points  {p.description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bosonic-ness",
                                     description="Steady states of boundary-driven bosonic chains.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--preset", help="named sweep (see the presets subcommand)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default: $BOSONIC_NESS_WORKERS or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="steady state at one parameter point")
    p.add_argument("--method", choices=("closed_form", "vectorized", "fixed_point"),
                   default="closed_form")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", parents=[common], help="evaluate measures on a parameter grid")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", parents=[common], help="scaling-law fit or log-log slopes")
    p.add_argument("--input", help="rows previously written by sweep (csv or json)")
    p.add_argument("--kind", choices=("scaling", "decay", "slope"), default="scaling")
    p.add_argument("--b", type=int, default=None, help="middle-block size")
    p.add_argument("--measure", default="cmi", help="column to fit for --kind slope")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("kato", parents=[common], help="local-equilibrium bound")
    p.set_defaults(func=cmd_kato)

    p = sub.add_parser("presets", help="list the figure presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except SolverError as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
