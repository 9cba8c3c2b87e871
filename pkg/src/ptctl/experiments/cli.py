"""Command-line entry point: ``ptctl run | sweep-energy | probe-uniform | plot``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DomainError, NumericalError
from ..synthesis import aux_from_section, from_config, parse_config
from .config import disturbance_from_section, parse_list, sim_from_section
from .scenarios import SCENARIOS, energy_sweep, run_scenario, uniform_stability_probe, write_table
from .svg import SPECS, export_svg

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def cmd_run(args) -> list[Path]:
    return run_scenario(args.scenario, args.set or [], args.out)


def cmd_sweep(args) -> list[Path]:
    cp = parse_config(_read(args.config))
    for name in ("timescale", "aux"):
        if name not in cp:
            raise ConfigError(f"missing [{name}] section")
    aux = aux_from_section(cp["aux"])
    try:
        T_c = float(cp["timescale"]["T_c"])
        basis = cp["basis"] if "basis" in cp else {}
        rho = float(basis.get("rho", 0.0))
        beta = float(basis.get("beta", 1.0))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    cfg = sim_from_section(cp["sim"] if "sim" in cp else None, T_c)
    res = energy_sweep(aux, T_c, parse_list(args.alphas), list(parse_list(args.x0)),
                       rho=rho, beta=beta, cfg=cfg)
    rows = [[a, e, u, s, pr, km] for a, e, u, s, pr, km in
            zip(res.alphas, res.energy, res.sup_u, res.settling, res.predicted, res.kappa_max)]
    out = Path(args.out) / "sweep.csv"
    return [write_table(out, ["alpha", "E_T", "sup_u", "observed_settling", "predicted_bound",
                              "kappa_max"], rows)]


def cmd_probe(args) -> list[Path]:
    text = _read(args.config)
    ctrl = from_config(text)
    cp = parse_config(text)
    dist = disturbance_from_section(cp["disturbance"] if "disturbance" in cp else None)
    if args.x0:
        x0 = list(parse_list(args.x0))
    elif "probe" in cp and "x0" in cp["probe"]:
        x0 = list(parse_list(cp["probe"]["x0"]))
    else:
        raise ConfigError("no initial state: pass --x0 or set x0 in a [probe] section")
    sim = sim_from_section(cp["sim"] if "sim" in cp else None, ctrl.T_c)
    tds = parse_list(args.td)
    if args.fractions:
        tds = tuple(f * ctrl.T_c for f in tds)
    res = uniform_stability_probe(ctrl, tds, x0, args.height, args.width, dist=dist, h=sim.h,
                                  record_stride=sim.record_stride)
    out = Path(args.out) / "probe.csv"
    rows = [[td, pk] for td, pk in zip(res.t_d, res.peaks)]
    return [write_table(out, ["t_d", "peak_abs_xn"], rows)]


def cmd_plot(args) -> list[Path]:
    return [export_svg(args.csv, args.spec, args.out)]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ptctl", description="Predefined-time controller experiments")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a named scenario")
    r.add_argument("scenario", help=", ".join(sorted(SCENARIOS)))
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a parameter")
    r.add_argument("--out", default="out")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep-energy", help="energy versus alpha")
    s.add_argument("--config", required=True)
    s.add_argument("--alphas", required=True, help="comma-separated, increasing")
    s.add_argument("--x0", required=True, help="comma-separated initial state")
    s.add_argument("--out", default="out")
    s.set_defaults(func=cmd_sweep)

    p = sub.add_parser("probe-uniform", help="peak response to late measurement pulses")
    p.add_argument("--config", required=True)
    p.add_argument("--td", required=True, help="comma-separated pulse start times")
    p.add_argument("--fractions", action="store_true", help="read --td as fractions of T_c")
    p.add_argument("--x0", help="comma-separated initial state")
    p.add_argument("--height", type=float, default=0.1)
    p.add_argument("--width", type=float, default=1e-3)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_probe)

    g = sub.add_parser("plot", help="SVG line plot of trajectory CSVs")
    g.add_argument("csv", nargs="+")
    g.add_argument("--spec", required=True, choices=sorted(SPECS))
    g.add_argument("--out")
    g.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    np.seterr(over="ignore", invalid="ignore")
    try:
        paths = args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
