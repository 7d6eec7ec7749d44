"""Command-line front end.

Commands: area, capacity, condenser, verify <statement>, sweep,
lemniscate-svg.  Output is one key=value record per line (stable order), or
a single JSON document with --json.  Exit codes: 0 success (and verdicts
HOLDS/EQUALITY), 2 bad inputs, 3 budget too small, 4 INCONCLUSIVE,
5 VIOLATED.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np
import yaml

from . import formats, sweep as sweep_mod, theorems as th
from .capacity import condenser_capacity, condenser_potential, log_capacity
from .errors import BudgetTooSmall, FormatError, LemlabError
from .polynomial import Polynomial
from .region import Disc, SamplingBudget, area, bounding_disc, sublevel_region
from skimage.measure import find_contours

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_BUDGET = 3
EXIT_INCONCLUSIVE = 4
EXIT_VIOLATED = 5

_VERDICT_EXITS = {
    "HOLDS": EXIT_OK,
    "EQUALITY": EXIT_OK,
    "INCONCLUSIVE": EXIT_INCONCLUSIVE,
    "VIOLATED": EXIT_VIOLATED,
}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LEMLAB_THREADS", "1")))
    except ValueError:
        return 1


def _emit(record: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(record, sort_keys=False))
    else:
        for k, v in record.items():
            print(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}")


def _parse_disc(text: str) -> Disc:
    parts = text.split(",")
    if len(parts) != 2:
        raise FormatError("disc literal must be 'center,radius'")
    return Disc(formats.parse_complex(parts[0]), float(parts[1]))


def cmd_area(args) -> int:
    K = formats.load_region(args.region_file)
    est = area(K, SamplingBudget(samples=args.samples, seed=args.seed,
                                 method=args.method, grid_h=args.grid_h,
                                 rel_err=args.rel_err))
    _emit(
        {
            "value": est.value,
            "err": est.err,
            "method": est.method,
            "samples_or_resolution": est.samples_or_resolution,
            "seed": args.seed,
            "threads": _threads(),
        },
        args.json,
    )
    return EXIT_OK


def cmd_capacity(args) -> int:
    K = formats.load_region(args.region_file)
    est = log_capacity(K, n_points=args.fekete_n)
    _emit(
        {
            "value": est.value,
            "err": est.err,
            "method": est.method,
            "n_points": args.fekete_n,
            "threads": _threads(),
        },
        args.json,
    )
    return EXIT_OK


def cmd_condenser(args) -> int:
    C = formats.load_condenser(args.condenser_file)
    est = condenser_capacity(C, args.grid_h)
    if args.dump_grid:
        grid = condenser_potential(C, args.grid_h)
        np.savetxt(args.dump_grid, grid.values, delimiter=",")
    _emit(
        {
            "value": est.value,
            "err": est.err,
            "method": est.method,
            "grid_h": args.grid_h,
            "threads": _threads(),
        },
        args.json,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    budget = SamplingBudget(samples=args.samples, seed=args.seed)
    sid = args.statement
    if sid == "polya":
        rep = th.verify_polya(_required_poly(args), _required_disc(args), budget)
    elif sid == "main":
        rep = th.verify_main(_required_poly(args), _input_region(args), budget)
    elif sid == "multiplicity":
        rep = th.verify_multiplicity(_required_poly(args), _input_region(args), budget)
    elif sid == "roundness":
        rep = th.verify_roundness(_required_poly(args), _input_region(args), budget,
                                  n_points=args.fekete_n)
    elif sid == "carleman":
        rep = th.verify_carleman(_required_condenser(args), args.grid_h, budget)
    elif sid == "isoperimetric":
        rep = th.verify_isoperimetric(_input_region(args), budget, n_points=args.fekete_n)
    elif sid == "pullback_lemma":
        rep = th.verify_pullback_lemma(_required_poly(args), _required_condenser(args), args.grid_h)
    elif sid == "capacity_pullback":
        rep = th.verify_capacity_pullback(_required_poly(args), _input_region(args),
                                          n_points=args.fekete_n)
    elif sid == "integrated_carleman":
        if args.x is None:
            raise FormatError("statement integrated_carleman needs --x")
        rep = th.verify_integrated_carleman(_required_poly(args), args.x, budget)
    elif sid == "threshold_bound":
        if args.area_target is None:
            raise FormatError("statement threshold_bound needs --area-target")
        rep = th.verify_threshold_bound(_required_poly(args), args.area_target, budget)
    else:
        raise FormatError(f"unknown statement {sid!r}")
    if args.json:
        _emit(
            {
                "statement_id": rep.statement_id,
                "lhs": rep.lhs,
                "rhs": rep.rhs,
                "lhs_err": rep.lhs_err,
                "rhs_err": rep.rhs_err,
                "margin": rep.margin,
                "verdict": rep.verdict,
                "seed": rep.seed,
                "inputs_digest": rep.inputs_digest,
                "threads": _threads(),
            },
            True,
        )
    else:
        print(rep.record())
    return _VERDICT_EXITS[rep.verdict]


def _required_poly(args) -> Polynomial:
    if not args.poly:
        raise FormatError("this statement needs --poly")
    return formats.parse_polynomial(args.poly)


def _required_disc(args) -> Disc:
    if not args.disc:
        raise FormatError("this statement needs --disc 'center,radius'")
    return _parse_disc(args.disc)


def _input_region(args):
    if args.region:
        return formats.load_region(args.region)
    if args.disc:
        return _parse_disc(args.disc)
    raise FormatError("this statement needs --region FILE or --disc 'center,radius'")


def _required_condenser(args):
    if not args.condenser:
        raise FormatError("this statement needs --condenser FILE")
    return formats.load_condenser(args.condenser)


def cmd_sweep(args) -> int:
    with open(args.config_file) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise FormatError(f"unparseable sweep config: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("sweep config must be a mapping")
    try:
        cfg = sweep_mod.SweepConfig(
            seed=int(doc["seed"]),
            cases=int(doc["cases"]),
            degree_max=int(doc.get("degree_max", 5)),
            statements=tuple(doc.get("statements", th.STATEMENT_IDS)),
            mc_samples=int(doc.get("mc_samples", 100_000)),
            grid_h=float(doc.get("grid_h", 0.04)),
            output_path=str(doc.get("output_path", "sweep.txt")),
        )
    except KeyError as exc:
        raise FormatError(f"sweep config missing field {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise FormatError(f"bad sweep config: {exc}") from exc
    result = sweep_mod.run_sweep(cfg, threads=_threads())
    with open(cfg.output_path, "w") as fh:
        fh.write(result.text())
    for line in result.lines[-14:]:
        print(line)
    print(f"violated={result.violated}")
    return EXIT_VIOLATED if result.violated else EXIT_OK


def write_lemniscate_svg(p: Polynomial, r: float, out_path: str, resolution: int = 512) -> int:
    """Trace {z : |p(z)| = r^deg} by marching squares and write an SVG.

    Returns the number of path elements written.
    """
    if p.degree < 1:
        raise FormatError("lemniscate needs degree >= 1")
    if r <= 0:
        raise FormatError("lemniscate radius must be > 0")
    level = float(r) ** p.degree
    K = sublevel_region(p, level)
    bd = bounding_disc(K)
    rad = bd.radius * 1.05
    xs = np.linspace(bd.center.real - rad, bd.center.real + rad, resolution)
    ys = np.linspace(bd.center.imag - rad, bd.center.imag + rad, resolution)
    F = np.abs(p(xs[None, :] + 1j * ys[:, None])) - level
    paths = []
    for c in find_contours(F, 0.0):
        px = np.interp(c[:, 1], np.arange(resolution), xs)
        py = np.interp(c[:, 0], np.arange(resolution), ys)
        closed = np.hypot(px[0] - px[-1], py[0] - py[-1]) < 1e-9
        # SVG y axis points down; flip so the plane renders upright
        coords = " L ".join(f"{x:.6g} {-y:.6g}" for x, y in zip(px, py))
        paths.append(f'<path d="M {coords}{" Z" if closed else ""}" />')
    vb = (
        f"{bd.center.real - rad:.6g} {-bd.center.imag - rad:.6g} {2 * rad:.6g} {2 * rad:.6g}"
    )
    stroke = 2 * rad / 400
    body = "\n    ".join(paths)
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vb}">\n'
        f'  <g fill="none" stroke="black" stroke-width="{stroke:.6g}">\n'
        f"    {body}\n"
        f"  </g>\n"
        f"</svg>\n"
    )
    with open(out_path, "w") as fh:
        fh.write(svg)
    return len(paths)


def cmd_lemniscate_svg(args) -> int:
    p = formats.parse_polynomial(args.poly)
    n = write_lemniscate_svg(p, args.r, args.out, resolution=args.resolution)
    _emit({"paths": n, "out": args.out, "resolution": args.resolution}, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lemlab")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=200_000)
        sp.add_argument("--grid-h", dest="grid_h", type=float, default=0.02)
        sp.add_argument("--fekete-n", dest="fekete_n", type=int, default=256)
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("area", help="area of a region file")
    sp.add_argument("region_file")
    sp.add_argument("--method", choices=("auto", "exact", "mc", "grid"), default="auto")
    sp.add_argument("--rel-err", dest="rel_err", type=float, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_area)

    sp = sub.add_parser("capacity", help="logarithmic capacity of a region file")
    sp.add_argument("region_file")
    common(sp)
    sp.set_defaults(fn=cmd_capacity)

    sp = sub.add_parser("condenser", help="condenser capacity of a condenser file")
    sp.add_argument("condenser_file")
    sp.add_argument("--dump-grid", dest="dump_grid", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_condenser)

    sp = sub.add_parser("verify", help="verify one statement")
    sp.add_argument("statement", choices=th.STATEMENT_IDS)
    sp.add_argument("--poly", default=None, help="comma-separated a+bi coefficients, low to high")
    sp.add_argument("--disc", default=None, help="'center,radius' e.g. '0+0i,1'")
    sp.add_argument("--region", default=None, help="region file")
    sp.add_argument("--condenser", default=None, help="condenser file")
    sp.add_argument("--x", type=float, default=None, help="sublevel threshold")
    sp.add_argument("--area-target", dest="area_target", type=float, default=None)
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("sweep", help="run a randomized sweep from a config file")
    sp.add_argument("config_file")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("lemniscate-svg", help="export the level curve |p(z)| = r^deg as SVG")
    sp.add_argument("--poly", required=True,
                    help="comma-separated a+bi coefficients, low to high")
    sp.add_argument("r", type=float)
    sp.add_argument("out")
    sp.add_argument("--resolution", type=int, default=512)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_lemniscate_svg)
    return ap


# values like "-1+0i,0+0i,1+0i" start with a dash; merge them into the
# --flag=value form so argparse does not mistake them for option names
_VALUE_FLAGS = ("--poly", "--disc", "--region", "--condenser", "--x", "--area-target")


def _merge_flag_values(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    ap = build_parser()
    try:
        args = ap.parse_args(_merge_flag_values(list(argv)))
    except SystemExit as exc:
        return EXIT_BAD_INPUT if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except BudgetTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (FormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except LemlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
