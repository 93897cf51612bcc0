"""Command-line front end.

Exit status: 0 success, 1 a check failed, 2 usage error, 3 numerical failure.
When ``--output`` is omitted the result goes to stdout, or to
``$RESLIMIT_OUTPUT_DIR/<command>.<ext>`` if that variable is set.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import io as rio
from .limits import (
    compute_s_star,
    construct_number_ambiguity,
    construct_support_ambiguity,
    limit_report,
)
from .model import NOISE_ALIASES, DiscreteMeasure, NoiseSpec, ProblemPriors, SamplingGrid, Scene
from .multipole import build_basis, sigma_min_curve
from .music import default_order, detect_source_number, separation_sweep
from .reference import run_reference_checks
from .suites import SUITES

OUTPUT_ENV = "RESLIMIT_OUTPUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _grid(args):
    try:
        return SamplingGrid(args.grid_R, args.grid_h)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _priors(args):
    try:
        return ProblemPriors(args.d, args.sigma, args.M, args.omega)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit(args, text, ext):
    target = args.output
    if target is None and os.environ.get(OUTPUT_ENV):
        target = Path(os.environ[OUTPUT_ENV]) / f"{args.command}.{ext}"
    if target is None or str(target) == "-":
        sys.stdout.write(text)
    else:
        target = Path(target)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, newline="")


def _table(header, rows):
    cells = [[rio.fmt(v) for v in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _scene_from_args(args):
    if args.scene:
        try:
            return rio.load_scene(args.scene)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read scene {args.scene}: {exc}") from exc
        except Exception as exc:
            raise UsageError(f"invalid scene {args.scene}: {exc}") from exc
    if args.positions is None:
        raise UsageError("give --scene or --positions")
    amps = args.amplitudes if args.amplitudes is not None else [1.0] * len(args.positions)
    if len(amps) != len(args.positions):
        raise UsageError("--positions and --amplitudes differ in length")
    try:
        return Scene(DiscreteMeasure(args.positions, amps), _grid(args),
                     NoiseSpec(args.sigma, args.noise_model, args.seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_simulate(args):
    scene = _scene_from_args(args)
    image = scene.image()
    if args.format == "json":
        doc = rio.scene_to_dict(scene)
        doc["image"] = {"x": scene.grid.points, "value": image}
        _emit(args, rio.dumps(doc), "json")
    else:
        _emit(args, rio.image_csv(scene.grid, image), "csv")
    return EXIT_OK


def cmd_bounds(args):
    grid = _grid(args)
    if args.sigma_min_curve:
        rows = sigma_min_curve(grid, args.sigma_min_curve)
        _emit(args, rio.csv_text(["s", "sigma_min", "numerical_floor"], rows), "csv")
        return EXIT_OK
    priors = _priors(args)
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    report = limit_report(priors, args.n, args.m_min, grid, args.d_min, args.s)
    doc = report.as_dict()
    rio.validate(rio._clean(doc), "report")
    if args.format == "table":
        _emit(args, _table(["quantity", "value"], list(doc.items())), "txt")
    else:
        _emit(args, rio.dumps(doc), "json")
    return EXIT_OK


def cmd_detect(args):
    if args.image:
        try:
            with open(args.image, newline="") as fh:
                grid, image = rio.read_image_csv(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read image {args.image}: {exc}") from exc
        sigma = args.sigma
    else:
        scene = _scene_from_args(args)
        grid, image = scene.grid, scene.image()
        sigma = args.sigma if args.sigma is not None else scene.noise.sigma
    if sigma is None or sigma <= 0:
        raise UsageError("detection needs a positive --sigma")
    priors = ProblemPriors(args.d, sigma, args.M)
    s_star = compute_s_star(priors)
    if s_star < 1:
        raise UsageError("s* = 0 for these priors; nothing above the noise")
    s = args.s if args.s is not None else default_order(s_star)
    if s % 2 == 0 or s > s_star:
        raise UsageError(f"--s must be odd and at most s*={s_star}")
    basis = build_basis(grid, s_star)
    doc = detect_source_number(image, basis, s, sigma).as_dict()
    doc["sigma_min"] = basis.sigma_min
    doc["s_star"] = s_star
    _emit(args, rio.dumps(rio.validate(rio._clean(doc), "detection")), "json")
    return EXIT_OK


def cmd_sweep(args):
    priors = _priors(args)
    grid = _grid(args)
    if args.sep_step <= 0 or args.sep_max < args.sep_min:
        raise UsageError("need sep-step > 0 and sep-max >= sep-min")
    count = int(np.floor((args.sep_max - args.sep_min) / args.sep_step + 1e-9)) + 1
    seps = np.round(args.sep_min + args.sep_step * np.arange(count), 12)
    if (args.n - 1) * seps.max() / 2 > priors.d:
        raise UsageError("largest separation puts sources outside [-d, d]")
    rows = separation_sweep(seps, args.n, priors, grid, args.s, range(args.seeds), args.noise_model)
    out = [(r.separation, r.seed, r.sigma_n, r.threshold, r.detected_n) for r in rows]
    _emit(args, rio.csv_text(["separation", "seed", "sigma_n", "threshold", "detected_n"], out), "csv")
    return EXIT_OK


def cmd_construct(args):
    grid = _grid(args)
    builder = construct_number_ambiguity if args.kind == "number" else construct_support_ambiguity
    if args.n < (2 if args.kind == "number" else 1):
        raise UsageError("--n too small for this construction")
    pair = builder(args.n, args.sigma, args.m_star, grid)
    _emit(args, rio.dumps(rio.construction_to_dict(pair, args.kind, args.n)), "json")
    return EXIT_OK


def cmd_verify_paper(args):
    rows = run_reference_checks(seed=args.seed)
    header = ["quantity", "scenario", "computed", "reference", "tolerance", "kind", "pass"]
    data = [(r.quantity, r.scenario, r.computed, r.reference, r.tolerance, r.kind, r.passed) for r in rows]
    if args.format == "csv":
        _emit(args, rio.csv_text(header, data), "csv")
    elif args.format == "json":
        _emit(args, rio.dumps([dict(zip(header, d)) for d in data]), "json")
    else:
        _emit(args, _table(header, data), "txt")
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def cmd_oracle(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [SUITES[n]() for n in names]
    header = ["suite", "cases", "failures", "worst_slack", "pass"]
    data = [(r.name, r.cases, r.failures, r.worst, r.passed) for r in results]
    if args.format == "csv":
        _emit(args, rio.csv_text(header, data), "csv")
    else:
        _emit(args, _table(header, data), "txt")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _add_grid(p):
    p.add_argument("--grid-R", type=float, default=100.0, help="window half-width R")
    p.add_argument("--grid-h", type=float, default=2.0, help="sample spacing h (at most pi)")


def _add_priors(p, sigma_required=True):
    p.add_argument("--d", type=float, required=True, help="sources lie in [-d, d]")
    p.add_argument("--sigma", type=float, required=sigma_required, help="noise level")
    p.add_argument("--M", type=float, required=True, help="total-variation bound")
    p.add_argument("--omega", type=float, default=1.0, help="cutoff frequency")


def _add_scene(p):
    p.add_argument("--scene", help="scene JSON file")
    p.add_argument("--positions", type=_floats, help="comma-separated source positions")
    p.add_argument("--amplitudes", type=_floats, help="comma-separated amplitudes (default all 1)")
    p.add_argument("--noise-model", choices=["uniform", "gaussian", *NOISE_ALIASES], default="uniform")
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="reslimit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sample the image of a scene")
    _add_scene(p)
    _add_grid(p)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="s*, separation bounds and the sigma_min(s) curve")
    p.add_argument("--sigma-min-curve", type=int, metavar="SMAX",
                   help="emit (s, sigma_min(s)) for s = 1..SMAX instead of a report")
    p.add_argument("--d", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--M", type=float)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--m-min", type=float, default=1.0)
    p.add_argument("--d-min", type=float, help="separation for the position error and SRF")
    p.add_argument("--s", type=int, help="odd data-matrix order for the detector requirement")
    _add_grid(p)
    p.add_argument("--format", choices=["json", "table"], default="json")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("detect", help="estimate the source number of an image")
    p.add_argument("--image", help="image CSV (x,value) as written by simulate")
    _add_scene(p)
    _add_grid(p)
    p.add_argument("--sigma", type=float, help="noise level (defaults to the scene's)")
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--s", type=int, help="odd data-matrix order (default largest odd <= s*)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("sweep", help="detection outcome over a separation range")
    _add_priors(p)
    _add_grid(p)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--s", type=int)
    p.add_argument("--sep-min", type=float, default=0.05)
    p.add_argument("--sep-max", type=float, default=0.6)
    p.add_argument("--sep-step", type=float, default=0.01)
    p.add_argument("--seeds", type=int, default=20, help="noise seeds 0..SEEDS-1 per separation")
    p.add_argument("--noise-model", choices=["uniform", "gaussian", *NOISE_ALIASES], default="uniform")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("construct", help="worst-case measure pairs with nearly equal images")
    p.add_argument("--kind", choices=["number", "support"], default="number")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--m-star", type=float, default=1.0)
    _add_grid(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify-paper", help="reproduce the published reference values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["table", "csv", "json"], default="table")
    p.set_defaults(func=cmd_verify_paper)

    p = sub.add_parser("oracle", help="bound-versus-oracle validation suites")
    p.add_argument("--suite", choices=["all", *SUITES], default="all")
    p.add_argument("--format", choices=["table", "csv"], default="table")
    p.set_defaults(func=cmd_oracle)

    for action in sub.choices.values():
        action.add_argument("--output", "-o", help="output file ('-' for stdout)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bounds" and not args.sigma_min_curve:
        missing = [f"--{k}" for k in ("d", "sigma", "M") if getattr(args, k) is None]
        if missing:
            parser.error(f"bounds needs {', '.join(missing)}")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"reslimit {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
        module = type(exc).__module__ if type(exc).__module__ != "builtins" else "reslimit"
        tb = exc.__traceback__
        while tb is not None and tb.tb_next is not None:
            tb = tb.tb_next
        where = tb.tb_frame.f_globals.get("__name__", module) if tb else module
        print(f"reslimit {args.command}: numerical failure in {where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
