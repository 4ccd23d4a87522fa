"""Command line entry point.

    igiwerm synth        experiment on the 1-d quadratic task
    igiwerm bench FILE   experiment on a LIBSVM file with induced shift
    igiwerm grid  [FILE] IWCV (or IC) loss surface for one trial
    igiwerm bopt  [FILE] Bayesian optimization trace for one trial
    igiwerm parse-check FILE...

Settings come from ``--config`` (JSON) and flags; flags win.  Exit codes:
0 success, 1 partial failure (some trial or evaluation failed), 2 bad
configuration or unreadable input.
"""
import argparse
import json
import logging
import os
import sys

import numpy as np

from .data import load_libsvm
from .errors import ConfigError, IgiwermError, ParseError
from .experiment import METHODS, ExperimentConfig, iwcv_objective, ic_objective, make_trial, run_experiment
from .report import emit_json, emit_report, emit_surface, emit_trials
from .selection import bayes_opt, grid_search

log = logging.getLogger("igiwerm")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _add_common(p, source):
    if source == "required":
        p.add_argument("source", help="LIBSVM data file")
    elif source == "optional":
        p.add_argument("source", nargs="?", default=None, help="LIBSVM data file (default: synthetic task)")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    p.add_argument("--out-dir", default=None, help="output directory (default: current directory)")
    p.add_argument("--seed", type=int)
    p.add_argument("--learner", choices=("linear", "logistic", "kernel_ridge"))
    p.add_argument("--bandwidth", type=float)
    p.add_argument("--ridge", type=float)
    p.add_argument("--lambda-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--alpha-range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--folds", type=int)
    p.add_argument("--gain", type=float)
    p.add_argument("--n-tr", type=int)
    p.add_argument("--n-te", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    ap = argparse.ArgumentParser(prog="igiwerm", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    for name, src in (("synth", None), ("bench", "required")):
        p = sub.add_parser(name, help=f"run the {name} experiment")
        _add_common(p, src)
        p.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
        p.add_argument("--trials", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--n-init", type=int)
        p.add_argument("--n-iter", type=int)
        p.add_argument("--grid", type=int, nargs=2, metavar=("N_LAMBDA", "N_ALPHA"))

    p = sub.add_parser("grid", help="loss surface over (lambda, alpha) for one trial")
    _add_common(p, "optional")
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--grid", type=int, nargs=2, metavar=("N_LAMBDA", "N_ALPHA"))
    p.add_argument("--criterion", choices=("iwcv", "ic"), default="iwcv")

    p = sub.add_parser("bopt", help="Bayesian optimization of the IWCV loss for one trial")
    _add_common(p, "optional")
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--n-init", type=int)
    p.add_argument("--n-iter", type=int)

    p = sub.add_parser("parse-check", help="validate LIBSVM files")
    p.add_argument("files", nargs="+")
    p.add_argument("--task", choices=("auto", "regression", "classification"), default="auto")
    return ap


_FLAG_FIELDS = ("seed", "trials", "workers", "folds", "gain", "n_tr", "n_te", "n_init", "n_iter", "methods")


def config_from_args(args):
    """Merge the JSON config (if any) with command-line flags."""
    d = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {args.config}: {exc}") from None
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        d.pop("out_dir", None)
    for name in _FLAG_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            d[name] = v
    if args.command == "bench":
        d["source"] = args.source
    elif args.command == "synth":
        d["source"] = "synth"
    elif getattr(args, "source", None):
        d["source"] = args.source
    src = d.get("source", "synth")
    if src != "synth" and not os.path.isfile(src):
        raise ConfigError(f"data file not found: {src}")

    learner = dict(d.get("learner") or {})
    for name in ("bandwidth", "ridge"):
        v = getattr(args, name, None)
        if v is not None:
            learner[name] = v
    if getattr(args, "learner", None):
        learner["kind"] = args.learner
    learner.setdefault("kind", "linear" if src == "synth" else "kernel_ridge")
    d["learner"] = learner

    box = dict(d.get("box") or {})
    if getattr(args, "lambda_range", None):
        box["lambda"] = args.lambda_range
    if getattr(args, "alpha_range", None):
        box["alpha"] = args.alpha_range
    if box:
        d["box"] = box
    if getattr(args, "grid", None):
        d["grid"] = args.grid
    if "methods" not in d and learner["kind"] == "kernel_ridge":
        # the criterion needs a likelihood; kernel ridge has none
        d["methods"] = [m for m in ExperimentConfig.methods if m != "igiwerm-ic"]
    return ExperimentConfig.from_dict(d)


def _out_dir(args):
    path = args.out_dir or "."
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from None
    return path


def cmd_experiment(args):
    config = config_from_args(args)
    out = _out_dir(args)
    reports = run_experiment(config)
    metric_name = "MSE" if config.source == "synth" else "metric"
    emit_report(reports, os.path.join(out, "report.csv"), "csv")
    emit_report(reports, os.path.join(out, "report.txt"), "table", metric_name)
    emit_trials(reports, os.path.join(out, "trials.csv"))
    emit_json(config.to_dict(), os.path.join(out, "config.json"))
    with open(os.path.join(out, "report.txt"), encoding="utf-8") as fh:
        sys.stdout.write(fh.read())
    failed = [r for r in reports if not r.ok]
    if failed:
        log.warning("%d of %d method runs failed", len(failed), len(reports))
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_grid(args):
    config = config_from_args(args)
    out = _out_dir(args)
    td = make_trial(config, args.trial)
    objective = ic_objective(config, td) if args.criterion == "ic" else iwcv_objective(config, td)
    n_lam, n_alpha = config.grid
    res, surface = grid_search(objective, config.box, n_lam, n_alpha)
    emit_surface(surface, config.box.lambdas(n_lam), config.box.alphas(n_alpha), os.path.join(out, "surface.csv"))
    emit_json(dict(res.to_dict(), criterion=args.criterion, seed=td.seed), os.path.join(out, "selection.json"))
    b = res.best_params
    print(f"best lambda={b.lam:.4g} alpha={b.alpha:.4g} {args.criterion}={res.best_loss:.6g}")
    if not np.isfinite(surface).all():
        log.warning("%d grid cells failed", int((~np.isfinite(surface)).sum()))
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_bopt(args):
    config = config_from_args(args)
    out = _out_dir(args)
    td = make_trial(config, args.trial)
    res = bayes_opt(iwcv_objective(config, td), config.box, config.n_init, config.n_iter, td.seed)
    emit_json(dict(res.to_dict(), seed=td.seed), os.path.join(out, "selection.json"))
    b = res.best_params
    print(f"best lambda={b.lam:.4g} alpha={b.alpha:.4g} iwcv={res.best_loss:.6g}")
    if any(not np.isfinite(loss) for _, loss in res.history):
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_parse_check(args):
    status = EXIT_OK
    for path in args.files:
        try:
            data = load_libsvm(path, task=args.task)
        except ParseError as exc:
            print(f"{path}: {exc}")
            status = EXIT_PARTIAL
            continue
        except OSError as exc:
            print(f"{path}: {exc}")
            status = EXIT_CONFIG
            continue
        extra = ""
        if data.task == "classification":
            extra = f" labels={data.meta.get('label_map')}"
        print(f"{path}: ok lines={data.meta['lines']} n={data.n} d={data.d} task={data.task}{extra}")
    return status


COMMANDS = {
    "synth": cmd_experiment,
    "bench": cmd_experiment,
    "grid": cmd_grid,
    "bopt": cmd_bopt,
    "parse-check": cmd_parse_check,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IgiwermError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
