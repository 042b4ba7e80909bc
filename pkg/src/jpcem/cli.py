"""Command-line entry point.

    jpcem synth --out DIR
    jpcem experiment rho-kappa|views|train-size|selection-bias [options]
    jpcem classify --manifest M.csv --method jpcem VIEW1.pgm VIEW2.pgm ...
"""
import argparse
import json
import logging
import sys

import numpy as np

from . import data
from .algorithm import DEFAULT_ALPHA, DEFAULT_LAMBDA, DEFAULT_SIGMA, JpcemConfig
from .classify import DEFAULT_SRC_WEIGHT
from .dictionary import build_dictionary
from .exceptions import DimensionError, JpcemError
from .experiments import (METHODS, MethodParams, check_methods, classify_with,
                          exp_accuracy_vs_train_size, exp_accuracy_vs_views,
                          exp_rho_kappa, exp_selection_bias)

logger = logging.getLogger("jpcem")


def _int_range(text):
    """'1-5' or '2,4,6' -> list of ints."""
    if "-" in text and "," not in text:
        lo, hi = text.split("-", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def _add_hyperparams(p):
    g = p.add_argument_group("hyperparameters")
    g.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    g.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    g.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    g.add_argument("--eps", type=float, default=1e-6)
    g.add_argument("--outer-tol", type=float, default=1e-6)
    g.add_argument("--inner-tol", type=float, default=1e-8)
    g.add_argument("--max-outer", type=int, default=50)
    g.add_argument("--src-weight", type=float, default=DEFAULT_SRC_WEIGHT,
                   help="l1 penalty of the SRC baselines (default %(default)s)")


def _add_dataset(p):
    g = p.add_argument_group("dataset (a manifest, or a synthetic pool)")
    g.add_argument("--manifest", help="CSV with header path,class,view,role; "
                   "all rows are pooled for splitting")
    g.add_argument("--width", type=int, default=data.PATCH_WIDTH)
    g.add_argument("--height", type=int, default=data.PATCH_HEIGHT)
    g.add_argument("--classes", type=int, default=5)
    g.add_argument("--views", type=int, default=5)
    g.add_argument("--dim", type=int, default=200)
    g.add_argument("--subspace-dim", type=int, default=4)
    g.add_argument("--pool-size", type=int, default=60,
                   help="synthetic samples per view per class")
    g.add_argument("--noise-std", type=float, default=0.05)
    g.add_argument("--data-seed", type=int, default=0)


def _add_output(p):
    p.add_argument("--csv", help="write CSV here (default: stdout)")
    p.add_argument("--json", help="write the full JSON report here")


def build_parser():
    parser = argparse.ArgumentParser(prog="jpcem", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset as graymaps + manifest")
    p.add_argument("--out", required=True)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--views", type=int, default=5)
    p.add_argument("--width", type=int, default=data.PATCH_WIDTH)
    p.add_argument("--height", type=int, default=data.PATCH_HEIGHT)
    p.add_argument("--subspace-dim", type=int, default=4)
    p.add_argument("--train", type=int, default=10)
    p.add_argument("--test", type=int, default=50)
    p.add_argument("--noise-std", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("experiment", help="run one of the four experiments")
    exp = p.add_subparsers(dest="experiment", required=True)

    e = exp.add_parser("rho-kappa", help="rho as a function of kappa")
    e.add_argument("--sigma", type=float, default=DEFAULT_SIGMA)
    e.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    e.add_argument("--eps", type=float, default=0.0)
    e.add_argument("--num-points", type=int, default=99)
    _add_output(e)

    for name, helptext in (("views", "accuracy vs. number of views"),
                           ("train-size", "accuracy vs. training samples"),
                           ("selection-bias", "accuracy over repeated splits")):
        e = exp.add_parser(name, help=helptext)
        e.add_argument("--methods", default=",".join(METHODS),
                       help=f"comma-separated subset of {', '.join(METHODS)}")
        e.add_argument("--seed", type=int, default=0)
        e.add_argument("--test-size", type=int, default=50)
        if name == "views":
            e.add_argument("--views-range", type=_int_range, default=list(range(1, 6)))
            e.add_argument("--train-size", type=int, default=5)
        elif name == "train-size":
            e.add_argument("--sizes", type=_int_range, default=list(range(2, 11)))
            e.add_argument("--num-views", type=int, default=5)
        else:
            e.add_argument("--repeats", type=int, default=20)
            e.add_argument("--train-size", type=int, default=5)
            e.add_argument("--num-views", type=int, default=5)
        _add_dataset(e)
        _add_hyperparams(e)
        _add_output(e)

    p = sub.add_parser("classify", help="classify one multi-view observation")
    p.add_argument("--manifest", required=True,
                   help="dictionary source; only role=train rows are used")
    p.add_argument("--method", default="jpcem")
    p.add_argument("--width", type=int, default=data.PATCH_WIDTH)
    p.add_argument("--height", type=int, default=data.PATCH_HEIGHT)
    p.add_argument("images", nargs="+", help="one graymap per view, in view order")
    _add_hyperparams(p)
    return parser


def _params(args):
    cfg = JpcemConfig(sigma=args.sigma, lam=args.lam, alpha=args.alpha,
                      eps=args.eps, outer_tol=args.outer_tol,
                      inner_tol=args.inner_tol, max_outer_iters=args.max_outer)
    return MethodParams(jpcem=cfg, src_weight=args.src_weight)


def _pool(args):
    if args.manifest:
        manifest = data.load_manifest(args.manifest, args.width, args.height)
        return data.load_samples(manifest), {"manifest": args.manifest,
                                             "width": args.width,
                                             "height": args.height}
    cfg = data.SynthConfig(num_classes=args.classes, num_views=args.views,
                           ambient_dim=args.dim, subspace_dim=args.subspace_dim,
                           train_per_view_per_class=max(args.pool_size - 1, 1),
                           test_per_view_per_class=1, noise_std=args.noise_std,
                           seed=args.data_seed)
    train, test = data.synth_generate(cfg)
    desc = {"synthetic": vars(cfg), "rng": data.RNG_ALGORITHM}
    return train + test, desc


def _emit(report, args):
    text = report.to_csv()
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.to_json(indent=2))


def run_experiment(args):
    if args.experiment == "rho-kappa":
        report = exp_rho_kappa(args.sigma, args.lam, args.eps, args.num_points)
        _emit(report, args)
        return
    methods = check_methods(m.strip() for m in args.methods.split(","))
    params = _params(args)
    pool, desc = _pool(args)
    if args.experiment == "views":
        report = exp_accuracy_vs_views(pool, args.views_range, args.train_size,
                                       args.test_size, methods, args.seed,
                                       params, desc)
    elif args.experiment == "train-size":
        report = exp_accuracy_vs_train_size(pool, args.sizes, args.num_views,
                                            args.test_size, methods, args.seed,
                                            params, desc)
    else:
        report = exp_selection_bias(pool, args.repeats, args.train_size,
                                    args.num_views, args.test_size, methods,
                                    args.seed, params, desc)
    _emit(report, args)


def run_classify(args):
    check_methods([args.method])
    manifest = data.load_manifest(args.manifest, args.width, args.height)
    manifest.entries = [e for e in manifest.entries if e[3] == "train"]
    train = data.load_samples(manifest)
    dictionary = build_dictionary((s.class_id, s.view_id, s.vector) for s in train)
    if len(args.images) != dictionary.n_views:
        raise DimensionError(f"expected {dictionary.n_views} view image(s) "
                             f"(one per dictionary view), got {len(args.images)}")
    Y = np.column_stack([data.load_image(p, args.width, args.height)
                         for p in args.images])
    result = classify_with(args.method, dictionary, Y, _params(args))
    out = {"method": args.method, "views": list(dictionary.views),
           "images": args.images, **result.to_dict()}
    print(json.dumps(out, indent=2, default=str))


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            cfg = data.SynthConfig(num_classes=args.classes, num_views=args.views,
                                   ambient_dim=args.width * args.height,
                                   subspace_dim=args.subspace_dim,
                                   train_per_view_per_class=args.train,
                                   test_per_view_per_class=args.test,
                                   noise_std=args.noise_std, seed=args.seed)
            train, test = data.synth_generate(cfg)
            path = data.export_dataset(train + test, args.out, args.width, args.height)
            print(path)
        elif args.command == "experiment":
            run_experiment(args)
        else:
            run_classify(args)
    except (JpcemError, OSError) as exc:
        print(f"jpcem: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
