"""Experiment protocols: rho-kappa curve, accuracy vs. views, accuracy vs.
training size, and selection bias over repeated random splits.

Every report echoes its full configuration and seeds. ``timing`` is the only
field that differs between repeated runs; :meth:`ExperimentReport.canonical`
leaves it out.
"""
import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .algorithm import JpcemConfig, jpcem_solve, rho_update
from .classify import (DEFAULT_SRC_WEIGHT, classify_multiview,
                       multiview_src_baseline, src_single_baseline)
from .data import RNG_ALGORITHM, group_by_class_view, split_random
from .dictionary import build_dictionary
from .exceptions import InvalidParameterError

METHODS = ("jpcem", "src-single", "src-multiview")


@dataclass(frozen=True)
class MethodParams:
    jpcem: JpcemConfig = field(default_factory=JpcemConfig)
    src_weight: float = DEFAULT_SRC_WEIGHT

    def to_dict(self):
        return {"jpcem": self.jpcem.to_dict(), "src_weight": self.src_weight}


@dataclass
class ExperimentReport:
    experiment_id: str
    config: dict
    columns: list
    records: list
    summary: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)

    def canonical(self):
        return {"experiment_id": self.experiment_id, "config": self.config,
                "columns": self.columns, "records": self.records,
                "summary": self.summary, "diagnostics": self.diagnostics}

    def to_json(self, **kwargs):
        return json.dumps(dict(self.canonical(), timing=self.timing), **kwargs)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for rec in self.records:
            writer.writerow([_fmt(rec[c]) for c in self.columns])
        if self.summary:
            writer.writerow([])
            writer.writerow(["method", "mean", "std"])
            for method, stats in self.summary.items():
                writer.writerow([method, _fmt(stats["mean"]), _fmt(stats["std"])])
        return buf.getvalue()


def _fmt(value):
    return repr(float(value)) if isinstance(value, float) else str(value)


def check_methods(methods):
    methods = list(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise InvalidParameterError(f"unknown method(s) {unknown}; available: "
                                    f"{', '.join(METHODS)}")
    return methods


def classify_with(method, dictionary, Y, params):
    """Run one named method on a d x M observation."""
    if method == "jpcem":
        coeffs = jpcem_solve(dictionary, Y, params.jpcem)
        return classify_multiview(dictionary, Y, coeffs)
    if method == "src-multiview":
        return multiview_src_baseline(dictionary, Y, params.src_weight,
                                      inner_tol=params.jpcem.inner_tol,
                                      max_inner_iters=params.jpcem.max_inner_iters)
    if method == "src-single":
        # single-view SRC sees only the first view of the observation
        Y = np.asarray(Y, dtype=float)
        y = Y[:, 0] if Y.ndim == 2 else Y
        return src_single_baseline(dictionary, y, params.src_weight,
                                   inner_tol=params.jpcem.inner_tol,
                                   max_inner_iters=params.jpcem.max_inner_iters)
    check_methods([method])


def view_order(samples):
    views = []
    for s in samples:
        if s.view_id not in views:
            views.append(s.view_id)
    return views


def build_observations(test, views):
    """Pair the j-th test sample of every view, per class, into a d x M matrix."""
    groups = group_by_class_view(test)
    classes = []
    for c, _ in groups:
        if c not in classes:
            classes.append(c)
    observations = []
    for c in classes:
        per_view = [groups.get((c, v), []) for v in views]
        n = min(len(g) for g in per_view)
        for j in range(n):
            observations.append((c, np.column_stack([g[j].vector for g in per_view])))
    return observations


def evaluate(train, test, views, methods, params, stats=None):
    """Accuracy of each method with dictionary and observations restricted to
    ``views``. ``stats`` (a dict) accumulates JPCEM iteration diagnostics."""
    views = list(views)
    dictionary = build_dictionary((s.class_id, s.view_id, s.vector)
                                  for s in train if s.view_id in views)
    observations = build_observations(test, views)
    if not observations:
        raise InvalidParameterError("no test observations")
    acc = {}
    for method in methods:
        correct = 0
        for label, Y in observations:
            result = classify_with(method, dictionary, Y, params)
            correct += result.predicted_class == label
            if method == "jpcem" and stats is not None:
                it = result.coefficients.outer_iters_per_view
                conv = result.coefficients.converged_per_view
                stats["jpcem_solves"] = stats.get("jpcem_solves", 0) + it.size
                stats["jpcem_max_outer_iters"] = max(
                    stats.get("jpcem_max_outer_iters", 0), int(it.max()))
                stats["jpcem_unconverged_views"] = (
                    stats.get("jpcem_unconverged_views", 0) + int((~conv).sum()))
        acc[method] = correct / len(observations)
    return acc


def moment_fit(values):
    """Gaussian fit by moment matching (population std; a single value gives 0)."""
    values = np.asarray(values, dtype=float)
    return {"mean": float(values.mean()), "std": float(values.std())}


def exp_rho_kappa(sigma=0.018, lam=2e-5, eps=0.0, num_points=99):
    """(kappa, rho) on a uniform open grid in (0, 1)."""
    start = time.perf_counter()
    if num_points < 1:
        raise InvalidParameterError("num_points must be >= 1")
    kappa = np.arange(1, num_points + 1) / (num_points + 1)
    rho = rho_update(kappa, sigma, lam, eps)
    records = [{"kappa": float(k), "rho": float(r)} for k, r in zip(kappa, rho)]
    crossing = [float(kappa[i]) for i in range(len(rho) - 1)
                if rho[i] > 0 >= rho[i + 1]]
    return ExperimentReport(
        "rho-kappa",
        {"sigma": sigma, "lambda": lam, "eps": eps, "num_points": num_points},
        ["kappa", "rho"], records,
        diagnostics={"strictly_decreasing": bool(np.all(np.diff(rho) < 0)),
                     "sign_change_after": crossing},
        timing={"seconds": time.perf_counter() - start})


def _base_config(dataset, methods, params, **extra):
    cfg = {"dataset": dataset or {}, "methods": list(methods),
           "params": params.to_dict(), "rng": RNG_ALGORITHM}
    cfg.update(extra)
    return cfg


def exp_accuracy_vs_views(pool, views_range, train_size, test_size, methods,
                          seed, params=None, dataset=None):
    """Accuracy as the first v views of dictionary and observations are used."""
    methods = check_methods(methods)
    params = params or MethodParams()
    start = time.perf_counter()
    train, test = split_random(pool, train_size, test_size, seed)
    order = view_order(pool)
    views_range = sorted(int(v) for v in views_range)
    if views_range[0] < 1 or views_range[-1] > len(order):
        raise InvalidParameterError(f"view counts must lie in [1, {len(order)}]")
    stats, records, timing = {}, [], {}
    for v in views_range:
        t0 = time.perf_counter()
        acc = evaluate(train, test, order[:v], methods, params, stats)
        timing[str(v)] = time.perf_counter() - t0
        records.append({"x": v, **acc})
    timing["total"] = time.perf_counter() - start
    cfg = _base_config(dataset, methods, params, views_range=views_range,
                       train_size=train_size, test_size=test_size, seed=seed)
    return ExperimentReport("views", cfg, ["x", *methods], records,
                            diagnostics=stats, timing=timing)


def exp_accuracy_vs_train_size(pool, sizes_range, num_views, test_size, methods,
                               seed, params=None, dataset=None):
    """Accuracy against training samples per view per class.

    One split with the largest size fixes the test set; smaller sizes use a
    prefix of each group's training draw.
    """
    methods = check_methods(methods)
    params = params or MethodParams()
    start = time.perf_counter()
    sizes_range = sorted(int(n) for n in sizes_range)
    if sizes_range[0] < 1:
        raise InvalidParameterError("training sizes must be >= 1")
    train, test = split_random(pool, sizes_range[-1], test_size, seed)
    views = view_order(pool)[:num_views]
    groups = group_by_class_view(train)
    stats, records, timing = {}, [], {}
    for n in sizes_range:
        t0 = time.perf_counter()
        subset = [s for g in groups.values() for s in g[:n]]
        acc = evaluate(subset, test, views, methods, params, stats)
        timing[str(n)] = time.perf_counter() - t0
        records.append({"x": n, **acc})
    timing["total"] = time.perf_counter() - start
    cfg = _base_config(dataset, methods, params, sizes_range=sizes_range,
                       num_views=num_views, test_size=test_size, seed=seed)
    return ExperimentReport("train-size", cfg, ["x", *methods], records,
                            diagnostics=stats, timing=timing)


def exp_selection_bias(pool, num_repeats, train_size, num_views, test_size,
                       methods, base_seed, params=None, dataset=None):
    """Accuracy over ``num_repeats`` splits seeded base_seed, base_seed+1, ..."""
    methods = check_methods(methods)
    params = params or MethodParams()
    if num_repeats < 1:
        raise InvalidParameterError("num_repeats must be >= 1")
    start = time.perf_counter()
    views = view_order(pool)[:num_views]
    stats, records, timing = {}, [], {}
    for r in range(num_repeats):
        t0 = time.perf_counter()
        train, test = split_random(pool, train_size, test_size, base_seed + r)
        acc = evaluate(train, test, views, methods, params, stats)
        timing[str(r)] = time.perf_counter() - t0
        records.append({"repeat": r, "seed": base_seed + r, **acc})
    timing["total"] = time.perf_counter() - start
    summary = {m: moment_fit([rec[m] for rec in records]) for m in methods}
    cfg = _base_config(dataset, methods, params, num_repeats=num_repeats,
                       train_size=train_size, num_views=num_views,
                       test_size=test_size, base_seed=base_seed)
    return ExperimentReport("selection-bias", cfg, ["repeat", *methods], records,
                            summary=summary, diagnostics=stats, timing=timing)
