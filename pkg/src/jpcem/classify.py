"""Residual-based class decisions and plain SRC baselines."""
from dataclasses import dataclass

import numpy as np

from .algorithm import CoefficientMatrix
from .exceptions import DimensionError, InvalidParameterError
from .solver import WeightedLassoProblem, augment, solve_weighted_lasso

DEFAULT_SRC_WEIGHT = 0.1


@dataclass
class ClassificationResult:
    predicted_class: object
    residuals: np.ndarray
    per_view_residuals: np.ndarray
    coefficients: CoefficientMatrix
    labels: tuple
    tie: bool = False

    def to_dict(self):
        return {
            "predicted_class": _jsonable(self.predicted_class),
            "tie": self.tie,
            "classes": [_jsonable(c) for c in self.labels],
            "residuals": self.residuals.tolist(),
            "per_view_residuals": self.per_view_residuals.tolist(),
            "converged_per_view": self.coefficients.converged_per_view.tolist(),
            "outer_iters_per_view": self.coefficients.outer_iters_per_view.tolist(),
        }


def _jsonable(value):
    return value.item() if isinstance(value, np.generic) else value


def classify_multiview(dictionary, Y, X):
    """Pick the class minimizing the summed per-view residual norms.

    ``residual_c = sum_m ||y_m - D delta_c(x_m)||_2``; ties go to the class
    that comes first in the dictionary.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    coeffs = X if isinstance(X, CoefficientMatrix) else _as_coefficients(X)
    x = coeffs.x
    if x.ndim == 1:
        x = x[:, None]
    d, k = dictionary.shape
    if Y.shape[0] != d or x.shape != (k, Y.shape[1]):
        raise DimensionError(f"Y has shape {Y.shape} and X has shape {x.shape}; "
                             f"dictionary is {d}x{k}")

    per_view = np.empty((dictionary.n_classes, Y.shape[1]))
    for ci, c in enumerate(dictionary.labels):
        sl = dictionary.block(c)
        recon = dictionary.data[:, sl] @ x[sl]
        per_view[ci] = np.linalg.norm(Y - recon, axis=0)
    residuals = per_view.sum(axis=1)
    best = int(np.argmin(residuals))
    tie = int(np.count_nonzero(residuals == residuals[best])) > 1
    return ClassificationResult(predicted_class=dictionary.labels[best],
                                residuals=residuals, per_view_residuals=per_view,
                                coefficients=coeffs, labels=dictionary.labels,
                                tie=tie)


def _as_coefficients(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    m = x.shape[1]
    return CoefficientMatrix(x=x, gamma=(x != 0).astype(float),
                             converged_per_view=np.ones(m, dtype=bool),
                             outer_iters_per_view=np.zeros(m, dtype=int))


def _uniform_lasso(dictionary, y, weight, inner_tol, max_inner_iters):
    system = augment(dictionary, y, 0.0)
    w = np.full(system.n_atoms, float(weight))
    return solve_weighted_lasso(WeightedLassoProblem(system, w),
                                inner_tol=inner_tol,
                                max_inner_iters=max_inner_iters)


def multiview_src_baseline(dictionary, Y, weight=DEFAULT_SRC_WEIGHT,
                           inner_tol=1e-8, max_inner_iters=10000):
    """Independent uniform-weight lasso per view, fused by summed residuals."""
    if not weight > 0:
        raise InvalidParameterError(f"l1 weight must be positive, got {weight}")
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.shape[0] != dictionary.n_features:
        raise DimensionError(f"observation has {Y.shape[0]} rows, dictionary "
                             f"has {dictionary.n_features}")
    m = Y.shape[1]
    x = np.zeros((dictionary.n_atoms, m))
    converged = np.zeros(m, dtype=bool)
    iters = np.zeros(m, dtype=int)
    for j in range(m):
        sol = _uniform_lasso(dictionary, Y[:, j], weight, inner_tol, max_inner_iters)
        x[:, j] = sol.x
        converged[j] = sol.converged
        iters[j] = sol.n_iter
    coeffs = CoefficientMatrix(x=x, gamma=(x != 0).astype(float),
                               converged_per_view=converged,
                               outer_iters_per_view=iters)
    return classify_multiview(dictionary, Y, coeffs)


def src_single_baseline(dictionary, y, weight=DEFAULT_SRC_WEIGHT, **solver_opts):
    """Penalized single-view SRC: ``min ||y - D x||^2 + weight ||x||_1``."""
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise DimensionError("single-view SRC takes one observation vector")
    return multiview_src_baseline(dictionary, y[:, None], weight, **solver_opts)
