"""Joint prior and coefficient estimation (JPCEM).

For every view the estimator alternates a weighted-lasso solve on the
ridge-augmented system with three closed-form refreshes:

    kappa_i = |x_i| / ((1 + alpha) * max_j |x_j| + eps)
    rho_i   = sigma^2 * log(2 pi sigma^2 (1 - kappa_i)^2 / (lam kappa_i^2 + eps))
    w_i     = max(rho_i, 0) / (|x_i| + eps)

starting from unit weights, until the squared change of the coefficient
vector between consecutive solves drops to ``outer_tol``.
"""
import logging
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DimensionError, InvalidParameterError
from .solver import WeightedLassoProblem, augment, solve_weighted_lasso

logger = logging.getLogger(__name__)

DEFAULT_SIGMA = 0.018
DEFAULT_LAMBDA = 2e-5
DEFAULT_ALPHA = 1.0 / 9.0


@dataclass(frozen=True)
class JpcemConfig:
    sigma: float = DEFAULT_SIGMA
    lam: float = DEFAULT_LAMBDA
    alpha: float = DEFAULT_ALPHA
    eps: float = 1e-6
    outer_tol: float = 1e-6
    max_outer_iters: int = 50
    inner_tol: float = 1e-8
    max_inner_iters: int = 10000

    def __post_init__(self):
        for name in ("sigma", "lam", "alpha", "eps", "outer_tol", "inner_tol"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidParameterError(f"{name} must be positive and finite, "
                                            f"got {value}")
        for name in ("max_outer_iters", "max_inner_iters"):
            if int(getattr(self, name)) < 1:
                raise InvalidParameterError(f"{name} must be >= 1")

    def to_dict(self):
        return asdict(self)


@dataclass
class PriorState:
    """Per-coefficient, per-view prior parameters (each K x M)."""
    kappa: np.ndarray
    rho: np.ndarray
    weights: np.ndarray
    sigma: float
    lam: float
    alpha: float
    eps: float


@dataclass
class CoefficientMatrix:
    """Estimated coefficients for all views.

    ``solve_weights`` holds the weights of the final inner solve of each view,
    so ``x[:, m]`` is the weighted-lasso minimizer for ``solve_weights[:, m]``.
    """
    x: np.ndarray
    gamma: np.ndarray
    converged_per_view: np.ndarray
    outer_iters_per_view: np.ndarray
    prior: PriorState = None
    solve_weights: np.ndarray = None

    @property
    def support(self):
        return self.gamma >= 0.5


def kappa_update(x, alpha, eps):
    """Activation probabilities from coefficient magnitudes.

    The normalizer uses the largest absolute coefficient, so every kappa lies
    in [0, 1/(1+alpha)).
    """
    ax = np.abs(np.asarray(x, dtype=float))
    x_max = ax.max() if ax.size else 0.0
    return ax / ((1.0 + alpha) * x_max + eps)


def rho_update(kappa, sigma, lam, eps):
    kappa = np.asarray(kappa, dtype=float)
    s2 = sigma * sigma
    return s2 * np.log(2.0 * np.pi * s2 * (1.0 - kappa) ** 2 / (lam * kappa ** 2 + eps))


def weight_update(rho, x, eps):
    rho = np.maximum(np.asarray(rho, dtype=float), 0.0)
    return rho / (np.abs(np.asarray(x, dtype=float)) + eps)


def min_alpha(sigma, lam):
    """Smallest alpha keeping rho >= 0 for every admissible kappa (eps -> 0)."""
    return math.sqrt(lam / (2.0 * math.pi * sigma * sigma))


def _solve_view(system, config, callback=None):
    k = system.n_atoms
    w = np.ones(k)
    x_prev = np.zeros(k)
    x = np.ones(k)
    kappa = np.full(k, 0.5)
    rho = np.zeros(k)
    used = w
    iters = 0
    converged = False
    while iters < config.max_outer_iters:
        sol = solve_weighted_lasso(WeightedLassoProblem(system, w), x0=x,
                                   inner_tol=config.inner_tol,
                                   max_inner_iters=config.max_inner_iters)
        if not sol.converged:
            logger.debug("inner solve stopped at residual %.3g", sol.residual)
        used = w
        x_prev, x = x, sol.x
        iters += 1
        kappa = kappa_update(x, config.alpha, config.eps)
        rho = rho_update(kappa, config.sigma, config.lam, config.eps)
        w = weight_update(rho, x, config.eps)
        if callback is not None:
            callback(iters, x, kappa, rho, w)
        diff = x - x_prev
        if float(diff @ diff) <= config.outer_tol:
            converged = True
            break
    return x, kappa, rho, w, used, iters, converged


def jpcem_solve(dictionary, Y, config=None, callback=None):
    """Estimate coefficients and prior parameters for every view of ``Y``.

    Parameters
    ----------
    dictionary : Dictionary or ndarray, shape (d, K)
    Y : ndarray, shape (d, M) or (d,)
        One column per view.
    config : JpcemConfig, optional
    callback : callable, optional
        Called as ``callback(view, iteration, x, kappa, rho, w)`` after every
        outer update.

    Views are solved independently against the shared dictionary; the
    result for a view does not depend on the other columns of ``Y``.
    """
    config = config or JpcemConfig()
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    matrix = getattr(dictionary, "data", dictionary)
    if Y.ndim != 2 or Y.shape[0] != matrix.shape[0]:
        raise DimensionError(f"observation has shape {Y.shape}, dictionary has "
                             f"{matrix.shape[0]} rows")
    if config.alpha < min_alpha(config.sigma, config.lam):
        warnings.warn(f"alpha={config.alpha:.6g} is below "
                      f"{min_alpha(config.sigma, config.lam):.6g}; some rho "
                      "values may be negative and are clamped to zero",
                      RuntimeWarning, stacklevel=2)

    k, m = matrix.shape[1], Y.shape[1]
    X = np.zeros((k, m))
    kappa, rho, weights, used = (np.zeros((k, m)) for _ in range(4))
    iters = np.zeros(m, dtype=int)
    converged = np.zeros(m, dtype=bool)
    for j in range(m):
        system = augment(dictionary, Y[:, j], config.lam)
        (X[:, j], kappa[:, j], rho[:, j], weights[:, j], used[:, j],
         iters[j], converged[j]) = _solve_view(
             system, config, None if callback is None else
             (lambda *state, j=j: callback(j, *state)))

    gamma = np.abs(X) / (np.abs(X) + config.eps)
    prior = PriorState(kappa=kappa, rho=rho, weights=weights, sigma=config.sigma,
                       lam=config.lam, alpha=config.alpha, eps=config.eps)
    return CoefficientMatrix(x=X, gamma=gamma, converged_per_view=converged,
                             outer_iters_per_view=iters, prior=prior,
                             solve_weights=used)
