"""Weighted lasso over the ridge-augmented system.

Each outer JPCEM step solves the convex problem

    min_x  ||y_hat - D_hat x||_2^2 + sum_i w_i |x_i|

with ``y_hat = [y; 0]`` and ``D_hat = [D; sqrt(lam) I]``, so the squared
loss equals ``||y - D x||^2 + lam ||x||^2``. The solver works on the Gram
form ``G = D^T D + lam I``, ``b = D^T y`` and never materializes ``D_hat``.
"""
import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numba import njit

from .exceptions import (DimensionError, InvalidInputError,
                         InvalidParameterError, SizeLimitError)

BRUTE_FORCE_MAX_ATOMS = 12


@dataclass(frozen=True, eq=False)
class AugmentedSystem:
    """Stacked system ``(D_hat, y_hat)`` for a dictionary matrix and one view.

    ``d_hat`` and ``y_hat`` are built on first access; the solver only needs
    ``gram`` and ``rhs``.
    """
    matrix: np.ndarray
    y: np.ndarray
    lam: float
    _dtd: np.ndarray = field(default=None, repr=False)

    @property
    def n_atoms(self):
        return self.matrix.shape[1]

    @cached_property
    def d_hat(self):
        k = self.n_atoms
        return np.vstack([self.matrix, np.sqrt(self.lam) * np.eye(k)])

    @cached_property
    def y_hat(self):
        return np.concatenate([self.y, np.zeros(self.n_atoms)])

    @cached_property
    def gram(self):
        dtd = self._dtd if self._dtd is not None else self.matrix.T @ self.matrix
        g = np.array(dtd, dtype=float)
        g[np.diag_indices_from(g)] += self.lam
        return g

    @cached_property
    def rhs(self):
        return self.matrix.T @ self.y

    @cached_property
    def y_sq(self):
        return float(self.y @ self.y)

    def loss(self, x):
        """Smooth part ``||y_hat - D_hat x||^2``."""
        r = self.y - self.matrix @ x
        return float(r @ r + self.lam * (x @ x))


@dataclass(frozen=True, eq=False)
class WeightedLassoProblem:
    system: AugmentedSystem
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.system.n_atoms,):
            raise DimensionError(f"weights have shape {w.shape}, expected "
                                 f"({self.system.n_atoms},)")
        if not np.all(np.isfinite(w)):
            raise InvalidInputError("weights must be finite")
        if np.any(w < 0):
            raise InvalidInputError("weights must be nonnegative")
        object.__setattr__(self, "weights", w)

    def objective(self, x):
        x = np.asarray(x, dtype=float)
        return self.system.loss(x) + float(self.weights @ np.abs(x))


@dataclass
class LassoSolution:
    x: np.ndarray
    converged: bool
    n_iter: int
    residual: float
    objectives: list = None


def augment(dictionary, y, lam):
    """Ridge-augmented system for ``dictionary`` (a Dictionary or a d x K array)."""
    matrix = getattr(dictionary, "data", dictionary)
    matrix = np.asarray(matrix, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if matrix.ndim != 2:
        raise DimensionError("dictionary matrix must be 2-D")
    if y.size != matrix.shape[0]:
        raise DimensionError(f"observation has length {y.size}, dictionary "
                             f"has {matrix.shape[0]} rows")
    lam = float(lam)
    if not lam >= 0:
        raise InvalidParameterError(f"ridge weight must be >= 0, got {lam}")
    if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(y))):
        raise InvalidInputError("dictionary and observation must be finite")
    dtd = getattr(dictionary, "gram", None)
    return AugmentedSystem(matrix=matrix, y=y, lam=lam, _dtd=dtd)


@njit(cache=True)
def _kkt_residual(q, b, w, x):
    # max-norm distance of 0 from the subdifferential at x
    worst = 0.0
    for i in range(x.size):
        g = 2.0 * (q[i] - b[i])
        if x[i] > 0.0:
            r = abs(g + w[i])
        elif x[i] < 0.0:
            r = abs(g - w[i])
        else:
            r = abs(g) - w[i]
            if r < 0.0:
                r = 0.0
        if r > worst:
            worst = r
    return worst


@njit(cache=True)
def _objective(G, q, b, w, x, y_sq):
    val = y_sq
    for i in range(x.size):
        val += x[i] * q[i] - 2.0 * b[i] * x[i] + w[i] * abs(x[i])
    return val


@njit(cache=True)
def _coordinate_descent(G, b, w, x, y_sq, tol, max_iter, history):
    """Cyclic coordinate descent; updates ``x`` in place.

    Returns (sweeps, converged, residual). ``history`` receives the objective
    before the first sweep and after each sweep when its length is nonzero.
    """
    k = x.size
    q = G @ x
    track = history.size > 0
    if track:
        history[0] = _objective(G, q, b, w, x, y_sq)
    resid = _kkt_residual(q, b, w, x)
    if resid <= tol:
        return 0, True, resid
    for it in range(max_iter):
        for i in range(k):
            a = G[i, i]
            old = x[i]
            if a <= 0.0:
                new = 0.0
            else:
                z = b[i] - q[i] + a * old
                t = 0.5 * w[i]
                if z > t:
                    new = (z - t) / a
                elif z < -t:
                    new = (z + t) / a
                else:
                    new = 0.0
            if new != old:
                diff = new - old
                for j in range(k):
                    q[j] += G[j, i] * diff
                x[i] = new
        if track:
            history[it + 1] = _objective(G, q, b, w, x, y_sq)
        resid = _kkt_residual(q, b, w, x)
        if resid <= tol:
            return it + 1, True, resid
    return max_iter, False, resid


def solve_weighted_lasso(problem, x0=None, inner_tol=1e-8, max_inner_iters=10000,
                         track_objective=False):
    """Minimize ``||y_hat - D_hat x||^2 + ||w * |x| ||_1`` by coordinate descent.

    Stops once the max-norm subgradient residual is at most ``inner_tol``.
    If ``max_inner_iters`` sweeps pass first, the last iterate is returned
    with ``converged=False``. Coordinates with zero weight carry no l1 term.
    """
    system = problem.system
    k = system.n_atoms
    if x0 is None:
        x = np.zeros(k)
    else:
        x = np.array(x0, dtype=float).ravel()
        if x.size != k:
            raise DimensionError(f"warm start has length {x.size}, expected {k}")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("warm start must be finite")
    if not inner_tol > 0:
        raise InvalidParameterError("inner_tol must be positive")
    if max_inner_iters < 1:
        raise InvalidParameterError("max_inner_iters must be >= 1")

    history = np.empty(max_inner_iters + 1 if track_objective else 0)
    n_iter, converged, resid = _coordinate_descent(
        np.ascontiguousarray(system.gram), system.rhs, problem.weights, x,
        system.y_sq, float(inner_tol), int(max_inner_iters), history)
    objectives = history[:n_iter + 1].tolist() if track_objective else None
    return LassoSolution(x=x, converged=bool(converged), n_iter=int(n_iter),
                         residual=float(resid), objectives=objectives)


def brute_force_lasso(problem):
    """Exact minimizer by enumerating every support and sign pattern.

    On each (support, signs) pair the problem is smooth; its stationary point
    solves ``G_S x_S = b_S - w_S * s / 2``. The candidate with the lowest true
    objective wins; ties go to the smaller support, then the earlier support
    in lexicographic order. Test oracle only: K is capped at 12.
    """
    system = problem.system
    k = system.n_atoms
    if k > BRUTE_FORCE_MAX_ATOMS:
        raise SizeLimitError(f"brute force is limited to K <= "
                             f"{BRUTE_FORCE_MAX_ATOMS}, got {k}")
    G, b, w = system.gram, system.rhs, problem.weights

    def objective(x):
        return float(x @ G @ x - 2.0 * b @ x + system.y_sq + w @ np.abs(x))

    best_x = np.zeros(k)
    best = objective(best_x)
    for size in range(1, k + 1):
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=size))).T
        for support in itertools.combinations(range(k), size):
            idx = list(support)
            rhs = b[idx, None] - 0.5 * w[idx, None] * signs
            sol = np.linalg.pinv(G[np.ix_(idx, idx)]) @ rhs
            cand = np.zeros((k, sol.shape[1]))
            cand[idx] = sol
            quad = np.einsum("ij,ik,kj->j", cand, G, cand)
            vals = quad - 2.0 * b @ cand + system.y_sq + w @ np.abs(cand)
            j = int(np.argmin(vals))
            if vals[j] < best - 1e-13 * max(1.0, abs(best)):
                best = float(vals[j])
                best_x = cand[:, j].copy()
    return best_x


def eval_objective(dictionary, y, x, gamma, rho, lam):
    """Per-view MAP cost ``||y - D x||^2 + lam ||x||^2 + sum_i gamma_i rho_i``."""
    matrix = np.asarray(getattr(dictionary, "data", dictionary), dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    gamma = np.asarray(gamma, dtype=float).ravel()
    rho = np.asarray(rho, dtype=float).ravel()
    d, k = matrix.shape
    if y.size != d or x.size != k or gamma.size != k or rho.size != k:
        raise DimensionError(f"inconsistent lengths: D is {d}x{k}, y {y.size}, "
                             f"x {x.size}, gamma {gamma.size}, rho {rho.size}")
    r = y - matrix @ x
    return float(r @ r + lam * (x @ x) + gamma @ rho)
