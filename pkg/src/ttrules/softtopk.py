"""Entropy-regularized relaxation of the top-k selection operator.

Selecting the k largest entries of a score vector is a discrete operation.
The relaxed version returns y with y_i = sigmoid(x_i / tau + c), where the
shift c is chosen by bisection so that sum(y) == k. Small temperatures tau
recover the hard selection; the operator stays differentiable and its
Jacobian-vector products have closed forms, so no n-by-n matrix is ever built.

All math is done in 64-bit floats. Every function accepts either a single
score vector of shape (n,) or a batch of shape (rows, n); batched solves run
the bisection in lockstep, and a row that has already converged keeps its
bracket while the others continue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DegenerateStateError, InvalidInputError

# Below this total sigmoid slope the solution is considered fully saturated:
# every y_i sits at 0 or 1 and the true Jacobian vanishes.
SATURATION_EPS = 1e-12

DEFAULT_TOL = 1e-5
DEFAULT_MAX_ITER = 60


@dataclass
class SoftTopKSolution:
    """Result of one relaxed top-k solve.

    y holds the relaxed selection weights in [0, 1], c the additive shift
    found by bisection, and iterations the per-row count of bisection steps
    until the constraint residual dropped below tolerance. s_prime is the
    sigmoid slope y * (1 - y), recomputed from y on access rather than
    cached, so it can never drift out of sync.
    """

    y: np.ndarray
    c: float | np.ndarray
    k: int
    tau: float
    iterations: int | np.ndarray

    @property
    def s_prime(self) -> np.ndarray:
        return self.y * (1.0 - self.y)


def _check_inputs(x: np.ndarray, k: int, tau: float, k_lo: int, k_hi_pad: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2):
        raise InvalidInputError(f"x must be 1-D or 2-D, got ndim={x.ndim}")
    if x.shape[-1] < 1:
        raise InvalidInputError("x must have at least one entry")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("x contains non-finite entries")
    if not np.isfinite(tau) or tau <= 0:
        raise InvalidInputError(f"tau must be positive and finite, got {tau}")
    n = x.shape[-1]
    if not float(k).is_integer():
        raise InvalidInputError(f"k must be an integer, got {k}")
    if not (k_lo <= k <= n - 1 + k_hi_pad):
        raise InvalidInputError(
            f"k={k} out of range [{k_lo}, {n - 1 + k_hi_pad}] for n={n}"
        )
    return x


def _bisect(xt: np.ndarray, k: int, tol: float, max_iter: int):
    """Lockstep bisection for the shift c on scaled scores xt = x / tau.

    The root of f(c) = sum(sigmoid(xt + c)) - k is bracketed using the k-th
    and (k+1)-th largest entries: f(-xt_(k) - ln n) < 0 and
    f(-xt_(k+1) + ln n) > 0 hold for every input, so the bracket always
    straddles the root. Returns (c, iterations, residual_history) where the
    history has one row of |f| values per bisection step.
    """
    rows, n = xt.shape
    part = np.sort(xt, axis=1)
    lo = -part[:, n - k] - np.log(n)
    hi = -part[:, n - k - 1] + np.log(n)

    c = 0.5 * (lo + hi)
    converged = np.zeros(rows, dtype=bool)
    iterations = np.full(rows, max_iter, dtype=np.int64)
    history = []
    for step in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        c = np.where(converged, c, mid)
        f = expit(xt + c[:, None]).sum(axis=1) - k
        history.append(np.abs(f))
        newly = ~converged & (np.abs(f) <= tol)
        iterations[newly] = step
        converged |= newly
        if converged.all():
            break
        go_lo = ~converged & (f < 0)
        go_hi = ~converged & (f >= 0)
        lo = np.where(go_lo, c, lo)
        hi = np.where(go_hi, c, hi)
    return c, iterations, np.array(history)


def solve_threshold(x, k: int, tau: float, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER):
    """Find the shift c with |sum(sigmoid(x/tau + c)) - k| <= tol.

    Deterministic for identical inputs. For batched x the result is one c
    per row.
    """
    x = _check_inputs(x, k, tau, k_lo=1, k_hi_pad=0)
    squeeze = x.ndim == 1
    xt = np.atleast_2d(x) / tau
    c, _, _ = _bisect(xt, k, tol, max_iter)
    return float(c[0]) if squeeze else c


def residual_history(x, k: int, tau: float, tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER):
    """Run the bisection and return (c, iterations, |residual| per step).

    The history row at index t holds |sum(y) - k| after bisection step t+1
    for every input row; converged rows repeat their final residual.
    """
    x = _check_inputs(x, k, tau, k_lo=1, k_hi_pad=0)
    squeeze = x.ndim == 1
    xt = np.atleast_2d(x) / tau
    c, iterations, history = _bisect(xt, k, tol, max_iter)
    if squeeze:
        return float(c[0]), int(iterations[0]), history[:, 0]
    return c, iterations, history


def forward(x, k: int, tau: float, tol: float = DEFAULT_TOL,
            max_iter: int = DEFAULT_MAX_ITER) -> SoftTopKSolution:
    """Relaxed top-k weights y with sum(y) == k (to tolerance).

    k == 0 and k == n are short-circuited to the constant 0 and 1 vectors;
    the entropic objective is only defined strictly inside the box, and the
    constraint forces those corners anyway.
    """
    x = _check_inputs(x, k, tau, k_lo=0, k_hi_pad=1)
    squeeze = x.ndim == 1
    x2 = np.atleast_2d(x)
    rows, n = x2.shape

    if k == 0 or k == n:
        y = np.full_like(x2, float(k == n))
        c = np.full(rows, -np.inf if k == 0 else np.inf)
        iters = np.zeros(rows, dtype=np.int64)
    else:
        c, iters, _ = _bisect(x2 / tau, k, tol, max_iter)
        y = expit(x2 / tau + c[:, None])

    if squeeze:
        return SoftTopKSolution(y=y[0], c=float(c[0]), k=k, tau=tau,
                                iterations=int(iters[0]))
    return SoftTopKSolution(y=y, c=c, k=k, tau=tau, iterations=iters)


def vjp_x(solution: SoftTopKSolution, tau: float, upstream) -> np.ndarray:
    """Vector-Jacobian product u -> J^T u of the relaxed operator.

    J = (1/tau) * (diag(s') - s' s'^T / ||s'||_1) is symmetric, so this is
    also J u. Costs O(n); the Jacobian itself is never materialized. A fully
    saturated solution (||s'||_1 below SATURATION_EPS) returns zeros, which
    is the true limit of J as every sigmoid flattens out.
    """
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != solution.y.shape:
        raise InvalidInputError(
            f"upstream shape {upstream.shape} does not match y shape {solution.y.shape}"
        )
    s = solution.s_prime
    squeeze = s.ndim == 1
    s2 = np.atleast_2d(s)
    u2 = np.atleast_2d(upstream)
    norm = s2.sum(axis=1, keepdims=True)
    live = norm > SATURATION_EPS
    safe = np.where(live, norm, 1.0)
    out = (s2 * u2 - s2 * ((s2 * u2).sum(axis=1, keepdims=True) / safe)) / tau
    out = np.where(live, out, 0.0)
    return out[0] if squeeze else out


def grad_k(solution: SoftTopKSolution) -> np.ndarray:
    """Gradient of y with respect to the (relaxed, real-valued) cardinality k.

    Equals s' / ||s'||_1: non-negative and summing to one. Raises
    DegenerateStateError when the solution is saturated; callers that want a
    gradient anyway should treat it as zero.
    """
    s = solution.s_prime
    squeeze = s.ndim == 1
    s2 = np.atleast_2d(s)
    norm = s2.sum(axis=1, keepdims=True)
    if np.any(norm <= SATURATION_EPS):
        raise DegenerateStateError(
            "solution is saturated (||s'||_1 ~ 0); gradient w.r.t. k is degenerate"
        )
    out = s2 / norm
    return out[0] if squeeze else out
