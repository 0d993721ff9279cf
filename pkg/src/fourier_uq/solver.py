"""Accelerated proximal-gradient solver for the complex LASSO

    minimize_x  (1/(2*normalization)) ||op_forward(x) - y||_2^2 + lambda ||x||_1

with the l1 norm summing complex moduli.  The data y lives in the
operator's weighted measurement space.  Momentum follows the classic
t-sequence, the step is 1/L with L estimated by power iteration on the
normalized gram, and an adaptive restart falls back to a plain proximal
step whenever the objective would increase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import MeasurementOperator, op_adjoint, op_forward

__all__ = [
    "SolverOptions",
    "SolverResult",
    "SolverDivergenceError",
    "soft_threshold",
    "estimate_lipschitz",
    "lasso_solve",
    "kkt_residual",
]

_POWER_ITERATIONS = 20
_POWER_RTOL = 1e-6


class SolverDivergenceError(RuntimeError):
    """Raised when the objective turns non-finite; carries the iteration."""

    def __init__(self, iteration: int):
        super().__init__(f"non-finite objective at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 2000
    tolerance: float = 1e-8
    lipschitz: float | None = None
    restart: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.lipschitz is not None and self.lipschitz <= 0:
            raise ValueError("lipschitz must be positive when given")


@dataclass(frozen=True)
class SolverResult:
    solution: np.ndarray
    objective_trace: np.ndarray
    iterations_used: int
    converged: bool


def soft_threshold(z, tau):
    """Complex soft threshold z * max(1 - tau/|z|, 0); zero stays zero."""
    if tau < 0:
        raise ValueError("threshold must be nonnegative")
    arr = np.asarray(z, dtype=complex)
    mag = np.abs(arr)
    # tau / mag may overflow for subnormal moduli; the clamp still yields 0
    with np.errstate(divide="ignore", over="ignore"):
        factor = np.maximum(1.0 - tau / np.where(mag > 0, mag, 1.0), 0.0)
    out = arr * factor
    if np.isscalar(z) or np.ndim(z) == 0:
        return complex(out)
    return out


def estimate_lipschitz(
    op: MeasurementOperator,
    iterations: int = _POWER_ITERATIONS,
    rtol: float = _POWER_RTOL,
) -> float:
    """Largest eigenvalue of op_adjoint(op_forward(.)) / normalization."""
    rng = np.random.default_rng(0)
    v = rng.standard_normal(op.size) + 1j * rng.standard_normal(op.size)
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        w = op_adjoint(op, op_forward(op, v)) / op.normalization
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            raise ValueError("operator maps the probe vector to zero; cannot set a step size")
        previous, estimate = estimate, float(norm_w)
        v = w / norm_w
        if abs(estimate - previous) <= rtol * estimate:
            break
    return estimate


def _objective(op, y, lam, x, forward=None):
    if forward is None:
        forward = op_forward(op, x)
    residual = forward - y
    quad = float(np.vdot(residual, residual).real) / (2.0 * op.normalization)
    return quad + lam * float(np.sum(np.abs(x)))


def lasso_solve(
    op: MeasurementOperator,
    y,
    lam: float,
    opts: SolverOptions | None = None,
) -> SolverResult:
    """Minimize the weighted-data LASSO objective from a zero start."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    opts = opts or SolverOptions()
    data = np.asarray(y, dtype=complex).ravel()
    if data.size != op.m:
        raise ValueError(f"data has length {data.size}, expected {op.m}")
    L = opts.lipschitz if opts.lipschitz is not None else estimate_lipschitz(op)
    norm = op.normalization

    x = np.zeros(op.size, dtype=complex)
    v = x
    t = 1.0
    obj = _objective(op, data, lam, x)
    trace = [obj]
    converged = False
    iterations_used = 0

    for k in range(1, opts.max_iterations + 1):
        grad = op_adjoint(op, op_forward(op, v) - data) / norm
        x_new = soft_threshold(v - grad / L, lam / L)
        obj_new = _objective(op, data, lam, x_new)
        if not np.isfinite(obj_new):
            raise SolverDivergenceError(k)
        if opts.restart and obj_new > obj:
            # momentum overshot: restart it and take a plain descent step
            t = 1.0
            grad = op_adjoint(op, op_forward(op, x) - data) / norm
            x_new = soft_threshold(x - grad / L, lam / L)
            obj_new = _objective(op, data, lam, x_new)
            if not np.isfinite(obj_new):
                raise SolverDivergenceError(k)
        t_new = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        v = x_new + ((t - 1.0) / t_new) * (x_new - x)
        step = float(np.linalg.norm(x_new - x))
        scale = float(np.linalg.norm(x_new))
        trace.append(obj_new)
        x = x_new
        t = t_new
        obj = obj_new
        iterations_used = k
        if step <= opts.tolerance * max(scale, 1e-30):
            converged = True
            break

    return SolverResult(
        solution=x,
        objective_trace=np.asarray(trace),
        iterations_used=iterations_used,
        converged=converged,
    )


def kkt_residual(op: MeasurementOperator, y, lam: float, x) -> float:
    """Max stationarity violation of the LASSO optimality conditions.

    Active coordinates must satisfy g_i = -lam * x_i/|x_i|; inactive ones
    |g_i| <= lam, where g is the gradient of the quadratic part.
    """
    data = np.asarray(y, dtype=complex).ravel()
    point = np.asarray(x, dtype=complex).ravel()
    g = op_adjoint(op, op_forward(op, point) - data) / op.normalization
    active = np.abs(point) > 0
    res_active = 0.0
    if np.any(active):
        direction = point[active] / np.abs(point[active])
        res_active = float(np.max(np.abs(g[active] + lam * direction)))
    res_inactive = 0.0
    if np.any(~active):
        res_inactive = float(np.max(np.maximum(np.abs(g[~active]) - lam, 0.0)))
    return max(res_active, res_inactive)
