"""Limited-memory BFGS driver with strong-Wolfe line search.

Minimal quasi-Newton loop for smooth unconstrained problems: two-loop
recursion over the last ``memory`` curvature pairs, scipy's Wolfe line
search (c1=1e-4, c2=0.9) with an Armijo backtracking fallback, and
best-point tracking so the returned iterate never regresses below the
starting cost.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import line_search as _wolfe_line_search


@dataclass
class IterationRecord:
    iteration: int
    cost: float
    gradient_norm: float
    wall_time_ms: float


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    initial_fun: float
    iterations: int
    n_fev: int
    n_gev: int
    converged: bool
    message: str
    trace: list = field(default_factory=list)
    wall_time: float = 0.0


def minimize_lbfgs(
    fun_grad,
    x0,
    max_iters: int = 500,
    gtol: float = 1e-10,
    ftol: float = 1e-12,
    memory: int = 10,
    c1: float = 1e-4,
    c2: float = 0.9,
) -> MinimizeResult:
    """Minimize ``fun_grad(x) -> (f, g)`` starting from ``x0``.

    Stops when the max-norm of the gradient falls below ``gtol``, the
    cost improvement of an accepted step falls below ``ftol``, the line
    search fails, or ``max_iters`` is reached.
    """
    t0 = time.perf_counter()
    x = np.asarray(x0, dtype=np.float64).copy()
    counters = {"fev": 0, "gev": 0}

    def fg(z):
        counters["fev"] += 1
        counters["gev"] += 1
        f, g = fun_grad(z)
        return float(f), np.asarray(g, dtype=np.float64)

    f, g = fg(x)
    initial_f = f
    best_x, best_f = x.copy(), f
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    trace = [IterationRecord(0, f, float(np.max(np.abs(g))),
                             (time.perf_counter() - t0) * 1e3)]
    converged = False
    message = "max_iters reached"

    for it in range(1, max_iters + 1):
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= gtol:
            converged, message = True, "gradient norm below tolerance"
            break

        d = _two_loop_direction(g, s_hist, y_hist, rho_hist)
        if np.dot(d, g) >= 0:  # not a descent direction; reset memory
            s_hist.clear(), y_hist.clear(), rho_hist.clear()
            d = -g

        alpha, f_new, g_new = _search(fg, x, d, f, g, c1, c2)
        if alpha is None:
            converged, message = False, "line search failure"
            break

        x_new = x + alpha * d
        s = x_new - x
        y = g_new - g
        sy = float(np.dot(s, y))
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > memory:
                s_hist.pop(0), y_hist.pop(0), rho_hist.pop(0)

        improvement = f - f_new
        x, f, g = x_new, f_new, g_new
        if f < best_f:
            best_f, best_x = f, x.copy()
        trace.append(IterationRecord(it, f, float(np.max(np.abs(g))),
                                     (time.perf_counter() - t0) * 1e3))
        if improvement < ftol:
            converged, message = True, "cost improvement below tolerance"
            break
    else:
        it = max_iters

    return MinimizeResult(
        x=best_x,
        fun=best_f,
        initial_fun=initial_f,
        iterations=it,
        n_fev=counters["fev"],
        n_gev=counters["gev"],
        converged=converged,
        message=message,
        trace=trace,
        wall_time=time.perf_counter() - t0,
    )


def _two_loop_direction(g, s_hist, y_hist, rho_hist) -> np.ndarray:
    q = g.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    if y_hist:
        gamma = np.dot(s_hist[-1], y_hist[-1]) / np.dot(y_hist[-1], y_hist[-1])
        q *= gamma
    for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return -q


def _search(fg, x, d, f, g, c1, c2):
    """Strong-Wolfe search along d with Armijo backtracking fallback."""
    cache: dict[float, tuple[float, np.ndarray]] = {}

    def probe(alpha: float):
        key = float(alpha)
        if key not in cache:
            cache[key] = fg(x + key * d)
        return cache[key]

    result = _wolfe_line_search(
        f=lambda z: probe(_alpha_of(z, x, d))[0],
        myfprime=lambda z: probe(_alpha_of(z, x, d))[1],
        xk=x, pk=d, gfk=g, old_fval=f,
        c1=c1, c2=c2, maxiter=25,
    )
    alpha = result[0]
    if alpha is not None and alpha > 0:
        f_new, g_new = probe(alpha)
        if f_new <= f + c1 * alpha * np.dot(g, d) + 1e-15:
            return alpha, f_new, g_new

    # Armijo backtracking rescue
    alpha = 1.0
    slope = np.dot(g, d)
    for _ in range(40):
        f_new, g_new = probe(alpha)
        if f_new <= f + c1 * alpha * slope:
            return alpha, f_new, g_new
        alpha *= 0.5
    return None, None, None


def _alpha_of(z, x, d) -> float:
    """Recover the step length scipy encoded as the trial point."""
    dz = z - x
    denom = float(np.dot(d, d))
    return float(np.dot(dz, d) / denom) if denom else 0.0
