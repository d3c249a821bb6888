"""Independent truth sources used to validate the stepper.

None of these routines share code with the product-integration path: the
Mittag-Leffler series and the linear closed form are plain series sums, and
:func:`adaptive_quad` integrates the kernel with scipy's QUADPACK after a
change of variables that removes the endpoint singularity.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import DomainError, NoConvergence, ToleranceNotMet
from .lagrange import eval_basis
from .solver import CaputoProblem, SolverConfig, TimeGrid, Trajectory, solve

SERIES_TOL = 1e-16
SERIES_CAP = 1_000_000


def _series_term(log_mag: float, sign: float, g_arg: float) -> float:
    if g_arg < 170.0 and log_mag < 700.0:
        return sign * math.exp(log_mag) / math.gamma(g_arg)
    return sign * math.exp(log_mag - math.lgamma(g_arg))


def _sum_series(term: Callable[[int], float]) -> float:
    terms = []
    for m in range(SERIES_CAP):
        value = term(m)
        terms.append(value)
        if m > 0 and abs(value) < SERIES_TOL:
            return math.fsum(terms)
    raise NoConvergence(f"series did not reach |term| < {SERIES_TOL} in {SERIES_CAP} terms")


def mittag_leffler(alpha: float, beta: float, z: float) -> float:
    """Two-parameter Mittag-Leffler function ``sum z**m / Gamma(alpha*m + beta)``.

    Plain series with exact (fsum) accumulation; intended for moderate ``|z|``.
    For negative ``z`` the terms alternate and peak near ``exp(|z|**(1/alpha))``,
    so accuracy degrades by that factor when ``alpha`` is small.
    """
    if alpha <= 0.0 or beta <= 0.0:
        raise DomainError("Mittag-Leffler parameters must be positive")
    if z == 0.0:
        return 1.0 / math.gamma(beta)
    log_z = math.log(abs(z))
    neg = z < 0.0

    def term(m: int) -> float:
        sign = -1.0 if (neg and m % 2) else 1.0
        return _series_term(m * log_z, sign, alpha * m + beta)

    return _sum_series(term)


def liu_inverse(alpha: float) -> float:
    # kept local so the oracle does not import the code under test
    return math.sqrt(3.0) / math.pi * math.log(alpha / (1.0 - alpha))


def forced_response(a: float, upsilon: float, nu: float, t: float) -> float:
    """``int_0^t (t-s)^(nu-1) E_{nu,nu}(a (t-s)^nu) s^upsilon ds`` by termwise Beta integrals.

    Equals ``Gamma(upsilon+1) sum_m a^m t^(nu(m+1)+upsilon) / Gamma(nu(m+1)+upsilon+1)``.
    """
    if t == 0.0:
        return 0.0
    log_t = math.log(t)
    log_a = math.log(abs(a)) if a != 0.0 else -math.inf
    neg = a < 0.0

    def term(m: int) -> float:
        if m > 0 and a == 0.0:
            return 0.0
        p = nu * (m + 1) + upsilon
        sign = -1.0 if (neg and m % 2) else 1.0
        return _series_term(m * log_a + p * log_t if m else p * log_t, sign, p + 1.0)

    return math.gamma(upsilon + 1.0) * _sum_series(term)


def linear_closed_form(a: float, b: float, upsilon: float, nu: float,
                       alpha: float, x0: float, t: float) -> float:
    """Alpha path of ``D^nu X = a X + b t^upsilon dC/dt`` at time ``t``.

    ``x0 E_nu(a t^nu) + |b| Phi^-1(alpha) Gamma(upsilon+1) sum_m a^m
    t^(nu(m+1)+upsilon) / Gamma(nu(m+1)+upsilon+1)``.
    """
    if not 0.0 < nu <= 1.0:
        raise DomainError("nu must lie in (0, 1]")
    if t < 0.0:
        raise DomainError("t must be nonnegative")
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    drift = x0 * mittag_leffler(nu, 1.0, a * t**nu)
    phi = liu_inverse(alpha)
    if phi == 0.0 or b == 0.0:
        return drift
    return drift + abs(b) * phi * forced_response(a, upsilon, nu, t)


def convolution_quad(a: float, upsilon: float, nu: float, t: float) -> float:
    """:func:`forced_response` by direct quadrature of the convolution."""
    def kernel(u: float) -> float:
        # u = (t - s)^nu; ds (t-s)^(nu-1) = du / nu
        s = t - u ** (1.0 / nu)
        return mittag_leffler(nu, nu, a * u) * max(s, 0.0) ** upsilon / nu

    val, err = integrate.quad(kernel, 0.0, t**nu, epsabs=1e-15, epsrel=1e-13, limit=200)
    return val


def adaptive_quad(nu: float, k: int | None, t_target: float, a: float, b: float,
                  integrand: Callable[[float], float] | Sequence[float] | None = None,
                  tol: float = 1e-13) -> float:
    """``int_a^b (t_target - s)^(nu-1) phi(s) ds`` by adaptive quadrature.

    ``phi`` is ``s**k`` when ``integrand`` is None, a polynomial when it is a
    coefficient row (ascending powers), or an arbitrary callable.  The
    substitution ``u = (t_target - s)**nu`` turns the weakly singular integral
    into ``(1/nu) int phi(t_target - u**(1/nu)) du`` with a bounded integrand.
    """
    if not 0.0 < nu <= 1.0:
        raise DomainError("nu must lie in (0, 1]")
    if not a < b <= t_target:
        raise DomainError("need a < b <= t_target")
    if integrand is None:
        if k is None or k < 0:
            raise DomainError("monomial degree required")
        phi = lambda s: s**k  # noqa: E731
    elif callable(integrand):
        phi = integrand
    else:
        row = np.asarray(integrand, dtype=float)[None, :]
        phi = lambda s: float(eval_basis(row, s)[0])  # noqa: E731

    lo = (t_target - b) ** nu
    hi = (t_target - a) ** nu
    inv = 1.0 / nu

    def g(u: float) -> float:
        return phi(t_target - u**inv)

    # purely relative control: moments of high degree can be tiny
    val, err = integrate.quad(g, lo, hi, epsabs=0.0, epsrel=tol, limit=500)
    val *= inv
    err *= inv
    if err > 10.0 * tol * abs(val) and err > 1e-300:
        raise ToleranceNotMet("adaptive quadrature", err)
    return val


def reference_solve(problem: CaputoProblem, grid: TimeGrid, fine_factor: int = 16,
                    memory_mode: str = "full") -> Trajectory:
    """Order-1 full-memory solve on a grid refined ``fine_factor`` times.

    The result is restricted back to the nodes of ``grid``.
    """
    if fine_factor < 4:
        raise DomainError("fine_factor must be at least 4")
    t = grid.nodes
    fine = np.concatenate([
        np.linspace(t[i], t[i + 1], fine_factor + 1)[:-1] for i in range(t.size - 1)
    ] + [t[-1:]])
    config = SolverConfig(order=1, memory_mode=memory_mode, bootstrap_refine=1)
    traj = solve(problem, TimeGrid(fine), config)
    idx = np.arange(t.size) * fine_factor
    return Trajectory(grid, traj.values[idx], traj.rhs_values[idx], traj.clamped)


def step_errors(problem: CaputoProblem, grid: TimeGrid, config: SolverConfig,
                deriv_bound: float, reference: Trajectory | None = None
                ) -> tuple[np.ndarray, np.ndarray]:
    """Local quadrature error of each step's newest interval and its bound.

    For step ``k`` the corrector's weights on ``[t_{k-1}, t_k]`` are applied to
    the stepper's final ``F`` values and compared with adaptive quadrature of
    ``(t_k - s)^(nu-1) F(s, R(s)) / Gamma(nu)``, where ``R`` is a cubic spline
    through ``reference`` (default :func:`reference_solve`).  The second array
    holds :func:`truncation_bound` for the same window.  Both are indexed by
    the steps of the internal (prefix-refined) grid.
    """
    from scipy.interpolate import CubicSpline

    from .moments import interval_weights
    from .solver import march, prepare, truncation_bound

    table, _ = prepare(grid, problem.nu, config)
    _, f, _ = march(problem, table, config)
    reference = reference or reference_solve(problem, grid)
    path = CubicSpline(reference.t, reference.values)
    t = table.nodes
    scale = 1.0 / math.gamma(problem.nu)
    errors, bounds = [], []
    for k in range(1, t.size):
        start, q = table.windows[k]
        if k <= table.block and config.start_iterations:
            start, q = 0, table.block + 1
        window = t[start : start + q]
        ws = interval_weights(window, problem.nu, t[k], t[k - 1], t[k])
        approx = float(ws.weights @ f[start : start + q])
        exact = adaptive_quad(problem.nu, None, t[k], t[k - 1], t[k],
                              lambda s: problem.rhs(s, float(path(s))))
        errors.append(abs(approx - exact) * scale)
        bounds.append(truncation_bound(problem.nu, window, (t[k - 1], t[k]), deriv_bound))
    return np.array(errors), np.array(bounds)
