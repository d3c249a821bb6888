"""n-node fractional Adams predictor-corrector for Caputo problems with 0 < nu <= 1.

The solution obeys ``X(t) = x0 + I^nu F(., X)(t)``.  Each subinterval
``[t_i, t_{i+1}]`` of the memory integral is handled by product integration:
``F`` is replaced by its Lagrange interpolant on a window of ``order`` nodes
and the kernel is integrated exactly through :mod:`fracadams.moments`.

Step ``k`` predicts with a window that ends at ``t_{k-1}`` (extrapolation onto
the new interval), then corrects with a window ending at ``t_k`` whose newest
``F`` value is evaluated at the latest iterate.  All weights depend only on the
grid, ``nu`` and the method settings, so they are assembled once into a
:class:`StepTable` and shared by every trajectory that uses the same grid
(e.g. the rows of an alpha sweep).
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    NonFiniteValue,
    RhsDomainError,
)
from .lagrange import split_lagrange_many
from .moments import moments

Rhs = Callable[[float, float], float]
MemoryMode = Literal["full", "increment"]

MAX_ORDER = 6
WARN_ORDER = 5


@dataclass(frozen=True)
class CaputoProblem:
    """``D^nu X = rhs(t, X)`` on ``[t_start, t_end]`` with ``X(t_start) = x0``.

    ``domain`` optionally bounds the admissible ``x`` values; it is only used
    by the clamp policy of :class:`SolverConfig`.
    """

    nu: float
    rhs: Rhs
    x0: float
    t_start: float = 0.0
    t_end: float = 1.0
    domain: tuple[float | None, float | None] = (None, None)

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise DomainError(f"nu must lie in (0, 1], got {self.nu!r}")
        if not self.t_start < self.t_end:
            raise DomainError("t_start must be smaller than t_end")


@dataclass(frozen=True)
class TimeGrid:
    nodes: np.ndarray
    refined_prefix: int = 0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("a time grid needs at least two nodes")
        if np.any(np.diff(nodes) <= 0.0):
            raise DomainError("time grid must be strictly increasing")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, t_start: float, t_end: float, h: float) -> TimeGrid:
        count = int(round((t_end - t_start) / h))
        if count < 1 or not math.isclose(t_start + count * h, t_end, rel_tol=1e-9, abs_tol=1e-12):
            raise DomainError(f"step {h!r} does not divide [{t_start!r}, {t_end!r}]")
        nodes = t_start + h * np.arange(count + 1)
        nodes[-1] = t_end
        return cls(nodes)

    @property
    def t_start(self) -> float:
        return float(self.nodes[0])

    @property
    def t_end(self) -> float:
        return float(self.nodes[-1])

    def __len__(self) -> int:
        return self.nodes.size

    def refined(self, intervals: int, factor: int) -> tuple[TimeGrid, np.ndarray]:
        """Split the first ``intervals`` intervals into ``factor`` pieces each.

        Returns the refined grid and the positions of the original nodes in it.
        """
        intervals = min(intervals, self.nodes.size - 1)
        if factor <= 1 or intervals <= 0:
            return self, np.arange(self.nodes.size)
        pieces = [
            np.linspace(self.nodes[i], self.nodes[i + 1], factor + 1)[:-1]
            for i in range(intervals)
        ]
        fine = np.concatenate(pieces + [self.nodes[intervals:]])
        index = np.concatenate([
            np.arange(intervals) * factor,
            intervals * factor + np.arange(self.nodes.size - intervals),
        ])
        return TimeGrid(fine, refined_prefix=intervals * factor), index


@dataclass(frozen=True)
class SolverConfig:
    order: int = 3
    memory_mode: MemoryMode = "full"
    corrector_iterations: int = 1
    bootstrap_refine: int = 10
    # fixed-point sweeps over the startup block; 0 keeps the plain order ramp
    start_iterations: int = 100
    start_tol: float = 1e-15
    on_domain_error: Literal["raise", "clamp"] = "raise"

    def __post_init__(self):
        if not 1 <= self.order <= MAX_ORDER:
            raise ConfigError(f"order must lie in [1, {MAX_ORDER}], got {self.order}")
        if self.memory_mode not in ("full", "increment"):
            raise ConfigError(f"unknown memory mode {self.memory_mode!r}")
        if self.corrector_iterations < 1:
            raise ConfigError("corrector_iterations must be >= 1")
        if self.bootstrap_refine < 1:
            raise ConfigError("bootstrap_refine must be >= 1")
        if self.start_iterations < 0:
            raise ConfigError("start_iterations must be >= 0")
        if self.on_domain_error not in ("raise", "clamp"):
            raise ConfigError(f"unknown domain policy {self.on_domain_error!r}")
        if self.order >= WARN_ORDER:
            warnings.warn(
                f"order {self.order} interpolation windows are poorly conditioned",
                stacklevel=3,
            )


@dataclass
class Trajectory:
    grid: TimeGrid
    values: np.ndarray
    rhs_values: np.ndarray
    clamped: bool = False

    def __post_init__(self):
        if not len(self.values) == len(self.rhs_values) == len(self.grid):
            raise ValueError("trajectory lengths do not match the grid")

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes


@dataclass
class StepTable:
    """Predictor/corrector weight rows (already divided by ``Gamma(nu)``).

    ``pred[k]`` acts on ``F_0..F_{k-1}`` and ``corr[k]`` on ``F_0..F_k``.
    For ``k <= block`` the rows in ``start[k]`` act on ``F_0..F_block`` and
    define the startup system solved by fixed-point iteration.
    """

    nodes: np.ndarray
    nu: float
    order: int
    memory_mode: MemoryMode
    pred: list[np.ndarray] = field(default_factory=list)
    corr: list[np.ndarray] = field(default_factory=list)
    start: list[np.ndarray] = field(default_factory=list)
    windows: list[tuple[int, int]] = field(default_factory=list)

    @property
    def block(self) -> int:
        return len(self.start) - 1

    def base(self, k: int, x: np.ndarray) -> float:
        return x[0] if self.memory_mode == "full" else x[k - 1]

    def predict(self, k: int, f: np.ndarray, x: np.ndarray) -> float:
        """Explicit estimate of ``X_k`` from ``F_0..F_{k-1}``."""
        return float(self.base(k, x) + self.pred[k] @ f[:k])

    def correct(self, k: int, f: np.ndarray, x: np.ndarray, f_new: float) -> float:
        """Implicit rule with ``F(t_k, .)`` frozen at ``f_new``."""
        row = self.corr[k]
        return float(self.base(k, x) + row[:k] @ f[:k] + row[k] * f_new)


class _Assembler:
    """Weight rows in coordinates local to each interval's left node.

    Monomials about a distant origin cancel catastrophically once windows get
    wide, so both the basis and the moments of interval ``i`` use ``s - t_i``.
    """

    def __init__(self, nodes: np.ndarray, order: int):
        self.t = nodes
        self.order = order
        self._trail: dict[int, np.ndarray] = {}

    def _local(self, q: int, intervals: np.ndarray, starts: np.ndarray) -> np.ndarray:
        windows = self.t[starts[:, None] + np.arange(q)] - self.t[intervals][:, None]
        return split_lagrange_many(windows)

    def coeffs(self, q: int, intervals: np.ndarray, starts: np.ndarray) -> np.ndarray:
        trailing = np.maximum(0, intervals + 2 - q)
        if q not in self._trail:
            every = np.arange(self.t.size - 1)
            self._trail[q] = self._local(q, every, np.maximum(0, every + 2 - q))
        out = self._trail[q][intervals]
        odd = starts != trailing
        if np.any(odd):
            out = out.copy()
            out[odd] = self._local(q, intervals[odd], starts[odd])
        return out

    def row(self, mom: np.ndarray, intervals: np.ndarray, starts: np.ndarray,
            q: int, length: int) -> np.ndarray:
        w = np.einsum("iab,ib->ia", self.coeffs(q, intervals, starts), mom[intervals, :q])
        out = np.zeros(length)
        np.add.at(out, starts[:, None] + np.arange(q), w)
        return out


def _trailing_starts(intervals: np.ndarray, q: int, last: int) -> np.ndarray:
    # window of q nodes ending at t_{i+1}, pushed right near t_0 and left so
    # that it never reaches past node `last`
    return np.maximum(0, np.minimum(intervals + 2 - q, last - q + 1))


def build_table(nodes: Sequence[float], nu: float, order: int,
                memory_mode: MemoryMode = "full") -> StepTable:
    """Assemble all step weights for a grid.

    Full memory integrates every past interval against the kernel anchored at
    the new node; increment mode keeps only the newest interval and adds it to
    the previous value.
    """
    t = np.asarray(nodes, dtype=float)
    n_last = t.size - 1
    scale = 1.0 / math.gamma(nu)
    asm = _Assembler(t, order)
    table = StepTable(t, nu, order, memory_mode)
    table.pred.append(np.zeros(0))
    table.corr.append(np.zeros(1))
    table.windows.append((0, 1))

    block = min(order - 1, n_last)
    for k in range(1, n_last + 1):
        lo = 0 if memory_mode == "full" else k - 1
        intervals = np.arange(lo, k)
        mom = np.zeros((k, order))
        mom[lo:k] = moments(nu, order - 1, t[k] - t[lo:k], 0.0, t[lo + 1 : k + 1] - t[lo:k])

        qp = min(order, k)
        starts = _trailing_starts(intervals, qp, k - 1)
        table.pred.append(scale * asm.row(mom, intervals, starts, qp, k))

        qc = min(order, k + 1)
        starts = _trailing_starts(intervals, qc, k)
        table.corr.append(scale * asm.row(mom, intervals, starts, qc, k + 1))
        table.windows.append((int(starts[-1]), qc))

        if k <= block:
            if k == 1:
                table.start.append(np.zeros(block + 1))
            starts = np.zeros_like(intervals)
            table.start.append(scale * asm.row(mom, intervals, starts, block + 1, block + 1))
    return table


class _Evaluator:
    def __init__(self, problem: CaputoProblem, policy: str):
        self.rhs = problem.rhs
        self.lo, self.hi = problem.domain
        self.policy = policy
        self.clamped = False

    def _raw(self, t: float, x: float) -> float:
        try:
            val = self.rhs(t, x)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise RhsDomainError(t, x, str(exc)) from exc
        if isinstance(val, complex):
            raise RhsDomainError(t, x, "complex value")
        val = float(val)
        if math.isnan(val):
            raise RhsDomainError(t, x, "nan")
        return val

    def __call__(self, t: float, x: float) -> float:
        try:
            return self._raw(t, x)
        except RhsDomainError:
            if self.policy != "clamp":
                raise
            xc = x
            if self.lo is not None and xc < self.lo:
                xc = self.lo
            if self.hi is not None and xc > self.hi:
                xc = self.hi
            if xc == x:
                raise
            self.clamped = True
            return self._raw(t, xc)


def _check_finite(k: int, t: float, value: float) -> None:
    if not math.isfinite(value):
        raise NonFiniteValue(f"non-finite value {value!r} at step {k} (t={t!r})")


def march(problem: CaputoProblem, table: StepTable,
          config: SolverConfig) -> tuple[np.ndarray, np.ndarray, bool]:
    """Run the stepper over ``table.nodes``; returns values, rhs values, clamped flag."""
    t = table.nodes
    n_last = t.size - 1
    ev = _Evaluator(problem, config.on_domain_error)
    x = np.empty(n_last + 1)
    f = np.empty(n_last + 1)
    x[0] = problem.x0
    f[0] = ev(t[0], x[0])

    for k in range(1, n_last + 1):
        xk = table.predict(k, f, x)
        _check_finite(k, t[k], xk)
        for _ in range(config.corrector_iterations):
            xk = table.correct(k, f, x, ev(t[k], xk))
            _check_finite(k, t[k], xk)
        x[k] = xk
        f[k] = ev(t[k], xk)
        if k == table.block and config.start_iterations:
            _refine_start(table, x, f, ev, config)

    return x, f, ev.clamped


def _refine_start(table: StepTable, x: np.ndarray, f: np.ndarray,
                  ev: _Evaluator, config: SolverConfig) -> None:
    # Gauss-Seidel sweeps on the startup block, whose windows reach ahead to
    # t_block; the order-ramped values serve as the initial guess
    nb = table.block
    t = table.nodes
    for _ in range(config.start_iterations):
        change = 0.0
        for k in range(1, nb + 1):
            new = float(table.base(k, x) + table.start[k] @ f[: nb + 1])
            _check_finite(k, t[k], new)
            change = max(change, abs(new - x[k]))
            x[k] = new
            f[k] = ev(t[k], new)
        if change <= config.start_tol * (1.0 + np.max(np.abs(x[: nb + 1]))):
            return
    warnings.warn("startup fixed-point iteration did not settle", stacklevel=4)


def prepare(grid: TimeGrid, nu: float, config: SolverConfig) -> tuple[StepTable, np.ndarray]:
    """Build the internal (prefix-refined) grid's table and the coarse index map."""
    fine, index = grid.refined(config.order, config.bootstrap_refine)
    return build_table(fine.nodes, nu, config.order, config.memory_mode), index


def solve(problem: CaputoProblem, grid: TimeGrid | None = None,
          config: SolverConfig | None = None, *,
          prepared: tuple[StepTable, np.ndarray] | None = None) -> Trajectory:
    """Solve a Caputo problem on ``grid`` (default: step 0.01 over the horizon).

    ``prepared`` lets callers reuse the output of :func:`prepare` across many
    problems sharing ``nu`` and the grid.
    """
    config = config or SolverConfig()
    if grid is None:
        grid = TimeGrid.uniform(problem.t_start, problem.t_end, 0.01)
    if not math.isclose(grid.t_start, problem.t_start, abs_tol=1e-12):
        raise DomainError("grid does not start at the problem's t_start")
    table, index = prepared if prepared is not None else prepare(grid, problem.nu, config)
    if table.nu != problem.nu:
        raise ConfigError("prepared table was built for a different nu")
    x, f, clamped = march(problem, table, config)
    return Trajectory(grid, x[index], f[index], clamped)


def truncation_bound(nu: float, window: Sequence[float], interval: tuple[float, float],
                     deriv_bound: float, n: int | None = None,
                     t: float | None = None, samples: int = 2001) -> float:
    """Error bound for one subinterval of the product-integration rule.

    ``((t-a)**nu - (t-b)**nu) / Gamma(nu+1) * deriv_bound / n! * max|omega|``
    where ``omega(s) = prod (s - t_j)`` over the window and the maximum is
    taken over ``[a, b]`` by dense sampling.  ``t`` defaults to ``b``.
    """
    a, b = map(float, interval)
    t = b if t is None else float(t)
    if not a < b <= t:
        raise DomainError("need a < b <= t")
    if deriv_bound < 0:
        raise DomainError("derivative bound must be nonnegative")
    nodes = np.asarray(window, dtype=float)
    n = nodes.size if n is None else n
    s = np.concatenate([np.linspace(a, b, samples), nodes[(nodes >= a) & (nodes <= b)]])
    omega = np.max(np.abs(np.prod(s[:, None] - nodes[None, :], axis=1)))
    span = ((t - a) ** nu - (t - b) ** nu) / math.gamma(nu + 1.0)
    return float(span * deriv_bound / math.factorial(n) * omega)
