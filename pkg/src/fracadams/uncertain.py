"""Uncertain fractional equations through their alpha paths.

The alpha path of ``D^nu X = f(t, X) + g(t, X) dC/dt`` (``C`` a canonical Liu
process) solves the deterministic equation

    D^nu X = f(t, X) + |g(t, X)| * Phi^-1(alpha),

and its value at ``t`` is the alpha-quantile of the uncertain solution.  A
sweep over an alpha grid therefore yields the whole inverse distribution.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, FracAdamsError
from .solver import CaputoProblem, SolverConfig, TimeGrid, prepare, solve

Coefficient = Callable[[float, float], float]

_SQRT3_PI = math.sqrt(3.0) / math.pi


def liu_inverse_std(alpha: float) -> float:
    """Inverse standard normal uncertain distribution ``(sqrt 3/pi) ln(alpha/(1-alpha))``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return _SQRT3_PI * math.log(alpha / (1.0 - alpha))


@dataclass(frozen=True)
class UncertainProblem:
    nu: float
    drift: Coefficient
    diffusion: Coefficient
    x0: float
    t_start: float = 0.0
    t_end: float = 1.0
    domain: tuple[float | None, float | None] = (None, None)

    def __post_init__(self):
        if not 0.0 < self.nu <= 1.0:
            raise DomainError(f"nu must lie in (0, 1], got {self.nu!r}")
        if not self.t_start < self.t_end:
            raise DomainError("t_start must be smaller than t_end")


def alpha_path_problem(u: UncertainProblem, alpha: float) -> CaputoProblem:
    """Deterministic problem whose solution is the alpha path of ``u``.

    At ``alpha = 0.5`` the quantile factor is exactly zero and the drift is
    passed through untouched, so the diffusion is never evaluated.
    """
    phi = liu_inverse_std(alpha)
    if phi == 0.0:
        rhs = u.drift
    else:
        f, g = u.drift, u.diffusion

        def rhs(t: float, x: float) -> float:
            return f(t, x) + abs(g(t, x)) * phi

    return CaputoProblem(u.nu, rhs, u.x0, u.t_start, u.t_end, u.domain)


@dataclass(frozen=True)
class AlphaGrid:
    alphas: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=float).ravel()
        if a.size == 0:
            raise DomainError("alpha grid is empty")
        if a[0] <= 0.0 or a[-1] >= 1.0 or np.any(np.diff(a) <= 0.0):
            raise DomainError("alphas must be strictly increasing inside (0, 1)")
        a.setflags(write=False)
        object.__setattr__(self, "alphas", a)

    @classmethod
    def default(cls) -> AlphaGrid:
        return cls.uniform(0.01, 0.99, 0.01)

    @classmethod
    def uniform(cls, lo: float, hi: float, step: float) -> AlphaGrid:
        count = int(round((hi - lo) / step))
        # rounding keeps 1 - alpha exactly representable on symmetric grids
        return cls(np.round(lo + step * np.arange(count + 1), 12))

    def __len__(self) -> int:
        return self.alphas.size

    def index_of(self, alpha: float, tol: float = 1e-9) -> int | None:
        i = int(np.argmin(np.abs(self.alphas - alpha)))
        return i if abs(self.alphas[i] - alpha) <= tol else None


@dataclass
class AlphaSurface:
    alpha_grid: AlphaGrid
    grid: TimeGrid
    values: np.ndarray
    failures: dict[float, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (len(self.alpha_grid), len(self.grid)):
            raise ValueError("surface shape does not match its grids")

    @property
    def alphas(self) -> np.ndarray:
        return self.alpha_grid.alphas

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def row(self, alpha: float) -> np.ndarray:
        i = self.alpha_grid.index_of(alpha)
        if i is None:
            raise KeyError(alpha)
        return self.values[i]

    def is_ordered(self, tol: float = 0.0) -> bool:
        """True when every column is nondecreasing in alpha."""
        return bool(np.all(np.diff(self.values, axis=0) >= -tol))


class SweepError(FracAdamsError):
    def __init__(self, alpha: float, cause: Exception):
        self.alpha = alpha
        self.cause = cause
        super().__init__(f"alpha={alpha!r}: {cause}")


def sweep(u: UncertainProblem, alphas: AlphaGrid | Sequence[float] | None = None,
          grid: TimeGrid | None = None, config: SolverConfig | None = None, *,
          partial: bool = False, workers: int = 1) -> AlphaSurface:
    """Solve the alpha path for every alpha of the grid.

    Rows are independent and share only the read-only step table, so they may
    run on ``workers`` threads; output order never depends on scheduling.
    A failing row aborts the sweep unless ``partial`` is set, in which case
    it is filled with NaN and reported in ``failures``.
    """
    if alphas is None:
        alphas = AlphaGrid.default()
    elif not isinstance(alphas, AlphaGrid):
        alphas = AlphaGrid(alphas)
    config = config or SolverConfig()
    if grid is None:
        grid = TimeGrid.uniform(u.t_start, u.t_end, 0.01)
    prepared = prepare(grid, u.nu, config)

    def run(alpha: float):
        try:
            return solve(alpha_path_problem(u, alpha), grid, config, prepared=prepared).values
        except FracAdamsError as exc:
            if not partial:
                raise SweepError(alpha, exc) from exc
            return exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, alphas.alphas))
    else:
        rows = [run(a) for a in alphas.alphas]

    values = np.empty((len(alphas), len(grid)))
    failures: dict[float, str] = {}
    for i, (alpha, row) in enumerate(zip(alphas.alphas, rows)):
        if isinstance(row, Exception):
            values[i] = np.nan
            failures[float(alpha)] = f"{type(row).__name__}: {row}"
        else:
            values[i] = row
    return AlphaSurface(alphas, grid, values, failures)
