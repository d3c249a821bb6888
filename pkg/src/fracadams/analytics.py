"""Quantities derived from an alpha surface.

* extreme values: the inverse distribution of ``inf_{t<=s} J(X_t)`` (or sup)
  is read row by row, using row ``1 - alpha`` when ``J`` is decreasing;
* first hitting time of level ``z``: ``1 - inf{alpha : sup_{t<=s} J(X_t^alpha) >= z}``;
* expected value of ``J(X_t)`` as the alpha-average of ``J`` along the surface.

All extrema are taken over grid nodes and the infimum over alpha over the
alpha grid, so probabilities are resolved to the alpha grid step.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainError, GridMismatch, PreconditionError
from .problems import eg1
from .solver import SolverConfig, TimeGrid
from .uncertain import AlphaGrid, AlphaSurface, UncertainProblem, sweep

Direction = Literal["increasing", "decreasing"]


@dataclass(frozen=True)
class MonotoneMap:
    J: Callable[[float], float]
    direction: Direction = "increasing"

    def __post_init__(self):
        if self.direction not in ("increasing", "decreasing"):
            raise DomainError(f"unknown direction {self.direction!r}")

    @classmethod
    def identity(cls) -> MonotoneMap:
        return cls(lambda x: x, "increasing")

    def __call__(self, x):
        return self.J(x)

    def check(self, lo: float, hi: float, samples: int = 100) -> None:
        """Spot-check the declared direction on ``samples`` points of ``[lo, hi]``."""
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            return
        vals = np.array([self.J(v) for v in np.linspace(lo, hi, samples)], dtype=float)
        steps = np.diff(vals)
        ok = np.all(steps > 0) if self.direction == "increasing" else np.all(steps < 0)
        if not ok:
            raise PreconditionError(f"J is not strictly {self.direction} on [{lo}, {hi}]")

    def apply(self, values: np.ndarray) -> np.ndarray:
        return np.vectorize(self.J, otypes=[float])(values)


@dataclass
class DistributionCurve:
    abscissae: np.ndarray
    ordinates: np.ndarray
    kind: Literal["extreme_inverse_dist", "fht_dist"]

    def rows(self):
        return zip(self.abscissae.tolist(), self.ordinates.tolist())


def _checked_J(surface: AlphaSurface, J: MonotoneMap) -> np.ndarray:
    finite = surface.values[np.isfinite(surface.values)]
    if finite.size:
        J.check(float(finite.min()), float(finite.max()))
    return J.apply(surface.values)


def extreme_value(surface: AlphaSurface, J: MonotoneMap,
                  mode: Literal["infimum", "supremum"] = "infimum",
                  horizon: float | None = None) -> DistributionCurve:
    """Inverse distribution of the extreme of ``J(X_t)`` over ``t <= horizon``."""
    if mode not in ("infimum", "supremum"):
        raise DomainError(f"unknown mode {mode!r}")
    jv = _checked_J(surface, J)
    if horizon is not None:
        jv = jv[:, surface.t <= horizon + 1e-12]
    alphas = surface.alphas
    if J.direction == "increasing":
        rows = np.arange(alphas.size)
    else:
        rows = []
        for a in alphas:
            i = surface.alpha_grid.index_of(1.0 - a)
            if i is None:
                raise GridMismatch(f"1 - {a} is not on the alpha grid")
            rows.append(i)
        rows = np.asarray(rows)
    reduce = np.min if mode == "infimum" else np.max
    return DistributionCurve(alphas.copy(), reduce(jv[rows], axis=1), "extreme_inverse_dist")


def fht_curve(surface: AlphaSurface, J: MonotoneMap, z: float,
              horizons: Sequence[float]) -> DistributionCurve:
    """First-hitting-time distribution read off an existing surface."""
    if J.direction != "increasing":
        raise PreconditionError("first hitting time needs a nondecreasing J")
    jv = _checked_J(surface, J)
    if z <= jv[0, 0] or np.any(z <= jv[:, 0]):
        raise PreconditionError(f"level z={z} must exceed J(X_0)={jv[0, 0]}")
    s = np.asarray(horizons, dtype=float)
    if np.any(np.diff(s) <= 0):
        raise DomainError("horizons must be strictly increasing")
    if s[0] < surface.t[0] or s[-1] > surface.t[-1] + 1e-12:
        raise DomainError("horizons must lie inside the time grid")
    # running sup along t, then for each horizon the last node t <= s
    running = np.maximum.accumulate(jv, axis=1)
    cols = np.searchsorted(surface.t, s + 1e-12, side="right") - 1
    hit = running[:, cols] >= z  # shape (alphas, horizons)
    alphas = surface.alphas
    out = np.empty(s.size)
    for c in range(s.size):
        idx = np.flatnonzero(hit[:, c])
        out[c] = round(1.0 - (alphas[idx[0]] if idx.size else 1.0), 12)
    return DistributionCurve(s, out, "fht_dist")


def fht_distribution(u: UncertainProblem, J: MonotoneMap, z: float,
                     horizons: Sequence[float], grid: TimeGrid | None = None,
                     config: SolverConfig | None = None,
                     alphas: AlphaGrid | None = None) -> DistributionCurve:
    """Sweep the alpha paths of ``u`` and return the FHT distribution of level ``z``."""
    if J.direction != "increasing":
        raise PreconditionError("first hitting time needs a nondecreasing J")
    if z <= J(u.x0):
        raise PreconditionError(f"level z={z} must exceed J(x0)={J(u.x0)}")
    surface = sweep(u, alphas, grid, config)
    return fht_curve(surface, J, z, horizons)


def expected_value(surface: AlphaSurface, J: MonotoneMap, t_index: int) -> float:
    """Alpha-average of ``J`` along column ``t_index`` (trapezoid over the alpha grid)."""
    col = J.apply(surface.values[:, t_index])
    a = surface.alphas
    if a.size == 1:
        return float(col[0])
    return float(np.trapezoid(col, a) / (a[-1] - a[0]))


@dataclass(frozen=True)
class StudyRow:
    value: float
    mae: float
    max_error: float

    @property
    def log10_mae(self) -> float:
        return math.log10(self.mae) if self.mae > 0 else -math.inf


def error_study(study: Literal["n", "nu", "upsilon"], values: Sequence[float], *,
                a: float = 0.6, b: float = 1.0, upsilon: float = 2.0, nu: float = 0.8,
                order: int = 3, h: float = 0.01, x0: float = 0.5,
                memory_mode: str = "full", bootstrap_refine: int = 10,
                alphas: AlphaGrid | None = None) -> list[StudyRow]:
    """Error of the linear example at ``t = 1`` against its closed form.

    One parameter (``n``, ``nu`` or ``upsilon``) is varied over ``values``;
    the others keep their defaults.  MAE is the mean over the alpha grid.
    """
    from .oracle import linear_closed_form

    if study not in ("n", "nu", "upsilon"):
        raise DomainError(f"unknown study {study!r}")
    alphas = alphas or AlphaGrid.default()
    out = []
    for v in values:
        p = dict(a=a, b=b, upsilon=upsilon, nu=nu, order=order)
        p["order" if study == "n" else study] = int(v) if study == "n" else float(v)
        case = eg1(a=p["a"], b=p["b"], upsilon=p["upsilon"], nu=p["nu"], x0=x0)
        config = SolverConfig(order=p["order"], memory_mode=memory_mode,
                              bootstrap_refine=bootstrap_refine)
        grid = TimeGrid.uniform(0.0, 1.0, h)
        surface = sweep(case.problem, alphas, grid, config)
        truth = np.array([
            linear_closed_form(p["a"], p["b"], p["upsilon"], p["nu"], al, x0, 1.0)
            for al in alphas.alphas
        ])
        err = np.abs(surface.values[:, -1] - truth)
        out.append(StudyRow(float(v), float(err.mean()), float(err.max())))
    return out
