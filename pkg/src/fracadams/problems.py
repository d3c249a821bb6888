"""The three worked uncertain equations, with printable expression forms.

eg1: ``D^nu X = a X + b t^upsilon dC/dt``, ``X_0 = 0.5`` (linear, closed form known)
eg2: ``D^nu X = a (mu - X) + sigma sqrt(X) dC/dt``, ``X_0 = 0`` (mean reverting)
eg3: ``D^nu X = sqrt(X - 1) + (1 - t) dC/dt``, ``X_0 = 3`` (nonlinear)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .uncertain import UncertainProblem


@dataclass(frozen=True)
class Builtin:
    name: str
    problem: UncertainProblem
    drift_text: str
    diffusion_text: str
    params: dict[str, float] = field(default_factory=dict)


def eg1(a: float = 0.6, b: float = 1.0, upsilon: float = 2.0, nu: float = 0.8,
        x0: float = 0.5, t_end: float = 1.0) -> Builtin:
    a, b, upsilon = float(a), float(b), float(upsilon)
    problem = UncertainProblem(
        nu,
        lambda t, x: a * x,
        lambda t, x: b * math.pow(t, upsilon),
        x0, 0.0, t_end,
    )
    return Builtin("eg1", problem, f"{a!r}*x", f"{b!r}*t^{upsilon!r}",
                   dict(a=a, b=b, upsilon=upsilon, nu=nu, x0=x0))


def eg2(a: float = 1.2, mu: float = 0.05, sigma: float = 0.04, nu: float = 0.8,
        x0: float = 0.0, t_end: float = 1.0) -> Builtin:
    a, mu, sigma = float(a), float(mu), float(sigma)
    problem = UncertainProblem(
        nu,
        lambda t, x: a * (mu - x),
        lambda t, x: sigma * math.sqrt(x),
        x0, 0.0, t_end, domain=(0.0, None),
    )
    return Builtin("eg2", problem, f"{a!r}*({mu!r}-x)", f"{sigma!r}*sqrt(x)",
                   dict(a=a, mu=mu, sigma=sigma, nu=nu, x0=x0))


def eg3(nu: float = 0.8, x0: float = 3.0, t_end: float = 1.0) -> Builtin:
    problem = UncertainProblem(
        nu,
        lambda t, x: math.sqrt(x - 1.0),
        lambda t, x: 1.0 - t,
        x0, 0.0, t_end, domain=(1.0, None),
    )
    return Builtin("eg3", problem, "sqrt(x-1.0)", "1.0-t", dict(nu=nu, x0=x0))


BUILTINS = {"eg1": eg1, "eg2": eg2, "eg3": eg3}
