import math

import numpy as np
import pytest

from fracadams.errors import DomainError
from fracadams.oracle import linear_closed_form
from fracadams.problems import eg1, eg2, eg3
from fracadams.solver import SolverConfig, TimeGrid, solve
from fracadams.uncertain import (
    AlphaGrid,
    SweepError,
    UncertainProblem,
    alpha_path_problem,
    liu_inverse_std,
    sweep,
)


def test_liu_inverse_values():
    assert liu_inverse_std(0.5) == 0.0
    assert liu_inverse_std(0.9) == pytest.approx(1.211393, abs=1e-6)
    for a in (0.1, 0.25, 0.4):
        assert liu_inverse_std(1 - a) == pytest.approx(-liu_inverse_std(a), rel=1e-14)
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(DomainError):
            liu_inverse_std(bad)


def test_alpha_path_rhs():
    p = alpha_path_problem(eg2().problem, 0.9)
    x = 0.04
    assert p.rhs(0.3, x) == pytest.approx(1.2 * (0.05 - x) + 0.04 * math.sqrt(x) * 1.211393399,
                                          rel=1e-9)
    # |g| is used even where the diffusion changes sign
    p3 = alpha_path_problem(eg3().problem, 0.9)
    assert p3.rhs(1.5, 2.0) == pytest.approx(1.0 + 0.5 * liu_inverse_std(0.9), rel=1e-14)


def test_median_path_uses_drift_alone():
    u = eg1().problem
    p = alpha_path_problem(u, 0.5)
    assert p.rhs is u.drift
    assert p.rhs(0.0, 0.5) == 0.3


def test_zero_diffusion_is_alpha_independent():
    u = UncertainProblem(0.7, lambda t, x: -x, lambda t, x: 0.0, 1.0)
    s = sweep(u, [0.1, 0.5, 0.9], TimeGrid.uniform(0.0, 1.0, 0.05))
    assert np.array_equal(s.values[0], s.values[1])
    assert np.array_equal(s.values[2], s.values[1])


def test_single_alpha_surface_is_a_trajectory():
    u = eg1().problem
    grid = TimeGrid.uniform(0.0, 1.0, 0.02)
    s = sweep(u, [0.5], grid)
    traj = solve(alpha_path_problem(u, 0.5), grid)
    assert np.array_equal(s.values[0], traj.values)


def test_alpha_grid():
    g = AlphaGrid.default()
    assert len(g) == 99
    assert g.alphas[0] == 0.01 and g.alphas[-1] == 0.99
    assert g.index_of(0.37) == 36
    assert g.index_of(1 - 0.37) == 62
    assert g.index_of(0.375) is None
    with pytest.raises(DomainError):
        AlphaGrid([0.0, 0.5])
    with pytest.raises(DomainError):
        AlphaGrid([0.5, 0.4])


def test_symmetry_pairing_on_linear_example():
    grid = TimeGrid.uniform(0.0, 1.0, 0.02)
    s = sweep(eg1().problem, AlphaGrid.uniform(0.1, 0.9, 0.1), grid)
    mid = s.row(0.5)
    truth_spread = max(
        abs(linear_closed_form(0.6, 1.0, 2.0, 0.8, a, 0.5, 1.0) - s.row(a)[-1]) for a in (0.1, 0.9)
    )
    for a in (0.1, 0.2, 0.3, 0.4):
        pair = s.row(a) + s.row(1 - a) - 2 * mid
        assert np.max(np.abs(pair)) <= 10 * max(truth_spread, 1e-12)


@pytest.mark.parametrize("builder", [eg1, eg2, eg3])
def test_rows_are_ordered_in_alpha(builder):
    s = sweep(builder().problem, AlphaGrid.uniform(0.05, 0.95, 0.05))
    assert s.is_ordered()
    assert not s.failures


def test_workers_do_not_change_output():
    grid = TimeGrid.uniform(0.0, 1.0, 0.02)
    alphas = AlphaGrid.uniform(0.1, 0.9, 0.1)
    a = sweep(eg3().problem, alphas, grid, workers=1)
    b = sweep(eg3().problem, alphas, grid, workers=4)
    assert np.array_equal(a.values, b.values)


def test_failing_rows():
    # strong negative quantile drives x below 1 where sqrt(x - 1) is undefined
    u = UncertainProblem(0.8, lambda t, x: math.sqrt(x - 1.0), lambda t, x: 5.0, 1.2,
                         domain=(1.0, None))
    alphas = [0.01, 0.5, 0.99]
    with pytest.raises(SweepError) as info:
        sweep(u, alphas)
    assert info.value.alpha == 0.01
    s = sweep(u, alphas, partial=True)
    assert np.all(np.isnan(s.values[0]))
    assert np.all(np.isfinite(s.values[1:]))
    assert set(s.failures) == {0.01}
    clamped = sweep(u, alphas, config=SolverConfig(on_domain_error="clamp"))
    assert np.all(np.isfinite(clamped.values))
