import math

import numpy as np
import pytest

from fracadams.analytics import (
    MonotoneMap,
    error_study,
    expected_value,
    extreme_value,
    fht_curve,
    fht_distribution,
)
from fracadams.errors import DomainError, GridMismatch, PreconditionError
from fracadams.problems import eg1, eg3
from fracadams.solver import TimeGrid
from fracadams.uncertain import AlphaGrid, AlphaSurface, sweep

GRID = TimeGrid.uniform(0.0, 1.0, 0.02)
ALPHAS = AlphaGrid.uniform(0.05, 0.95, 0.05)


@pytest.fixture(scope="module")
def eg1_surface():
    return sweep(eg1().problem, ALPHAS, GRID)


def test_extreme_value_of_increasing_rows(eg1_surface):
    # upper quantile paths of the linear example rise monotonically
    upper = AlphaGrid.uniform(0.5, 0.95, 0.05)
    s = AlphaSurface(upper, GRID, eg1_surface.values[9:])
    assert np.all(np.diff(s.values, axis=1) >= 0)
    inf = extreme_value(s, MonotoneMap.identity(), "infimum")
    sup = extreme_value(s, MonotoneMap.identity(), "supremum")
    assert np.all(inf.ordinates == 0.5)
    assert np.array_equal(sup.ordinates, s.values[:, -1])
    assert np.all(np.diff(sup.ordinates) >= 0)
    assert np.all(sup.ordinates >= inf.ordinates)
    assert sup.kind == "extreme_inverse_dist"


def test_decreasing_map_reads_mirrored_row(eg1_surface):
    s = eg1_surface
    curve = extreme_value(s, MonotoneMap(lambda x: -x, "decreasing"), "supremum")
    assert np.allclose(curve.ordinates, -s.values[::-1].min(axis=1))
    lop = AlphaSurface(AlphaGrid([0.1, 0.5, 0.7]), GRID, s.values[:3])
    with pytest.raises(GridMismatch):
        extreme_value(lop, MonotoneMap(lambda x: -x, "decreasing"))


def test_monotone_map_spot_check(eg1_surface):
    with pytest.raises(PreconditionError):
        extreme_value(eg1_surface, MonotoneMap(lambda x: (x - 1.0) ** 2, "increasing"))
    with pytest.raises(DomainError):
        MonotoneMap(lambda x: x, "sideways")


def test_fht_edge_cases(eg1_surface):
    s = eg1_surface
    horizons = [0.2, 0.6, 1.0]
    far = fht_curve(s, MonotoneMap.identity(), 100.0, horizons)
    assert np.all(far.ordinates == 0.0)
    near = fht_curve(s, MonotoneMap.identity(), 0.5 + 1e-9, horizons)
    # every row ends above its start, so the first alpha crosses eventually
    assert near.ordinates[-1] == pytest.approx(1 - 0.05)
    with pytest.raises(PreconditionError):
        fht_curve(s, MonotoneMap.identity(), 0.4, horizons)
    with pytest.raises(DomainError):
        fht_curve(s, MonotoneMap.identity(), 2.0, [0.5, 0.2])


def test_fht_on_nonlinear_example():
    curve = fht_distribution(eg3().problem, MonotoneMap.identity(), 4.0,
                             np.arange(1, 51) * 0.02, GRID, alphas=ALPHAS)
    assert curve.kind == "fht_dist"
    assert np.all((curve.ordinates >= 0) & (curve.ordinates <= 1))
    assert np.all(np.diff(curve.ordinates) >= 0)
    assert curve.ordinates[-1] > 0
    with pytest.raises(PreconditionError):
        fht_distribution(eg3().problem, MonotoneMap.identity(), 2.0, [0.5], GRID)


def test_expected_value(eg1_surface):
    s = eg1_surface
    const = AlphaSurface(ALPHAS, GRID, np.full(s.values.shape, 2.5))
    assert expected_value(const, MonotoneMap.identity(), 10) == pytest.approx(2.5, rel=1e-15)
    mid = s.row(0.5)[-1]
    full = sweep(eg1().problem, None, GRID)
    assert abs(expected_value(full, MonotoneMap.identity(), -1) - mid) < 1e-3
    # dominance
    assert expected_value(s, MonotoneMap.identity(), -1) <= expected_value(
        AlphaSurface(ALPHAS, GRID, s.values + 0.1), MonotoneMap.identity(), -1)
    # decreasing J on reversed rows gives the mirrored value
    flip = AlphaSurface(ALPHAS, GRID, -s.values[::-1])
    dec = MonotoneMap(lambda x: -x, "decreasing")
    assert expected_value(flip, dec, -1) == pytest.approx(
        expected_value(s, MonotoneMap.identity(), -1), rel=1e-14)


def test_error_study_rows():
    rows = error_study("n", [2, 3], alphas=AlphaGrid.uniform(0.1, 0.9, 0.2))
    assert rows[0].mae > rows[1].mae > 0
    assert rows[1].log10_mae == pytest.approx(math.log10(rows[1].mae))
    assert all(r.max_error >= r.mae for r in rows)
    with pytest.raises(DomainError):
        error_study("h", [0.1])
