import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracadams.errors import DegreeTooLarge, DomainError
from fracadams.moments import interval_weights, moment, moments
from fracadams.oracle import adaptive_quad


def test_hand_values():
    assert moment(0.5, 1, 1.0, 0.0, 1.0) == pytest.approx(4.0 / 3.0, rel=1e-12)
    assert moment(0.5, 0, 1.0, 0.0, 0.5) == pytest.approx(2.0 * (1.0 - math.sqrt(0.5)), rel=1e-12)


def test_two_node_weights():
    ws = interval_weights([0.0, 1.0], 0.5, 1.0, 0.0, 1.0)
    assert np.allclose(ws.weights, [2.0 / 3.0, 4.0 / 3.0], rtol=1e-12)
    assert ws.apply([1.0, 1.0]) == pytest.approx(2.0, rel=1e-12)


def test_nu_one_gives_plain_monomial_integrals():
    m = moments(1.0, 4, 3.0, 1.0, 2.0)[0]
    assert np.allclose(m, [(2.0 ** (k + 1) - 1.0) / (k + 1) for k in range(5)], rtol=1e-13)


def test_vectorized_rows_match_scalar_calls():
    a = np.array([0.0, 0.3, 0.9])
    b = a + 0.1
    block = moments(0.7, 3, 1.0, a, b)
    for i in range(3):
        for k in range(4):
            assert block[i, k] == pytest.approx(moment(0.7, k, 1.0, a[i], b[i]), rel=1e-14)


@pytest.mark.parametrize("nu", [0.3, 0.5, 0.8, 1.0])
def test_far_and_near_intervals_match_quadrature(nu):
    # far from t* (backward branch) and touching t* (forward branch)
    for a, b, t in [(0.0, 0.01, 1.0), (0.5, 0.51, 1.0), (0.99, 1.0, 1.0), (-1.0, -0.5, 0.2)]:
        m = moments(nu, 6, t, a, b)[0]
        for k in range(7):
            ref = adaptive_quad(nu, k, t, a, b)
            assert abs(m[k] - ref) <= 1e-10 * abs(ref)


@settings(max_examples=60, deadline=None)
@given(nu=st.floats(0.05, 1.0), t=st.floats(0.1, 3.0),
       a_frac=st.floats(0.0, 0.98), width=st.floats(0.01, 1.0))
def test_positive_and_translation_consistent(nu, t, a_frac, width):
    a = a_frac * t
    b = min(t, a + width * (t - a))
    if b - a < 1e-6:
        return
    m0 = moment(nu, 0, t, a, b)
    assert m0 > 0.0
    # shifting every point leaves the zeroth moment unchanged
    assert moment(nu, 0, t + 1.0, a + 1.0, b + 1.0) == pytest.approx(m0, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(nu=st.floats(0.1, 1.0), q=st.integers(1, 5), data=st.data())
def test_weights_integrate_polynomials_exactly(nu, q, data):
    nodes = np.sort(np.array(data.draw(st.lists(st.integers(0, 20), min_size=q, max_size=q,
                                                 unique=True)), dtype=float)) * 0.05
    coef = np.array(data.draw(st.lists(st.floats(-1, 1), min_size=q, max_size=q)))
    t = 1.0
    a, b = 0.4, 0.45
    ws = interval_weights(nodes, nu, t, a, b)
    exact = adaptive_quad(nu, None, t, a, b, coef)
    assert ws.apply(np.polynomial.Polynomial(coef)(nodes)) == pytest.approx(
        exact, rel=1e-8, abs=1e-10)


def test_errors():
    with pytest.raises(DomainError):
        moment(0.0, 0, 1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        moment(0.5, 0, 1.0, 0.5, 1.5)
    with pytest.raises(DegreeTooLarge):
        moment(0.5, 9, 1.0, 0.0, 1.0)


def test_validate_mode_agrees(caplog):
    with caplog.at_level(logging.WARNING):
        v = moment(0.3, 5, 1.0, 0.0, 0.05, validate=True)
    assert v == pytest.approx(adaptive_quad(0.3, 5, 1.0, 0.0, 0.05), rel=1e-10)
    assert not caplog.records
