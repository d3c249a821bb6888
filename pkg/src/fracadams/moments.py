"""Weakly singular kernel moments and product-integration weights.

``M(nu-1, k) = int_a^b (t* - s)**(nu-1) s**k ds`` is obtained from the closed
form for ``k = 0`` and the three-term relation

    M(nu-1, k) = -[s**k (t*-s)**nu]_a^b / (k+nu) + k t*/(k+nu) M(nu-1, k-1).

Running the relation upward multiplies rounding errors by roughly
``|t*| / max(|a|, |b|)`` per step, so for intervals far below the anchor the
same relation is run downward from a high degree instead (Miller's trick).
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DegreeTooLarge, DomainError
from .lagrange import split_lagrange

logger = logging.getLogger(__name__)

MAX_DEGREE = 8
# downward recurrence start offset; damping is at least 2**-60 per start
_BACKWARD_EXTRA = 60
# upward recurrence is used when max(|a|,|b|) >= _FORWARD_RATIO * |t*|
_FORWARD_RATIO = 0.5
VALIDATION_RTOL = 1e-8


def _check_nu(nu: float) -> None:
    if not 0.0 < nu <= 1.0:
        raise DomainError(f"kernel order nu must lie in (0, 1], got {nu!r}")


def _check_interval(a: np.ndarray, b: np.ndarray, t_target: np.ndarray) -> None:
    if np.any(a >= b):
        raise DomainError("interval endpoints must satisfy a < b")
    if np.any(b > t_target):
        raise DomainError("interval must end at or before the kernel anchor")


def _pow_gap(da: np.ndarray, db: np.ndarray, nu: float) -> np.ndarray:
    """``da**nu - db**nu`` for ``da > db >= 0`` without cancellation."""
    out = da**nu
    inner = db > 0.0
    if np.any(inner):
        d = db[inner]
        out[inner] = d**nu * np.expm1(nu * np.log1p((da[inner] - d) / d))
    return out


def _boundary(k: int, nu: float, a, b, da, db) -> np.ndarray:
    """``b**k db**nu - a**k da**nu`` (the bracket of the recurrence)."""
    hi = b**k * db**nu
    lo = a**k * da**nu
    out = hi - lo
    # relative form when both terms are positive and close
    smooth = (a > 0.0) & (db > 0.0)
    if np.any(smooth):
        aa, bb, dda, ddb = a[smooth], b[smooth], da[smooth], db[smooth]
        gap = bb - aa
        expo = k * np.log1p(gap / aa) + nu * np.log1p(-gap / dda)
        out[smooth] = lo[smooth] * np.expm1(expo)
    return out


def moments(nu: float, kmax: int, t_target, a, b) -> np.ndarray:
    """Moments ``M(nu-1, k)`` for ``k = 0..kmax`` over each interval ``(a_i, b_i)``.

    ``t_target``, ``a`` and ``b`` may be scalars or equal-length arrays; the
    result has shape ``(len, kmax + 1)``.
    """
    _check_nu(nu)
    if kmax < 0:
        raise DegreeTooLarge(f"degree must be nonnegative, got {kmax}")
    a, b, tt = (np.atleast_1d(np.asarray(v, dtype=float)) for v in (a, b, t_target))
    a, b, tt = (np.ascontiguousarray(v) for v in np.broadcast_arrays(a, b, tt))
    _check_interval(a, b, tt)

    da = tt - a
    db = tt - b
    out = np.empty((a.size, kmax + 1))
    out[:, 0] = _pow_gap(da, db, nu) / nu
    if kmax == 0:
        return out

    reach = np.maximum(np.abs(a), np.abs(b))
    forward = reach >= _FORWARD_RATIO * np.abs(tt)

    if np.any(forward):
        fa, fb, fda, fdb = a[forward], b[forward], da[forward], db[forward]
        ft = tt[forward]
        prev = out[forward, 0]
        block = np.empty((fa.size, kmax))
        for k in range(1, kmax + 1):
            prev = (k * ft * prev - _boundary(k, nu, fa, fb, fda, fdb)) / (k + nu)
            block[:, k - 1] = prev
        out[forward, 1:] = block

    backward = ~forward
    if np.any(backward):
        ba, bb, bda, bdb = a[backward], b[backward], da[backward], db[backward]
        bt = tt[backward]
        top = kmax + _BACKWARD_EXTRA
        cur = np.zeros(ba.size)
        block = np.empty((ba.size, kmax))
        for k in range(top, 1, -1):
            cur = ((k + nu) * cur + _boundary(k, nu, ba, bb, bda, bdb)) / (k * bt)
            if k - 1 <= kmax:
                block[:, k - 2] = cur
        out[backward, 1:] = block
    return out


def moment(nu: float, k: int, t_target: float, a: float, b: float, *,
           cap: int = MAX_DEGREE, validate: bool = False) -> float:
    """Single kernel moment ``int_a^b (t_target - s)**(nu-1) s**k ds``.

    With ``validate=True`` the value is compared against adaptive quadrature
    and replaced by it when the two disagree by more than ``VALIDATION_RTOL``.
    """
    if k < 0 or k > cap:
        raise DegreeTooLarge(f"degree {k} outside [0, {cap}]")
    value = float(moments(nu, k, t_target, a, b)[0, k])
    if validate:
        from .oracle import adaptive_quad

        ref = adaptive_quad(nu, k, t_target, a, b)
        if abs(value - ref) > VALIDATION_RTOL * abs(ref):
            logger.warning(
                "moment recurrence drifted (nu=%g k=%d t*=%g a=%g b=%g): %r vs quad %r",
                nu, k, t_target, a, b, value, ref,
            )
            value = ref
    return value


@dataclass(frozen=True)
class WeightSet:
    weights: np.ndarray
    nodes: np.ndarray
    interval: tuple[float, float]
    t_target: float

    def apply(self, values: Sequence[float]) -> float:
        return float(np.dot(self.weights, values))


def interval_weights(nodes: Sequence[float], nu: float, t_target: float,
                     a: float, b: float) -> WeightSet:
    """Product-integration weights of the Lagrange basis on ``nodes`` over ``(a, b)``.

    ``sum_j w_j f(t_j)`` equals the kernel integral of the interpolant of
    ``f`` exactly.
    """
    t = np.asarray(nodes, dtype=float)
    # work relative to a; monomials about a distant origin cancel badly
    coeffs = split_lagrange(t - a)
    mom = moments(nu, t.size - 1, t_target - a, 0.0, b - a)[0]
    return WeightSet(coeffs @ mom, t, (float(a), float(b)), float(t_target))
