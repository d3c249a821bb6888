"""Monomial form of Lagrange basis polynomials.

Row ``j`` of the matrix returned by :func:`split_lagrange` holds the
coefficients ``a_j0 ... a_j,m-1`` of ``L_j(s) = sum_k a_jk s**k`` in
ascending powers.  Integrating ``L_j`` against a kernel therefore reduces to
a dot product with the kernel moments of ``s**k``.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import DuplicateNodes, WindowTooLarge

MAX_WINDOW = 8


def _absorb_roots(roots: np.ndarray) -> np.ndarray:
    # prod (s - r) in ascending coefficient order, batched over leading axes;
    # coefficient k is the signed elementary symmetric sum of degree r - k
    roots = np.asarray(roots, dtype=float)
    n = roots.shape[-1]
    c = np.zeros(roots.shape[:-1] + (n + 1,))
    c[..., 0] = 1.0
    for deg in range(1, n + 1):
        r = roots[..., deg - 1 : deg]
        c[..., 1 : deg + 1], c[..., 0] = c[..., 0:deg] - r * c[..., 1 : deg + 1], -r[..., 0] * c[..., 0]
    return c


def split_lagrange_many(windows: np.ndarray) -> np.ndarray:
    """Coefficient matrices for a stack of windows, shape ``(B, m)`` -> ``(B, m, m)``.

    No validation; callers pass strictly increasing windows.
    """
    w = np.asarray(windows, dtype=float)
    m = w.shape[-1]
    out = np.empty(w.shape[:-1] + (m, m))
    for j in range(m):
        others = np.delete(w, j, axis=-1)
        deno = np.prod(w[..., j : j + 1] - others, axis=-1)
        out[..., j, :] = _absorb_roots(others) / deno[..., None]
    return out


def split_lagrange(nodes: Sequence[float], cap: int = MAX_WINDOW) -> np.ndarray:
    """Return the ``m x m`` monomial coefficient matrix of the Lagrange basis.

    Raises :class:`DuplicateNodes` if two nodes coincide and
    :class:`WindowTooLarge` if ``m`` exceeds ``cap``.
    """
    t = np.asarray(nodes, dtype=float).ravel()
    m = t.size
    if m < 1:
        raise ValueError("a node window needs at least one node")
    if m > cap:
        raise WindowTooLarge(f"window of {m} nodes exceeds cap {cap}")
    if m > 1 and np.min(np.diff(np.sort(t))) <= 0.0:
        raise DuplicateNodes(f"nodes are not pairwise distinct: {t.tolist()}")
    return split_lagrange_many(t)


def eval_basis(coeffs: np.ndarray, s: float) -> np.ndarray:
    """Evaluate every basis polynomial at ``s`` (Horner, one row per basis)."""
    coeffs = np.asarray(coeffs, dtype=float)
    out = np.zeros(coeffs.shape[0])
    for col in range(coeffs.shape[1] - 1, -1, -1):
        out = out * s + coeffs[:, col]
    return out
