"""Fourth-order quadrature and finite differences on uniform grids.

End-corrected composite weights, cumulative integrals assembled from
piecewise-cubic interval rules, five-point derivatives, and Richardson
error estimates.  Everything here assumes uniformly spaced samples.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import DomainError

# Interval rules exact for cubics: a startup row for the first interval and a
# sliding four-point kernel for interior intervals.  The last interval uses
# the startup row mirrored.
_FIRST_INTERVAL = np.array([9.0, 19.0, -5.0, 1.0]) / 24.0
_INTERIOR = np.array([-1.0, 13.0, 13.0, -1.0]) / 24.0
# Column sums of the cumulative rules: trapezoid weights with end
# corrections, consistent with cumulative_integral to rounding.
_END_CORRECTION = np.array([-16.0, 7.0, -4.0, 1.0]) / 24.0

# Five-point first-derivative stencils (centered, then the two one-sided
# rows used at the left edge; the right edge mirrors them with a sign flip).
_D_EDGE0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D_EDGE1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0

# Derivatives of the degree-4 Lagrange basis on the stencil {-2,...,2},
# used to differentiate callables at arbitrary offsets inside the stencil.
_STENCIL = np.arange(-2.0, 3.0)
_LAGRANGE_DERIV = []
for _m in _STENCIL:
    _roots = [x for x in _STENCIL if x != _m]
    _den = np.prod([_m - x for x in _roots])
    _LAGRANGE_DERIV.append(np.polyder(np.poly1d(np.poly(_roots) / _den)))


def composite_weights(n_nodes: int, dx: float) -> np.ndarray:
    """Definite-integral weights on a uniform grid, global error O(dx^4)."""
    if n_nodes < 8:
        raise DomainError(f"composite weights need at least 8 nodes, got {n_nodes}")
    if dx <= 0.0:
        raise DomainError("grid spacing must be positive")
    w = np.full(n_nodes, dx)
    w[:4] += dx * _END_CORRECTION
    w[-4:] += dx * _END_CORRECTION[::-1]
    return w


def cumulative_integral(y: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral of uniformly spaced samples, O(dx^4) at every node.

    Entry i approximates the integral from the first node to node i; the
    first entry is exactly 0.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 8:
        raise DomainError(f"cumulative integral needs at least 8 nodes, got {n}")
    d = np.empty(n - 1)
    d[0] = _FIRST_INTERVAL @ y[:4]
    d[-1] = _FIRST_INTERVAL[::-1] @ y[-4:]
    k0, k1, k2, k3 = _INTERIOR
    d[1:-1] = k0 * y[0 : n - 3] + k1 * y[1 : n - 2] + k2 * y[2 : n - 1] + k3 * y[3:n]
    out = np.empty(n)
    out[0] = 0.0
    np.cumsum(d * dx, out=out[1:])
    return out


def derivative_five_point(y: np.ndarray, dx: float) -> np.ndarray:
    """First derivative of uniformly spaced samples, O(dx^4), one-sided ends."""
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 5:
        raise DomainError(f"five-point derivative needs at least 5 nodes, got {n}")
    dy = np.empty(n)
    dy[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * dx)
    dy[0] = _D_EDGE0 @ y[:5] / dx
    dy[1] = _D_EDGE1 @ y[:5] / dx
    dy[-1] = -(_D_EDGE0 @ y[-5:][::-1]) / dx
    dy[-2] = -(_D_EDGE1 @ y[-5:][::-1]) / dx
    return dy


def differentiate_callable(
    f: Callable, lo: float, hi: float, step: float | None = None
) -> Callable:
    """Five-point finite-difference derivative of ``f`` on [lo, hi].

    The stencil is shifted near the interval ends so evaluations never leave
    [lo, hi].  Accepts scalars or arrays; exact for quartic polynomials.
    """
    if hi <= lo:
        raise DomainError("need hi > lo to differentiate a callable")
    h = (hi - lo) / 4096.0 if step is None else float(step)
    if not 0.0 < 4.0 * h <= hi - lo:
        raise DomainError("finite-difference step does not fit the interval")

    def deriv(t):
        arr = np.asarray(t, dtype=float)
        center = np.clip(arr, lo + 2.0 * h, hi - 2.0 * h)
        s = (arr - center) / h
        total = np.zeros_like(arr)
        for offset, basis in zip(_STENCIL, _LAGRANGE_DERIV):
            total = total + np.polyval(basis.coeffs, s) * np.asarray(
                f(center + offset * h), dtype=float
            )
        out = total / h
        return out if np.ndim(t) else float(out)

    return deriv


def richardson_estimate(coarse: float, fine: float, order: int) -> float:
    """Error estimate for the fine-mesh value from one mesh halving."""
    return abs(coarse - fine) / (2.0**order - 1.0)


def richardson_extrapolate(coarse: float, fine: float, order: int) -> float:
    """Eliminate the leading error term from a coarse/fine value pair."""
    return fine + (fine - coarse) / (2.0**order - 1.0)
