"""Recursive moment hierarchy over an area function and its eigenvalue estimators.

Starting from T_0 = 1, each level is

    T_k(t) = int_t^R ( int_0^s T_{k-1}(u) A(u) du ) / A(s) ds,

computed with two cumulative-sum passes per level so the whole hierarchy costs
O(K N).  Three ratio sequences built from the levels share the first
Dirichlet eigenvalue of the symmetrized ball as their common limit:

* norm ratio    (int T_k^2 A / int T_{k+1}^2 A)^(1/2)
* center ratio  T_{k-1}(0) / T_k(0)
* mass ratio    int T_{k-1} A / int T_k A

Because T_k(0) decays like lambda^-k, every stored level is renormalized to
unit center value and the factor is tracked in log scale; the estimators
reinstate it exactly in exponent arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidAreaError, PrecisionError
from .geometry import AreaFunction, RadialGrid, _eval_on
from .quadrature import cumulative_integral

NORM_RATIO = "norm-ratio"
CENTER_RATIO = "center-ratio"
MASS_RATIO = "mass-ratio"

_MIN_INTERVALS = 16


@dataclass(frozen=True, eq=False)
class MomentTable:
    """Renormalized moment levels on a grid plus accumulated log rescale factors.

    ``levels[k]`` holds T_k / T_k(0) at the grid nodes and ``log_scale[k]``
    the accumulated log of the stripped factors, so the true level is
    exp(log_scale[k]) * levels[k].
    """

    grid: RadialGrid
    levels: np.ndarray
    log_scale: np.ndarray

    def __post_init__(self):
        self.levels.flags.writeable = False
        self.log_scale.flags.writeable = False

    @property
    def top_level(self) -> int:
        return self.levels.shape[0] - 1

    def level(self, k: int) -> np.ndarray:
        if not 0 <= k <= self.top_level:
            raise DomainError(f"level {k} not computed (table holds 0..{self.top_level})")
        return self.levels[k]


@dataclass(frozen=True)
class EstimateSeries:
    """One eigenvalue-estimator sequence with its stopping metadata."""

    kind: str
    ks: tuple[int, ...]
    values: tuple[float, ...]
    converged: bool
    final: float
    rate: float | None = None


def _area_values(area: AreaFunction, grid: RadialGrid) -> np.ndarray:
    a = _eval_on(area.eval, grid.nodes)
    scale = float(np.max(np.abs(a)))
    if abs(a[0]) > 1e-9 * scale:
        raise InvalidAreaError(f"A(0) must vanish, got {a[0]}")
    if np.any(a[1:] <= 0.0):
        raise InvalidAreaError("area must be positive at every node of (0, R]")
    a = a.copy()
    a[0] = 0.0
    return a


def _advance(prev: np.ndarray, a: np.ndarray, dx: float) -> tuple[np.ndarray, float]:
    """One hierarchy step from a renormalized level; returns (level, center value)."""
    inner = cumulative_integral(prev * a, dx)
    integrand = np.zeros_like(inner)
    # (int_0^s prev A)/A(s) ~ s * prev(0)/n near 0: extend by its limit 0.
    integrand[1:] = inner[1:] / a[1:]
    outer = cumulative_integral(integrand, dx)
    raw = outer[-1] - outer
    raw[-1] = 0.0
    center = float(raw[0])
    if not math.isfinite(center) or center <= 0.0:
        raise PrecisionError(f"moment level degenerated (center value {center})")
    return raw / center, center


def _require_moment_grid(grid: RadialGrid) -> float:
    if grid.intervals < _MIN_INTERVALS:
        raise DomainError(f"moment grids need at least {_MIN_INTERVALS} intervals")
    return grid.spacing


def compute_moments(area: AreaFunction, grid: RadialGrid, levels: int) -> MomentTable:
    """Build the hierarchy up to level ``levels`` on a uniform grid."""
    if levels < 0:
        raise DomainError("number of levels must be non-negative")
    dx = _require_moment_grid(grid)
    a = _area_values(area, grid)
    table = [np.ones_like(a)]
    log_scale = [0.0]
    for _ in range(levels):
        level, center = _advance(table[-1], a, dx)
        table.append(level)
        log_scale.append(log_scale[-1] + math.log(center))
    return MomentTable(grid=grid, levels=np.array(table), log_scale=np.array(log_scale))


def estimator_norm_ratio(table: MomentTable, area: AreaFunction, k: int) -> float:
    """(int T_k^2 A / int T_{k+1}^2 A)^(1/2) with rescale factors reinstated."""
    if not 0 <= k <= table.top_level - 1:
        raise DomainError(f"norm ratio needs levels k and k+1, got k = {k}")
    a = _area_values(area, table.grid)
    w = table.grid.weights
    num = float(w @ (table.levels[k] ** 2 * a))
    den = float(w @ (table.levels[k + 1] ** 2 * a))
    if not math.isfinite(den) or den <= 0.0:
        raise PrecisionError("norm-ratio denominator underflowed; raise K or N")
    scale = math.exp(table.log_scale[k] - table.log_scale[k + 1])
    return scale * math.sqrt(num / den)


def estimator_center_ratio(table: MomentTable, k: int) -> float:
    """T_{k-1}(0) / T_k(0), exact in exponent arithmetic."""
    if not 1 <= k <= table.top_level:
        raise DomainError(f"center ratio needs 1 <= k <= {table.top_level}, got {k}")
    return math.exp(table.log_scale[k - 1] - table.log_scale[k])


def estimator_mass_ratio(table: MomentTable, area: AreaFunction, k: int) -> float:
    """int T_{k-1} A / int T_k A with rescale factors reinstated."""
    if not 1 <= k <= table.top_level:
        raise DomainError(f"mass ratio needs 1 <= k <= {table.top_level}, got {k}")
    a = _area_values(area, table.grid)
    w = table.grid.weights
    num = float(w @ (table.levels[k - 1] * a))
    den = float(w @ (table.levels[k] * a))
    if not math.isfinite(den) or den <= 0.0:
        raise PrecisionError("mass-ratio denominator underflowed; raise K or N")
    return math.exp(table.log_scale[k - 1] - table.log_scale[k]) * num / den


def _series(kind: str, ks: list[int], values: list[float], converged: bool) -> EstimateSeries:
    rate = None
    if len(values) >= 3:
        d1 = abs(values[-1] - values[-2])
        d0 = abs(values[-2] - values[-3])
        if d0 > 0.0:
            rate = d1 / d0
    return EstimateSeries(
        kind=kind,
        ks=tuple(ks),
        values=tuple(values),
        converged=converged,
        final=values[-1],
        rate=rate,
    )


def run_until_converged(
    area: AreaFunction,
    grid: RadialGrid,
    tol: float = 1e-8,
    k_max: int = 200,
) -> tuple[EstimateSeries, EstimateSeries, EstimateSeries]:
    """Deepen the hierarchy until all three estimators are Cauchy at ``tol``.

    Returns (norm, center, mass) series.  Stopping uses the relative
    criterion |E(k) - E(k-1)| <= tol * E(k) on all three simultaneously; if
    ``k_max`` levels are exhausted first the series come back flagged
    unconverged rather than raising.
    """
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    if k_max < 2:
        raise DomainError("k_max must be at least 2")
    dx = _require_moment_grid(grid)
    a = _area_values(area, grid)
    w = grid.weights

    prev = np.ones_like(a)
    mass_prev = float(w @ (prev * a))
    sq_prev = float(w @ (prev**2 * a))

    norms: list[float] = []
    centers: list[float] = []
    masses: list[float] = []
    converged = False
    for _ in range(1, k_max + 1):
        cur, center = _advance(prev, a, dx)
        mass_cur = float(w @ (cur * a))
        sq_cur = float(w @ (cur**2 * a))
        if min(mass_cur, sq_cur) <= 0.0 or not math.isfinite(mass_cur + sq_cur):
            raise PrecisionError("estimator integrals underflowed; raise N")
        centers.append(1.0 / center)
        masses.append(mass_prev / mass_cur / center)
        norms.append(math.sqrt(sq_prev / sq_cur) / center)
        if len(centers) >= 2:
            cauchy = all(
                abs(s[-1] - s[-2]) <= tol * s[-1] for s in (norms, centers, masses)
            )
            if cauchy:
                converged = True
                break
        prev, mass_prev, sq_prev = cur, mass_cur, sq_cur

    top = len(centers)
    return (
        _series(NORM_RATIO, list(range(0, top)), norms, converged),
        _series(CENTER_RATIO, list(range(1, top + 1)), centers, converged),
        _series(MASS_RATIO, list(range(1, top + 1)), masses, converged),
    )
