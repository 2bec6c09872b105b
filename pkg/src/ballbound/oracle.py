"""Independent eigenvalue solvers used to validate the moment-hierarchy bounds.

Two routes to the first Dirichlet eigenvalue:

* a radial shooting solver for rotationally symmetric models, integrating the
  self-adjoint system (f, A f')' with a fixed-step RK4 sweep and bisecting on
  the sign of f(R);
* a finite-volume discretization of the Laplace-Beltrami operator of a 2-D
  polar metric, solved by inverse power iteration on the generalized
  symmetric eigenproblem.

Both report a residual and, for the 2-D route, a Richardson error estimate
from one mesh refinement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import (
    AssemblyError,
    BracketError,
    ConvergenceError,
    DegenerateProfileError,
    DomainError,
    InvalidModelError,
)
from .geometry import (
    PolarMetric2D,
    RadialGrid,
    RiemannianModel,
    _eval_on,
    _eval_on2,
    area_from_polar_metric,
    unit_sphere_volume,
)
from .quadrature import derivative_five_point, richardson_estimate, richardson_extrapolate

# First Dirichlet eigenvalue of the unit disc (square of the first J0 zero);
# only used to scale the default shooting bracket.
_UNIT_DISC_LAMBDA = 5.783185962946785
_SCAN_POINTS = 65
_MAX_DOUBLINGS = 8


@dataclass(frozen=True, eq=False)
class EigenResult:
    """First eigenvalue plus the eigenfunction samples that produced it."""

    lambda1: float
    eigenfunction: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class Mesh2D:
    """Polar mesh: ``n_radial`` radial intervals, ``n_angular`` uniform angles."""

    n_radial: int
    n_angular: int

    def __post_init__(self):
        if self.n_radial < 16:
            raise DomainError(f"need at least 16 radial intervals, got {self.n_radial}")
        if self.n_angular < 16 or self.n_angular % 2 != 0:
            raise DomainError(
                f"need an even number >= 16 of angles, got {self.n_angular}"
            )

    def refined(self) -> "Mesh2D":
        return Mesh2D(2 * self.n_radial, 2 * self.n_angular)


def _model_area_arrays(model: RiemannianModel, nodes: np.ndarray, h: float):
    """A(t) at the grid nodes and at step midpoints, validated positive."""
    n = model.dimension
    vol = unit_sphere_volume(n)
    w_nodes = _eval_on(model.warping.eval, nodes)
    w_mid = _eval_on(model.warping.eval, nodes[:-1] + 0.5 * h)
    if np.any(w_nodes[1:] <= 0.0) or np.any(w_mid[1:] <= 0.0):
        raise InvalidModelError("warping must stay positive inside the ball")
    a_nodes = vol * w_nodes ** (n - 1)
    a_mid = vol * w_mid ** (n - 1)
    return a_nodes, a_mid


def _shoot_batch(
    lambdas: np.ndarray,
    dimension: int,
    h: float,
    a_nodes: np.ndarray,
    a_mid: np.ndarray,
) -> np.ndarray:
    """RK4 sweep of f' = g/A, g' = -lambda A f, vectorized over candidates.

    Starts from the short series f = 1 - lambda t^2/(2n) at the first node to
    avoid dividing by A(0) = 0; returns f(R) per candidate.
    """
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    n = dimension
    f = 1.0 - lam * h * h / (2.0 * n)
    g = a_nodes[1] * (-lam * h / n)
    for i in range(1, a_nodes.size - 1):
        a0 = a_nodes[i]
        am = a_mid[i]
        a1 = a_nodes[i + 1]
        k1f = g / a0
        k1g = -lam * a0 * f
        k2f = (g + 0.5 * h * k1g) / am
        k2g = -lam * am * (f + 0.5 * h * k1f)
        k3f = (g + 0.5 * h * k2g) / am
        k3g = -lam * am * (f + 0.5 * h * k2f)
        k4f = (g + h * k3g) / a1
        k4g = -lam * a1 * (f + h * k3f)
        f = f + h * (k1f + 2.0 * k2f + 2.0 * k3f + k4f) / 6.0
        g = g + h * (k1g + 2.0 * k2g + 2.0 * k3g + k4g) / 6.0
    return f


def _shoot_scalar(
    lam: float,
    dimension: int,
    h: float,
    a_nodes: list[float],
    a_mid: list[float],
    keep_path: bool = False,
):
    """Scalar twin of :func:`_shoot_batch` on plain floats (fast in bisection)."""
    n = dimension
    f = 1.0 - lam * h * h / (2.0 * n)
    g = a_nodes[1] * (-lam * h / n)
    path = None
    if keep_path:
        path = [1.0, f]
    sixth = h / 6.0
    half = 0.5 * h
    for i in range(1, len(a_nodes) - 1):
        a0 = a_nodes[i]
        am = a_mid[i]
        a1 = a_nodes[i + 1]
        k1f = g / a0
        k1g = -lam * a0 * f
        k2f = (g + half * k1g) / am
        k2g = -lam * am * (f + half * k1f)
        k3f = (g + half * k2g) / am
        k3g = -lam * am * (f + half * k2f)
        k4f = (g + h * k3g) / a1
        k4g = -lam * a1 * (f + h * k3f)
        f = f + sixth * (k1f + 2.0 * (k2f + k3f) + k4f)
        g = g + sixth * (k1g + 2.0 * (k2g + k3g) + k4g)
        if keep_path:
            path.append(f)
    return f, path


def shoot_radial_lambda1(
    model: RiemannianModel, grid: RadialGrid, tol: float = 1e-10
) -> EigenResult:
    """First Dirichlet eigenvalue of a model by shooting and bisection.

    Integrates outward from f(0) = 1, f'(0) = 0, scans an expanding bracket
    for the first sign change of f(R), then bisects the eigenvalue to width
    ``tol``.  The residual reported is |f(R)| at the final eigenvalue
    (f(0) = 1 normalization).
    """
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    h = grid.spacing
    nodes = grid.nodes
    a_nodes, a_mid = _model_area_arrays(model, nodes, h)
    n = model.dimension

    lo = 1e-6
    hi = 4.0 * n * _UNIT_DISC_LAMBDA / model.radius**2
    bracket = None
    for _ in range(_MAX_DOUBLINGS):
        lams = np.linspace(lo, hi, _SCAN_POINTS)
        f_end = _shoot_batch(lams, n, h, a_nodes, a_mid)
        crossings = np.nonzero((f_end[:-1] > 0.0) & (f_end[1:] <= 0.0))[0]
        if crossings.size:
            i = int(crossings[0])
            bracket = (float(lams[i]), float(lams[i + 1]))
            break
        hi *= 2.0
    if bracket is None:
        raise BracketError(
            f"f(R) has no sign change for eigenvalue candidates in [{lo:g}, {hi:g}];"
            " the model may be degenerate or the bracket scale too small"
        )

    a_list = a_nodes.tolist()
    m_list = a_mid.tolist()
    a, b = bracket
    iterations = 0
    while b - a > tol:
        mid = 0.5 * (a + b)
        f_mid, _ = _shoot_scalar(mid, n, h, a_list, m_list)
        iterations += 1
        if f_mid > 0.0:
            a = mid
        else:
            b = mid
    lam1 = 0.5 * (a + b)

    f_end, path = _shoot_scalar(lam1, n, h, a_list, m_list, keep_path=True)
    residual = abs(f_end)
    f = np.asarray(path)
    f[-1] = 0.0
    if np.any(f[:-1] <= 0.0) or np.any(np.diff(f[:-1]) >= 0.0):
        raise ConvergenceError(
            "shooting produced an eigenfunction that is not positive decreasing;"
            " refine the grid",
            residual=residual,
        )
    return EigenResult(lambda1=lam1, eigenfunction=f, iterations=iterations, residual=residual)


def build_discrete_laplacian(metric: PolarMetric2D, mesh: Mesh2D):
    """Assemble the flux-form discretization of -Laplace on the punctured disc.

    Unknowns sit at rings r_j = j dr (j = 1..M-1) plus a single center value;
    the Dirichlet ring at r = R is eliminated.  Returns the stiffness matrix
    (CSR) and the diagonal of the mass matrix.
    """
    m_r, m_t = mesh.n_radial, mesh.n_angular
    radius = metric.radius
    dr = radius / m_r
    dth = 2.0 * math.pi / m_t
    r_ring = dr * np.arange(1, m_r)
    theta = dth * np.arange(m_t)

    r_face = dr * (np.arange(m_r) + 0.5)
    rho_face = _eval_on2(metric.density, r_face[:, None], theta[None, :])
    rho_ring = _eval_on2(metric.density, r_ring[:, None], theta[None, :])
    rho_ang = _eval_on2(metric.density, r_ring[:, None], (theta + 0.5 * dth)[None, :])
    if np.any(rho_face <= 0.0) or np.any(rho_ring <= 0.0) or np.any(rho_ang <= 0.0):
        raise DomainError("density must be positive on the mesh")

    c_rad = rho_face * dth / dr          # conductance across radial faces
    c_ang = dr / (dth * rho_ang)         # conductance across angular faces

    n_ring = (m_r - 1) * m_t
    center = n_ring
    n_unknown = n_ring + 1

    def idx(j, i):
        return (j - 1) * m_t + i

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    def add(r, c, v):
        rows.append(np.asarray(r).ravel())
        cols.append(np.asarray(c).ravel())
        vals.append(np.asarray(v).ravel())

    jj = np.arange(1, m_r)[:, None]
    ii = np.arange(m_t)[None, :]
    here = idx(jj, ii)

    # angular faces between (j, i) and (j, i+1 mod P)
    there = idx(jj, (ii + 1) % m_t)
    add(here, there, -c_ang)
    add(there, here, -c_ang)
    add(here, here, c_ang)
    add(there, there, c_ang)

    # radial faces between rings j and j+1 (j = 1..M-2)
    if m_r > 2:
        jj_in = np.arange(1, m_r - 1)[:, None]
        inner = idx(jj_in, ii)
        outer = idx(jj_in + 1, ii)
        c_mid = c_rad[1 : m_r - 1, :]
        add(inner, outer, -c_mid)
        add(outer, inner, -c_mid)
        add(inner, inner, c_mid)
        add(outer, outer, c_mid)

    # center face at r = dr/2 couples the center unknown to ring 1
    ring1 = idx(1, np.arange(m_t))
    c0 = c_rad[0, :]
    add(np.full(m_t, center), ring1, -c0)
    add(ring1, np.full(m_t, center), -c0)
    add(ring1, ring1, c0)
    add(np.full(m_t, center), np.full(m_t, center), c0)

    # Dirichlet face at r = R - dr/2 contributes only to the last ring diagonal
    last = idx(m_r - 1, np.arange(m_t))
    add(last, last, c_rad[m_r - 1, :])

    stiffness = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_unknown, n_unknown),
    ).tocsr()

    defect = sp.coo_matrix(stiffness - stiffness.T)
    scale = float(np.max(np.abs(stiffness.data)))
    if defect.nnz and float(np.max(np.abs(defect.data))) > 1e-10 * scale:
        raise AssemblyError("discrete operator is asymmetric beyond rounding")

    mass = np.empty(n_unknown)
    mass[:n_ring] = (rho_ring * dr * dth).ravel()
    rho_center = _eval_on2(metric.density, 0.25 * dr, theta)
    mass[center] = float(np.sum(rho_center) * 0.5 * dr * dth)
    return stiffness, mass


def eigen_2d_polar(metric: PolarMetric2D, mesh: Mesh2D, tol: float = 1e-8) -> EigenResult:
    """Smallest Laplace-Beltrami Dirichlet eigenvalue by inverse power iteration.

    The stiffness factorization is computed once and reused; iteration stops
    when the eigenvalue is relatively Cauchy at ``tol`` and the relative
    residual ||A v - lambda B v|| / (lambda ||B v||) is below 2 tol.
    """
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    stiffness, mass = build_discrete_laplacian(metric, mesh)
    solve = splu(stiffness.tocsc()).solve

    x = np.ones(mass.size)
    x /= math.sqrt(float(x @ (mass * x)))
    lam = None
    residual = math.inf
    max_iter = 500
    for it in range(1, max_iter + 1):
        bx = mass * x
        y = solve(bx)
        by = mass * y
        norm2 = float(y @ by)
        lam_new = float(y @ bx) / norm2
        scale = math.sqrt(norm2)
        y /= scale
        # A y = bx before scaling, so the residual needs no extra matvec.
        r_vec = bx / scale - lam_new * (by / scale)
        residual = float(np.linalg.norm(r_vec)) / (
            lam_new * float(np.linalg.norm(by / scale))
        )
        if (
            lam is not None
            and abs(lam_new - lam) <= tol * lam_new
            and residual <= 2.0 * tol
        ):
            lam = lam_new
            x = y
            break
        lam = lam_new
        x = y
    else:
        raise ConvergenceError(
            f"inverse power iteration stagnated after {max_iter} sweeps",
            residual=residual,
        )
    eigvec = x / float(np.max(np.abs(x)))
    if float(np.sum(eigvec)) < 0.0:
        eigvec = -eigvec
    return EigenResult(lambda1=lam, eigenfunction=eigvec, iterations=it, residual=residual)


def eigen_2d_refined(
    metric: PolarMetric2D, mesh: Mesh2D, tol: float = 1e-8
) -> tuple[EigenResult, float, float]:
    """Solve on ``mesh`` and its one-step refinement.

    Returns the fine-mesh result, the Richardson error estimate for its
    eigenvalue (second-order scheme), and the extrapolated eigenvalue.
    """
    coarse = eigen_2d_polar(metric, mesh, tol)
    fine = eigen_2d_polar(metric, mesh.refined(), tol)
    estimate = richardson_estimate(coarse.lambda1, fine.lambda1, order=2)
    extrapolated = richardson_extrapolate(coarse.lambda1, fine.lambda1, order=2)
    return fine, estimate, extrapolated


def rayleigh_quotient_2d(
    metric: PolarMetric2D,
    grid: RadialGrid,
    radial_profile: np.ndarray,
    m_theta: int = 256,
) -> float:
    """Rayleigh quotient of a radial trial function against a 2-D polar metric.

    For radial profiles the angular integrals collapse onto the area function,
    so the quotient equals int f'^2 A dt / int f^2 A dt.
    """
    f = np.asarray(radial_profile, dtype=float)
    if f.shape != grid.nodes.shape:
        raise DomainError("profile must be sampled on the grid nodes")
    peak = float(np.max(np.abs(f)))
    if peak == 0.0:
        raise DegenerateProfileError("profile is identically zero")
    if abs(f[-1]) > 1e-9 * peak:
        raise DomainError("profile must vanish at r = R")
    area = area_from_polar_metric(metric, grid, m_theta)
    a = area.samples[1]
    df = derivative_five_point(f, grid.spacing)
    num = float(grid.weights @ (df**2 * a))
    den = float(grid.weights @ (f**2 * a))
    if den <= 0.0 or not math.isfinite(den):
        raise DegenerateProfileError("profile has numerically zero mass")
    return num / den


def radial_profile_from_model(
    model: RiemannianModel, grid: RadialGrid, tol: float = 1e-10
) -> np.ndarray:
    """Convenience: nodal first eigenfunction of a model, f(0) = 1, f(R) = 0."""
    return shoot_radial_lambda1(model, grid, tol).eigenfunction


__all__ = [
    "EigenResult",
    "Mesh2D",
    "shoot_radial_lambda1",
    "build_discrete_laplacian",
    "eigen_2d_polar",
    "eigen_2d_refined",
    "rayleigh_quotient_2d",
    "radial_profile_from_model",
]
