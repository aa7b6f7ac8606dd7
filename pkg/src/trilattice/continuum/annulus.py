"""Finite-annulus self-energy ψ_{r₁,r₂}.

In log-polar coordinates s = log ρ a curl-free field with circulation ζ is
β = ∇u, u = (ζ/2π)θ + v(s, θ) with v single-valued, and

    ∫_{A_{r₁,r₂}} 𝐂β:β dx = ∫∫ 𝐂G:G ds dθ,
    G = ∂_s v ⊗ n + (∂_θ v + ζ/2π) ⊗ τ.

v is discretized by Fourier modes |k| ≤ K in θ and quadratic finite
elements on a uniform grid in s. The grid is uniform, so every element
shares one local matrix.
"""

import logging
import math

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from ..errors import ArgumentError, NumericalError
from .tensors import as_tensor

logger = logging.getLogger(__name__)

DEFAULT_POINTS_PER_DECADE = 64
DEFAULT_MODES = 4

_GAUSS_POINTS = np.array([0.5 - 0.5 * math.sqrt(0.6), 0.5, 0.5 + 0.5 * math.sqrt(0.6)])
_GAUSS_WEIGHTS = np.array([5.0, 8.0, 5.0]) / 18.0


def _shape_functions(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic Lagrange shape functions on [0, 1] and their derivatives, (Q, 3)."""
    N = np.column_stack([(2 * xi - 1) * (xi - 1), 4 * xi * (1 - xi), xi * (2 * xi - 1)])
    dN = np.column_stack([4 * xi - 3, 4 - 8 * xi, 4 * xi - 1])
    return N, dN


def _fourier_basis(theta: np.ndarray, modes: int) -> tuple[np.ndarray, np.ndarray]:
    """1, cos kθ, sin kθ (k = 1..K) and their θ-derivatives, (M, 2K+1)."""
    cols, dcols = [np.ones_like(theta)], [np.zeros_like(theta)]
    for k in range(1, modes + 1):
        cols += [np.cos(k * theta), np.sin(k * theta)]
        dcols += [-k * np.sin(k * theta), k * np.cos(k * theta)]
    return np.column_stack(cols), np.column_stack(dcols)


def _element_system(C: np.ndarray, zeta: np.ndarray, h: float, modes: int):
    """Local stiffness matrix, load vector and the per-unit-length constant."""
    n_theta = 4 * modes + 8
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    w_theta = 2.0 * np.pi / n_theta
    n = np.column_stack([np.cos(theta), np.sin(theta)])
    tau = np.column_stack([-np.sin(theta), np.cos(theta)])
    phi, dphi = _fourier_basis(theta, modes)
    N, dN = _shape_functions(_GAUSS_POINTS)
    dN = dN / h

    # core[q, t, j, a, m]: coefficient of v_{a,m} in column j of G
    core = (
        np.einsum("qa,tm,tj->qtjam", dN, phi, n)
        + np.einsum("qa,tm,tj->qtjam", N, dphi, tau)
    )
    n_f = phi.shape[1]
    B = np.einsum("qtjam,cd->qtcjamd", core, np.eye(2)).reshape(3, n_theta, 4, 3 * n_f * 2)
    W = np.outer(_GAUSS_WEIGHTS * h, np.full(n_theta, w_theta))

    g0 = ((zeta / (2.0 * math.pi))[None, :, None] * tau[:, None, :]).reshape(n_theta, 4)
    K_loc = np.einsum("qt,qtik,ij,qtjl->kl", W, B, C, B)
    f_loc = np.einsum("qt,qtik,ij,tj->k", W, B, C, g0)
    c_unit = w_theta * float(np.einsum("ti,ij,tj->", g0, C, g0))
    return K_loc, f_loc, c_unit, n_f


def psi_annulus(
    zeta,
    tensor,
    r1: float,
    r2: float,
    points_per_decade: int = DEFAULT_POINTS_PER_DECADE,
    modes: int = DEFAULT_MODES,
) -> float:
    """ψ_{r₁,r₂}(ζ) = (1/log(r₂/r₁)) min ½∫_{A_{r₁,r₂}} 𝐂β:β dx.

    Args:
        zeta: circulation
        tensor: elasticity tensor
        r1, r2: radii, 0 < r1 < r2
        points_per_decade: radial nodes per factor 10 in ρ
        modes: highest Fourier mode in θ

    Raises:
        ArgumentError: radii out of order or non-positive
        NumericalError: the sparse solve failed
    """
    if not 0.0 < r1 < r2:
        raise ArgumentError(f"annulus radii must satisfy 0 < r1 < r2, got r1={r1}, r2={r2}")
    zeta = np.asarray(zeta, dtype=float)
    if not np.any(zeta):
        return 0.0
    C = as_tensor(tensor).matrix
    L = math.log(r2 / r1)
    n_el = max(2, math.ceil(0.5 * points_per_decade * math.log10(r2 / r1)))
    h = L / n_el

    K_loc, f_loc, c_unit, n_f = _element_system(C, zeta, h, modes)
    n_loc = len(f_loc)
    stride = 2 * n_f * 2
    n_dof = (2 * n_el + 1) * n_f * 2

    offsets = stride * np.arange(n_el)
    local = np.arange(n_loc)
    rows = np.broadcast_to(offsets[:, None, None] + local[None, :, None], (n_el, n_loc, n_loc))
    cols = np.broadcast_to(offsets[:, None, None] + local[None, None, :], (n_el, n_loc, n_loc))
    vals = np.broadcast_to(K_loc, (n_el, n_loc, n_loc))
    K = scipy.sparse.coo_matrix(
        (vals.ravel(), (rows.ravel(), cols.ravel())), shape=(n_dof, n_dof)
    ).tocsr()
    f = np.bincount(
        (offsets[:, None] + local[None, :]).ravel(),
        weights=np.broadcast_to(f_loc, (n_el, n_loc)).ravel(),
        minlength=n_dof,
    )

    # Pin the constant mode at the inner radius
    free = np.arange(2, n_dof)
    try:
        x_free = scipy.sparse.linalg.spsolve(K[free][:, free].tocsc(), -f[free])
    except RuntimeError as e:
        raise NumericalError(f"annulus cell problem could not be solved: {e}") from e
    if not np.all(np.isfinite(x_free)):
        raise NumericalError("annulus cell problem produced non-finite values")

    J = c_unit * L + float(f[free] @ x_free)
    value = 0.5 * J / L
    logger.info(
        "psi_annulus(zeta=%s, r1=%g, r2=%g): %d elements, %d unknowns -> %.10g",
        zeta, r1, r2, n_el, n_dof, value,
    )
    return value
