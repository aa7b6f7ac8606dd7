"""Classical isotropic edge-dislocation fields.

The displacement of an edge dislocation with Burgers vector b e₁ at the
origin, for Poisson ratio ν = λ/(2(λ+μ)), is

    u_x = (b/2π)[θ + xy / (2(1-ν)r²)]
    u_y = -(b/2π)[(1-2ν)/(4(1-ν)) ln r² + (x²-y²) / (4(1-ν)r²)]

A general ζ is handled by rotating the frame. The multivalued part is
(ζ/2π)θ with θ ∈ [0, 2π) measured in the original frame, so the branch
cut always runs along the positive x-axis.
"""

import math

import numpy as np

from ..errors import SingularityError
from .tensors import IsotropicTensor, as_tensor


def _frame(zeta) -> tuple[float, np.ndarray]:
    zeta = np.asarray(zeta, dtype=float)
    b = float(np.hypot(zeta[0], zeta[1]))
    alpha = math.atan2(zeta[1], zeta[0]) if b > 0.0 else 0.0
    c, s = math.cos(alpha), math.sin(alpha)
    return b, np.array([[c, -s], [s, c]])


def _check_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    if np.any(r2 == 0.0):
        raise SingularityError("edge dislocation field evaluated at its core")
    return x


def polar_angle(x) -> np.ndarray:
    """Angle of x in [0, 2π)."""
    x = np.asarray(x, dtype=float)
    return np.mod(np.arctan2(x[..., 1], x[..., 0]), 2.0 * np.pi)


def isotropic_edge_strain(zeta, tensor: IsotropicTensor, x) -> np.ndarray:
    """Strain β^{ζ,𝐂}(x) of an edge dislocation at the origin, shape (..., 2, 2).

    Raises:
        SingularityError: some x is the origin
    """
    x = _check_points(x)
    b, Q = _frame(zeta)
    nu = tensor.poisson_ratio
    xr = x @ Q  # Qᵀx row-wise
    X, Y = xr[..., 0], xr[..., 1]
    r2 = X * X + Y * Y
    r4 = r2 * r2
    k = b / (2.0 * math.pi)
    c = 1.0 / (1.0 - nu)

    g = np.empty(x.shape[:-1] + (2, 2))
    g[..., 0, 0] = k * (-Y / r2 + 0.5 * c * Y * (Y * Y - X * X) / r4)
    g[..., 0, 1] = k * (X / r2 + 0.5 * c * X * (X * X - Y * Y) / r4)
    g[..., 1, 0] = -k * (0.5 * c * (1.0 - 2.0 * nu) * X / r2 + c * X * Y * Y / r4)
    g[..., 1, 1] = -k * (0.5 * c * (1.0 - 2.0 * nu) * Y / r2 - c * X * X * Y / r4)
    return Q @ g @ Q.T


def isotropic_edge_displacement(zeta, tensor: IsotropicTensor, x) -> np.ndarray:
    """Multivalued displacement whose gradient is isotropic_edge_strain, shape (..., 2).

    Jumps by -ζ when crossing the positive x-axis from below to above.

    Raises:
        SingularityError: some x is the origin
    """
    x = _check_points(x)
    zeta = np.asarray(zeta, dtype=float)
    b, Q = _frame(zeta)
    nu = tensor.poisson_ratio
    xr = x @ Q
    X, Y = xr[..., 0], xr[..., 1]
    r2 = X * X + Y * Y
    k = b / (2.0 * math.pi)

    smooth = np.empty(x.shape)
    smooth[..., 0] = k * X * Y / (2.0 * (1.0 - nu) * r2)
    smooth[..., 1] = -k * (
        (1.0 - 2.0 * nu) / (4.0 * (1.0 - nu)) * np.log(r2)
        + (X * X - Y * Y) / (4.0 * (1.0 - nu) * r2)
    )
    theta = polar_angle(x)
    return smooth @ Q.T + (theta / (2.0 * math.pi))[..., None] * zeta


def circulation_on_circle(field, radius: float, center=(0.0, 0.0), n: int = 256) -> np.ndarray:
    """∮ β t dℋ¹ over the circle by the n-point trapezoid rule.

    ``field`` maps points (n, 2) to matrices (n, 2, 2).
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    tangent = np.column_stack([-np.sin(theta), np.cos(theta)])
    pts = np.asarray(center, dtype=float) + radius * np.column_stack([np.cos(theta), np.sin(theta)])
    values = np.asarray(field(pts), dtype=float)
    return np.einsum("nij,nj->i", values, tangent) * radius * (2.0 * np.pi / n)


def strain_self_energy(zeta, tensor: IsotropicTensor, n: int = 256) -> float:
    """∫₀^{2π} ½𝐂Γ:Γ dθ for Γ(θ) = β^{ζ,𝐂}(cos θ, sin θ)."""
    if not np.any(np.asarray(zeta, dtype=float)):
        return 0.0
    theta = 2.0 * np.pi * np.arange(n) / n
    pts = np.column_stack([np.cos(theta), np.sin(theta)])
    gamma = isotropic_edge_strain(zeta, tensor, pts)
    return float(0.5 * np.sum(as_tensor(tensor).quadratic_form(gamma)) * (2.0 * np.pi / n))
