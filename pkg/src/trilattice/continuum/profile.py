"""Angular profiles of planar dislocation strains and the self-energy ψ.

A planar strain β(ρ, θ) = Γ(θ)/ρ with

    Γ(θ) = f(θ) ⊗ (-sin θ, cos θ) + g ⊗ (cos θ, sin θ),
    f(θ) = ζ/2π + Σ_{k=1..N} (a_k cos kθ + b_k sin kθ),

is curl-free with circulation ζ on every circle. ψ(ζ) is the minimum of
∫₀^{2π} ½𝐂Γ:Γ dθ over g, a_k, b_k.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ..errors import ArgumentError, NumericalError
from .tensors import as_tensor

logger = logging.getLogger(__name__)

DEFAULT_MODES = 8


def _frames(theta) -> tuple[np.ndarray, np.ndarray]:
    """Unit radial and tangential vectors, shape (..., 2)."""
    theta = np.asarray(theta, dtype=float)
    n = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    t = np.stack([-np.sin(theta), np.cos(theta)], axis=-1)
    return n, t


@dataclass(frozen=True, eq=False)
class AngularProfile:
    """Fourier-parameterized profile Γ; ``a``, ``b`` have shape (N, 2)."""
    zeta: np.ndarray
    g: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.a)

    def f(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.degree + 1)
        kt = theta[..., None] * k
        return (
            np.asarray(self.zeta) / (2.0 * math.pi)
            + np.cos(kt) @ self.a
            + np.sin(kt) @ self.b
        )

    def gamma(self, theta) -> np.ndarray:
        """Γ(θ), shape (..., 2, 2)."""
        n, t = _frames(theta)
        return self.f(theta)[..., :, None] * t[..., None, :] + np.asarray(self.g)[:, None] * n[..., None, :]

    def strain(self, x) -> np.ndarray:
        """β(x) = Γ(θ)/ρ for points x (..., 2)."""
        x = np.asarray(x, dtype=float)
        rho = np.linalg.norm(x, axis=-1)
        theta = np.arctan2(x[..., 1], x[..., 0])
        return self.gamma(theta) / rho[..., None, None]

    def energy(self, tensor, n: int = 512) -> float:
        """∫₀^{2π} ½𝐂Γ:Γ dθ by the n-point trapezoid rule."""
        theta = 2.0 * np.pi * np.arange(n) / n
        q = as_tensor(tensor).quadratic_form(self.gamma(theta))
        return float(0.5 * np.sum(q) * (2.0 * np.pi / n))

    def scaled(self, s: float) -> "AngularProfile":
        return AngularProfile(s * np.asarray(self.zeta), s * self.g, s * self.a, s * self.b)


@dataclass(frozen=True, eq=False)
class PlanarStrain:
    """The (-1)-homogeneous field x ↦ Γ(θ)/ρ of a profile."""
    profile: AngularProfile

    def __call__(self, x) -> np.ndarray:
        return self.profile.strain(x)


def _design(theta: np.ndarray, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Linear map from unknowns (g, a_k, b_k) to vec Γ(θ) at quadrature points.

    Returns:
        A of shape (M, 4, 2 + 4N) and the per-point tangent frames (M, 2)
    """
    n, t = _frames(theta)
    m = len(theta)
    n_unknowns = 2 + 4 * degree
    A = np.zeros((m, 2, 2, n_unknowns))
    for c in range(2):
        # g_c contributes e_c ⊗ n
        A[:, c, :, c] = n
    for k in range(1, degree + 1):
        cos_k = np.cos(k * theta)[:, None]
        sin_k = np.sin(k * theta)[:, None]
        for c in range(2):
            A[:, c, :, 2 + 4 * (k - 1) + c] = cos_k * t
            A[:, c, :, 2 + 4 * (k - 1) + 2 + c] = sin_k * t
    return A.reshape(m, 4, n_unknowns), t


def minimize_angular_profile(zeta, tensor, N: int = DEFAULT_MODES) -> AngularProfile:
    """Minimize ∫₀^{2π} 𝐂Γ:Γ dθ over profiles of degree N with circulation ζ.

    One symmetric positive-definite solve; trapezoid quadrature with 4N + 8
    points integrates the quadratic form exactly.

    Raises:
        ArgumentError: N < 2
        NumericalError: the normal equations are not positive definite
    """
    if N < 2:
        raise ArgumentError(f"profile degree must be at least 2, got {N}")
    zeta = np.asarray(zeta, dtype=float)
    C = as_tensor(tensor).matrix
    m = 4 * N + 8
    theta = 2.0 * np.pi * np.arange(m) / m
    w = 2.0 * np.pi / m
    A, t = _design(theta, N)
    const = ((zeta / (2.0 * math.pi))[None, :, None] * t[:, None, :]).reshape(m, 4)

    CA = np.einsum("ij,mjk->mik", C, A)
    H = w * np.einsum("mik,mil->kl", A, CA)
    rhs = -w * np.einsum("mik,ij,mj->k", A, C, const)
    try:
        factor = scipy.linalg.cho_factor(H)
        x = scipy.linalg.cho_solve(factor, rhs)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"angular profile system is not positive definite: {e}") from e

    logger.debug("Angular profile for zeta=%s: g=%s", zeta, x[:2])
    coeffs = x[2:].reshape(N, 4)
    return AngularProfile(
        zeta=zeta.copy(),
        g=x[:2].copy(),
        a=coeffs[:, 0:2].copy(),
        b=coeffs[:, 2:4].copy(),
    )


def psi(zeta, tensor, N: int = DEFAULT_MODES) -> float:
    """Self-energy ψ^𝐂(ζ) = ∫₀^{2π} ½𝐂Γ:Γ dθ at the optimal profile; 0 for ζ = 0."""
    zeta = np.asarray(zeta, dtype=float)
    if not np.any(zeta):
        return 0.0
    profile = minimize_angular_profile(zeta, tensor, N)
    return profile.energy(tensor, n=4 * N + 8)


def self_energy_coefficient(tensor) -> float:
    """Closed-form C with ψ(ζ) = C|ζ|² for isotropic tensors.

    Raises:
        ArgumentError: the tensor is not isotropic
    """
    if not hasattr(tensor, "self_energy_coefficient"):
        raise ArgumentError("the closed-form self-energy is only available for isotropic tensors")
    return tensor.self_energy_coefficient


def self_energy_matrix(tensor, N: int = DEFAULT_MODES) -> np.ndarray:
    """Symmetric P with ψ(ζ) = ζᵀPζ."""
    pxx = psi(np.array([1.0, 0.0]), tensor, N)
    pyy = psi(np.array([0.0, 1.0]), tensor, N)
    pxy = 0.5 * (psi(np.array([1.0, 1.0]), tensor, N) - pxx - pyy)
    return np.array([[pxx, pxy], [pxy, pyy]])

