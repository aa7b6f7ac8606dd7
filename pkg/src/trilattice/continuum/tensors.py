"""Linear elasticity tensors acting on 2×2 matrices."""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError


@dataclass(frozen=True, eq=False)
class ElasticityTensor:
    """A symmetric quadratic form 𝐂 on 2×2 matrices.

    ``matrix`` is the 4×4 representation on row-major vec(δ) =
    (δ₁₁, δ₁₂, δ₂₁, δ₂₂), so that 𝐂δ:δ = vec(δ)ᵀ·matrix·vec(δ).
    """
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ArgumentError(f"elasticity tensor needs a 4x4 matrix, got shape {m.shape}")
        object.__setattr__(self, "matrix", 0.5 * (m + m.T))

    def apply(self, delta) -> np.ndarray:
        """𝐂δ for δ of shape (..., 2, 2)."""
        d = np.asarray(delta, dtype=float)
        flat = d.reshape(*d.shape[:-2], 4)
        return (flat @ self.matrix.T).reshape(d.shape)

    def quadratic_form(self, delta) -> np.ndarray:
        """𝐂δ:δ for δ of shape (..., 2, 2)."""
        d = np.asarray(delta, dtype=float)
        flat = d.reshape(*d.shape[:-2], 4)
        return np.einsum("...i,ij,...j->...", flat, self.matrix, flat)

    def rotated(self, Q) -> "ElasticityTensor":
        """Tensor of the quadratic form δ ↦ 𝐂(Qᵀδ):(Qᵀδ)."""
        Q = np.asarray(Q, dtype=float)
        # vec(Qᵀδ) = kron(Qᵀ, I) vec(δ)
        T = np.kron(Q.T, np.eye(2))
        return ElasticityTensor(T.T @ self.matrix @ T)


@dataclass(frozen=True)
class IsotropicTensor:
    """Isotropic tensor with Lamé moduli: 𝐂δ:δ = λ(tr δ)² + 2μ|δ^sym|²."""
    lam: float
    mu: float

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ArgumentError(f"shear modulus must be positive, got mu={self.mu}")
        if not self.lam + self.mu > 0.0:
            raise ArgumentError(f"lambda + mu must be positive, got {self.lam + self.mu}")

    @property
    def poisson_ratio(self) -> float:
        return self.lam / (2.0 * (self.lam + self.mu))

    @property
    def self_energy_coefficient(self) -> float:
        """C with ψ(ζ) = C|ζ|², i.e. μ(λ+μ)/(2π(λ+2μ))."""
        lam, mu = self.lam, self.mu
        return mu * (lam + mu) / (2.0 * math.pi * (lam + 2.0 * mu))

    def quadratic_form(self, delta) -> np.ndarray:
        d = np.asarray(delta, dtype=float)
        tr = d[..., 0, 0] + d[..., 1, 1]
        sym = 0.5 * (d + np.swapaxes(d, -1, -2))
        return self.lam * tr**2 + 2.0 * self.mu * np.sum(sym**2, axis=(-1, -2))

    def apply(self, delta) -> np.ndarray:
        d = np.asarray(delta, dtype=float)
        tr = d[..., 0, 0] + d[..., 1, 1]
        sym = 0.5 * (d + np.swapaxes(d, -1, -2))
        return self.lam * tr[..., None, None] * np.eye(2) + 2.0 * self.mu * sym

    def tensor(self) -> ElasticityTensor:
        """General 4×4 representation."""
        m = np.zeros((4, 4))
        kd = np.eye(2)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    for l in range(2):
                        m[2 * i + j, 2 * k + l] = (
                            self.lam * kd[i, j] * kd[k, l]
                            + self.mu * (kd[i, k] * kd[j, l] + kd[i, l] * kd[j, k])
                        )
        return ElasticityTensor(m)


def as_tensor(tensor) -> ElasticityTensor:
    """Accept either tensor type and return the general representation."""
    if isinstance(tensor, IsotropicTensor):
        return tensor.tensor()
    if isinstance(tensor, ElasticityTensor):
        return tensor
    raise ArgumentError(f"expected an elasticity tensor, got {type(tensor).__name__}")
