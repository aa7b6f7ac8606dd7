"""Discrete energy Eε, triangle energies and the continuum density W.

    Eε(β) = Σ_bonds ε²ψ₁(|β(i,j)|/ε) + Σ_wedges ε²ψ₂((2/(√3ε²)) β(i,j)∧β(i,k))

Every unordered bond is counted once; wedges are the 60° CCW-adjacent
bond pairs at each node.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..continuum.tensors import IsotropicTensor
from ..utils.geometry import cross2, points_in_polygon, polygon_diameter
from .lattice import E1, ETA, NU, SQRT3, LatticeDomain
from .potentials import PotentialPair
from .strain import DiscreteStrain

logger = logging.getLogger(__name__)


def bond_terms(dom: LatticeDomain, values: np.ndarray, pot: PotentialPair) -> np.ndarray:
    """ε²ψ₁(|β|/ε) per canonical bond."""
    eps = dom.epsilon
    return eps * eps * pot.psi1(np.linalg.norm(values, axis=1) / eps)


def wedge_arguments(dom: LatticeDomain, values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """β(i,j), β(i,k) and the scaled wedge product per wedge."""
    eps = dom.epsilon
    a = dom.wedge_signs[:, 0, None] * values[dom.wedge_bonds[:, 0]]
    b = dom.wedge_signs[:, 1, None] * values[dom.wedge_bonds[:, 1]]
    return a, b, (2.0 / (SQRT3 * eps * eps)) * cross2(a, b)


def wedge_terms(dom: LatticeDomain, values: np.ndarray, pot: PotentialPair) -> np.ndarray:
    eps = dom.epsilon
    _, _, det = wedge_arguments(dom, values)
    return eps * eps * pot.psi2(det)


def energy_from_values(dom: LatticeDomain, values: np.ndarray, pot: PotentialPair) -> float:
    """Total energy of canonical bond values; the single summation used everywhere."""
    return float(np.sum(bond_terms(dom, values, pot)) + np.sum(wedge_terms(dom, values, pot)))


def _edge_wedges(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Wedge vectors at the three vertices of triangles with CCW edge values (T, 3, 2)."""
    e0, e1, e2 = edges[:, 0], edges[:, 1], edges[:, 2]
    first = np.stack([e0, e1, e2], axis=1)
    second = -np.stack([e2, e0, e1], axis=1)
    return first, second


def triangle_energies(beta: DiscreteStrain, pot: PotentialPair) -> np.ndarray:
    """Ẽε(T) = ½Σ_edges ε²ψ₁ + Σ_vertices ε²ψ₂ for every triangle, shape (T,)."""
    eps = beta.domain.epsilon
    edges = beta.edge_values()
    stretch = 0.5 * eps * eps * pot.psi1(np.linalg.norm(edges, axis=-1) / eps).sum(axis=1)
    first, second = _edge_wedges(edges)
    det = (2.0 / (SQRT3 * eps * eps)) * cross2(first, second)
    return stretch + eps * eps * pot.psi2(det).sum(axis=1)


def triangle_energy(beta: DiscreteStrain, t, pot: PotentialPair) -> float:
    """Per-triangle energy Ẽε(T); equals (√3/4)ε²W(β̃) on compatible triangles."""
    dom = beta.domain
    k = t if isinstance(t, (int, np.integer)) else dom.triangle_index(t)
    eps = dom.epsilon
    edges = (dom.tri_signs[k][:, None] * beta.values[dom.tri_bonds[k]])[None]
    stretch = 0.5 * eps * eps * pot.psi1(np.linalg.norm(edges, axis=-1) / eps).sum()
    first, second = _edge_wedges(edges)
    det = (2.0 / (SQRT3 * eps * eps)) * cross2(first, second)
    return float(stretch + eps * eps * pot.psi2(det).sum())


def _nodes_in_region(dom: LatticeDomain, region) -> np.ndarray:
    poly = np.asarray(region, dtype=float)
    strict, boundary = points_in_polygon(dom.positions, poly, 1e-12 * polygon_diameter(poly))
    return strict | boundary


def total_energy(beta: DiscreteStrain, pot: PotentialPair, region=None) -> float:
    """Eε(β), or with a polygonal ``region`` A the triangle split

        Σ_{T ⊂ A} Ẽε(T) + ½ Σ_{bonds on ∂A} ε²ψ₁(|β|/ε)

    Bonds on ∂A have both ends in A and exactly one adjacent triangle in A.
    Bonds in A with no triangle in A count in full, as do wedges in A whose
    triangle is not in the domain, so the split equals ``localized_energy``.
    """
    dom = beta.domain
    if region is None:
        return energy_from_values(dom, beta.values, pot)

    inside = _nodes_in_region(dom, region)
    tri_in = inside[dom.tri_nodes].all(axis=1)
    tri_count = np.bincount(dom.tri_bonds[tri_in].ravel(), minlength=dom.n_bonds)
    weights = np.where(inside[dom.bonds].all(axis=1), 1.0 - 0.5 * tri_count, 0.0)
    orphan = inside[dom.wedges].all(axis=1) & (dom.wedge_triangle < 0)
    tri_part = float(np.sum(triangle_energies(beta, pot)[tri_in]))
    bond_part = float(np.sum(weights * bond_terms(dom, beta.values, pot)))
    wedge_part = float(np.sum(wedge_terms(dom, beta.values, pot)[orphan]))
    return tri_part + bond_part + wedge_part


def localized_energy(beta: DiscreteStrain, pot: PotentialPair, region) -> float:
    """Eε(β; A): bonds with both ends in A and wedges with all three nodes in A."""
    dom = beta.domain
    inside = _nodes_in_region(dom, region)
    bonds = inside[dom.bonds].all(axis=1)
    wedges = inside[dom.wedges].all(axis=1)
    return float(
        np.sum(bond_terms(dom, beta.values, pot)[bonds])
        + np.sum(wedge_terms(dom, beta.values, pot)[wedges])
    )


def continuum_density(M, pot: PotentialPair) -> np.ndarray:
    """W(M) = (4/√3)[½(ψ₁(|Me₁|) + ψ₁(|Mν|) + ψ₁(|Mη|)) + 3ψ₂(det M)] for M of shape (..., 2, 2)."""
    M = np.asarray(M, dtype=float)
    stretch = sum(pot.psi1(np.linalg.norm(M @ v, axis=-1)) for v in (E1, NU, ETA))
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    W = (4.0 / SQRT3) * (0.5 * stretch + 3.0 * pot.psi2(det))
    return W if W.ndim else float(W)


def linearized_tensor(pot: PotentialPair) -> IsotropicTensor:
    """Lamé moduli λ = (√3/4)α₁ + 4√3α₂, μ = (√3/4)α₁ of the Hessian of W at Id."""
    return IsotropicTensor(
        lam=(SQRT3 / 4.0) * pot.alpha1 + 4.0 * SQRT3 * pot.alpha2,
        mu=(SQRT3 / 4.0) * pot.alpha1,
    )


def quadratic_form(pot: PotentialPair, delta) -> np.ndarray:
    """λ(tr δ)² + (√3/2)α₁|δ^sym|²."""
    d = np.asarray(delta, dtype=float)
    lam = linearized_tensor(pot).lam
    tr = d[..., 0, 0] + d[..., 1, 1]
    sym = 0.5 * (d + np.swapaxes(d, -1, -2))
    return lam * tr**2 + (SQRT3 / 2.0) * pot.alpha1 * np.sum(sym**2, axis=(-1, -2))


@dataclass
class HessianReport:
    passed: bool
    errors: np.ndarray
    worst_error: float
    worst_direction: np.ndarray
    finite_differences: np.ndarray
    quadratic_values: np.ndarray

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (
            f"Hessian check {status}: worst relative error {self.worst_error:.3e} "
            f"along {np.array2string(self.worst_direction, precision=4)}"
        )


def density_hessian_check(
    pot: PotentialPair,
    n_directions: int = 20,
    h: float = 1e-5,
    rtol: float = 1e-4,
    seed: int = 0,
    directions=None,
) -> HessianReport:
    """Compare central second differences of W at Id with the quadratic form.

    Relative errors are measured against max(|𝐂δ:δ|, μ|δ|²) so that
    infinitesimal rotations (both sides ≈ 0) are meaningful.
    """
    if directions is None:
        rng = np.random.default_rng(seed)
        directions = rng.standard_normal((n_directions, 2, 2))
    directions = np.asarray(directions, dtype=float).reshape(-1, 2, 2)

    I = np.eye(2)
    w0 = continuum_density(I, pot)
    fd = (
        continuum_density(I + h * directions, pot)
        - 2.0 * w0
        + continuum_density(I - h * directions, pot)
    ) / (h * h)
    exact = quadratic_form(pot, directions)
    mu = linearized_tensor(pot).mu
    scale = np.maximum(np.abs(exact), mu * np.sum(directions**2, axis=(1, 2)))
    errors = np.abs(fd - exact) / scale
    worst = int(np.argmax(errors))
    report = HessianReport(
        passed=bool(np.all(errors <= rtol)),
        errors=errors,
        worst_error=float(errors[worst]),
        worst_direction=directions[worst],
        finite_differences=fd,
        quadratic_values=exact,
    )
    if not report.passed:
        logger.warning("%s", report)
    return report


def dist_to_so2(M) -> np.ndarray:
    """Frobenius distance of M (..., 2, 2) to SO(2).

    Splits M into conformal ρR(φ) and anti-conformal parts; the nearest
    rotation is R(φ), giving dist² = 2(ρ-1)² + |anti-conformal|².
    """
    M = np.asarray(M, dtype=float)
    p = 0.5 * (M[..., 0, 0] + M[..., 1, 1])
    q = 0.5 * (M[..., 1, 0] - M[..., 0, 1])
    r = 0.5 * (M[..., 0, 0] - M[..., 1, 1])
    s = 0.5 * (M[..., 0, 1] + M[..., 1, 0])
    rho = np.hypot(p, q)
    d = np.sqrt(2.0 * (rho - 1.0) ** 2 + 2.0 * (r * r + s * s))
    return d if d.ndim else float(d)


def normalized_energy(energy: float, epsilon: float) -> float:
    """Energy per ε²|log ε|."""
    return energy / (epsilon * epsilon * abs(math.log(epsilon)))
