"""Recovery strains: snapped dislocations, blended displacement and slip.

The strain is

    β(i,j) = R(x_j - x_i) + ε(u(x_j) - u(x_i) - σ(i,j))

with σ the slip across the horizontal cuts x^k + {(t, 0) : t ≥ 0} and u a
displacement that near each dislocation is its isotropic edge field, far
away the superposition of all of them plus √|log ε| times the far-field
potential, and in between a C¹ blend of the two.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from ..continuum.edge import isotropic_edge_displacement
from ..continuum.tensors import IsotropicTensor
from ..errors import ArgumentError, PreconditionViolation, SeparationViolation
from ..model.energy import linearized_tensor
from ..model.lattice import LatticeDomain, rotation
from ..model.potentials import QuadraticPotentials
from ..model.strain import DiscreteStrain, DislocationMeasure, gradient_strain
from ..utils.geometry import points_in_polygon, segment_distances

logger = logging.getLogger(__name__)


class FarField(Protocol):
    """A Lipschitz potential u^cf with gradient β^cf."""

    def displacement(self, x: np.ndarray) -> np.ndarray: ...

    def gradient(self, x: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class LinearFarField:
    """u(x) = Mx, β^cf ≡ M."""
    matrix: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))

    def displacement(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ np.asarray(self.matrix, dtype=float).T

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.matrix, dtype=float), x.shape[:-1] + (2, 2)).copy()

    @property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)


@dataclass(frozen=True, eq=False)
class QuadraticFarField:
    """u_a(x) = M_ab x_b + ½ H_abc x_b x_c with H symmetric in (b, c)."""
    matrix: np.ndarray
    hessian: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.hessian, dtype=float)
        if H.shape != (2, 2, 2):
            raise ArgumentError(f"far-field hessian must have shape (2, 2, 2), got {H.shape}")
        if not np.allclose(H, np.swapaxes(H, 1, 2)):
            raise ArgumentError("far-field hessian must be symmetric in its last two indices")

    def displacement(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        M = np.asarray(self.matrix, dtype=float)
        H = np.asarray(self.hessian, dtype=float)
        return x @ M.T + 0.5 * np.einsum("abc,...b,...c->...a", H, x, x)

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        M = np.asarray(self.matrix, dtype=float)
        H = np.asarray(self.hessian, dtype=float)
        return M + np.einsum("abc,...c->...ab", H, x)

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.matrix) or np.any(self.hessian))


@dataclass(eq=False)
class SlipField:
    """Canonical bond slips σ, shape (B, 2); nonzero only on bonds crossing cuts."""
    domain: LatticeDomain
    values: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(np.any(self.values != 0.0, axis=1))

    @classmethod
    def zeros(cls, domain: LatticeDomain) -> "SlipField":
        return cls(domain, np.zeros((domain.n_bonds, 2)))


def _default_tensor() -> IsotropicTensor:
    return linearized_tensor(QuadraticPotentials())


@dataclass(frozen=True, eq=False)
class RecoveryInput:
    """Limit measure Σ ξ^k δ_{x^k}, global frame angle, far field and elasticity."""
    mu: DislocationMeasure
    theta: float = 0.0
    far_field: FarField = field(default_factory=LinearFarField)
    tensor: IsotropicTensor = field(default_factory=_default_tensor)

    @property
    def R(self) -> np.ndarray:
        return rotation(self.theta)

    @property
    def epsilon(self) -> float:
        return self.mu.epsilon

    @property
    def gamma(self) -> float:
        return self.mu.gamma


@dataclass(eq=False)
class RecoveryResult:
    beta: DiscreteStrain
    u: np.ndarray
    slip: SlipField
    measure: DislocationMeasure
    theta: float


def cutoff(s):
    """C¹ cutoff: 1 on [0, 1], 1 - 3t² + 2t³ (t = s - 1) on [1, 2], 0 beyond."""
    s = np.asarray(s, dtype=float)
    t = np.clip(s - 1.0, 0.0, 1.0)
    out = 1.0 - 3.0 * t * t + 2.0 * t * t * t
    return out if out.ndim else float(out)


def snap_positions(mu: DislocationMeasure, dom: LatticeDomain) -> DislocationMeasure:
    """Move every dislocation to its nearest triangle barycenter.

    Ties go to the lowest triangle index, i.e. the lexicographically smallest
    TriangleId.

    Raises:
        SeparationViolation: the input violates the separation constraints,
            or snapped dislocations are closer than 4ε^γ
    """
    mu.validate(dom.polygon)
    eps = dom.epsilon
    k = min(8, dom.n_triangles)
    snapped = []
    for x in mu.positions:
        dist, idx = dom.barycenter_tree.query(x, k=k)
        dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
        ties = idx[dist <= dist[0] + 1e-12 * eps]
        snapped.append(dom.barycenters[int(ties.min())])
    result = mu.with_positions(np.array(snapped).reshape(-1, 2))

    pairs, _ = result.separation_issues(dom.polygon)
    if pairs:
        raise SeparationViolation(pairs, [], min_pair=4.0 * eps**mu.gamma)
    return result


def build_slip(mu_snapped: DislocationMeasure, dom: LatticeDomain) -> SlipField:
    """σ(i,j) = ∓ξ^k on bonds crossing the cut of dislocation k from below/above.

    Raises:
        PreconditionViolation: a cut passes through a lattice node
    """
    pos = dom.positions
    i, j = dom.bonds[:, 0], dom.bonds[:, 1]
    yi, yj = pos[i, 1], pos[j, 1]
    xi_, xj_ = pos[i, 0], pos[j, 0]
    values = np.zeros((dom.n_bonds, 2))
    tol = 1e-9 * dom.epsilon

    for n, (x0, xi) in enumerate(zip(mu_snapped.positions, mu_snapped.limit_weights())):
        on_cut = (np.abs(pos[:, 1] - x0[1]) <= tol) & (pos[:, 0] >= x0[0] - tol)
        if np.any(on_cut):
            raise PreconditionViolation(f"cut of dislocation {n} passes through a lattice node")
        below_i = yi < x0[1]
        crosses = below_i != (yj < x0[1])
        with np.errstate(divide="ignore", invalid="ignore"):
            x_cross = xi_ + (x0[1] - yi) * (xj_ - xi_) / (yj - yi)
        crosses &= x_cross >= x0[0]
        sign = np.where(below_i, -1.0, 1.0)
        values[crosses] += sign[crosses, None] * xi
        logger.debug("Dislocation %d: cut crosses %d bonds", n, int(crosses.sum()))
    return SlipField(dom, values)


def _check_recovery_geometry(mu: DislocationMeasure, dom: LatticeDomain, a: float, theta: float) -> None:
    pos = mu.positions
    for m in range(len(pos)):
        for n in range(m + 1, len(pos)):
            d = float(np.linalg.norm(pos[m] - pos[n]))
            if d <= 4.0 * a:
                raise PreconditionViolation(
                    f"blend annuli of dislocations {m} and {n} overlap: distance {d:.6g} <= {4 * a:.6g}"
                )
    if len(pos):
        strict, _ = points_in_polygon(pos, dom.polygon)
        dist = segment_distances(pos, dom.polygon)
        for n, (inside, d) in enumerate(zip(strict, dist)):
            if not inside or d < 2.0 * a:
                raise PreconditionViolation(
                    f"blend annulus of dislocation {n} leaves the domain: boundary distance {d:.6g} < {2 * a:.6g}"
                )
    for n, d in enumerate(mu):
        offset = (d.theta - theta) / (math.pi / 3.0)
        if abs(offset - round(offset)) > 1e-9:
            logger.warning(
                "Dislocation %d frame %.6g does not match the global frame %.6g modulo pi/3",
                n, d.theta, theta,
            )


def _continuous_angle(x: np.ndarray, reference: float) -> np.ndarray:
    """Angle of x wrapped into (reference - π, reference + π]."""
    ang = np.arctan2(x[:, 1], x[:, 0])
    return reference - np.mod(reference - ang + np.pi, 2.0 * np.pi) + np.pi


def recovery_displacement(inp: RecoveryInput, mu: DislocationMeasure, dom: LatticeDomain) -> np.ndarray:
    """Three-zone displacement at every node for snapped dislocations."""
    eps = dom.epsilon
    a = eps**mu.gamma + eps
    R = inp.R
    scale = math.sqrt(abs(math.log(eps)))
    x = dom.positions
    centers = mu.positions
    xis = mu.limit_weights()

    # Per-dislocation fields R u^{Rᵀξ}(x - x^k), cut along the positive x-direction
    own = [
        isotropic_edge_displacement(R.T @ xi, inp.tensor, x - c) @ R.T
        for c, xi in zip(centers, xis)
    ]
    u_far = sum(own, np.zeros_like(x)) + scale * inp.far_field.displacement(x)
    u = u_far.copy()
    cf_at_centers = inp.far_field.displacement(centers) if len(centers) else np.zeros((0, 2))

    for k, c in enumerate(centers):
        d = np.linalg.norm(x - c, axis=1)
        zone = np.flatnonzero(d < 2.0 * a)
        if zone.size == 0:
            continue
        xz = x[zone]
        near = own[k][zone] + scale * cf_at_centers[k]
        for m, (cm, xim) in enumerate(zip(centers, xis)):
            if m == k:
                continue
            # Keep only the jump of dislocation m across its cut
            ref = math.atan2(c[1] - cm[1], c[0] - cm[0])
            rel = xz - cm
            theta0 = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2.0 * np.pi)
            near += ((theta0 - _continuous_angle(rel, ref)) / (2.0 * math.pi))[:, None] * xim
        weight = cutoff(d[zone] / a)[:, None]
        u[zone] = weight * near + (1.0 - weight) * u_far[zone]
    return u


def build_recovery(inp: RecoveryInput, dom: LatticeDomain) -> RecoveryResult:
    """Recovery strain for a limit measure; its Burgers measure is the snapped measure.

    Raises:
        SeparationViolation: from snapping
        PreconditionViolation: blend annuli overlap or leave Ω
    """
    eps = dom.epsilon
    if abs(inp.epsilon - eps) > 1e-14 * eps:
        raise ArgumentError(f"measure epsilon {inp.epsilon} differs from lattice epsilon {eps}")
    snapped = snap_positions(inp.mu, dom)
    a = eps**inp.gamma + eps
    _check_recovery_geometry(snapped, dom, a, inp.theta)

    slip = build_slip(snapped, dom)
    u = recovery_displacement(inp, snapped, dom)
    beta = gradient_strain(dom, u, inp.R, slip.values)
    logger.info(
        "Recovery strain: eps=%g, %d dislocations, %d slipped bonds",
        eps, len(snapped), slip.support.size,
    )
    return RecoveryResult(beta=beta, u=u, slip=slip, measure=snapped, theta=inp.theta)
