"""Rotating-ramp field showing why averages need thick annuli.

u(x) = R(θ(|x|))x with θ = 0 on B_{Mε}, θ = 1 outside B_{2Mε} and linear in
between. The field is a rotation everywhere except on the ramp, so its
distance to SO(2) integrates to O(M²ε²); its average over A_{ε,Mε} is Id
while the field converges to R(1).
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgumentError
from ..model.energy import dist_to_so2
from ..model.lattice import rotation
from ..model.strain import annulus_average, distance_to_frame_group

logger = logging.getLogger(__name__)

THIN_ANNULUS_COLUMNS = [
    "epsilon",
    "energy",
    "energy_over_eps2",
    "inner_average_error",
    "outer_average_error",
    "outer_frame_distance",
    "relative_l2_distance",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class RampField:
    """Gradient of x ↦ R(θ(|x|))x for the ramp on [Mε, 2Mε]."""
    M: float
    epsilon: float
    angle: float = 1.0

    @property
    def inner(self) -> float:
        return self.M * self.epsilon

    def theta(self, rho) -> np.ndarray:
        return self.angle * np.clip(np.asarray(rho, dtype=float) / self.inner - 1.0, 0.0, 1.0)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        rho = np.linalg.norm(x, axis=-1)
        th = self.theta(rho)
        on_ramp = (rho > self.inner) & (rho < 2.0 * self.inner)
        slope = np.where(on_ramp, self.angle / self.inner, 0.0)
        c, s = np.cos(th), np.sin(th)
        R = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
        dR = np.stack([np.stack([-s, -c], -1), np.stack([c, -s], -1)], -2)
        safe = np.where(rho > 0.0, rho, 1.0)
        # ∇(R(θ)x) = R(θ) + θ'(ρ) R'(θ)x ⊗ x/ρ
        outer = np.einsum("...ij,...j,...k->...ik", dR, x, x / safe[..., None])
        return R + slope[..., None, None] * outer


def _radial_integral(fn, edges) -> float:
    """2π∫ρ fn(ρ) dρ over consecutive panels of ``edges``."""
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        rho = 0.5 * (b - a) * _GL_NODES + 0.5 * (b + a)
        total += 0.5 * (b - a) * float(np.sum(_GL_WEIGHTS * rho * fn(rho)))
    return 2.0 * math.pi * total


@dataclass
class ThinAnnulusRow:
    epsilon: float
    energy: float
    inner_average: np.ndarray
    outer_average: np.ndarray
    relative_l2_distance: float

    @property
    def inner_average_error(self) -> float:
        return float(np.linalg.norm(self.inner_average - np.eye(2)))

    @property
    def outer_average_error(self) -> float:
        return float(np.linalg.norm(self.outer_average - np.eye(2)))

    @property
    def outer_frame_distance(self) -> float:
        return distance_to_frame_group(self.outer_average, 0.0)

    def as_row(self) -> list:
        return [
            self.epsilon,
            self.energy,
            self.energy / self.epsilon**2,
            self.inner_average_error,
            self.outer_average_error,
            self.outer_frame_distance,
            self.relative_l2_distance,
        ]


@dataclass
class ThinAnnulusResult:
    M: float
    gamma: float
    rows: list[ThinAnnulusRow] = field(default_factory=list)

    @property
    def exponent(self) -> float:
        """Slope of log(energy) against log(ε)."""
        if len(self.rows) < 2:
            return math.nan
        eps = np.log([r.epsilon for r in self.rows])
        energy = np.log([r.energy for r in self.rows])
        return float(np.polyfit(eps, energy, 1)[0])


def thin_annulus_row(M: float, epsilon: float, gamma: float = 0.5) -> ThinAnnulusRow:
    ramp = RampField(M, epsilon)
    a = ramp.inner
    target = rotation(ramp.angle)

    def pointwise(rho, fn):
        # Both integrands are invariant under x ↦ Qx, so one ray suffices
        pts = np.column_stack([rho, np.zeros_like(rho)])
        return fn(ramp(pts))

    energy = _radial_integral(lambda rho: pointwise(rho, lambda G: dist_to_so2(G) ** 2), [a, 2.0 * a])
    sq = _radial_integral(
        lambda rho: pointwise(rho, lambda G: np.sum((G - target) ** 2, axis=(-1, -2))),
        [0.0, a, 2.0 * a, 1.0],
    )
    relative = math.sqrt(sq / (2.0 * math.pi))

    inner = annulus_average(ramp, (0.0, 0.0), epsilon, a)
    outer = annulus_average(ramp, (0.0, 0.0), epsilon, epsilon**gamma, breakpoints=(a, 2.0 * a))
    return ThinAnnulusRow(epsilon, energy, inner, outer, relative)


def thin_annulus_demo(M: float, epsilons, gamma: float = 0.5) -> ThinAnnulusResult:
    """Energy, annulus averages and L² distance to R(1) along an ε-ladder.

    Raises:
        ArgumentError: M <= 1, or the ramp leaves the unit disk
    """
    if not M > 1.0:
        raise ArgumentError(f"M must exceed 1, got {M}")
    result = ThinAnnulusResult(M, gamma)
    for eps in epsilons:
        if 2.0 * M * eps >= 1.0:
            raise ArgumentError(f"ramp radius 2M*eps = {2 * M * eps:g} must stay below 1")
        row = thin_annulus_row(M, float(eps), gamma)
        logger.info(
            "eps=%g: energy/eps^2 %.6g, inner average error %.2e, relative L2 distance %.4f",
            eps, row.energy / eps**2, row.inner_average_error, row.relative_l2_distance,
        )
        result.rows.append(row)
    return result
