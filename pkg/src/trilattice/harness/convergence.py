"""Convergence of finite-annulus self-energies ψ_{1,r} toward ψ."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..continuum.annulus import DEFAULT_MODES, DEFAULT_POINTS_PER_DECADE, psi_annulus
from ..continuum.profile import psi
from ..errors import ArgumentError

logger = logging.getLogger(__name__)

PSI_STUDY_COLUMNS = ["ratio", "psi_annulus", "reference", "residual", "residual_log_ratio"]


@dataclass
class PsiStudyRow:
    ratio: float
    value: float
    reference: float

    @property
    def residual(self) -> float:
        return abs(self.value - self.reference)

    @property
    def residual_log_ratio(self) -> float:
        return self.residual * math.log(self.ratio)

    def as_row(self) -> list:
        return [self.ratio, self.value, self.reference, self.residual, self.residual_log_ratio]


@dataclass
class PsiStudy:
    zeta: np.ndarray
    reference: float
    rows: list[PsiStudyRow] = field(default_factory=list)

    @property
    def residuals_decrease(self) -> bool:
        res = [r.residual for r in self.rows]
        return all(b < a for a, b in zip(res, res[1:]))

    @property
    def rate_spread(self) -> float:
        """Relative spread (max - min)/min of residual·log r over the rows."""
        vals = np.array([r.residual_log_ratio for r in self.rows])
        if vals.size == 0 or vals.min() <= 0.0:
            return math.inf
        return float((vals.max() - vals.min()) / vals.min())


def psi_convergence_study(
    zeta,
    tensor,
    ratios,
    points_per_decade: int = DEFAULT_POINTS_PER_DECADE,
    modes: int = DEFAULT_MODES,
) -> PsiStudy:
    """ψ_{1,r}(ζ) for every r in ``ratios`` against the profile value ψ(ζ).

    Raises:
        ArgumentError: ratios not strictly increasing or not above 1
    """
    ratios = [float(r) for r in ratios]
    if not ratios or ratios[0] <= 1.0 or any(b <= a for a, b in zip(ratios, ratios[1:])):
        raise ArgumentError(f"ratios must be increasing and greater than 1, got {ratios}")
    zeta = np.asarray(zeta, dtype=float)
    reference = psi(zeta, tensor)
    study = PsiStudy(zeta, reference)
    for r in ratios:
        value = psi_annulus(zeta, tensor, 1.0, r, points_per_decade, modes)
        study.rows.append(PsiStudyRow(r, value, reference))
        logger.info("psi_{1,%g} = %.10g (residual %.3e)", r, value, study.rows[-1].residual)
    return study
