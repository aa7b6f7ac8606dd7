"""Two-body and three-body interaction potentials ψ₁, ψ₂."""

from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError


@dataclass(frozen=True)
class PotentialPair:
    """Potentials ψ₁ (bond stretch) and ψ₂ (area) with wells at 1.

    alpha1 = ψ₁''(1) and alpha2 = ψ₂''(1). Growth constants (a, b) satisfy
    ψ₁(t) ≥ a t² - b.
    """
    alpha1: float = 2.0
    alpha2: float = 2.0
    name = "abstract"

    def __post_init__(self):
        if not (self.alpha1 > 0.0 and self.alpha2 > 0.0):
            raise ArgumentError(
                f"potential curvatures must be positive, got alpha1={self.alpha1}, alpha2={self.alpha2}"
            )

    def psi1(self, t):
        raise NotImplementedError

    def dpsi1(self, t):
        raise NotImplementedError

    def psi2(self, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * self.alpha2 * (t - 1.0) ** 2

    def dpsi2(self, t):
        t = np.asarray(t, dtype=float)
        return self.alpha2 * (t - 1.0)

    @property
    def growth(self) -> tuple[float, float]:
        raise NotImplementedError


@dataclass(frozen=True)
class QuadraticPotentials(PotentialPair):
    """ψ₁(t) = (α₁/2)(t-1)², ψ₂(t) = (α₂/2)(t-1)²; (t-1)² for both at the defaults."""
    name = "quadratic"

    def psi1(self, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * self.alpha1 * (t - 1.0) ** 2

    def dpsi1(self, t):
        t = np.asarray(t, dtype=float)
        return self.alpha1 * (t - 1.0)

    @property
    def growth(self) -> tuple[float, float]:
        # (t-1)² ≥ t²/2 - 1
        return 0.25 * self.alpha1, 0.5 * self.alpha1


@dataclass(frozen=True)
class QuarticPotentials(PotentialPair):
    """ψ₁(t) = (α₁/8)(t²-1)², ψ₂ quadratic."""
    name = "quartic"

    def psi1(self, t):
        t = np.asarray(t, dtype=float)
        return 0.125 * self.alpha1 * (t * t - 1.0) ** 2

    def dpsi1(self, t):
        t = np.asarray(t, dtype=float)
        return 0.5 * self.alpha1 * t * (t * t - 1.0)

    @property
    def growth(self) -> tuple[float, float]:
        # (t²-1)² ≥ 2t² - 3
        return 0.25 * self.alpha1, 0.375 * self.alpha1


POTENTIALS: dict[str, type[PotentialPair]] = {
    QuadraticPotentials.name: QuadraticPotentials,
    QuarticPotentials.name: QuarticPotentials,
}


def get_potentials(name: str = "quadratic", alpha1: float = 2.0, alpha2: float = 2.0) -> PotentialPair:
    """Look up a potential pair by name.

    Raises:
        ArgumentError: unknown name
    """
    try:
        cls = POTENTIALS[name]
    except KeyError:
        raise ArgumentError(
            f"unknown potential {name!r}; available: {', '.join(sorted(POTENTIALS))}"
        ) from None
    return cls(alpha1=alpha1, alpha2=alpha2)
