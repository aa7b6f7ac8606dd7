"""Discrete edge dislocations on the triangular lattice.

Provides the nonlinear lattice energy, Burgers-measure extraction, the
linear-elastic self-energy cell formulas and the recovery/minimization
machinery used to check the logarithmic energy scaling numerically.
"""

__version__ = "0.1.0"
