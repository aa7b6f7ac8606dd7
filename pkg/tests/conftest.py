"""Shared fixtures: small lattice domains and default potentials."""

import pytest


@pytest.fixture
def hexagon():
    """Regular hexagon of radius 1 with a vertex on the x-axis."""
    from trilattice.model.lattice import unit_hexagon

    return unit_hexagon()


@pytest.fixture
def potentials():
    from trilattice.model.potentials import QuadraticPotentials

    return QuadraticPotentials()


@pytest.fixture
def tensor(potentials):
    from trilattice.model.energy import linearized_tensor

    return linearized_tensor(potentials)


@pytest.fixture
def coarse_domain(hexagon):
    """Lattice hexagon of side 4 (ε = 1/4)."""
    from trilattice.model.lattice import LatticeSpec, build_domain

    return build_domain(LatticeSpec(0.25, hexagon))


@pytest.fixture
def fine_domain(hexagon):
    """ε = 1/16, the coarsest spacing that fits a recovery core in the unit hexagon."""
    from trilattice.model.lattice import LatticeSpec, build_domain

    return build_domain(LatticeSpec(1.0 / 16.0, hexagon))


@pytest.fixture
def single_dislocation():
    """Dislocation b = e₁ at the center, ε = 1/16."""
    from trilattice.model.strain import Dislocation, DislocationMeasure

    return DislocationMeasure((Dislocation((0.0, 0.0), (1, 0)),), 1.0 / 16.0)
