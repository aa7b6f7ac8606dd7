"""Lattice geometry, discrete strains, potentials and the discrete energy."""

from .lattice import LatticeDomain, LatticeSpec, NodeId, TriangleId, build_domain, nodes_in_annulus, triangle_vertices
from .strain import (
    DiscreteStrain,
    Dislocation,
    DislocationMeasure,
    annulus_average,
    burgers_measure,
    check_admissible,
    circulation,
    piecewise_field,
    triangle_matrix,
)
from .potentials import PotentialPair, QuadraticPotentials, QuarticPotentials, get_potentials
from .energy import continuum_density, linearized_tensor, total_energy, triangle_energy

__all__ = [
    "LatticeDomain",
    "LatticeSpec",
    "NodeId",
    "TriangleId",
    "build_domain",
    "nodes_in_annulus",
    "triangle_vertices",
    "DiscreteStrain",
    "Dislocation",
    "DislocationMeasure",
    "annulus_average",
    "burgers_measure",
    "check_admissible",
    "circulation",
    "piecewise_field",
    "triangle_matrix",
    "PotentialPair",
    "QuadraticPotentials",
    "QuarticPotentials",
    "get_potentials",
    "continuum_density",
    "linearized_tensor",
    "total_energy",
    "triangle_energy",
]
