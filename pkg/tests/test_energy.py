"""Tests for the discrete energy, potentials and the continuum density."""

import math

import numpy as np
import pytest


class TestPotentials:
    """Test the potential registry."""

    def test_wells_at_one(self):
        """Test that both potentials vanish with zero slope at 1."""
        from trilattice.model.potentials import POTENTIALS

        for cls in POTENTIALS.values():
            pot = cls(alpha1=3.0, alpha2=5.0)
            assert pot.psi1(1.0) == pytest.approx(0.0)
            assert pot.dpsi1(1.0) == pytest.approx(0.0)
            assert pot.psi2(1.0) == pytest.approx(0.0)

    def test_curvatures(self):
        """Test that ψ₁''(1) = α₁ by central differences."""
        from trilattice.model.potentials import POTENTIALS

        h = 1e-4
        for cls in POTENTIALS.values():
            pot = cls(alpha1=3.0, alpha2=5.0)
            second = (pot.psi1(1 + h) - 2 * pot.psi1(1.0) + pot.psi1(1 - h)) / h**2
            assert second == pytest.approx(3.0, rel=1e-6)

    def test_growth_bound(self):
        """Test ψ₁(t) ≥ a t² - b on a grid."""
        from trilattice.model.potentials import POTENTIALS

        t = np.linspace(0.0, 20.0, 401)
        for cls in POTENTIALS.values():
            pot = cls()
            a, b = pot.growth
            assert np.all(pot.psi1(t) >= a * t * t - b - 1e-12)

    def test_unknown_name(self):
        """Test that an unknown potential name is rejected."""
        from trilattice.errors import ArgumentError
        from trilattice.model.potentials import get_potentials

        with pytest.raises(ArgumentError, match="available"):
            get_potentials("lennard-jones")

    def test_non_positive_curvature(self):
        """Test that curvatures must be positive."""
        from trilattice.errors import ArgumentError
        from trilattice.model.potentials import QuadraticPotentials

        with pytest.raises(ArgumentError):
            QuadraticPotentials(alpha1=0.0)


class TestDiscreteEnergy:
    """Test Eε and its triangle decomposition."""

    def test_rigid_motions_cost_nothing(self, coarse_domain, potentials):
        """Test that the reference lattice and its rotations have zero energy."""
        from trilattice.model.energy import total_energy
        from trilattice.model.lattice import rotation
        from trilattice.model.strain import DiscreteStrain

        for theta in (0.0, 0.3, math.pi / 3):
            beta = DiscreteStrain.from_matrix(coarse_domain, rotation(theta))
            assert total_energy(beta, potentials) == pytest.approx(0.0, abs=1e-25)

    def test_triangle_energy_matches_density(self, coarse_domain):
        """Test Ẽε(T) = (√3/4)ε²W(M) on a homogeneously strained triangle."""
        from trilattice.model.energy import continuum_density, triangle_energies, triangle_energy
        from trilattice.model.potentials import QuarticPotentials
        from trilattice.model.strain import DiscreteStrain

        pot = QuarticPotentials(alpha1=2.0, alpha2=3.0)
        M = np.array([[1.02, 0.03], [-0.01, 0.97]])
        beta = DiscreteStrain.from_matrix(coarse_domain, M)
        eps = coarse_domain.epsilon
        expected = math.sqrt(3) / 4 * eps * eps * continuum_density(M, pot)
        np.testing.assert_allclose(triangle_energies(beta, pot), expected, rtol=1e-12)
        assert triangle_energy(beta, coarse_domain.triangle_ids[3], pot) == pytest.approx(expected, rel=1e-12)

    def test_triangle_split_recovers_total(self, coarse_domain, potentials):
        """Test Σ Ẽε(T) + ½ Σ boundary bonds = Eε on a convex domain."""
        from trilattice.model.energy import total_energy
        from trilattice.model.strain import gradient_strain

        rng = np.random.default_rng(1)
        beta = gradient_strain(coarse_domain, 0.2 * rng.standard_normal((coarse_domain.n_nodes, 2)))
        whole = total_energy(beta, potentials)
        split = total_energy(beta, potentials, region=coarse_domain.polygon)
        assert split == pytest.approx(whole, rel=1e-12)

    def test_triangle_split_on_interior_square(self, potentials):
        """Test that the split on a square inside Ω half-weights the square's own boundary bonds."""
        from trilattice.model.energy import localized_energy, total_energy
        from trilattice.model.lattice import LatticeSpec, build_domain
        from trilattice.model.strain import DiscreteStrain, gradient_strain

        outer = np.array([(0, 0), (10, 0), (10, 10), (0, 10)], dtype=float)
        inner = np.array([(2, 2), (8, 2), (8, 8), (2, 8)], dtype=float)
        dom = build_domain(LatticeSpec(1.0, outer))
        zero = DiscreteStrain.zeros(dom)
        assert total_energy(zero, potentials, region=inner) == pytest.approx(308.0)
        assert localized_energy(zero, potentials, inner) == pytest.approx(308.0)

        rng = np.random.default_rng(5)
        beta = gradient_strain(dom, 0.1 * rng.standard_normal((dom.n_nodes, 2)))
        split = total_energy(beta, potentials, region=inner)
        assert split == pytest.approx(localized_energy(beta, potentials, inner), rel=1e-12)
        assert split < total_energy(beta, potentials)

    def test_frame_indifference(self, coarse_domain):
        """Test Eε(Qβ) = Eε(β) for a non-rigid β and sampled rotations Q."""
        from trilattice.model.energy import total_energy
        from trilattice.model.lattice import rotation
        from trilattice.model.potentials import QuarticPotentials
        from trilattice.model.strain import DiscreteStrain, gradient_strain

        pot = QuarticPotentials(alpha1=2.0, alpha2=3.0)
        rng = np.random.default_rng(6)
        beta = gradient_strain(coarse_domain, 0.2 * rng.standard_normal((coarse_domain.n_nodes, 2)))
        energy = total_energy(beta, pot)
        assert energy > 0.0
        for theta in rng.uniform(-math.pi, math.pi, 5):
            turned = DiscreteStrain(coarse_domain, beta.values @ rotation(theta).T)
            assert total_energy(turned, pot) == pytest.approx(energy, rel=1e-12)

    def test_localized_energy_subadditive_on_halves(self, coarse_domain, potentials):
        """Test that two half-planes never count more than the whole."""
        from trilattice.model.energy import localized_energy, total_energy
        from trilattice.model.strain import gradient_strain

        rng = np.random.default_rng(2)
        beta = gradient_strain(coarse_domain, 0.2 * rng.standard_normal((coarse_domain.n_nodes, 2)))
        left = np.array([(-2, -2), (0.01, -2), (0.01, 2), (-2, 2)], dtype=float)
        right = np.array([(0.01, -2), (2, -2), (2, 2), (0.01, 2)], dtype=float)
        parts = localized_energy(beta, potentials, left) + localized_energy(beta, potentials, right)
        assert parts <= total_energy(beta, potentials) + 1e-15

    def test_single_triangle_worked_example(self, potentials):
        """Test Ẽε = 28.5ε² and Eε = 30ε² for β = 2(j - i) on one triangle."""
        from trilattice.model.energy import continuum_density, total_energy, triangle_energy
        from trilattice.model.lattice import LatticeSpec, build_domain
        from trilattice.model.strain import DiscreteStrain

        eps = 0.5
        tri = eps * np.array([(0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3) / 2)])
        dom = build_domain(LatticeSpec(eps, tri))
        assert (dom.n_triangles, dom.n_bonds, len(dom.wedges)) == (1, 3, 3)
        beta = DiscreteStrain.from_matrix(dom, 2.0 * np.eye(2))
        assert triangle_energy(beta, dom.triangle_ids[0], potentials) == pytest.approx(28.5 * eps**2)
        assert total_energy(beta, potentials) == pytest.approx(30.0 * eps**2)
        assert total_energy(DiscreteStrain.zeros(dom), potentials) == pytest.approx(6.0 * eps**2)
        assert continuum_density(2.0 * np.eye(2), potentials) == pytest.approx(38.0 * math.sqrt(3))

    def test_energy_scales_with_epsilon_squared(self, hexagon, potentials):
        """Test that a homogeneous strain costs |Ω|W(M) in the limit."""
        from trilattice.model.energy import continuum_density, total_energy
        from trilattice.model.lattice import LatticeSpec, build_domain
        from trilattice.model.strain import DiscreteStrain
        from trilattice.utils.geometry import polygon_area

        M = np.array([[1.05, 0.0], [0.0, 1.0]])
        limit = polygon_area(hexagon) * continuum_density(M, potentials)
        dom = build_domain(LatticeSpec(1.0 / 32.0, hexagon))
        energy = total_energy(DiscreteStrain.from_matrix(dom, M), potentials)
        assert energy == pytest.approx(limit, rel=0.05)


class TestLinearization:
    """Test the Lamé moduli of W at the identity."""

    def test_lame_moduli(self, potentials):
        """Test λ = (√3/4)α₁ + 4√3α₂ and μ = (√3/4)α₁."""
        from trilattice.model.energy import linearized_tensor

        C = linearized_tensor(potentials)
        assert C.lam == pytest.approx(math.sqrt(3) / 2 + 8 * math.sqrt(3))
        assert C.mu == pytest.approx(math.sqrt(3) / 2)

    def test_lattice_symmetry(self, potentials):
        """Test W(M R(π/3)) = W(M) for sampled M."""
        from trilattice.model.energy import continuum_density
        from trilattice.model.lattice import rotation
        from trilattice.model.potentials import QuarticPotentials

        rng = np.random.default_rng(7)
        M = np.eye(2) + 0.3 * rng.standard_normal((50, 2, 2))
        for pot in (potentials, QuarticPotentials(alpha1=1.5, alpha2=0.7)):
            np.testing.assert_allclose(
                continuum_density(M @ rotation(math.pi / 3), pot), continuum_density(M, pot), rtol=1e-12
            )

    def test_positive_away_from_rotations(self, potentials):
        """Test W(M) > 0 for 1000 random M at distance at least 0.1 from SO(2)."""
        from trilattice.model.energy import continuum_density, dist_to_so2

        rng = np.random.default_rng(8)
        samples = []
        while sum(len(s) for s in samples) < 1000:
            M = np.eye(2) + 0.5 * rng.standard_normal((500, 2, 2))
            samples.append(M[dist_to_so2(M) >= 0.1])
        M = np.concatenate(samples)[:1000]
        assert len(M) == 1000
        assert np.all(continuum_density(M, potentials) > 0.0)

    def test_hessian_check_passes(self):
        """Test the finite-difference Hessian check for both potential families."""
        from trilattice.model.energy import density_hessian_check
        from trilattice.model.potentials import QuadraticPotentials, QuarticPotentials

        for pot in (QuadraticPotentials(1.5, 0.7), QuarticPotentials(2.0, 2.0)):
            report = density_hessian_check(pot, n_directions=10)
            assert report.passed, str(report)

    def test_hessian_matches_tensor(self, potentials, tensor):
        """Test that the quadratic form equals the isotropic tensor form."""
        from trilattice.model.energy import quadratic_form

        rng = np.random.default_rng(4)
        deltas = rng.standard_normal((5, 2, 2))
        np.testing.assert_allclose(quadratic_form(potentials, deltas), tensor.quadratic_form(deltas))


class TestDistanceToRotations:
    """Test the distance to SO(2)."""

    def test_rotation_and_scaling(self):
        """Test rotations, dilations and reflections."""
        from trilattice.model.energy import dist_to_so2
        from trilattice.model.lattice import rotation

        assert dist_to_so2(rotation(1.3)) == pytest.approx(0.0, abs=1e-14)
        assert dist_to_so2(2.0 * np.eye(2)) == pytest.approx(math.sqrt(2))
        assert dist_to_so2(np.diag([1.0, -1.0])) == pytest.approx(2.0)

    def test_normalized_energy(self):
        """Test the ε²|log ε| normalization."""
        from trilattice.model.energy import normalized_energy

        eps = 2.0**-6
        assert normalized_energy(eps * eps * abs(math.log(eps)), eps) == pytest.approx(1.0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
