"""Tests for the scaling, thin-annulus and ψ convergence studies."""

import math

import numpy as np
import pytest


class TestThinAnnulus:
    """Test the rotating-ramp demonstration."""

    def test_energy_and_averages(self):
        """Test ε² energy scaling, exact inner averages and non-vanishing outer error."""
        from trilattice.harness.thin_annulus import thin_annulus_demo

        result = thin_annulus_demo(2.0, (1 / 16, 1 / 32, 1 / 64))
        assert result.exponent == pytest.approx(2.0, abs=1e-6)
        for row in result.rows:
            assert row.inner_average_error < 1e-12
        assert result.rows[-1].outer_average_error > 0.5

    def test_l2_distance_halves(self):
        """Test that the L² distance to R(1) is proportional to ε."""
        from trilattice.harness.thin_annulus import thin_annulus_demo

        rows = thin_annulus_demo(2.0, (1 / 16, 1 / 32, 1 / 64)).rows
        for coarse, fine in zip(rows, rows[1:]):
            assert fine.relative_l2_distance == pytest.approx(0.5 * coarse.relative_l2_distance, rel=1e-6)

    def test_arguments_checked(self):
        """Test that M <= 1 and oversized ramps are rejected."""
        from trilattice.errors import ArgumentError
        from trilattice.harness.thin_annulus import thin_annulus_demo

        with pytest.raises(ArgumentError):
            thin_annulus_demo(1.0, (0.01,))
        with pytest.raises(ArgumentError):
            thin_annulus_demo(4.0, (0.2,))

    def test_ramp_is_rotation_outside(self):
        """Test that the ramp gradient is Id inside and R(1) outside."""
        from trilattice.harness.thin_annulus import RampField
        from trilattice.model.lattice import rotation

        ramp = RampField(2.0, 0.05)
        np.testing.assert_allclose(ramp(np.array([0.05, 0.02])), np.eye(2))
        np.testing.assert_allclose(ramp(np.array([0.0, 0.5])), rotation(1.0), atol=1e-15)


class TestPsiStudy:
    """Test convergence of ψ_{1,r} to ψ."""

    def test_residual_decays_like_inverse_log(self, tensor):
        """Test decreasing residuals with residual·log r nearly constant."""
        from trilattice.harness.convergence import psi_convergence_study

        study = psi_convergence_study((1.0, 0.0), tensor, (10.0, 100.0, 1000.0))
        assert study.residuals_decrease
        assert study.rate_spread < 0.25
        assert study.reference == pytest.approx(tensor.self_energy_coefficient, rel=1e-10)

    def test_ratios_checked(self, tensor):
        """Test that ratios must increase and exceed 1."""
        from trilattice.errors import ArgumentError
        from trilattice.harness.convergence import psi_convergence_study

        with pytest.raises(ArgumentError):
            psi_convergence_study((1.0, 0.0), tensor, (100.0, 10.0))
        with pytest.raises(ArgumentError):
            psi_convergence_study((1.0, 0.0), tensor, (1.0, 10.0))


class TestLimitValue:
    """Test the Γ-limit value of a layout."""

    def test_single_unit_dislocation(self, hexagon, tensor):
        """Test that one e₁ dislocation without far field costs ψ(e₁)."""
        from trilattice.harness.scaling import gamma_limit_value
        from trilattice.model.strain import Dislocation

        value = gamma_limit_value((Dislocation((0.0, 0.0), (1, 0)),), hexagon, tensor=tensor)
        assert value == pytest.approx(tensor.self_energy_coefficient, rel=1e-10)

    def test_far_field_energy(self, hexagon, tensor):
        """Test that a linear far field costs |Ω|·½𝐂M:M."""
        from trilattice.harness.scaling import far_field_energy
        from trilattice.recovery.constructor import LinearFarField

        M = np.array([[0.02, 0.01], [0.01, -0.03]])
        expected = 1.5 * math.sqrt(3) * 0.5 * float(tensor.quadratic_form(M))
        assert far_field_energy(hexagon, LinearFarField(M), tensor) == pytest.approx(expected, rel=1e-12)

    def test_frame_burgers(self):
        """Test that rotated Burgers vectors map back to lattice coordinates."""
        from trilattice.errors import ArgumentError
        from trilattice.harness.scaling import _frame_burgers
        from trilattice.model.lattice import lattice_vector, rotation

        theta = 0.3
        assert _frame_burgers(rotation(theta) @ lattice_vector((2, -1)), theta) == (2, -1)
        with pytest.raises(ArgumentError):
            _frame_burgers(np.array([0.5, 0.0]), 0.0)


class TestScaling:
    """Test scaling rows along an ε-ladder."""

    def test_rows_without_minimization(self, hexagon):
        """Test row order, node counts and the shared limit value."""
        from trilattice.harness.scaling import ScalingStudy, run_scaling
        from trilattice.model.energy import normalized_energy
        from trilattice.model.strain import Dislocation

        study = ScalingStudy(hexagon, (Dislocation((0.0, 0.0), (1, 0)),), epsilons=(1 / 16, 1 / 32), minimize=False)
        rows = run_scaling(study)
        assert [r.epsilon for r in rows] == [1 / 16, 1 / 32]
        assert rows[0].n_nodes < rows[1].n_nodes
        for row in rows:
            assert row.gamma_limit == pytest.approx(study.tensor.self_energy_coefficient, rel=1e-10)
            assert row.recovery_energy > 0.0
            assert row.minimized_energy == row.recovery_energy
            assert row.recovery_normalized == pytest.approx(normalized_energy(row.recovery_energy, row.epsilon))
            assert row.converged

    def test_empty_ladder(self, hexagon):
        """Test that an empty ladder is rejected."""
        from trilattice.errors import ArgumentError
        from trilattice.harness.scaling import ScalingStudy

        with pytest.raises(ArgumentError):
            ScalingStudy(hexagon, (), epsilons=())

    def test_monotone_majority(self):
        """Test the majority trend check."""
        from trilattice.harness.scaling import monotone_majority

        assert monotone_majority([5.0, 4.0, 3.0, 3.5, 2.0])
        assert not monotone_majority([1.0, 2.0, 3.0, 2.5])
        assert monotone_majority([1.0, 2.0, 3.0], decreasing=False)
        assert monotone_majority([1.0])


class TestPlotting:
    """Test SVG output."""

    def test_psi_plot_is_reproducible(self, tensor, tmp_path):
        """Test that plotting twice writes identical bytes."""
        from trilattice.harness.convergence import psi_convergence_study
        from trilattice.harness.plotting import plot_psi_study

        study = psi_convergence_study((1.0, 0.0), tensor, (10.0, 100.0))
        a = plot_psi_study(study, tmp_path / "a.svg")
        b = plot_psi_study(study, tmp_path / "b.svg")
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes().lstrip().startswith(b"<?xml")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
