"""Tests for discrete strains, circulations, Burgers measures and averages."""

import math

import numpy as np
import pytest


def _random_displacement(dom, seed=0, scale=0.1):
    rng = np.random.default_rng(seed)
    return scale * rng.standard_normal((dom.n_nodes, 2))


class TestDiscreteStrain:
    """Test strain storage and antisymmetry."""

    def test_antisymmetric_access(self, coarse_domain):
        """Test that β(j, i) = -β(i, j)."""
        from trilattice.model.strain import gradient_strain

        beta = gradient_strain(coarse_domain, _random_displacement(coarse_domain))
        i, j = (int(v) for v in coarse_domain.bonds[5])
        np.testing.assert_allclose(beta.value(j, i), -beta.value(i, j))

    def test_shape_checked(self, coarse_domain):
        """Test that a wrongly shaped value array is rejected."""
        from trilattice.errors import ArgumentError
        from trilattice.model.strain import DiscreteStrain

        with pytest.raises(ArgumentError):
            DiscreteStrain(coarse_domain, np.zeros((3, 2)))

    def test_gradient_strain_is_compatible(self, coarse_domain):
        """Test that gradients have zero circulation on every triangle."""
        from trilattice.model.lattice import rotation
        from trilattice.model.strain import circulations, gradient_strain

        beta = gradient_strain(coarse_domain, _random_displacement(coarse_domain), rotation(0.4))
        assert np.max(np.abs(circulations(beta))) < 1e-14

    def test_boundary_circulation_sums_triangles(self, coarse_domain):
        """Test the discrete Stokes identity Σ dβ(T) = circulation along the boundary."""
        from trilattice.model.strain import DiscreteStrain, boundary_circulation, circulations

        rng = np.random.default_rng(3)
        beta = DiscreteStrain(coarse_domain, rng.standard_normal((coarse_domain.n_bonds, 2)))
        np.testing.assert_allclose(circulations(beta).sum(axis=0), boundary_circulation(beta), atol=1e-12)


class TestTriangleMatrix:
    """Test recovery of piecewise-constant matrices."""

    def test_homogeneous_strain(self, coarse_domain):
        """Test that a homogeneous strain gives its matrix on every triangle."""
        from trilattice.model.strain import DiscreteStrain, triangle_matrices, triangle_matrix

        M = np.array([[1.1, 0.2], [-0.3, 0.9]])
        beta = DiscreteStrain.from_matrix(coarse_domain, M)
        np.testing.assert_allclose(triangle_matrices(beta), np.broadcast_to(M, (coarse_domain.n_triangles, 2, 2)))
        result = triangle_matrix(beta, 7)
        np.testing.assert_allclose(result.matrix, M)
        assert result.triangle == coarse_domain.triangle_ids[7]

    def test_incompatible_triangle(self, coarse_domain):
        """Test that a nonzero circulation raises NotCompatibleError."""
        from trilattice.errors import NotCompatibleError
        from trilattice.model.strain import DiscreteStrain, triangle_matrix

        beta = DiscreteStrain.from_matrix(coarse_domain, np.eye(2))
        b = int(coarse_domain.tri_bonds[0, 0])
        beta.values[b] += (0.05, 0.0)
        with pytest.raises(NotCompatibleError):
            triangle_matrix(beta, 0)


class TestBurgersMeasure:
    """Test extraction of dislocations from circulations."""

    def test_single_slipped_bond(self, coarse_domain):
        """Test that slipping one interior bond creates a dipole of lattice vectors."""
        from trilattice.model.strain import burgers_measure, gradient_strain

        dom = coarse_domain
        slip = np.zeros((dom.n_bonds, 2))
        interior = int(np.flatnonzero(dom.bond_triangle_count == 2)[0])
        slip[interior] = (1.0, 0.0)
        beta = gradient_strain(dom, np.zeros((dom.n_nodes, 2)), slip=slip)

        atoms = burgers_measure(beta)
        assert len(atoms) == 2
        assert sorted(a.burgers for a in atoms) == [(-1, 0), (1, 0)]
        np.testing.assert_allclose(sum(a.weight for a in atoms), 0.0, atol=1e-15)

    def test_non_lattice_circulation_reported_raw(self, coarse_domain):
        """Test that circulations off the lattice keep burgers=None."""
        from trilattice.model.strain import DiscreteStrain, burgers_measure

        beta = DiscreteStrain.from_matrix(coarse_domain, np.eye(2))
        b = int(np.flatnonzero(coarse_domain.bond_triangle_count == 2)[0])
        beta.values[b] += (0.3 * coarse_domain.epsilon, 0.0)
        atoms = burgers_measure(beta)
        assert len(atoms) == 2
        assert all(a.burgers is None for a in atoms)

    def test_snap_weight_rotated_frame(self):
        """Test snapping in a rotated lattice."""
        from trilattice.model.lattice import lattice_vector, rotation
        from trilattice.model.strain import snap_weight

        eps, frame = 0.1, 0.25
        weight = eps * rotation(frame) @ lattice_vector((1, 1)) + 1e-9
        snapped, coords = snap_weight(weight, eps, frame)
        assert coords == (1, 1)
        np.testing.assert_allclose(snapped, eps * rotation(frame) @ lattice_vector((1, 1)))


class TestDislocationMeasure:
    """Test dislocation measures and separation checks."""

    def test_weights(self):
        """Test that weights are ε·Rb."""
        from trilattice.model.lattice import rotation
        from trilattice.model.strain import Dislocation, DislocationMeasure

        mu = DislocationMeasure((Dislocation((0.1, 0.2), (0, 1), math.pi / 3),), 0.01)
        expected = 0.01 * rotation(math.pi / 3) @ np.array([0.5, math.sqrt(3) / 2])
        np.testing.assert_allclose(mu.weights()[0], expected)

    def test_gamma_range(self):
        """Test that γ must lie in (0, 1)."""
        from trilattice.errors import ArgumentError
        from trilattice.model.strain import DislocationMeasure

        with pytest.raises(ArgumentError):
            DislocationMeasure((), 0.01, 1.5)

    def test_separation_violation_lists_everything(self, hexagon):
        """Test that close pairs and boundary-near atoms are all reported."""
        from trilattice.errors import SeparationViolation
        from trilattice.model.strain import Dislocation, DislocationMeasure

        mu = DislocationMeasure(
            (
                Dislocation((0.0, 0.0), (1, 0)),
                Dislocation((0.1, 0.0), (-1, 0)),
                Dislocation((0.8, 0.0), (0, 1)),
            ),
            epsilon=1.0 / 64.0,
        )
        with pytest.raises(SeparationViolation) as info:
            mu.validate(hexagon)
        assert [(a, b) for a, b, _ in info.value.pairs] == [(0, 1)]
        assert [n for n, _ in info.value.boundary] == [2]


class TestAnnulusAverage:
    """Test annulus averages of strain fields."""

    def test_homogeneous_piecewise_field(self, coarse_domain):
        """Test that a constant field averages to itself."""
        from trilattice.model.strain import DiscreteStrain, annulus_average, piecewise_field

        M = np.array([[1.0, 0.1], [0.0, 1.0]])
        field = piecewise_field(DiscreteStrain.from_matrix(coarse_domain, M))
        np.testing.assert_allclose(annulus_average(field, (0.0, 0.0), 0.2, 0.6), M, atol=1e-12)

    def test_callable_field(self):
        """Test the quadrature average of a linear field."""
        from trilattice.model.strain import annulus_average

        def field(x):
            out = np.zeros(x.shape[:-1] + (2, 2))
            out[..., 0, 0] = 1.0 + x[..., 0]
            out[..., 1, 1] = 2.0
            return out

        avg = annulus_average(field, (0.5, 0.0), 0.1, 0.3)
        np.testing.assert_allclose(avg, [[1.5, 0.0], [0.0, 2.0]], atol=1e-12)

    def test_distance_to_frame_group(self):
        """Test the distance to the six lattice rotations in a frame."""
        from trilattice.model.lattice import rotation
        from trilattice.model.strain import distance_to_frame_group

        assert distance_to_frame_group(rotation(0.2 + math.pi / 3), 0.2) == pytest.approx(0.0, abs=1e-12)
        assert distance_to_frame_group(np.eye(2), math.pi / 6) > 0.5


class TestStrainFiles:
    """Test strain and measure CSV files."""

    def test_strain_csv(self, coarse_domain, tmp_path):
        """Test writing and reading a strain file."""
        from trilattice.model.strain import gradient_strain, read_strain_csv, write_strain_csv

        beta = gradient_strain(coarse_domain, _random_displacement(coarse_domain))
        write_strain_csv(beta, tmp_path / "beta.csv")
        back = read_strain_csv(coarse_domain, tmp_path / "beta.csv")
        np.testing.assert_array_equal(back.values, beta.values)

    def test_strain_csv_missing_bond(self, coarse_domain, tmp_path):
        """Test that a file missing a bond is rejected."""
        from trilattice.errors import ArgumentError
        from trilattice.model.strain import gradient_strain, read_strain_csv, write_strain_csv

        path = tmp_path / "beta.csv"
        write_strain_csv(gradient_strain(coarse_domain, np.zeros((coarse_domain.n_nodes, 2))), path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(ArgumentError):
            read_strain_csv(coarse_domain, path)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
