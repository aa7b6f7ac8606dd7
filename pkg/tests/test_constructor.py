"""Tests for recovery strains: snapping, slip, displacement and admissibility."""

import math

import numpy as np
import pytest


class TestCutoff:
    """Test the C¹ cutoff."""

    def test_values_and_slopes(self):
        """Test plateau, zero region and matching derivatives at 1 and 2."""
        from trilattice.recovery.constructor import cutoff

        assert cutoff(0.3) == 1.0
        assert cutoff(1.0) == 1.0
        assert cutoff(1.5) == pytest.approx(0.5)
        assert cutoff(2.0) == pytest.approx(0.0)
        assert cutoff(3.0) == 0.0
        h = 1e-7
        for s in (1.0, 2.0):
            assert (cutoff(s + h) - cutoff(s - h)) / (2 * h) == pytest.approx(0.0, abs=1e-5)


class TestSnapping:
    """Test moving dislocations to triangle barycenters."""

    def test_tie_goes_to_smallest_triangle(self, fine_domain, single_dislocation):
        """Test that a dislocation on a node snaps to the lexicographically smallest triangle."""
        from trilattice.model.lattice import NodeId, Orientation, TriangleId
        from trilattice.recovery.constructor import snap_positions

        snapped = snap_positions(single_dislocation, fine_domain)
        k = fine_domain.triangle_index(TriangleId(NodeId(-1, 0), Orientation.UP))
        np.testing.assert_allclose(snapped.positions[0], fine_domain.barycenters[k])

    def test_nearest_barycenter(self, fine_domain):
        """Test that a generic point snaps to the barycenter of its triangle."""
        from trilattice.model.strain import Dislocation, DislocationMeasure
        from trilattice.recovery.constructor import snap_positions

        mu = DislocationMeasure((Dislocation((0.101, 0.0137), (0, 1)),), fine_domain.epsilon)
        snapped = snap_positions(mu, fine_domain).positions[0]
        dist = np.linalg.norm(fine_domain.barycenters - np.array([0.101, 0.0137]), axis=1)
        np.testing.assert_allclose(snapped, fine_domain.barycenters[np.argmin(dist)])

    def test_separation_checked(self, fine_domain):
        """Test that a dislocation too close to the boundary is rejected."""
        from trilattice.errors import SeparationViolation
        from trilattice.model.strain import Dislocation, DislocationMeasure
        from trilattice.recovery.constructor import snap_positions

        mu = DislocationMeasure((Dislocation((0.7, 0.0), (1, 0)),), fine_domain.epsilon)
        with pytest.raises(SeparationViolation):
            snap_positions(mu, fine_domain)


class TestSlip:
    """Test slip along horizontal cuts."""

    def test_circulation_of_slip(self, fine_domain, single_dislocation):
        """Test that the slip alone creates exactly one atom εξ at the snapped core."""
        from trilattice.model.strain import burgers_measure, gradient_strain
        from trilattice.recovery.constructor import build_slip, snap_positions

        snapped = snap_positions(single_dislocation, fine_domain)
        slip = build_slip(snapped, fine_domain)
        beta = gradient_strain(fine_domain, np.zeros((fine_domain.n_nodes, 2)), slip=slip.values)
        atoms = burgers_measure(beta)
        assert len(atoms) == 1
        assert atoms[0].burgers == (1, 0)
        np.testing.assert_allclose(atoms[0].position, snapped.positions[0])
        np.testing.assert_allclose(atoms[0].weight, [fine_domain.epsilon, 0.0])

    def test_cut_reaches_boundary(self, fine_domain, single_dislocation):
        """Test that slipped bonds all lie to the right of the core."""
        from trilattice.recovery.constructor import build_slip, snap_positions

        snapped = snap_positions(single_dislocation, fine_domain)
        slip = build_slip(snapped, fine_domain)
        support = slip.support
        mid = 0.5 * (fine_domain.positions[fine_domain.bonds[support, 0]]
                     + fine_domain.positions[fine_domain.bonds[support, 1]])
        assert np.all(mid[:, 0] > snapped.positions[0, 0])
        # One crossed bond per half lattice spacing along the cut
        length = 1.0 - snapped.positions[0, 0]
        assert abs(len(support) - 2 * length / fine_domain.epsilon) <= 3


class TestBuildRecovery:
    """Test the assembled recovery strain."""

    def test_burgers_measure_is_snapped_measure(self, fine_domain, single_dislocation, tensor):
        """Test that the recovery carries exactly the prescribed dislocation."""
        from trilattice.model.strain import burgers_measure
        from trilattice.recovery.constructor import RecoveryInput, build_recovery

        rec = build_recovery(RecoveryInput(single_dislocation, tensor=tensor), fine_domain)
        atoms = burgers_measure(rec.beta)
        assert [a.burgers for a in atoms] == [(1, 0)]
        np.testing.assert_allclose(atoms[0].position, rec.measure.positions[0])

    def test_admissible(self, fine_domain, single_dislocation, tensor):
        """Test that the recovery passes the admissibility check."""
        from trilattice.model.strain import check_admissible
        from trilattice.recovery.constructor import RecoveryInput, build_recovery

        rec = build_recovery(RecoveryInput(single_dislocation, tensor=tensor), fine_domain)
        report = check_admissible(rec.beta, rec.measure)
        assert report.measure_matches
        assert report.passed, report.summary()
        assert not report.extra

    def test_strain_close_to_lattice_away_from_core(self, fine_domain, single_dislocation, tensor):
        """Test that bonds far from the core stay within ten percent of ε."""
        from trilattice.recovery.constructor import RecoveryInput, build_recovery

        rec = build_recovery(RecoveryInput(single_dislocation, tensor=tensor), fine_domain)
        dom = fine_domain
        mid = 0.5 * (dom.positions[dom.bonds[:, 0]] + dom.positions[dom.bonds[:, 1]])
        far = np.linalg.norm(mid - rec.measure.positions[0], axis=1) > 0.4
        stretch = np.linalg.norm(rec.beta.values[far], axis=1) / dom.epsilon
        assert np.max(np.abs(stretch - 1.0)) < 0.1

    def test_rotated_frame(self, fine_domain, tensor):
        """Test a dislocation in a rotated global frame."""
        from trilattice.model.lattice import rotation
        from trilattice.model.strain import Dislocation, DislocationMeasure, burgers_measure
        from trilattice.recovery.constructor import RecoveryInput, build_recovery

        theta = 0.2
        mu = DislocationMeasure((Dislocation((0.05, -0.03), (0, 1), theta),), fine_domain.epsilon)
        rec = build_recovery(RecoveryInput(mu, theta=theta, tensor=tensor), fine_domain)
        atoms = burgers_measure(rec.beta, frame=theta)
        assert [a.burgers for a in atoms] == [(0, 1)]
        expected = fine_domain.epsilon * rotation(theta) @ np.array([0.5, math.sqrt(3) / 2])
        np.testing.assert_allclose(atoms[0].weight, expected, atol=1e-12)

    def test_far_field(self, fine_domain, single_dislocation, tensor):
        """Test that a linear far field leaves the Burgers measure unchanged."""
        from trilattice.model.strain import burgers_measure
        from trilattice.recovery.constructor import LinearFarField, RecoveryInput, build_recovery

        far = LinearFarField(np.array([[0.01, 0.0], [0.0, -0.01]]))
        rec = build_recovery(RecoveryInput(single_dislocation, far_field=far, tensor=tensor), fine_domain)
        assert [a.burgers for a in burgers_measure(rec.beta)] == [(1, 0)]

    def test_dipole(self, hexagon, tensor):
        """Test a dislocation dipole with overlapping cuts."""
        from trilattice.model.lattice import LatticeSpec, build_domain
        from trilattice.model.strain import Dislocation, DislocationMeasure, burgers_measure
        from trilattice.recovery.constructor import RecoveryInput, build_recovery

        eps = 1.0 / 32.0
        dom = build_domain(LatticeSpec(eps, hexagon))
        mu = DislocationMeasure(
            (Dislocation((-0.44, 0.0), (1, 0)), Dislocation((0.44, 0.0), (-1, 0))),
            eps,
        )
        rec = build_recovery(RecoveryInput(mu, tensor=tensor), dom)
        atoms = sorted(burgers_measure(rec.beta), key=lambda a: a.position[0])
        assert [a.burgers for a in atoms] == [(1, 0), (-1, 0)]

    def test_epsilon_mismatch(self, coarse_domain, single_dislocation):
        """Test that the measure and lattice spacings must agree."""
        from trilattice.errors import ArgumentError
        from trilattice.recovery.constructor import RecoveryInput, build_recovery

        with pytest.raises(ArgumentError):
            build_recovery(RecoveryInput(single_dislocation), coarse_domain)


class TestFarFields:
    """Test far-field potentials."""

    def test_quadratic_gradient(self):
        """Test the quadratic far-field gradient against differences."""
        from trilattice.recovery.constructor import QuadraticFarField

        H = np.zeros((2, 2, 2))
        H[0] = [[0.2, 0.1], [0.1, -0.3]]
        H[1] = [[0.0, 0.4], [0.4, 0.5]]
        far = QuadraticFarField(np.array([[0.1, 0.0], [0.2, -0.1]]), H)
        x = np.array([0.3, -0.2])
        h = 1e-6
        fd = np.column_stack([
            (far.displacement(x + h * e) - far.displacement(x - h * e)) / (2 * h)
            for e in np.eye(2)
        ])
        np.testing.assert_allclose(far.gradient(x), fd, atol=1e-8)

    def test_asymmetric_hessian_rejected(self):
        """Test that a hessian not symmetric in its last indices is rejected."""
        from trilattice.errors import ArgumentError
        from trilattice.recovery.constructor import QuadraticFarField

        H = np.zeros((2, 2, 2))
        H[0, 0, 1] = 1.0
        with pytest.raises(ArgumentError):
            QuadraticFarField(np.zeros((2, 2)), H)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
