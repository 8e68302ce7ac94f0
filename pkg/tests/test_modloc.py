"""
dS QFT Lab - Modular Localization Tests

Tests for grid-mask local subspaces, symplectic complements, standardness, the Tomita identity,
finite speed of light and the net properties.
"""

import math

import numpy as np
import pytest


def _weights(zeta=1.0, radius=1.0, K=16):
    from app.oneparticle import SpectralWeights
    from app.specfun import make_params

    return SpectralWeights.from_params(make_params(zeta, radius), K)


def _vector(seed, K):
    from app.oneparticle import FourierVector

    rng = np.random.default_rng(seed)
    return FourierVector(K, rng.standard_normal(2 * K + 1) + 1j * rng.standard_normal(2 * K + 1))


# ============================================================================
# Real Coordinate Tests
# ============================================================================

class TestRealCoordinates:
    """Test the symplectic form and the complex structure in real coordinates."""

    def test_symplectic_form_is_imaginary_part(self):
        """u^T sigma v = Im <h, g>_H."""
        from app.modloc import symplectic_form
        from app.oneparticle import inner_product, to_real

        w = _weights()
        h, g = _vector(1, w.K), _vector(2, w.K)
        value = to_real(w, h) @ symplectic_form(w.N) @ to_real(w, g)
        assert abs(value - inner_product(w, h, g).imag) < 1e-12

    def test_imaginary_unit_squares_to_minus_one(self):
        """J^2 = -1 and J represents multiplication by i."""
        from app.modloc import imaginary_unit
        from app.oneparticle import to_real

        w = _weights()
        J = imaginary_unit(w.N)
        assert np.max(np.abs(J @ J + np.eye(2 * w.N))) == 0.0
        h = _vector(3, w.K)
        assert np.max(np.abs(J @ to_real(w, h) - to_real(w, h * 1j))) < 1e-14

    def test_rotation_in_real_coordinates(self):
        """rotation_real matches the coefficient rotation and is orthogonal."""
        from app.modloc import rotation_real
        from app.oneparticle import to_real
        from app.representation import rotation_apply

        w = _weights()
        R = rotation_real(w, 0.7)
        h = _vector(4, w.K)
        assert np.max(np.abs(R @ to_real(w, h) - to_real(w, rotation_apply(h, 0.7)))) < 1e-13
        assert np.max(np.abs(R.T @ R - np.eye(2 * w.N))) < 1e-13


# ============================================================================
# Local Subspace Tests
# ============================================================================

class TestLocalSubspaces:
    """Test snapping and the grid-mask subspaces H_I."""

    def test_snap_half_circle(self):
        """I_+ at K = 16 has 15 interior points and 2 boundary points."""
        from app.geometry import I_PLUS
        from app.modloc import snap_interval

        arc = snap_interval(16, I_PLUS)
        assert len(arc.interior) == 15
        assert len(arc.boundary) == 2
        assert arc.snap_distance <= math.pi / 33

    def test_snap_empty(self):
        """An arc shorter than the grid spacing holds no point."""
        from app.errors import EmptyIntervalError
        from app.geometry import Interval
        from app.modloc import snap_interval

        with pytest.raises(EmptyIntervalError):
            snap_interval(16, Interval.centered(0.05, 0.01))

    def test_dimension(self):
        """dim H_I = 2 * interior points."""
        from app.geometry import I_PLUS
        from app.modloc import snap_interval, subspace_for_interval

        w = _weights()
        S = subspace_for_interval(w, I_PLUS)
        assert S.dim == 2 * len(snap_interval(w.K, I_PLUS).interior)
        assert S.points == snap_interval(w.K, I_PLUS).interior

    def test_whole_circle(self):
        """interval None is the full space."""
        from app.modloc import subspace_for_interval

        w = _weights()
        assert subspace_for_interval(w, None).dim == 2 * w.N

    def test_basis_is_orthonormal(self):
        """Subspace bases are orthonormal in real coordinates."""
        from app.geometry import Interval
        from app.modloc import subspace_for_interval

        S = subspace_for_interval(_weights(), Interval.centered(1.0, 2.0))
        assert np.max(np.abs(S.basis.T @ S.basis - np.eye(S.dim))) < 1e-12

    def test_wrong_basis_rows(self):
        """The basis must live in the 2N-dimensional real space."""
        from app.errors import DomainError
        from app.modloc import RealSubspace

        with pytest.raises(DomainError):
            RealSubspace(8, np.zeros((10, 2)))

    def test_intersection_with_itself(self):
        """A intersected with A is A."""
        from app.geometry import I_PLUS
        from app.modloc import intersect, subspace_for_interval, two_sided_gap

        S = subspace_for_interval(_weights(), I_PLUS)
        common = intersect(S, S)
        assert common.dim == S.dim
        assert two_sided_gap(common, S) < 1e-10

    def test_gap_between_disjoint_arcs(self):
        """Subspaces of disjoint arcs are far apart."""
        from app.geometry import I_MINUS, I_PLUS
        from app.modloc import containment_gap, subspace_for_interval

        w = _weights()
        assert containment_gap(subspace_for_interval(w, I_PLUS), subspace_for_interval(w, I_MINUS)) > 0.5


# ============================================================================
# Symplectic Complement and Duality Tests
# ============================================================================

class TestDuality:
    """Test symplectic complements and wedge duality."""

    def test_complement_dimension(self):
        """dim S' = 2N - dim S."""
        from app.geometry import Interval
        from app.modloc import subspace_for_interval, symplectic_complement

        w = _weights()
        S = subspace_for_interval(w, Interval.centered(2.0, 1.5))
        assert symplectic_complement(S).dim == 2 * w.N - S.dim

    def test_complement_of_nothing(self):
        """The complement of the zero subspace is everything."""
        from app.modloc import RealSubspace, symplectic_complement

        empty = RealSubspace(8, np.zeros((34, 0)))
        assert symplectic_complement(empty).dim == 34

    def test_wedge_duality(self):
        """(H_I+)' equals H on the closed complementary arc."""
        from app.modloc import wedge_duality_report

        report = wedge_duality_report(_weights())
        assert report.exact_bookkeeping
        assert report.boundary_points == 2
        assert report.gap_opposite_in_complement < 1e-10
        assert report.gap_complement_in_closure < 1e-10
        assert report.double_complement_gap < 1e-10
        assert report.to_dict()["exact_bookkeeping"] is True

    @pytest.mark.parametrize("K", [16, 17])
    def test_duality_for_short_arc(self, K):
        """Duality holds for arcs other than the half circle, at odd and even K."""
        from app.geometry import Interval
        from app.modloc import wedge_duality_report

        report = wedge_duality_report(_weights(K=K), Interval.centered(0.7, 2.2))
        assert report.exact_bookkeeping
        assert report.gap_complement_in_closure < 1e-10


# ============================================================================
# Standardness Tests
# ============================================================================

class TestStandardness:
    """Test S intersected with iS and the codimension of S + iS."""

    def test_half_circle_is_separating(self):
        """H(I_+) meets i H(I_+) trivially; the span misses six real dimensions at even K."""
        from app.geometry import I_PLUS
        from app.modloc import standardness_check, subspace_for_interval

        w = _weights()
        intersection_dim, codim = standardness_check(subspace_for_interval(w, I_PLUS), w)
        assert intersection_dim == 0
        assert codim == 6

    @pytest.mark.parametrize("K", [16, 32, pytest.param(64, marks=pytest.mark.slow)])
    def test_intersection_stays_trivial(self, K):
        """The intersection is zero at every cutoff although the smallest angle shrinks."""
        from app.geometry import I_PLUS, Interval
        from app.modloc import grid_separating_margin, subspace_for_interval

        w = _weights(K=K)
        for arc in (I_PLUS, Interval.centered(0.0, 2.0 * math.pi / 3.0)):
            nullity, margin = grid_separating_margin(w, subspace_for_interval(w, arc).points)
            assert nullity == 0
            assert 0.0 < margin < 1.0

    def test_points_without_complement(self):
        """All grid points: omega maps nothing outside, so every point counts."""
        from app.modloc import grid_separating_margin

        w = _weights(K=8)
        assert grid_separating_margin(w, range(17)) == (17, 0.0)
        assert grid_separating_margin(w, []) == (0, 1.0)

    def test_full_space(self):
        """The full space is its own i-image, with and without weights."""
        from app.modloc import full_space, standardness_check

        assert standardness_check(full_space(8)) == (34, 0)
        assert standardness_check(full_space(8), _weights(K=8)) == (34, 0)

    def test_smallest_angle_is_positive(self):
        """The double precision angle is reported for H(I_+) and is small but positive."""
        from app.geometry import I_PLUS
        from app.modloc import smallest_angle, subspace_for_interval

        angle = smallest_angle(subspace_for_interval(_weights(), I_PLUS))
        assert 0.0 < angle < math.pi / 2

    @pytest.mark.slow
    def test_scan_rows(self):
        """The scan reports one row per cutoff with a shrinking codimension ratio."""
        from app.geometry import I_PLUS
        from app.modloc import standardness_scan

        rows = standardness_scan([_weights(K=16), _weights(K=32), _weights(K=64)], I_PLUS)
        assert [row["K"] for row in rows] == [16, 32, 64]
        assert all(row["intersection_dim"] == 0 for row in rows)
        assert all(row["span_codim"] == 6 for row in rows)
        assert rows[2]["codim_ratio"] < rows[1]["codim_ratio"] < rows[0]["codim_ratio"]
        assert rows[2]["separating_margin"] < rows[0]["separating_margin"]


# ============================================================================
# Net Property Tests
# ============================================================================

class TestNetProperties:
    """Test microcausality, covariance, isotony, additivity and double cones."""

    def test_grid_microcausality(self):
        """Basis vectors of disjoint arcs are symplectically orthogonal."""
        from app.geometry import Interval
        from app.modloc import subspace_for_interval, symplectic_form

        w = _weights()
        A = subspace_for_interval(w, Interval.centered(0.0, 1.0))
        B = subspace_for_interval(w, Interval.centered(math.pi, 1.5))
        assert np.max(np.abs(A.basis.T @ symplectic_form(w.N) @ B.basis)) < 1e-12

    def test_smooth_microcausality(self):
        """Bumps in disjoint arcs have Im <h1, h2>_H = 0."""
        from app.geometry import Interval
        from app.modloc import bump_vector, microcausality_value

        w = _weights(K=32)
        I1 = Interval.centered(0.0, 1.0)
        I2 = Interval.centered(math.pi, 1.5)
        value = microcausality_value(w, bump_vector(w, I1, 1.0, 0.5), I1, bump_vector(w, I2, 0.3, 1.0), I2)
        assert value < 1e-12

    def test_overlapping_arcs_rejected(self):
        """Microcausality needs disjoint arcs."""
        from app.errors import OverlapError
        from app.geometry import Interval
        from app.modloc import microcausality_value

        w = _weights()
        I1 = Interval.centered(0.0, 1.0)
        I2 = Interval.centered(0.4, 1.0)
        h = _vector(5, w.K)
        with pytest.raises(OverlapError):
            microcausality_value(w, h, I1, h, I2)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_covariance(self, m):
        """Grid rotations map H_I onto H of the rotated arc."""
        from app.geometry import Interval
        from app.modloc import covariance_gap

        assert covariance_gap(_weights(), Interval.centered(0.3, 1.2), m) < 1e-12

    def test_isotony(self):
        """I inside J gives H_I inside H_J."""
        from app.geometry import Interval
        from app.modloc import isotony_gap

        assert isotony_gap(_weights(), Interval.centered(0.1, 0.8), Interval.centered(0.0, 2.0)) < 1e-12

    def test_isotony_requires_nesting(self):
        """Non-nested arcs are rejected."""
        from app.errors import DomainError
        from app.geometry import Interval
        from app.modloc import isotony_gap

        with pytest.raises(DomainError):
            isotony_gap(_weights(), Interval.centered(1.5, 1.0), Interval.centered(0.0, 2.0))

    def test_additivity(self):
        """Rotations of a short arc generate H(I_+); half of them do not."""
        from app.geometry import Interval
        from app.modloc import additivity_check

        w = _weights()
        small = Interval.centered(0.0, 4.0 * 2.0 * math.pi / w.N)
        assert additivity_check(w, small) < 1e-12
        assert additivity_check(w, small, coverage=0.5) > 0.1

    def test_additivity_needs_room(self):
        """A small arc that does not fit into the big one is rejected."""
        from app.errors import DomainError
        from app.geometry import I_PLUS, Interval
        from app.modloc import additivity_check

        with pytest.raises(DomainError):
            additivity_check(_weights(), Interval.centered(0.0, 4.0), big=I_PLUS)

    def test_double_cone(self):
        """Intersecting two wedge spaces gives H of the common arc."""
        from app.modloc import double_cone_subspace

        S, gap = double_cone_subspace(_weights(), 0.4, -0.5)
        assert gap < 1e-10
        assert S.dim > 0


# ============================================================================
# Localized Vector Tests
# ============================================================================

class TestLocalizedVectors:
    """Test bumps and outside_mass."""

    def test_bump_profile(self):
        """The bump peaks at 1 in the middle and vanishes near the ends."""
        from app.geometry import Interval
        from app.modloc import smooth_bump

        arc = Interval.centered(1.0, 2.0)
        psi = np.array([1.0, 0.05, 1.95, 2.5, 4.0])
        values = smooth_bump(arc, psi)
        assert abs(values[0] - 1.0) < 1e-15
        assert np.all(values[1:] == 0.0)

    def test_bump_vector_is_localized(self):
        """Bump vectors carry no Cauchy data outside their arc."""
        from app.geometry import I_PLUS
        from app.modloc import bump_vector, outside_mass

        w = _weights(K=32)
        assert outside_mass(w, bump_vector(w, I_PLUS, 1.0, 1.0), I_PLUS) < 1e-20

    def test_sharp_bump_profile(self):
        """Sharpness keeps the peak at 1 and narrows the profile."""
        from app.geometry import Interval
        from app.modloc import smooth_bump

        arc = Interval.centered(1.0, 2.0)
        psi = np.array([1.0, 1.4])
        soft = smooth_bump(arc, psi)
        sharp = smooth_bump(arc, psi, sharpness=8.0)
        assert abs(sharp[0] - 1.0) < 1e-15
        assert 0.0 < sharp[1] < soft[1]

    def test_sharpness_must_be_positive(self):
        """A non-positive sharpness is a contract error."""
        from app.errors import DomainError
        from app.geometry import I_PLUS
        from app.modloc import smooth_bump

        with pytest.raises(DomainError):
            smooth_bump(I_PLUS, np.zeros(3), sharpness=0.0)

    def test_wedge_vector_is_localized(self):
        """The modular test vector carries no Cauchy data outside I_+."""
        from app.geometry import I_PLUS
        from app.modloc import outside_mass, wedge_vector

        w = _weights(K=48)
        assert outside_mass(w, wedge_vector(w), I_PLUS) < 1e-20

    def test_zero_vector_mass(self):
        """The zero vector has no outside mass."""
        from app.geometry import I_PLUS
        from app.modloc import outside_mass
        from app.oneparticle import FourierVector

        assert outside_mass(_weights(), FourierVector.zeros(16), I_PLUS) == 0.0


# ============================================================================
# Modular Theory Tests
# ============================================================================

class TestTomita:
    """Test the windowed Tomita identity."""

    @pytest.mark.parametrize("K", [48, 96])
    def test_wedge_vector_satisfies_identity(self, K):
        """A bump in I_+ satisfies Theta e^{-pi l1} h = h inside the window."""
        from app.modloc import tomita_residual, wedge_vector

        w = _weights(K=K)
        assert tomita_residual(w, wedge_vector(w), 6.0) < 1e-3

    def test_residual_improves_with_cutoff(self):
        """The residual does not grow as K doubles from 24 to 48 to 96."""
        from app.modloc import tomita_residual, wedge_vector

        residuals = []
        for K in (24, 48, 96):
            w = _weights(K=K)
            residuals.append(tomita_residual(w, wedge_vector(w), 6.0))
        floor = 1e-10
        assert (residuals[1] + floor) / (residuals[0] + floor) <= 1.1
        assert (residuals[2] + floor) / (residuals[1] + floor) <= 1.1

    def test_wrong_wedge_fails(self):
        """A bump in I_- violates the identity by order one."""
        from app.geometry import I_MINUS
        from app.modloc import tomita_residual, wedge_vector

        w = _weights(K=48)
        assert tomita_residual(w, wedge_vector(w, I_MINUS), 6.0) > 0.1

    def test_residual_is_window_relative(self):
        """Scaling h leaves the residual unchanged."""
        from app.modloc import tomita_residual, wedge_vector

        w = _weights(K=24)
        h = wedge_vector(w)
        assert abs(tomita_residual(w, h * 3.0, 6.0) - tomita_residual(w, h, 6.0)) < 1e-12

    def test_window_budget(self):
        """e^{pi window} beyond 1e12 is refused in double precision."""
        from app.errors import WindowTooLargeError
        from app.geometry import I_PLUS
        from app.modloc import bump_vector, tomita_residual

        w = _weights()
        with pytest.raises(WindowTooLargeError):
            tomita_residual(w, bump_vector(w, I_PLUS, 1.0, 1.0), 20.0)

    def test_window_must_be_positive(self):
        """A non-positive window is a contract error."""
        from app.errors import DomainError
        from app.geometry import I_PLUS
        from app.modloc import bump_vector, tomita_residual

        w = _weights()
        with pytest.raises(DomainError):
            tomita_residual(w, bump_vector(w, I_PLUS, 1.0, 1.0), 0.0)

    def test_extended_cutoff_limit(self):
        """The mpmath residual is limited to K <= 32."""
        from app.errors import DomainError
        from app.geometry import I_PLUS
        from app.modloc import bump_vector, tomita_residual_extended

        w = _weights(K=40)
        with pytest.raises(DomainError):
            tomita_residual_extended(w, bump_vector(w, I_PLUS, 1.0, 1.0))

    @pytest.mark.slow
    def test_extended_residual_runs(self):
        """The mpmath residual returns a finite number at K = 8."""
        from app.geometry import I_PLUS
        from app.modloc import bump_vector, tomita_residual_extended

        w = _weights(K=8)
        value = tomita_residual_extended(w, bump_vector(w, I_PLUS, 1.0, 1.0))
        assert math.isfinite(value)
        assert value >= 0.0


# ============================================================================
# Finite Speed of Light Tests
# ============================================================================

class TestFiniteSpeedOfLight:
    """Test fsl_leakage."""

    @pytest.mark.parametrize("t", [0.25, -0.5])
    def test_wedge_vector_stays_in_wedge(self, t):
        """Boosts keep a bump in I_+ inside I_+."""
        from app.geometry import I_PLUS
        from app.modloc import bump_vector, fsl_leakage

        w = _weights(K=128)
        assert fsl_leakage(w, I_PLUS, bump_vector(w, I_PLUS, 1.0, 1.0), t) < 1e-6

    @pytest.mark.parametrize("K", [64, 128])
    def test_half_length_control_leaks(self, K):
        """Only the half-length arc cuts into the boosted bump; the 95% arc still holds it."""
        from app.geometry import Interval
        from app.modloc import bump_vector, fsl_leakage

        w = _weights(K=K)
        sub = Interval.centered(0.0, math.pi / 2)
        h = bump_vector(w, sub, 1.0, 0.5)
        assert fsl_leakage(w, sub, h, 0.3) < 1e-5
        assert fsl_leakage(w, sub, h, 0.3, shrink=0.95) < 1e-4
        assert fsl_leakage(w, sub, h, 0.3, shrink=0.5) > 0.1

    def test_rapidity_limit(self):
        """|t| > 1 is outside the supported range."""
        from app.errors import DomainError
        from app.geometry import I_PLUS
        from app.modloc import bump_vector, fsl_leakage

        w = _weights()
        with pytest.raises(DomainError):
            fsl_leakage(w, I_PLUS, bump_vector(w, I_PLUS, 1.0, 1.0), 1.5)

    def test_requires_localized_vector(self):
        """Vectors with mass outside I are rejected."""
        from app.errors import DomainError
        from app.geometry import I_MINUS, I_PLUS
        from app.modloc import bump_vector, fsl_leakage

        w = _weights()
        with pytest.raises(DomainError):
            fsl_leakage(w, I_PLUS, bump_vector(w, I_MINUS, 1.0, 1.0), 0.3)
