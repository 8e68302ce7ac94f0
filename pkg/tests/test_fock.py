"""
dS QFT Lab - Fock Space Tests

Tests for the truncated Fock space: ladder operators, Segal fields, Wick's theorem, coherent and
Weyl vectors, second quantization, normal ordering and the interacting boost generator.
"""

import csv
import math
import tempfile
import warnings
from pathlib import Path

import numpy as np
import pytest


def _weights(zeta=1.0, radius=1.0, K=16):
    from app.oneparticle import SpectralWeights
    from app.specfun import make_params

    return SpectralWeights.from_params(make_params(zeta, radius), K)


def _local_vector(w, seed, M, norm=0.5):
    """Random vector on the modes |k| <= M with the given H norm."""
    from app.oneparticle import FourierVector, h_norm

    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal(w.N) + 1j * rng.standard_normal(w.N)
    coeff[np.abs(w.modes) > M] = 0.0
    h = FourierVector(w.K, coeff)
    return h * (norm / h_norm(w, h))


# ============================================================================
# Basis Tests
# ============================================================================

class TestFockBasis:
    """Test the configuration, the occupation basis and the ladder operators."""

    def test_dimension(self):
        """dim = C(N_max + 2M + 1, 2M + 1)."""
        from app.fock import FockConfig, fock_basis

        cfg = FockConfig(M=2, N_max=4)
        assert cfg.dim == math.comb(9, 5) == 126
        assert fock_basis(cfg).occupations.shape == (126, 5)

    @pytest.mark.parametrize("M,N_max", [(-1, 4), (2, 0)])
    def test_invalid_cutoffs(self, M, N_max):
        """M >= 0 and N_max >= 1."""
        from app.errors import DomainError
        from app.fock import FockConfig

        with pytest.raises(DomainError):
            FockConfig(M=M, N_max=N_max)

    def test_dimension_guard(self):
        """Configurations beyond the dimension limit are refused."""
        from app.errors import FockDimensionError
        from app.fock import FockConfig

        with pytest.raises(FockDimensionError):
            FockConfig(M=10, N_max=10)

    def test_ordered_by_total(self):
        """The vacuum comes first and totals never decrease."""
        from app.fock import FockConfig, fock_basis

        basis = fock_basis(FockConfig(M=1, N_max=5))
        assert basis.state((0, 0, 0)) == 0
        assert np.all(np.diff(basis.totals) >= 0)

    def test_block_size(self):
        """block_size counts the states with total <= n."""
        from app.fock import FockConfig, fock_basis

        cfg = FockConfig(M=1, N_max=5)
        totals = fock_basis(cfg).totals
        for n in range(-1, 7):
            assert cfg.block_size(n) == int(np.sum(totals <= n))

    def test_canonical_commutator(self):
        """[a_k, a*_k] = 1 below the top sector and different modes commute."""
        from app.fock import FockConfig, annihilation, creation

        cfg = FockConfig(M=1, N_max=4)
        n = cfg.block_size(cfg.N_max - 1)
        a0, a1 = annihilation(cfg, 0), annihilation(cfg, 1)
        same = (a0 @ creation(cfg, 0) - creation(cfg, 0) @ a0).toarray()
        assert np.max(np.abs(same[:n, :n] - np.eye(n))) < 1e-14
        mixed = (a0 @ creation(cfg, 1) - creation(cfg, 1) @ a0).toarray()
        assert np.max(np.abs(mixed)) < 1e-14
        assert np.max(np.abs((a0 @ a1 - a1 @ a0).toarray())) < 1e-14

    def test_number_operator(self):
        """N = sum_k a*_k a_k."""
        from app.fock import FockConfig, annihilation, creation, number_operator

        cfg = FockConfig(M=1, N_max=3)
        total = sum(creation(cfg, k) @ annihilation(cfg, k) for k in (-1, 0, 1))
        assert np.max(np.abs((total - number_operator(cfg)).toarray())) < 1e-14

    def test_mode_above_cutoff(self):
        """a_k needs |k| <= M."""
        from app.errors import CutoffError
        from app.fock import FockConfig, annihilation

        with pytest.raises(CutoffError):
            annihilation(FockConfig(M=1, N_max=2), 2)


# ============================================================================
# Field Tests
# ============================================================================

class TestFields:
    """Test a(h), a*(h) and phi(h)."""

    def test_smeared_commutator(self):
        """[a(h), a*(g)] = <h, g>_H below the top sector."""
        from app.fock import FockConfig, annihilation_field, creation_field
        from app.oneparticle import inner_product

        cfg = FockConfig(M=2, N_max=4)
        w = _weights()
        h, g = _local_vector(w, 1, 2), _local_vector(w, 2, 2)
        a = annihilation_field(cfg, w, h).matrix
        b = creation_field(cfg, w, g).matrix
        n = cfg.block_size(cfg.N_max - 1)
        comm = (a @ b - b @ a).toarray()[:n, :n]
        assert np.max(np.abs(comm - inner_product(w, h, g) * np.eye(n))) < 1e-13

    def test_annihilator_is_antilinear(self):
        """a(c h) = conj(c) a(h)."""
        from app.fock import FockConfig, annihilation_field

        cfg = FockConfig(M=1, N_max=3)
        w = _weights()
        h = _local_vector(w, 3, 1)
        c = 0.4 + 0.9j
        lhs = annihilation_field(cfg, w, h * c).dense()
        rhs = np.conj(c) * annihilation_field(cfg, w, h).dense()
        assert np.max(np.abs(lhs - rhs)) < 1e-14

    def test_field_is_hermitian(self):
        """phi(h) is self-adjoint."""
        from app.fock import FockConfig, field_operator

        w = _weights()
        phi = field_operator(FockConfig(M=2, N_max=3), w, _local_vector(w, 4, 2))
        assert phi.hermiticity_defect() < 1e-15

    def test_ccr(self):
        """[phi(h), phi(g)] = 2i Im <h, g>_H on low columns."""
        from app.fock import FockConfig, ccr_defect

        w = _weights()
        cfg = FockConfig(M=2, N_max=4)
        assert ccr_defect(cfg, w, _local_vector(w, 5, 2), _local_vector(w, 6, 2)) < 1e-12

    def test_two_point_function(self):
        """<Omega, phi(h) phi(g) Omega> = <h, g>_H."""
        from app.fock import FockConfig, two_point_function
        from app.oneparticle import inner_product

        w = _weights()
        h, g = _local_vector(w, 7, 2), _local_vector(w, 8, 2)
        value = two_point_function(FockConfig(M=2, N_max=4), w, h, g)
        assert abs(value - inner_product(w, h, g)) < 1e-13

    def test_four_point_wick(self):
        """Four-point function equals the sum over pairings at M = 2, N_max = 4."""
        from app.fock import FockConfig, field_operator, vacuum
        from app.oneparticle import inner_product

        w = _weights()
        cfg = FockConfig(M=2, N_max=4)
        hs = [_local_vector(w, 10 + i, 2) for i in range(4)]
        state = vacuum(cfg)
        for h in reversed(hs):
            state = field_operator(cfg, w, h).matrix @ state
        value = np.vdot(vacuum(cfg), state)

        def pair(i, j):
            return inner_product(w, hs[i], hs[j])

        wick = pair(0, 1) * pair(2, 3) + pair(0, 2) * pair(1, 3) + pair(0, 3) * pair(1, 2)
        assert abs(value - wick) < 1e-13

    def test_vacuum_moments(self):
        """<phi(h)^n> = (n - 1)!! ||h||^n for even n and 0 for odd n."""
        from app.fock import FockConfig, field_operator, vacuum

        w = _weights()
        cfg = FockConfig(M=1, N_max=6)
        h = _local_vector(w, 20, 1, norm=0.7)
        phi = field_operator(cfg, w, h).matrix
        omega = vacuum(cfg)
        state = omega
        for n in range(1, 7):
            state = phi @ state
            expected = 0.0 if n % 2 else math.prod(range(n - 1, 0, -2)) * 0.7 ** n
            assert abs(np.vdot(omega, state) - expected) < 1e-12

    def test_vector_above_cutoff(self):
        """Vectors with modes above M cannot be second quantized."""
        from app.errors import CutoffError
        from app.fock import FockConfig, field_operator
        from app.oneparticle import FourierVector

        w = _weights()
        with pytest.raises(CutoffError):
            field_operator(FockConfig(M=1, N_max=2), w, FourierVector.basis(w.K, 3))

    def test_fock_cutoff_above_mode_cutoff(self):
        """M may not exceed K."""
        from app.errors import DomainError
        from app.fock import FockConfig, field_operator
        from app.oneparticle import FourierVector

        w = _weights(K=8)
        with pytest.raises(DomainError):
            field_operator(FockConfig(M=9, N_max=1), w, FourierVector.basis(8, 0))


# ============================================================================
# Coherent and Weyl Tests
# ============================================================================

class TestCoherentVectors:
    """Test exponential vectors and Weyl operators."""

    def test_overlap(self):
        """<Gamma(f), Gamma(g)> equals the truncated exponential of <f, g>."""
        from app.fock import FockConfig, coherent_overlap_check

        w = _weights()
        cfg = FockConfig(M=2, N_max=4)
        assert coherent_overlap_check(cfg, w, _local_vector(w, 30, 2), _local_vector(w, 31, 2)) < 1e-12

    def test_vacuum_component(self):
        """Gamma(f) starts with the vacuum amplitude 1."""
        from app.fock import FockConfig, coherent_vector

        w = _weights()
        assert coherent_vector(FockConfig(M=1, N_max=3), w, _local_vector(w, 32, 1))[0] == 1.0

    def test_large_norm_warns(self):
        """||f|| > 1 warns and still returns the vector."""
        from app.fock import FockConfig, coherent_vector

        w = _weights()
        cfg = FockConfig(M=1, N_max=3)
        with pytest.warns(UserWarning):
            v = coherent_vector(cfg, w, _local_vector(w, 33, 1, norm=1.5))
        assert v.shape == (cfg.dim,)

    def test_small_norm_is_silent(self):
        """||f|| <= 1 does not warn."""
        from app.fock import FockConfig, coherent_vector

        w = _weights()
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            coherent_vector(FockConfig(M=1, N_max=3), w, _local_vector(w, 34, 1, norm=0.9))

    def test_vacuum_weyl(self):
        """<Omega, V(h) Omega> = exp(-||h||^2 / 2) up to truncation."""
        from app.fock import FockConfig, vacuum_weyl_check

        w = _weights()
        cfg = FockConfig(M=1, N_max=10)
        assert vacuum_weyl_check(cfg, w, _local_vector(w, 35, 1, norm=0.3)) < 1e-6

    def test_weyl_relation(self):
        """V(h) V(g) Omega = e^{-i Im<h,g>} V(h+g) Omega on low occupations."""
        from app.fock import FockConfig, weyl_check

        w = _weights()
        cfg = FockConfig(M=1, N_max=10)
        h, g = _local_vector(w, 36, 1, norm=0.3), _local_vector(w, 37, 1, norm=0.3)
        assert weyl_check(cfg, w, h, g) < 1e-4


# ============================================================================
# Second Quantization Tests
# ============================================================================

class TestSecondQuantization:
    """Test Gamma(A) and dGamma(B)."""

    def test_identity(self):
        """Gamma(1) = 1."""
        from app.fock import FockConfig, second_quantize
        from app.representation import OperatorH

        w = _weights(K=8)
        cfg = FockConfig(M=1, N_max=4)
        G = second_quantize(cfg, OperatorH(8, np.eye(17), w)).dense()
        assert np.max(np.abs(G - np.eye(cfg.dim))) < 1e-14

    def test_diagonal_shortcut(self):
        """Gamma of a rotation equals the diagonal construction."""
        from app.fock import FockConfig, second_quantize, second_quantize_diagonal
        from app.representation import rotation_operator

        w = _weights(K=8)
        cfg = FockConfig(M=2, N_max=3)
        R = rotation_operator(w, 0.8)
        phases = np.exp(-1j * np.arange(-2, 3) * 0.8)
        direct = second_quantize(cfg, R).dense()
        diagonal = second_quantize_diagonal(cfg, phases).dense()
        assert np.max(np.abs(direct - diagonal)) < 1e-13

    def test_multiplicative(self):
        """Gamma(AB) = Gamma(A) Gamma(B) for operators preserving |k| <= M."""
        from app.fock import FockConfig, second_quantize
        from app.representation import OperatorH

        w = _weights(K=8)
        cfg = FockConfig(M=1, N_max=3)
        rng = np.random.default_rng(40)
        blocks = []
        for _ in range(2):
            M = np.zeros((17, 17), dtype=complex)
            M[7:10, 7:10] = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            blocks.append(OperatorH(8, M, w))
        A, B = blocks
        lhs = second_quantize(cfg, A @ B).dense()
        rhs = second_quantize(cfg, A).dense() @ second_quantize(cfg, B).dense()
        assert np.max(np.abs(lhs - rhs)) < 1e-11 * max(1.0, np.max(np.abs(rhs)))

    def test_number_operator_is_dgamma_of_identity(self):
        """dGamma(1) = N."""
        from app.fock import FockConfig, number_operator, second_quantize_derivation
        from app.representation import OperatorH

        w = _weights(K=8)
        cfg = FockConfig(M=1, N_max=4)
        D = second_quantize_derivation(cfg, OperatorH(8, np.eye(17), w)).dense()
        assert np.max(np.abs(D - number_operator(cfg).toarray())) < 1e-14

    def test_derivation_consistency(self):
        """dGamma(B) is the derivative of Gamma(e^{sB}) at s = 0."""
        from app.fock import FockConfig, derivation_consistency
        from app.representation import OperatorH, boost_generator

        w = _weights()
        l1 = boost_generator(w)
        B = OperatorH(w.K, 1j * l1.M, w, "i l1")
        assert derivation_consistency(FockConfig(M=1, N_max=3), B) < 1e-6

    def test_gamma_of_coherent(self):
        """Gamma(A) Gamma(h) = Gamma(A h) on the truncated space."""
        from app.fock import FockConfig, gamma_coherent_defect
        from app.representation import boost_generator, boost_unitary

        w = _weights()
        A = boost_unitary(boost_generator(w), 0.4)
        assert gamma_coherent_defect(FockConfig(M=2, N_max=3), A, _local_vector(w, 41, 2)) < 1e-10

    def test_gamma_needs_weights(self):
        """Bare matrices cannot act on one-particle vectors."""
        from app.errors import DomainError
        from app.fock import FockConfig, gamma_coherent_defect
        from app.representation import OperatorH

        w = _weights(K=8)
        with pytest.raises(DomainError):
            gamma_coherent_defect(FockConfig(M=1, N_max=2), OperatorH(8, np.eye(17)), _local_vector(w, 42, 1))


# ============================================================================
# Normal Ordering Tests
# ============================================================================

class TestNormalOrdering:
    """Test :phi(h)^n: and the Hermite recursion."""

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_binomial_matches_hermite(self, n):
        """Both constructions agree below the cutoff."""
        from app.fock import FockConfig, normal_order_agreement

        w = _weights()
        cfg = FockConfig(M=1, N_max=6)
        assert normal_order_agreement(cfg, w, _local_vector(w, 50, 1), n) < 1e-12

    def test_vacuum_expectation_vanishes(self):
        """<Omega, :phi^n: Omega> = 0 for n >= 1."""
        from app.fock import FockConfig, normal_ordered_power, vacuum

        w = _weights()
        cfg = FockConfig(M=1, N_max=5)
        h = _local_vector(w, 51, 1)
        omega = vacuum(cfg)
        for n in range(1, 5):
            assert abs(np.vdot(omega, normal_ordered_power(cfg, w, h, n).matrix @ omega)) < 1e-14

    def test_first_power_is_field(self):
        """:phi^1: = phi."""
        from app.fock import FockConfig, field_operator, normal_ordered_power

        w = _weights()
        cfg = FockConfig(M=1, N_max=3)
        h = _local_vector(w, 52, 1)
        diff = normal_ordered_power(cfg, w, h, 1).dense() - field_operator(cfg, w, h).dense()
        assert np.max(np.abs(diff)) < 1e-15

    @pytest.mark.parametrize("n", [-1, 9])
    def test_degree_cap(self, n):
        """Degrees outside 0..8 are refused."""
        from app.errors import DegreeCapError
        from app.fock import FockConfig, normal_ordered_power

        w = _weights()
        with pytest.raises(DegreeCapError):
            normal_ordered_power(FockConfig(M=1, N_max=2), w, _local_vector(w, 53, 1), n)


# ============================================================================
# Interaction Tests
# ============================================================================

class TestPolynomial:
    """Test interaction polynomials."""

    def test_trailing_zeros_dropped(self):
        """Zero leading coefficients do not count toward the degree."""
        from app.fock import Polynomial

        P = Polynomial((1.0, 0.0, 2.0, 0.0, 0.0))
        assert P.degree == 2
        assert P(2.0) == 9.0

    @pytest.mark.parametrize("coefficients", [(0.0, 1.0), (0.0, 0.0, -1.0), (1.0, 0.0, 0.0, 2.0)])
    def test_not_bounded_below(self, coefficients):
        """Odd degree or a negative leading coefficient is rejected."""
        from app.errors import NotBoundedBelowError
        from app.fock import Polynomial

        with pytest.raises(NotBoundedBelowError):
            Polynomial(coefficients)

    def test_degree_cap(self):
        """Degree above 8 is rejected."""
        from app.errors import DegreeCapError
        from app.fock import Polynomial

        with pytest.raises(DegreeCapError):
            Polynomial.monomial(10)

    def test_constant_allowed(self):
        """Constants are bounded below."""
        from app.fock import Polynomial

        assert Polynomial((3.0,)).degree == 0


class TestInteraction:
    """Test the interacting boost generator."""

    def test_node_vector(self):
        """Node vectors carry modes |k| <= M only."""
        from app.fock import node_vector

        w = _weights()
        h = node_vector(w, 2, 0.5)
        assert h.highest_mode(tol=0.0) == 2
        assert abs(abs(h.component(1)) - 1.0 / math.sqrt(2 * math.pi)) < 1e-15

    def test_default_node_count(self):
        """At least 2M + 1 nodes and degree * M + 2."""
        from app.fock import default_node_count

        assert default_node_count(2, 4) == 10
        assert default_node_count(3, 0) == 7

    def test_quadratic_vacuum_expectation(self):
        """<Omega, V Omega> = 0 for a normal-ordered quadratic."""
        from app.fock import FockConfig, Polynomial, interaction_generator, vacuum

        w = _weights()
        cfg = FockConfig(M=1, N_max=4)
        V = interaction_generator(cfg, w, Polynomial.monomial(2)).matrix
        omega = vacuum(cfg)
        assert abs(np.vdot(omega, V @ omega)) < 1e-14

    def test_full_generator_hermitian(self):
        """L = dGamma(l1) + V is Hermitian."""
        from app.fock import FockConfig, Polynomial, full_generator

        w = _weights()
        L = full_generator(FockConfig(M=1, N_max=4), w, Polynomial((0.0, 0.0, 0.0, 0.0, 1.0)))
        assert L.hermiticity_defect() < 1e-12

    @pytest.mark.parametrize("m", [1, 3])
    def test_rotation_covariance(self, m):
        """Conjugating V by a node rotation shifts its weight."""
        from app.fock import FockConfig, Polynomial, rotation_covariance_defect

        w = _weights()
        defect = rotation_covariance_defect(FockConfig(M=1, N_max=4), w, Polynomial.monomial(4), m=m)
        assert defect < 1e-12

    def test_node_refinement(self):
        """Doubling the nodes does not change V below the cutoff."""
        from app.fock import FockConfig, Polynomial, node_refinement_defect

        w = _weights()
        assert node_refinement_defect(FockConfig(M=1, N_max=6), w, Polynomial.monomial(4)) < 1e-10

    def test_low_lying_spectrum(self):
        """Eigenvalues come out ascending and the CSV has one row each."""
        from app.fock import FockConfig, Polynomial, full_generator, low_lying_spectrum, write_spectrum_csv

        w = _weights()
        L = full_generator(FockConfig(M=1, N_max=3), w, Polynomial.monomial(2))
        values = low_lying_spectrum(L, 5)
        assert len(values) == 5
        assert np.all(np.diff(values) >= 0)
        with tempfile.TemporaryDirectory() as tmpdir:
            path = write_spectrum_csv(L, Path(tmpdir) / "fock.csv", 5)
            with open(path, newline="") as f:
                rows = list(csv.reader(f))
        assert rows[0] == ["index", "eigenvalue"]
        assert len(rows) == 6


class TestWickOracle:
    """Test normal-ordered powers against plain powers with the contractions removed."""

    def test_matching_counts(self):
        """Partial matchings of n points are counted by the involution numbers."""
        from app.fock import _partial_matchings

        counts = [len(list(_partial_matchings(tuple(range(n))))) for n in range(7)]
        assert counts == [1, 1, 2, 4, 10, 26, 76]

    @pytest.mark.parametrize("n", [0, 1, 2, 4])
    def test_power_matches_binomial_on_every_entry(self, n):
        """Both forms of :phi^n: agree on the whole truncated space."""
        from app.fock import FockConfig, normal_ordered_power, wick_power

        w = _weights()
        cfg = FockConfig(M=2, N_max=4)
        h = _local_vector(w, 60, 2)
        diff = normal_ordered_power(cfg, w, h, n).dense() - wick_power(cfg, w, h, n)
        assert np.max(np.abs(diff)) < 1e-12

    def test_quartic_interaction(self):
        """V for x^4 at M = 2, N_max = 4 equals the contraction-subtracted node sum."""
        from app.fock import FockConfig, Polynomial, wick_oracle_defect

        w = _weights()
        assert wick_oracle_defect(FockConfig(M=2, N_max=4), w, Polynomial.monomial(4)) < 1e-12

    def test_oracle_separates_polynomials(self):
        """The oracle tells x^4 apart from x^4 + x^2."""
        from app.fock import FockConfig, Polynomial, interaction_generator, wick_interaction

        w = _weights()
        cfg = FockConfig(M=2, N_max=4)
        V = interaction_generator(cfg, w, Polynomial.monomial(4)).dense()
        other = wick_interaction(cfg, w, Polynomial((0.0, 0.0, 1.0, 0.0, 1.0)))
        assert np.max(np.abs(V - other)) > 1e-3

    def test_degree_cap(self):
        """Degrees above 8 are refused."""
        from app.errors import DegreeCapError
        from app.fock import FockConfig, wick_power

        w = _weights()
        with pytest.raises(DegreeCapError):
            wick_power(FockConfig(M=1, N_max=2), w, _local_vector(w, 61, 1), 9)
