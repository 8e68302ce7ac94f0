"""
dS QFT Lab - Representation Module

The unitary representation of SO_0(1,2) on the truncated one-particle space: rotations,
boosts with their generator, analytic continuation of boosts, the wedge reflection Theta and
the so(1,2) structure-constant check.

Matrix convention: every OperatorH acts on H coordinates, i.e. on components in the
H-orthonormal basis f_k = sqrt(2 omega~(k)) e_k, modes -K..K.

Boost generator. cos(psi) e_k = (e_{k+1} + e_{k-1}) / 2, so for l1 = omega r cos

    <f_j, l1 f_k>_H = (r/2) sqrt(omega~(j) omega~(k))   for |j - k| = 1, and 0 otherwise.

l1 is real symmetric tridiagonal with m_k = (r/2) sqrt(omega~(k) omega~(k+1)) on both
off-diagonals; generator_by_quadrature recomputes it from grid multiplication. Rotating by
alpha multiplies the (k+1, k) entry by e^{-i alpha}, so l2 = l^(pi/2) has -i m_k there and
+i m_k at (k, k+1).

Theta. (Theta h)(psi) = conj(h(pi - psi)) reads (Theta h)_k = (-1)^k conj(h_k) in
coefficients and identically in H coordinates. It anticommutes with l1, which is the
generator form of u(Theta) e^{itl1} u(Theta) = e^{itl1}.
"""

import csv
import hashlib
import logging
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Optional, Union

import numpy as np
import scipy.fft
import scipy.linalg

from app.config import settings
from app.errors import DimensionMismatchError, DomainError, NumericalRangeError
from app.geometry import lie_generators, structure_constants
from app.oneparticle import FourierVector, SpectralWeights, from_h_coordinates
from app.oneparticle import grid_angles, to_h_coordinates
from app.utils import max_abs, mode_indices

logger = logging.getLogger(__name__)


# ============================================================================
# Operators on H
# ============================================================================

@dataclass(frozen=True, eq=False)
class OperatorH:
    """Dense operator on the truncated H, in H coordinates."""

    K: int
    M: np.ndarray
    weights: Optional[SpectralWeights] = None
    label: str = ""

    def __post_init__(self):
        n = 2 * self.K + 1
        M = np.array(self.M, dtype=complex)
        if M.shape != (n, n):
            raise DimensionMismatchError(f"OperatorH with K={self.K} needs {n}x{n}, got {M.shape}")
        M.flags.writeable = False
        object.__setattr__(self, "M", M)

    @property
    def N(self) -> int:
        return 2 * self.K + 1

    def apply(self, h: FourierVector) -> FourierVector:
        if self.weights is None:
            raise DomainError(f"operator {self.label or '?'} carries no spectral weights")
        return from_h_coordinates(self.weights, self.M @ to_h_coordinates(self.weights, h))

    def adjoint(self) -> "OperatorH":
        return OperatorH(self.K, self.M.conj().T, self.weights, f"{self.label}*")

    def __matmul__(self, other: "OperatorH") -> "OperatorH":
        if other.K != self.K:
            raise DimensionMismatchError(f"K mismatch: {self.K} vs {other.K}")
        return OperatorH(self.K, self.M @ other.M, self.weights or other.weights)

    def hermiticity_defect(self) -> float:
        return max_abs(self.M - self.M.conj().T)

    def unitarity_defect(self, margin: int = 0) -> float:
        """max |U*U - 1| on the block |k| <= K - margin."""
        block = slice(margin, self.N - margin) if margin else slice(None)
        product = self.M.conj().T @ self.M
        return max_abs(product[block, block] - np.eye(self.N)[block, block])


def rotation_apply(h: FourierVector, alpha: float) -> FourierVector:
    """u(R0(alpha)): h(psi) -> h(psi - alpha), i.e. h_k -> e^{-ik alpha} h_k."""
    return FourierVector(h.K, np.exp(-1j * h.modes * alpha) * h.coeff)


def rotation_operator(w: SpectralWeights, alpha: float) -> OperatorH:
    return OperatorH(w.K, np.diag(np.exp(-1j * w.modes * alpha)), w, f"u(R0({alpha}))")


def rotation_generator(w: SpectralWeights) -> OperatorH:
    """k0 = diag(k); u(R0(alpha)) = e^{-i alpha k0}."""
    return OperatorH(w.K, np.diag(w.modes.astype(float)), w, "k0")


def boost_offdiagonal(w: SpectralWeights) -> np.ndarray:
    """m_k = (r/2) sqrt(omega~(k) omega~(k+1)) for k = -K..K-1."""
    return 0.5 * w.radius * np.sqrt(w.w[:-1] * w.w[1:])


def boost_generator(w: SpectralWeights, alpha: float = 0.0) -> OperatorH:
    """
    Generator l^(alpha) = omega r cos(. - alpha) of the boosts R0(alpha) Lambda1(t) R0(-alpha).

    Args:
        w: Spectral weights
        alpha: Rotation angle; 0 gives l1, pi/2 gives l2 = omega r sin

    Returns:
        Hermitian tridiagonal OperatorH (real symmetric for alpha = 0)
    """
    m = boost_offdiagonal(w)
    phase = 1.0 if alpha == 0.0 else np.exp(-1j * alpha)
    M = np.zeros((w.N, w.N), dtype=complex)
    idx = np.arange(w.N - 1)
    M[idx + 1, idx] = phase * m
    M[idx, idx + 1] = np.conj(phase) * m
    return OperatorH(w.K, M, w, f"l({alpha})")


def generator_by_quadrature(
    w: SpectralWeights,
    profile: Callable[[np.ndarray], np.ndarray],
    degree: int = 1,
) -> OperatorH:
    """
    Matrix of omega * (profile multiplication) computed on an oversampled grid.

    Each basis vector f_k is sampled on a grid wide enough for modes up to K + degree, multiplied
    by the profile (a trigonometric polynomial of the given degree), transformed back and
    truncated to |k| <= K before omega and the H coordinates are applied.
    """
    K_fine = w.K + degree
    n_fine = 2 * K_fine + 1
    psi = grid_angles(K_fine)
    modes = mode_indices(w.K)
    scale = np.sqrt(2.0 * w.w) / math.sqrt(2.0 * math.pi * w.radius)
    basis_values = np.exp(1j * np.outer(psi, modes)) * scale[None, :]
    products = profile(psi)[:, None] * basis_values
    coeff = math.sqrt(2.0 * math.pi * w.radius) / n_fine * scipy.fft.fftshift(
        scipy.fft.fft(products, axis=0), axes=0
    )
    truncated = coeff[degree:degree + w.N, :]
    M = (w.w[:, None] * truncated) / np.sqrt(2.0 * w.w)[:, None]
    return OperatorH(w.K, M, w, "quadrature")


def covariance_of_rotated_boost(w: SpectralWeights, alpha: float) -> float:
    """max |l^(alpha) - omega r cos(. - alpha)| with the right side from grid multiplication."""
    direct = generator_by_quadrature(w, lambda psi: w.radius * np.cos(psi - alpha))
    return max_abs(boost_generator(w, alpha).M - direct.M)


# ============================================================================
# Spectral calculus
# ============================================================================

@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of a Hermitian OperatorH."""

    values: np.ndarray
    vectors: np.ndarray


_SPECTRUM_CACHE: "OrderedDict[str, Spectrum]" = OrderedDict()
_SPECTRUM_LOCK = threading.Lock()
SPECTRUM_CACHE_SIZE = 32


def _fingerprint(L: OperatorH) -> str:
    return hashlib.sha256(L.M.tobytes()).hexdigest()


def _is_real_tridiagonal(M: np.ndarray) -> bool:
    if np.any(M.imag != 0):
        return False
    return np.array_equal(M, np.triu(np.tril(M, 1), -1))


def spectrum(L: OperatorH) -> Spectrum:
    """
    Eigendecomposition of a Hermitian OperatorH, computed once per matrix.

    Real symmetric tridiagonal matrices (the boost generator l1) go through the tridiagonal
    solver and yield real eigenvectors.
    """
    key = _fingerprint(L)
    with _SPECTRUM_LOCK:
        cached = _SPECTRUM_CACHE.get(key)
        if cached is not None:
            _SPECTRUM_CACHE.move_to_end(key)
            return cached

        M = L.M
        if _is_real_tridiagonal(M):
            values, vectors = scipy.linalg.eigh_tridiagonal(
                np.diag(M).real, np.diag(M, -1).real
            )
        else:
            values, vectors = scipy.linalg.eigh(M)
        result = Spectrum(values, vectors)
        _SPECTRUM_CACHE[key] = result
        if len(_SPECTRUM_CACHE) > SPECTRUM_CACHE_SIZE:
            _SPECTRUM_CACHE.popitem(last=False)

    logger.debug(
        f"Spectrum of {L.label or 'operator'} computed, K={L.K}",
        extra={"min": float(values[0]), "max": float(values[-1])},
    )
    return result


def clear_spectrum_cache() -> None:
    with _SPECTRUM_LOCK:
        _SPECTRUM_CACHE.clear()


def _exp_factors(values: np.ndarray, t: complex) -> np.ndarray:
    t = complex(t)
    growth = float(np.max(-t.imag * values)) if values.size else 0.0
    if growth > math.log(settings.double_amplification_budget):
        raise NumericalRangeError(
            f"e^(itL) at t={t} amplifies by e^{growth:.1f}, beyond the double precision budget"
        )
    return np.exp(1j * t * values)


def boost_unitary(L: OperatorH, t: complex) -> OperatorH:
    """Matrix of e^{itL} (unitary for real t)."""
    spec = spectrum(L)
    factors = _exp_factors(spec.values, t)
    M = (spec.vectors * factors[None, :]) @ spec.vectors.conj().T
    return OperatorH(L.K, M, L.weights, f"exp(i{t}{L.label})")


def boost_apply(L: OperatorH, t: complex, h: FourierVector) -> FourierVector:
    """
    e^{itL} h through the cached eigendecomposition of L.

    For real t the map is unitary; for complex t the caller accepts the spectral amplification
    e^{-Im(t) lambda}.

    Raises:
        NumericalRangeError: |Im t| times the spectral radius exceeds the double budget
    """
    if L.weights is None:
        raise DomainError("boost_apply needs an operator built from spectral weights")
    spec = spectrum(L)
    x = to_h_coordinates(L.weights, h)
    y = spec.vectors.conj().T @ x
    y = _exp_factors(spec.values, t) * y
    return from_h_coordinates(L.weights, spec.vectors @ y)


def write_spectrum_csv(L: OperatorH, path: Union[str, Path]) -> Path:
    """Write the eigenvalues of L as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    values = spectrum(L).values
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "eigenvalue"])
        for i, value in enumerate(values):
            writer.writerow([i, repr(float(value))])
    logger.info(f"Spectrum saved: {path}")
    return path


# ============================================================================
# Wedge reflection
# ============================================================================

def _parity(K: int) -> np.ndarray:
    return np.where(mode_indices(K) % 2 == 0, 1.0, -1.0)


def theta_apply(h: FourierVector) -> FourierVector:
    """Anti-unitary u(Theta): h(psi) -> conj(h(pi - psi)), i.e. h_k -> (-1)^k conj(h_k)."""
    return FourierVector(h.K, _parity(h.K) * np.conj(h.coeff))


def theta_grid_defect(h: FourierVector, radius: float) -> float:
    """Compare theta_apply with conj(h(pi - psi)) evaluated directly on the grid."""
    psi = grid_angles(h.K)
    reflected = np.exp(1j * np.outer(np.pi - psi, h.modes)) @ h.coeff
    direct = np.conj(reflected) / math.sqrt(2.0 * math.pi * radius)
    return max_abs(theta_apply(h).values(radius) - direct)


def theta_boost_check(w: SpectralWeights, t: float = 0.7) -> Dict[str, float]:
    """
    Theta against the boosts it reflects.

    Returns:
        anticommutation: max |P l1 + l1 P| (Theta l1 = -l1 Theta, P = diag((-1)^k))
        unitary_commutation: max |P conj(U) P - U| for U = e^{it l1}
    """
    L = boost_generator(w)
    P = np.diag(_parity(w.K))
    U = boost_unitary(L, t).M
    return {
        "anticommutation": max_abs(P @ L.M + L.M @ P),
        "unitary_commutation": max_abs(P @ np.conj(U) @ P - U),
    }


# ============================================================================
# so(1,2) structure constants
# ============================================================================

MIN_STRUCTURE_K = 16
RELATIONS = ((0, 1), (1, 2), (2, 0))


@dataclass
class StructureReport:
    """Commutator defects of the represented so(1,2) generators on interior rows."""

    K: int
    relation_defects: Dict[str, float]
    constants: np.ndarray
    margin: int

    @property
    def max_defect(self) -> float:
        return max(self.relation_defects.values())

    def to_dict(self) -> Dict:
        return {
            "K": self.K,
            "margin": self.margin,
            "relation_defects": dict(self.relation_defects),
            "max_defect": self.max_defect,
            "structure_constants": self.constants.tolist(),
        }


def represented_generators(w: SpectralWeights) -> tuple:
    """dU(m0) = -i k0, dU(m1) = i l1, dU(m2) = i l2."""
    return (
        -1j * rotation_generator(w).M,
        1j * boost_generator(w).M,
        1j * boost_generator(w, math.pi / 2).M,
    )


def structure_constant_report(w: SpectralWeights, margin: int = 2) -> StructureReport:
    """
    Compare [dU(m_a), dU(m_b)] with dU([m_a, m_b]) for the three so(1,2) relations.

    The structure constants come from the ambient 3x3 generators of the geometry module.
    Rows |j| <= K - margin are compared; the banded products are exact there. Each row defect
    is divided by max(1, largest entry of that row of dU([m_a, m_b])).

    Raises:
        DomainError: K < 16
    """
    if w.K < MIN_STRUCTURE_K:
        raise DomainError(f"structure constant check needs K >= {MIN_STRUCTURE_K}, got {w.K}")

    constants = structure_constants(lie_generators())
    reps = represented_generators(w)
    rows = slice(margin, w.N - margin)

    defects = {}
    for a, b in RELATIONS:
        commutator = reps[a] @ reps[b] - reps[b] @ reps[a]
        image = sum(constants[a, b, c] * reps[c] for c in range(3))
        row_defect = np.max(np.abs((commutator - image)[rows, :]), axis=1)
        row_scale = np.maximum(1.0, np.max(np.abs(image[rows, :]), axis=1))
        defects[f"[m{a},m{b}]"] = float(np.max(row_defect / row_scale))

    report = StructureReport(K=w.K, relation_defects=defects, constants=constants, margin=margin)
    logger.debug(
        f"so(1,2) defects for {w.label or 'weights'}: {defects}",
        extra={"K": w.K, "max_defect": report.max_defect},
    )
    return report


def structure_constant_defect(w: SpectralWeights) -> float:
    """Largest so(1,2) commutator defect on interior rows |j| <= K - 2."""
    return structure_constant_report(w).max_defect


def negative_control_weights(K: int, radius: float, shift: float = 0.1) -> SpectralWeights:
    """Weight profile |k|/r + shift, which violates the so(1,2) relations."""
    return SpectralWeights.from_array(
        np.arange(K + 1) / radius + shift, radius, label=f"|k|/r+{shift}"
    )
