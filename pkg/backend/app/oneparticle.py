"""
dS QFT Lab - One-Particle Space

The truncated one-particle Hilbert space H of the free field on the circle S^1 of radius r.

Vectors are FourierVectors: coefficients h_k of h in the L^2(S^1, r dpsi) basis
e_k(psi) = e^{ik psi} / sqrt(2 pi r), |k| <= K. The energy operator omega is diagonal with the
spectral weights omega~(k) and the H inner product is <h, g>_H = sum conj(h_k) g_k / (2 omega~(k)).
The functions f_k = sqrt(2 omega~(k)) e_k form an H-orthonormal basis; "H coordinates" below
are the components x_k = h_k / sqrt(2 omega~(k)) in that basis.

Also provides the two-point kernel, its singularity-graded Fourier check, the Sobolev H^{1/2}
structure with the multiplier bound, and the Cauchy-data picture (a, c) = (Re h, omega^-1 Im h)
on the uniform grid of N = 2K+1 points.
"""

import cmath
import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

import mpmath
import numpy as np
import scipy.fft
import scipy.linalg
from numpy.polynomial.legendre import leggauss
from scipy.special import digamma

from app.config import Precision, settings
from app.errors import CoincidenceError, DimensionMismatchError, DomainError
from app.errors import NonConvergenceError, NonRealResultError
from app.specfun import ModelParams, complex_loggamma, legendre_p, legendre_p_split
from app.utils import mode_indices, wrap_angle

logger = logging.getLogger(__name__)

GridFunction = Callable[[np.ndarray], np.ndarray]


# ============================================================================
# Constants
# ============================================================================

MIN_MODE_CUTOFF = 8
# Relative imaginary residue tolerated in quantities that must be real
REALITY_TOLERANCE = 1e-10

# Singularity-graded quadrature of the two-point kernel
GRADED_LEVELS = 40
GRADED_RATIO = 0.5
GAUSS_ORDER = 16
# The finer rule used to certify convergence
GAUSS_ORDER_CHECK = 20
QUADRATURE_AGREEMENT = 1e-10

# Multiplier smoothness proxy |chi_k| <= C (1 + |k|)^-4
SMOOTHNESS_POWER = 4
# Asymptotic tail assumption r omega~(k) >= 0.9 |k| beyond the truncation
TAIL_RATIO_FLOOR = 0.9


# ============================================================================
# Spectral weights
# ============================================================================

def omega_coeff(
    params: ModelParams,
    k: int,
    precision: Precision = Precision.DOUBLE,
) -> Union[float, mpmath.mpf]:
    """
    Spectral weight omega~(k) of the one-particle energy operator.

    omega~(k) = r^-1 (k+s+) G((k+s+)/2) G((k+1-s+)/2) / (G((k-s+)/2) G((k+1+s+)/2)),
    evaluated for |k| and mirrored, so omega~(-k) = omega~(k) exactly. The Gamma ratio is formed
    from log-Gamma differences so that large k stay in range.

    Args:
        params: Model parameters
        k: Mode number
        precision: DOUBLE or EXTENDED (mpmath Gamma)

    Returns:
        omega~(k) > 0

    Raises:
        GammaPoleError: propagated from the Gamma evaluations
        NonRealResultError: the raw value has relative imaginary part above 1e-10
    """
    kk = abs(int(k))
    s = params.s_plus

    if precision == Precision.EXTENDED:
        with mpmath.workdps(settings.extended_dps):
            sp = mpmath.mpc(s.real, s.imag)
            raw = (
                (kk + sp)
                * mpmath.gamma((kk + sp) / 2)
                * mpmath.gamma((kk + 1 - sp) / 2)
                / (mpmath.gamma((kk - sp) / 2) * mpmath.gamma((kk + 1 + sp) / 2))
                / params.radius
            )
            if abs(mpmath.im(raw)) > REALITY_TOLERANCE * abs(raw):
                raise NonRealResultError(f"omega~({kk}) = {raw} is not real")
            return mpmath.re(raw)

    log_value = (
        cmath.log(kk + s)
        + complex_loggamma((kk + s) / 2.0)
        + complex_loggamma((kk + 1.0 - s) / 2.0)
        - complex_loggamma((kk - s) / 2.0)
        - complex_loggamma((kk + 1.0 + s) / 2.0)
    )
    raw = cmath.exp(log_value) / params.radius
    if abs(raw.imag) > REALITY_TOLERANCE * abs(raw):
        raise NonRealResultError(f"omega~({kk}) = {raw} is not real")
    return raw.real


@dataclass(frozen=True, eq=False)
class SpectralWeights:
    """
    Diagonal symbol of omega on the modes |k| <= K.

    w is stored in mode order -K..K and is read-only after construction. params is None for
    custom profiles built with from_array (negative controls).
    """

    K: int
    w: np.ndarray
    radius: float
    params: Optional[ModelParams] = None
    label: str = ""

    def __post_init__(self):
        if self.K < MIN_MODE_CUTOFF:
            raise DomainError(f"mode cutoff K must be >= {MIN_MODE_CUTOFF}, got {self.K}")
        w = np.array(self.w, dtype=float)
        if w.shape != (2 * self.K + 1,):
            raise DimensionMismatchError(
                f"weights need {2 * self.K + 1} entries for K={self.K}, got {w.shape}"
            )
        if np.any(w <= 0):
            raise DomainError("spectral weights must be strictly positive")
        if not np.array_equal(w, w[::-1]):
            raise DomainError("spectral weights must satisfy w[-k] = w[k]")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    @classmethod
    def from_params(
        cls,
        params: ModelParams,
        K: int,
        precision: Precision = Precision.DOUBLE,
    ) -> "SpectralWeights":
        """Weights omega~(k) of the model, cached per (params, K, precision)."""
        return _spectral_weights_cached(params, int(K), Precision(precision))

    @classmethod
    def from_array(cls, w_half: np.ndarray, radius: float, label: str = "custom") -> "SpectralWeights":
        """
        Custom weight profile from its values at k = 0..K (mirrored to negative k).
        """
        half = np.asarray(w_half, dtype=float)
        full = np.concatenate([half[:0:-1], half])
        return cls(K=len(half) - 1, w=full, radius=float(radius), params=None, label=label)

    @property
    def N(self) -> int:
        return 2 * self.K + 1

    @property
    def modes(self) -> np.ndarray:
        return mode_indices(self.K)

    @property
    def half(self) -> np.ndarray:
        """Weights at k = 0..K."""
        return self.w[self.K:]

    def at(self, k: int) -> float:
        return float(self.w[int(k) + self.K])


@lru_cache(maxsize=64)
def _spectral_weights_cached(params: ModelParams, K: int, precision: Precision) -> SpectralWeights:
    half = np.array([float(omega_coeff(params, k, precision)) for k in range(K + 1)])
    full = np.concatenate([half[:0:-1], half])
    logger.debug(
        f"Spectral weights computed for zeta={params.zeta}, r={params.radius}, K={K}",
        extra={"omega_0": half[0], "omega_K": half[-1], "precision": precision.value},
    )
    return SpectralWeights(
        K=K,
        w=full,
        radius=params.radius,
        params=params,
        label=f"zeta={params.zeta}",
    )


def convexity_scan(w: SpectralWeights) -> Dict:
    """
    Second differences of k -> omega~(k) on 0 <= k <= K.

    Convexity is expected but not assumed anywhere; the scan only reports it.
    """
    half = w.half
    second = half[2:] - 2.0 * half[1:-1] + half[:-2]
    tol = 1e-12 * float(np.max(half))
    violations = np.nonzero(second < -tol)[0]
    return {
        "min_second_difference": float(np.min(second)) if second.size else 0.0,
        "is_convex": violations.size == 0,
        "first_violation": int(violations[0]) + 1 if violations.size else None,
    }


def monotonicity_defect(w: SpectralWeights) -> float:
    """Largest decrease of omega~ between consecutive k >= 0 (0 when non-decreasing)."""
    steps = np.diff(w.half)
    return float(max(0.0, -np.min(steps)))


def product_identity_defect(w: SpectralWeights) -> float:
    """
    Max relative defect of r^2 omega~(k) omega~(k+1) = k^2 + k + zeta^2 over 0 <= k < K.

    The identity follows from the Gamma recursion and holds exactly for every zeta.
    """
    if w.params is None:
        raise DomainError("product identity needs model parameters")
    k = np.arange(w.K)
    half = w.half
    exact = k * k + k + w.params.zeta ** 2
    lhs = w.radius ** 2 * half[:-1] * half[1:]
    return float(np.max(np.abs(lhs - exact) / exact))


def asymptotic_ratio(w: SpectralWeights) -> float:
    """r omega~(K) / K; tends to 1."""
    return w.radius * w.at(w.K) / w.K


def omega_table(w: SpectralWeights) -> List[Dict]:
    """Rows (k, omega) for k = -K..K."""
    return [{"k": int(k), "omega": float(value)} for k, value in zip(w.modes, w.w)]


def write_omega_csv(w: SpectralWeights, path: Union[str, Path]) -> Path:
    """Write the (k, omega) table as CSV."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["k", "omega"])
        for row in omega_table(w):
            writer.writerow([row["k"], repr(row["omega"])])
    logger.info(f"Omega table saved: {path}")
    return path


# ============================================================================
# Vectors
# ============================================================================

@dataclass(frozen=True, eq=False)
class FourierVector:
    """Element of the truncated H given by its L^2 Fourier coefficients, modes -K..K."""

    K: int
    coeff: np.ndarray

    def __post_init__(self):
        coeff = np.array(self.coeff, dtype=complex)
        if coeff.shape != (2 * self.K + 1,):
            raise DimensionMismatchError(
                f"FourierVector with K={self.K} needs {2 * self.K + 1} coefficients, "
                f"got {coeff.shape}"
            )
        object.__setattr__(self, "coeff", coeff)

    @classmethod
    def zeros(cls, K: int) -> "FourierVector":
        return cls(K, np.zeros(2 * K + 1, dtype=complex))

    @classmethod
    def basis(cls, K: int, k: int) -> "FourierVector":
        """The L^2-normalized mode e_k."""
        if abs(k) > K:
            raise DomainError(f"mode {k} outside |k| <= {K}")
        coeff = np.zeros(2 * K + 1, dtype=complex)
        coeff[k + K] = 1.0
        return cls(K, coeff)

    @classmethod
    def from_function(cls, func: GridFunction, K: int, radius: float) -> "FourierVector":
        """Trigonometric interpolant of func on the N = 2K+1 grid."""
        values = np.asarray(func(grid_angles(K)), dtype=complex)
        return cls(K, grid_to_coefficients(values, radius))

    @property
    def modes(self) -> np.ndarray:
        return mode_indices(self.K)

    def component(self, k: int) -> complex:
        return complex(self.coeff[int(k) + self.K])

    def highest_mode(self, tol: float = 0.0) -> int:
        """Largest |k| with |h_k| > tol (-1 for the zero vector)."""
        nonzero = np.nonzero(np.abs(self.coeff) > tol)[0]
        if nonzero.size == 0:
            return -1
        return int(np.max(np.abs(nonzero - self.K)))

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeff))

    def values(self, radius: float) -> np.ndarray:
        """Values on the N-point grid."""
        return coefficients_to_grid(self.coeff, radius)

    def _check(self, other: "FourierVector") -> None:
        if other.K != self.K:
            raise DimensionMismatchError(f"K mismatch: {self.K} vs {other.K}")

    def __add__(self, other: "FourierVector") -> "FourierVector":
        self._check(other)
        return FourierVector(self.K, self.coeff + other.coeff)

    def __sub__(self, other: "FourierVector") -> "FourierVector":
        self._check(other)
        return FourierVector(self.K, self.coeff - other.coeff)

    def __neg__(self) -> "FourierVector":
        return FourierVector(self.K, -self.coeff)

    def __mul__(self, scalar: complex) -> "FourierVector":
        return FourierVector(self.K, complex(scalar) * self.coeff)

    __rmul__ = __mul__


def _check_dims(w: SpectralWeights, *vectors: FourierVector) -> None:
    for v in vectors:
        if v.K != w.K:
            raise DimensionMismatchError(f"vector has K={v.K}, weights have K={w.K}")


def inner_product(w: SpectralWeights, h: FourierVector, g: FourierVector) -> complex:
    """
    H inner product <h, g>_H = sum_k conj(h_k) g_k / (2 omega~(k)), antilinear in h.

    Raises:
        DimensionMismatchError: h, g and w built for different K
    """
    _check_dims(w, h, g)
    return complex(np.sum(np.conj(h.coeff) * g.coeff / (2.0 * w.w)))


def h_norm(w: SpectralWeights, h: FourierVector) -> float:
    return math.sqrt(max(inner_product(w, h, h).real, 0.0))


def gram_matrix(w: SpectralWeights, vectors: List[FourierVector]) -> np.ndarray:
    """Gram matrix G_ij = <v_i, v_j>_H."""
    _check_dims(w, *vectors)
    X = np.array([v.coeff / np.sqrt(2.0 * w.w) for v in vectors])
    return np.conj(X) @ X.T


def to_h_coordinates(w: SpectralWeights, h: FourierVector) -> np.ndarray:
    """Components of h in the H-orthonormal basis f_k."""
    _check_dims(w, h)
    return h.coeff / np.sqrt(2.0 * w.w)


def from_h_coordinates(w: SpectralWeights, x: np.ndarray) -> FourierVector:
    return FourierVector(w.K, np.asarray(x, dtype=complex) * np.sqrt(2.0 * w.w))


def to_real(w: SpectralWeights, h: FourierVector) -> np.ndarray:
    """Real coordinates [Re x; Im x] of h, x = H coordinates. Euclidean = Re <., .>_H."""
    x = to_h_coordinates(w, h)
    return np.concatenate([x.real, x.imag])


def from_real(w: SpectralWeights, v: np.ndarray) -> FourierVector:
    v = np.asarray(v, dtype=float)
    n = w.N
    if v.shape != (2 * n,):
        raise DimensionMismatchError(f"real vector needs {2 * n} entries, got {v.shape}")
    return from_h_coordinates(w, v[:n] + 1j * v[n:])


def omega_apply(w: SpectralWeights, f: FourierVector) -> FourierVector:
    """omega acting diagonally."""
    _check_dims(w, f)
    return FourierVector(w.K, w.w * f.coeff)


def sobolev_half_norm(w: SpectralWeights, f: FourierVector) -> float:
    """
    Squared H^{1/2} norm sum_k omega~(k) |f_k|^2.

    Note this is the squared norm despite the name; <omega f, omega f>_H equals half of it.
    """
    _check_dims(w, f)
    return float(np.sum(w.w * np.abs(f.coeff) ** 2))


# ============================================================================
# Grid and Cauchy data
# ============================================================================

def grid_angles(K: int) -> np.ndarray:
    """Uniform grid psi_j = 2 pi j / N, N = 2K+1."""
    n = 2 * K + 1
    return 2.0 * np.pi * np.arange(n) / n


def grid_to_coefficients(values: np.ndarray, radius: float) -> np.ndarray:
    """
    L^2 Fourier coefficients (modes -K..K) of a grid function.

    Unitary up to the measure: sum |h_k|^2 = (2 pi r / N) sum |h(psi_j)|^2.
    """
    values = np.asarray(values, dtype=complex)
    n = values.shape[0]
    return math.sqrt(2.0 * math.pi * radius / n) * scipy.fft.fftshift(
        scipy.fft.fft(values, norm="ortho")
    )


def coefficients_to_grid(coeff: np.ndarray, radius: float) -> np.ndarray:
    coeff = np.asarray(coeff, dtype=complex)
    n = coeff.shape[0]
    return math.sqrt(n / (2.0 * math.pi * radius)) * scipy.fft.ifft(
        scipy.fft.ifftshift(coeff), norm="ortho"
    )


def l2_grid_inner(f: FourierVector, g: FourierVector, radius: float) -> complex:
    """L^2(S^1, r dpsi) inner product evaluated on the grid."""
    n = 2 * f.K + 1
    return complex(
        (2.0 * math.pi * radius / n) * np.sum(np.conj(f.values(radius)) * g.values(radius))
    )


def grid_inner_product(w: SpectralWeights, h: FourierVector, g: FourierVector) -> complex:
    """<h, g>_H through grid space: <h, (2 omega)^-1 g>_{L^2} on the N-point grid."""
    _check_dims(w, h, g)
    scaled = FourierVector(w.K, g.coeff / (2.0 * w.w))
    return l2_grid_inner(h, scaled, w.radius)


@dataclass
class CauchyData:
    """Real grid functions a = Re h and c = omega^-1 Im h on N = 2K+1 points."""

    K: int
    a: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        n = 2 * self.K + 1
        self.a = np.asarray(self.a, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        if self.a.shape != (n,) or self.c.shape != (n,):
            raise DimensionMismatchError(f"Cauchy data for K={self.K} needs {n} grid values")


def pack_cauchy(w: SpectralWeights, a: np.ndarray, c: np.ndarray) -> FourierVector:
    """
    h = a + i omega c in coefficient space.

    Raises:
        DimensionMismatchError: a or c not on the N = 2K+1 grid of w
    """
    data = CauchyData(w.K, a, c)
    a_hat = grid_to_coefficients(data.a, w.radius)
    c_hat = grid_to_coefficients(data.c, w.radius)
    return FourierVector(w.K, a_hat + 1j * w.w * c_hat)


def unpack_cauchy(w: SpectralWeights, h: FourierVector) -> CauchyData:
    """Inverse of pack_cauchy: real and imaginary parts via the reality condition."""
    _check_dims(w, h)
    reflected = np.conj(h.coeff[::-1])
    re_hat = 0.5 * (h.coeff + reflected)
    im_hat = (h.coeff - reflected) / 2j
    a = coefficients_to_grid(re_hat, w.radius).real
    c = coefficients_to_grid(im_hat / w.w, w.radius).real
    return CauchyData(w.K, a, c)


# ============================================================================
# Two-point kernel
# ============================================================================

def kernel_eval(
    params: ModelParams,
    theta: float,
    precision: Precision = Precision.DOUBLE,
) -> float:
    """
    Two-point kernel c_nu P_{s+}(-cos theta) at angular separation theta.

    Args:
        params: Model parameters
        theta: Angle psi - psi', not a multiple of 2 pi
        precision: DOUBLE or EXTENDED

    Returns:
        Real kernel value

    Raises:
        CoincidenceError: theta = 0 mod 2 pi
        NonRealResultError: imaginary residue above 1e-10 relative
    """
    reduced = wrap_angle(theta)
    if reduced < 1e-14 or 2.0 * math.pi - reduced < 1e-14:
        raise CoincidenceError(f"kernel is singular at coinciding points (theta = {theta})")

    if precision == Precision.EXTENDED:
        value = complex(legendre_p(params.s_plus, -math.cos(reduced), precision)) * params.c_nu
    else:
        half = 0.5 * reduced
        value = params.c_nu * legendre_p_split(
            params.s_plus, math.cos(half) ** 2, math.sin(half) ** 2
        )

    if abs(value.imag) > REALITY_TOLERANCE * max(abs(value), 1e-300):
        raise NonRealResultError(f"kernel({theta}) = {value} is not real")
    return value.real


def _singular_part(params: ModelParams) -> Tuple[float, float]:
    """
    (alpha, beta) with c_nu P_{s+}(-cos theta) = alpha + beta ln sin^2(theta/2) + O(theta^2 ln theta).
    """
    s = params.s_plus
    sin_term = cmath.sin(math.pi * s) / math.pi
    psi_sum = 2.0 * complex(digamma(1.0)) - complex(digamma(-s)) - complex(digamma(s + 1.0))
    alpha = -params.c_nu * sin_term * psi_sum
    beta = params.c_nu * sin_term
    return alpha.real, beta.real


def graded_nodes(
    k_max: int,
    order: int = GAUSS_ORDER,
    levels: int = GRADED_LEVELS,
    ratio: float = GRADED_RATIO,
) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Gauss-Legendre nodes on (eps, pi], geometrically graded toward theta = 0.

    Panels [pi ratio^{j+1}, pi ratio^j] for j < levels, each split so that a mode up to k_max
    oscillates little per subpanel. Returns (nodes, weights, eps) with eps = pi ratio^levels.
    """
    x, wts = leggauss(order)
    nodes: List[np.ndarray] = []
    weights: List[np.ndarray] = []
    for j in range(levels):
        hi = math.pi * ratio ** j
        lo = hi * ratio
        pieces = max(1, math.ceil(max(k_max, 1) * (hi - lo) / 2.0))
        edges = np.linspace(lo, hi, pieces + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            nodes.append(a + half * (x + 1.0))
            weights.append(half * wts)
    return np.concatenate(nodes), np.concatenate(weights), math.pi * ratio ** levels


def _kernel_values(params: ModelParams, nodes: np.ndarray) -> np.ndarray:
    return np.array([kernel_eval(params, float(theta)) for theta in nodes])


def _singular_tail(params: ModelParams, eps: float) -> float:
    """Integral of the kernel over [0, eps] from its logarithmic leading term."""
    alpha, beta = _singular_part(params)
    return alpha * eps + 2.0 * beta * (eps * math.log(eps / 2.0) - eps)


def kernel_fourier_coefficients(
    params: ModelParams,
    K: int,
    order: int = GAUSS_ORDER,
) -> np.ndarray:
    """
    q_k = int_0^{2pi} kernel(theta) e^{-ik theta} dtheta for k = 0..K (real, even in k).
    """
    nodes, weights, eps = graded_nodes(K, order=order)
    values = _kernel_values(params, nodes)
    tail = _singular_tail(params, eps)
    k = np.arange(K + 1)
    return 2.0 * (np.cos(np.outer(k, nodes)) @ (weights * values) + tail)


@dataclass
class KernelFourierReport:
    """Per-k comparison of the kernel Fourier coefficients with 1 / (2 omega~(k))."""

    K: int
    kappa: float
    kappa_radius: float
    deviations: List[float]
    coefficients: List[float]
    max_deviation: float
    quadrature_agreement: float
    node_count: int

    def to_dict(self) -> Dict:
        return {
            "K": self.K,
            "kappa": self.kappa,
            "kappa_radius": self.kappa_radius,
            "max_deviation": self.max_deviation,
            "quadrature_agreement": self.quadrature_agreement,
            "node_count": self.node_count,
            "deviations": self.deviations,
            "coefficients": self.coefficients,
        }


def kernel_fourier_check(
    params: ModelParams,
    K: int,
    precision: Precision = Precision.DOUBLE,
) -> KernelFourierReport:
    """
    Verify that the Fourier coefficients of the two-point kernel are proportional to 1/omega~.

    Computes q_k by singularity-graded quadrature (40 geometric levels toward the coincidence
    point, Gauss-Legendre order 16, analytic logarithmic tail), calibrates
    kappa = q_0 * 2 omega~(0) once and reports |q_k 2 omega~(k) - kappa| / kappa for k = 0..K.
    The kernel is even, so negative k repeat the same values.

    Args:
        params: Model parameters
        K: Largest mode checked (>= 8)
        precision: Arithmetic for omega~ (the quadrature itself is double)

    Returns:
        KernelFourierReport; kappa * r is 2 for the normalisation used here

    Raises:
        DomainError: K < 8
        NonConvergenceError: order-16 and order-20 rules disagree beyond 1e-10
    """
    if K < MIN_MODE_CUTOFF:
        raise DomainError(f"kernel_fourier_check needs K >= {MIN_MODE_CUTOFF}, got {K}")

    q = kernel_fourier_coefficients(params, K, GAUSS_ORDER)
    q_check = kernel_fourier_coefficients(params, K, GAUSS_ORDER_CHECK)
    agreement = float(np.max(np.abs(q - q_check)) / np.max(np.abs(q)))
    if agreement > QUADRATURE_AGREEMENT:
        raise NonConvergenceError(
            f"kernel quadrature not converged: order {GAUSS_ORDER} vs {GAUSS_ORDER_CHECK} "
            f"differ by {agreement:.2e}"
        )

    w = SpectralWeights.from_params(params, K, precision)
    scaled = q * 2.0 * w.half
    kappa = float(scaled[0])
    deviations = np.abs(scaled - kappa) / abs(kappa)

    nodes, _, _ = graded_nodes(K)
    report = KernelFourierReport(
        K=K,
        kappa=kappa,
        kappa_radius=kappa * params.radius,
        deviations=[float(d) for d in deviations],
        coefficients=[float(v) for v in q],
        max_deviation=float(np.max(deviations)),
        quadrature_agreement=agreement,
        node_count=int(nodes.size),
    )
    logger.info(
        f"Kernel Fourier check: K={K}, kappa*r={report.kappa_radius:.12f}, "
        f"max deviation {report.max_deviation:.3e}",
        extra={"zeta": params.zeta, "K": K, "max_deviation": report.max_deviation},
    )
    return report


def inner_product_quadrature(
    params: ModelParams,
    f: GridFunction,
    g: GridFunction,
    n_outer: int = 128,
    k_max: int = 16,
) -> complex:
    """
    Double-integral form of the inner product, independent of omega~.

    r^2 int int conj f(psi) kernel(psi - psi') g(psi') dpsi dpsi', with the outer integral on a
    uniform periodic grid and the inner one on the singularity-graded nodes (both sides of the
    coincidence point). Equals kappa * r * <F f, F g>_H for the Fourier transforms F f, F g.

    Args:
        params: Model parameters
        f, g: Vectorized callables on angles, smooth and 2 pi periodic
        n_outer: Outer grid size (exact for trigonometric integrands of lower degree)
        k_max: Highest frequency of g the inner panels must resolve
    """
    nodes, weights, eps = graded_nodes(k_max)
    values = _kernel_values(params, nodes) * weights
    tail = _singular_tail(params, eps)

    psi = 2.0 * np.pi * np.arange(n_outer) / n_outer
    shifted_minus = g(psi[:, None] - nodes[None, :])
    shifted_plus = g(psi[:, None] + nodes[None, :])
    inner = (shifted_minus + shifted_plus) @ values + 2.0 * tail * g(psi)
    outer = np.sum(np.conj(f(psi)) * inner) * (2.0 * np.pi / n_outer)
    return complex(params.radius ** 2 * outer)


# ============================================================================
# Multipliers on H^{1/2}
# ============================================================================

@dataclass
class MultiplierBound:
    """Measured H^{1/2} operator norm of a multiplication operator and its a-priori bound."""

    measured_norm: float
    bound: float
    a: float
    b: float
    l2_norm_sq: float
    sobolev_norm_sq: float
    smooth: bool
    tail_ratio: float = field(default=0.0)

    @property
    def holds(self) -> bool:
        return self.measured_norm <= self.bound * (1.0 + 1e-12)


def multiplication_matrix(w: SpectralWeights, chi: FourierVector) -> np.ndarray:
    """
    Matrix of h -> chi h on the truncated coefficient space.

    (chi h)_k = (2 pi r)^{-1/2} sum_m chi_{k-m} h_m, keeping |k|, |m| <= K.
    """
    _check_dims(w, chi)
    K = w.K
    k = mode_indices(K)
    diff = k[:, None] - k[None, :]
    inside = np.abs(diff) <= K
    C = np.zeros((w.N, w.N), dtype=complex)
    C[inside] = chi.coeff[diff[inside] + K]
    return C / math.sqrt(2.0 * math.pi * w.radius)


def smoothness_proxy(chi: FourierVector) -> bool:
    """
    |chi_k| <= C (1 + |k|)^-4 with C fixed by the modes |k| <= 2.
    """
    k = np.abs(chi.modes)
    decay = (1.0 + k) ** SMOOTHNESS_POWER
    scaled = np.abs(chi.coeff) * decay
    C = float(np.max(scaled[k <= 2]))
    return bool(np.all(scaled[k > 2] <= C * (1.0 + 1e-9) + 1e-300))


def multiplier_norm_and_bound(w: SpectralWeights, chi: FourierVector) -> MultiplierBound:
    """
    Operator norm of multiplication by chi on H^{1/2} against the a-priori bound.

    measured_norm is the largest singular value of diag(sqrt w) C diag(1/sqrt w) for the
    convolution matrix C. The bound is sqrt((1+ab) ||chi||^2_{L^2} + (ab/omega~(0)) ||chi||^2_{H^1/2})
    with a = max (w[k] - w[0]) / |k| and b = max |k| / w[k] over 1 <= |k| <= K.
    Both norms of chi use the coefficients chi_k / sqrt(2 pi r) of the function that multiplies,
    so the constant 1 gives measured norm 1 and bound sqrt(1 + ab) at every radius.

    A smoothness warning is issued (not raised) when the coefficient decay proxy fails.
    """
    _check_dims(w, chi)
    smooth = smoothness_proxy(chi)
    if not smooth:
        message = "multiplier coefficients fail the (1+|k|)^-4 decay proxy"
        logger.warning(message, extra={"K": w.K})
        warnings.warn(message, stacklevel=2)

    sqrt_w = np.sqrt(w.w)
    C = multiplication_matrix(w, chi)
    sandwiched = (sqrt_w[:, None] * C) / sqrt_w[None, :]
    measured = float(scipy.linalg.svdvals(sandwiched)[0])

    k = np.arange(1, w.K + 1)
    half = w.half
    a = float(np.max((half[1:] - half[0]) / k))
    b = float(np.max(k / half[1:]))
    scale = 2.0 * math.pi * w.radius
    l2_sq = float(np.sum(np.abs(chi.coeff) ** 2)) / scale
    sob_sq = sobolev_half_norm(w, chi) / scale
    bound = math.sqrt((1.0 + a * b) * l2_sq + (a * b / half[0]) * sob_sq)

    tail_ratio = asymptotic_ratio(w)
    if tail_ratio < TAIL_RATIO_FLOOR:
        logger.warning(
            f"r*omega(K)/K = {tail_ratio:.3f} below the assumed tail floor {TAIL_RATIO_FLOOR}",
            extra={"K": w.K},
        )

    logger.debug(
        f"Multiplier norm {measured:.6f} vs bound {bound:.6f}",
        extra={"a": a, "b": b, "smooth": smooth},
    )
    return MultiplierBound(
        measured_norm=measured,
        bound=bound,
        a=a,
        b=b,
        l2_norm_sq=l2_sq,
        sobolev_norm_sq=sob_sq,
        smooth=smooth,
        tail_ratio=tail_ratio,
    )


def near_identity_multipliers(K: int, radius: float, count: int = 20) -> List[FourierVector]:
    """
    Deterministic family of smooth near-identity multipliers chi = 1 + small smooth perturbation.

    Member j perturbs with amplitude 0.3 (j+1)/count and coefficients (1+|m|)^-4 with
    j-dependent phases.
    """
    family = []
    modes = mode_indices(K)
    unit = math.sqrt(2.0 * math.pi * radius)
    for j in range(count):
        eps = 0.3 * (j + 1) / count
        phases = np.exp(1j * (j + 1) * 0.7 * modes)
        coeff = eps * unit * phases / (1.0 + np.abs(modes)) ** SMOOTHNESS_POWER
        coeff[K] = unit
        family.append(FourierVector(K, coeff))
    return family
