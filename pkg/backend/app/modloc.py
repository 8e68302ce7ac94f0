"""
dS QFT Lab - Modular Localization Module

Local real subspaces of the truncated one-particle space and the checks built on them.

H_I is realized by grid masks: the span of pack_cauchy(delta_j, 0) and pack_cauchy(0, delta_j)
over the grid points j strictly inside the arc I (endpoints snapped to the nearest grid point,
boundary points excluded). On the grid

    Im <h1, h2>_H = (pi r / N) sum_j (a1 c2 - c1 a2)(psi_j),

so symplectic complements of grid masks are again grid masks; duality, microcausality and
additivity hold exactly, and truncation error only enters through boosts and the modular
continuation.

Real coordinates are [Re x; Im x] for the H coordinates x, so the Euclidean product is
Re <., .>_H, the symplectic form Im <., .>_H has the matrix [[0, I], [-I, 0]] and
multiplication by i is [[0, -I], [I, 0]].
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import scipy.linalg

from app.config import Precision, settings
from app.errors import DomainError, EmptyIntervalError, OverlapError, WindowTooLargeError
from app.errors import DisconnectedIntervalError
from app.geometry import I_MINUS, I_PLUS, Interval, boost, dod_interval
from app.oneparticle import FourierVector, SpectralWeights, grid_angles, inner_product
from app.oneparticle import pack_cauchy, to_h_coordinates, to_real, unpack_cauchy
from app.representation import boost_apply, boost_generator, spectrum, theta_apply

logger = logging.getLogger(__name__)


# ============================================================================
# Constants
# ============================================================================

DEFAULT_WINDOW = 6.0
# Extra mpmath digits of the separating test
SEPARATING_GUARD_DIGITS = 20
RANK_TOLERANCE = 1e-8
MAX_EXTENDED_K = 32
MAX_FSL_RAPIDITY = 1.0
# Mass outside I tolerated for a vector to count as localized in I
LOCALIZATION_TOLERANCE = 1e-12
# Bump sharpness of the modular test vectors
MODULAR_BUMP_SHARPNESS = 8.0


# ============================================================================
# Real subspaces
# ============================================================================

def symplectic_form(n: int) -> np.ndarray:
    """Matrix of Im <u, v>_H in real coordinates of an n-mode space."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def imaginary_unit(n: int) -> np.ndarray:
    """Multiplication by i in real coordinates."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


@dataclass(frozen=True, eq=False)
class RealSubspace:
    """
    Real-linear subspace of the truncated H with an orthonormal basis in real coordinates.

    points lists the grid indices of a grid-mask subspace (None for other subspaces);
    snap_distance is the largest endpoint move made when aligning the arc to the grid.
    """

    K: int
    basis: np.ndarray
    label: str = ""
    points: Optional[Tuple[int, ...]] = None
    snap_distance: float = 0.0

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[0] != 2 * self.N:
            raise DomainError(f"basis for K={self.K} needs {2 * self.N} rows, got {basis.shape}")
        object.__setattr__(self, "basis", basis)

    @property
    def N(self) -> int:
        return 2 * self.K + 1

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @property
    def sigma(self) -> np.ndarray:
        return symplectic_form(self.N)

    def distance(self, v: np.ndarray) -> float:
        """Euclidean distance of a real coordinate vector from the subspace."""
        residual = v - self.basis @ (self.basis.T @ v)
        return float(np.linalg.norm(residual))


def subspace_from_vectors(K: int, vectors: np.ndarray, label: str = "", **kwargs) -> RealSubspace:
    """Orthonormalized span of the columns."""
    vectors = np.asarray(vectors, dtype=float)
    if vectors.shape[1] == 0:
        return RealSubspace(K, vectors, label, **kwargs)
    return RealSubspace(K, scipy.linalg.orth(vectors, rcond=RANK_TOLERANCE), label, **kwargs)


def full_space(K: int) -> RealSubspace:
    n = 2 * K + 1
    return RealSubspace(K, np.eye(2 * n), "full", points=tuple(range(n)))


@lru_cache(maxsize=16)
def cauchy_matrix(w: SpectralWeights) -> np.ndarray:
    """
    Real coordinates of the grid Cauchy-data vectors.

    Column j is pack_cauchy(delta_j, 0), column N + j is pack_cauchy(0, delta_j).
    """
    n = w.N
    columns = np.empty((2 * n, 2 * n))
    zero = np.zeros(n)
    for j in range(n):
        delta = np.zeros(n)
        delta[j] = 1.0
        columns[:, j] = to_real(w, pack_cauchy(w, delta, zero))
        columns[:, n + j] = to_real(w, pack_cauchy(w, zero, delta))
    return columns


@dataclass(frozen=True)
class GridArc:
    """An arc aligned to the N-point grid."""

    interior: Tuple[int, ...]
    boundary: Tuple[int, ...]
    snap_distance: float


def snap_interval(K: int, interval: Interval) -> GridArc:
    """
    Snap both endpoints to the nearest grid points and list the strictly interior points.

    Raises:
        EmptyIntervalError: no grid point lies strictly inside the snapped arc
    """
    n = 2 * K + 1
    step = 2.0 * math.pi / n
    j_lo = int(round(interval.lo / step))
    j_hi = int(round(interval.hi / step))
    snap = max(abs(interval.lo - j_lo * step), abs(interval.hi - j_hi * step))
    count = min(j_hi - j_lo - 1, n)
    if count <= 0:
        raise EmptyIntervalError(f"{interval} contains no grid point at K={K}")
    interior = tuple(sorted({(j_lo + 1 + i) % n for i in range(count)}))
    boundary = tuple(sorted({j_lo % n, j_hi % n} - set(interior)))
    return GridArc(interior=interior, boundary=boundary, snap_distance=snap)


def subspace_for_points(w: SpectralWeights, points: Sequence[int], label: str = "") -> RealSubspace:
    """Span of the Cauchy-data vectors at the given grid points."""
    n = w.N
    points = tuple(sorted(set(int(p) % n for p in points)))
    columns = list(points) + [n + p for p in points]
    return subspace_from_vectors(w.K, cauchy_matrix(w)[:, columns], label, points=points)


def subspace_for_interval(w: SpectralWeights, interval: Optional[Interval]) -> RealSubspace:
    """
    H_I as the grid-mask subspace of the arc I; interval None means the whole circle.

    Returns:
        RealSubspace of real dimension 2 * (number of interior grid points), carrying the
        snap distance

    Raises:
        EmptyIntervalError: no grid point inside I
    """
    if interval is None:
        return full_space(w.K)
    arc = snap_interval(w.K, interval)
    S = subspace_for_points(w, arc.interior, label=str(interval))
    logger.debug(
        f"H_I for {interval}: dim {S.dim}",
        extra={"K": w.K, "snap_distance": arc.snap_distance},
    )
    return RealSubspace(w.K, S.basis, S.label, arc.interior, arc.snap_distance)


def symplectic_complement(S: RealSubspace) -> RealSubspace:
    """{v : Im <u, v>_H = 0 for all u in S}; dimension 2N - dim S."""
    if S.dim == 0:
        return full_space(S.K)
    kernel = scipy.linalg.null_space(S.basis.T @ S.sigma, rcond=RANK_TOLERANCE)
    return RealSubspace(S.K, kernel, f"({S.label})'")


def containment_gap(A: RealSubspace, B: RealSubspace) -> float:
    """
    max over unit u in A of dist(u, B): the sine of the largest principal angle of A against B.
    """
    if A.K != B.K:
        raise DomainError(f"K mismatch: {A.K} vs {B.K}")
    if A.dim == 0:
        return 0.0
    if B.dim == 0:
        return 1.0
    residual = A.basis - B.basis @ (B.basis.T @ A.basis)
    return float(min(1.0, scipy.linalg.svdvals(residual)[0]))


def two_sided_gap(A: RealSubspace, B: RealSubspace) -> float:
    return max(containment_gap(A, B), containment_gap(B, A))


def intersect(A: RealSubspace, B: RealSubspace, label: str = "") -> RealSubspace:
    """A intersected with B via the null space of [A, -B]."""
    if A.dim == 0 or B.dim == 0:
        return RealSubspace(A.K, np.zeros((2 * A.N, 0)), label)
    kernel = scipy.linalg.null_space(np.hstack([A.basis, -B.basis]), rcond=RANK_TOLERANCE)
    return subspace_from_vectors(A.K, A.basis @ kernel[: A.dim, :], label)


def omega_block_singular_values(
    w: SpectralWeights,
    rows: Sequence[int],
    cols: Sequence[int],
    dps: int,
) -> List[mpmath.mpf]:
    """
    Singular values (descending) of the grid operator omega restricted to cols -> rows, in mpmath.

    omega acts on grid functions as the circulant
    g_{j-l} = (1/N) sum_k omega~(k) cos(2 pi k (j-l) / N).
    The weights enter exactly as stored, so the values belong to the truncated model itself.
    """
    n = w.N
    with mpmath.workdps(dps):
        cosines = [mpmath.cos(2 * mpmath.pi * m / n) for m in range(n)]
        weights = [mpmath.mpf(float(v)) for v in w.w]
        modes = [int(k) for k in w.modes]
        g = [
            mpmath.fsum(weights[i] * cosines[(k * d) % n] for i, k in enumerate(modes)) / n
            for d in range(n)
        ]
        block = mpmath.matrix(len(rows), len(cols))
        for a, row in enumerate(rows):
            for b, col in enumerate(cols):
                block[a, b] = g[(row - col) % n]
        values = mpmath.svd_r(block, compute_uv=False)
        return sorted((values[i] for i in range(values.rows)), reverse=True)


def grid_separating_margin(w: SpectralWeights, points: Sequence[int]) -> Tuple[int, float]:
    """
    (nullity, smallest relative singular value) of omega from the grid points to their complement.

    For the grid-mask subspace S of the points, i acts on Cauchy data as (a, c) -> (-omega c,
    omega^{-1} a), so S intersected with iS has real dimension twice that nullity. The singular
    values decay exponentially in the number of points; they are computed with one digit per
    point plus SEPARATING_GUARD_DIGITS, and values below 10^{-(points + guard / 2)} of the largest
    count as zero.
    """
    n = w.N
    cols = sorted(set(int(p) % n for p in points))
    chosen = set(cols)
    rows = [j for j in range(n) if j not in chosen]
    if not cols:
        return 0, 1.0
    if not rows:
        return len(cols), 0.0
    dps = SEPARATING_GUARD_DIGITS + len(cols)
    values = omega_block_singular_values(w, rows, cols, dps)
    with mpmath.workdps(dps):
        tol = values[0] * mpmath.mpf(10) ** (-(len(cols) + SEPARATING_GUARD_DIGITS // 2))
        rank = sum(1 for v in values if v > tol)
        nullity = len(cols) - rank
        margin = 0.0 if nullity > 0 else float(values[-1] / values[0])
    logger.debug(
        f"Separating margin {margin:.3e} for {len(cols)} grid points",
        extra={"K": w.K, "nullity": nullity, "dps": dps},
    )
    return nullity, margin


def standardness_check(S: RealSubspace, w: Optional[SpectralWeights] = None) -> Tuple[int, int]:
    """
    (dim of S intersected with iS, codimension of S + iS), both in real dimensions.

    Grid-mask subspaces with their weights go through grid_separating_margin. Other subspaces use
    the numerical rank of [S, iS] with the default tolerance max(shape) * eps * sigma_max, which
    cannot tell exponentially small angles from zero.
    """
    if S.dim == 0:
        return 0, 2 * S.N
    if w is not None and S.points is not None:
        nullity, _ = grid_separating_margin(w, S.points)
        intersection_dim = 2 * nullity
    else:
        stacked = np.hstack([S.basis, imaginary_unit(S.N) @ S.basis])
        intersection_dim = 2 * S.dim - int(np.linalg.matrix_rank(stacked))
    return intersection_dim, 2 * S.N - 2 * S.dim + intersection_dim


def smallest_angle(S: RealSubspace) -> float:
    """Smallest principal angle between S and iS in double precision."""
    if S.dim == 0:
        return math.pi / 2
    angles = scipy.linalg.subspace_angles(S.basis, imaginary_unit(S.N) @ S.basis)
    return float(np.min(angles))


# ============================================================================
# Localized vectors
# ============================================================================

def smooth_bump(
    interval: Interval,
    psi: np.ndarray,
    fraction: float = 0.8,
    sharpness: float = 1.0,
) -> np.ndarray:
    """
    exp(s (1 - 1/(1 - x^2))) on the middle fraction of the arc, exactly zero elsewhere.

    Larger sharpness s narrows the profile and makes its Fourier coefficients decay like
    exp(-sqrt(s k L)) for an arc of half-width L instead of exp(-sqrt(k L)).
    """
    if not sharpness > 0:
        raise DomainError(f"sharpness must be positive, got {sharpness}")
    offsets = np.mod(np.asarray(psi) - interval.lo, 2.0 * math.pi)
    x = (offsets - interval.length / 2.0) / (fraction * interval.length / 2.0)
    values = np.zeros_like(x, dtype=float)
    inside = np.abs(x) < 1.0
    values[inside] = np.exp(sharpness * (1.0 - 1.0 / (1.0 - x[inside] ** 2)))
    return values


def bump_vector(
    w: SpectralWeights,
    interval: Interval,
    a_scale: float = 1.0,
    c_scale: float = 0.0,
    fraction: float = 0.8,
    sharpness: float = 1.0,
) -> FourierVector:
    """h = pack_cauchy(a_scale * bump, c_scale * bump) with the bump strictly inside the arc."""
    bump = smooth_bump(interval, grid_angles(w.K), fraction, sharpness)
    return pack_cauchy(w, a_scale * bump, c_scale * bump)


def wedge_vector(w: SpectralWeights, interval: Interval = I_PLUS) -> FourierVector:
    """Test vector of the modular checks: a sharp bump in both Cauchy components."""
    return bump_vector(w, interval, 1.0, 1.0, sharpness=MODULAR_BUMP_SHARPNESS)


def outside_mass(w: SpectralWeights, h: FourierVector, interval: Interval) -> float:
    """Fraction of sum(a^2 + c^2) over grid points outside the open arc."""
    data = unpack_cauchy(w, h)
    weights = data.a ** 2 + data.c ** 2
    total = float(np.sum(weights))
    if total == 0.0:
        return 0.0
    inside = np.array([interval.contains(float(p)) for p in grid_angles(w.K)])
    return float(np.sum(weights[~inside]) / total)


# ============================================================================
# Modular theory
# ============================================================================

def _window_budget(precision: Precision) -> float:
    if precision == Precision.EXTENDED:
        return settings.extended_amplification_budget
    return settings.double_amplification_budget


def tomita_residual(
    w: SpectralWeights,
    h: FourierVector,
    window: float = DEFAULT_WINDOW,
) -> float:
    """
    Windowed residual of the Tomita identity u(Theta) e^{-pi l1} h = h for h in H(W1).

    Theta anticommutes with l1, so the identity is equivalent to u(Theta) z = z for
    z = e^{-pi l1 / 2} h, which only amplifies by e^{pi window / 2} inside the window. With
    l1 = V diag(lambda) V^T and y = V^T x, z is built from the eigenvectors with
    |lambda| <= window; Theta maps that span onto itself. Returns |Theta z - z| / |z|, or 0 when
    h has no component in the window.

    Raises:
        WindowTooLargeError: e^{pi window} exceeds the double precision budget
    """
    if not window > 0:
        raise DomainError(f"window must be positive, got {window}")
    amplification = math.exp(min(math.pi * window, 700.0))
    budget = _window_budget(Precision.DOUBLE)
    if amplification > budget:
        raise WindowTooLargeError(
            f"window {window} amplifies by {amplification:.2e} > budget {budget:.0e}"
        )

    spec = spectrum(boost_generator(w))
    mask = np.abs(spec.values) <= window
    V = spec.vectors.real[:, mask]
    y = V.T @ to_h_coordinates(w, h)
    z = V @ (np.exp(-0.5 * math.pi * spec.values[mask]) * y)
    norm = float(np.linalg.norm(z))
    if norm == 0.0:
        return 0.0
    parity = np.where(w.modes % 2 == 0, 1.0, -1.0)
    residual = float(np.linalg.norm(parity * np.conj(z) - z)) / norm
    logger.debug(
        f"Tomita residual {residual:.3e} in window {window}",
        extra={"K": w.K, "modes_in_window": int(mask.sum())},
    )
    return residual


def tomita_residual_extended(w: SpectralWeights, h: FourierVector) -> float:
    """
    Full-vector Tomita residual in mpmath at settings.extended_dps digits (K <= 32).

    Diagnostic only: the full continuation e^{-pi l1} amplifies the top of the truncated
    spectrum, so the value mostly measures how far h is from the truncated wedge space.

    Raises:
        DomainError: K > 32
        WindowTooLargeError: e^{pi lambda_max} exceeds the extended budget
    """
    if w.K > MAX_EXTENDED_K:
        raise DomainError(f"extended residual supports K <= {MAX_EXTENDED_K}, got {w.K}")

    x = to_h_coordinates(w, h)
    with mpmath.workdps(settings.extended_dps):
        n = w.N
        m = [mpmath.mpf(w.radius) / 2 * mpmath.sqrt(mpmath.mpf(w.w[i]) * mpmath.mpf(w.w[i + 1]))
             for i in range(n - 1)]
        A = mpmath.zeros(n, n)
        for i in range(n - 1):
            A[i + 1, i] = m[i]
            A[i, i + 1] = m[i]
        values, Q = mpmath.eigsy(A)

        top = max(abs(values[i]) for i in range(n))
        if mpmath.exp(mpmath.pi * top) > _window_budget(Precision.EXTENDED):
            raise WindowTooLargeError(f"spectral radius {float(top):.2f} beyond extended budget")

        vec = mpmath.matrix([mpmath.mpc(v.real, v.imag) for v in x])
        y = Q.T * vec
        for i in range(n):
            y[i] = mpmath.exp(-mpmath.pi * values[i]) * y[i]
        continued = Q * y
        diff = []
        for i, k in enumerate(w.modes):
            reflected = (1 if k % 2 == 0 else -1) * mpmath.conj(continued[i])
            diff.append(reflected - vec[i])
        residual = mpmath.sqrt(sum(abs(d) ** 2 for d in diff)) / mpmath.norm(vec)
        return float(residual)


def theta_maps_wedge_to_opposite(w: SpectralWeights, h: FourierVector) -> float:
    """Cauchy-data mass of u(Theta) h outside I_- for h localized in I_+."""
    return outside_mass(w, theta_apply(h), I_MINUS)


# ============================================================================
# Finite speed of light
# ============================================================================

def fsl_leakage(
    w: SpectralWeights,
    interval: Interval,
    h: FourierVector,
    t: float,
    shrink: float = 1.0,
) -> float:
    """
    Fraction of the Cauchy-data grid norm of e^{it l1} h outside I_t = dod_interval(Lambda1(t), I).

    shrink < 1 replaces I_t by the concentric arc of that relative length (negative control).

    Raises:
        DomainError: |t| > 1 or h not localized in I
        DisconnectedIntervalError: propagated from dod_interval
    """
    if abs(t) > MAX_FSL_RAPIDITY:
        raise DomainError(f"fsl_leakage supports |t| <= {MAX_FSL_RAPIDITY}, got {t}")
    if outside_mass(w, h, interval) > LOCALIZATION_TOLERANCE:
        raise DomainError(f"vector is not localized in {interval}")

    evolved = boost_apply(boost_generator(w), t, h)
    target = dod_interval(boost(t), interval, radius=w.radius)
    if shrink != 1.0:
        target = Interval.centered(target.center, shrink * target.length)
    leakage = outside_mass(w, evolved, target)
    logger.debug(
        f"FSL leakage {leakage:.3e} at t={t}",
        extra={"K": w.K, "interval": str(interval), "target": str(target)},
    )
    return leakage


# ============================================================================
# Net properties
# ============================================================================

def _overlap(I1: Interval, I2: Interval) -> bool:
    try:
        return I1.intersection(I2) is not None
    except DisconnectedIntervalError:
        return True


def microcausality_value(
    w: SpectralWeights,
    h1: FourierVector,
    I1: Interval,
    h2: FourierVector,
    I2: Interval,
) -> float:
    """
    |Im <h1, h2>_H| for h1 in H_{I1}, h2 in H_{I2} and disjoint arcs.

    Raises:
        OverlapError: the arcs intersect
    """
    if _overlap(I1, I2):
        raise OverlapError(f"{I1} and {I2} overlap")
    return abs(inner_product(w, h1, h2).imag)


def rotation_real(w: SpectralWeights, alpha: float) -> np.ndarray:
    """u(R0(alpha)) in real coordinates."""
    c = np.cos(w.modes * alpha)
    s = np.sin(w.modes * alpha)
    return np.block([[np.diag(c), np.diag(s)], [np.diag(-s), np.diag(c)]])


def rotate_subspace(w: SpectralWeights, S: RealSubspace, alpha: float) -> RealSubspace:
    return RealSubspace(S.K, rotation_real(w, alpha) @ S.basis, f"R({alpha}){S.label}")


def covariance_gap(w: SpectralWeights, interval: Interval, m: int) -> float:
    """Two-sided gap between u(R0(a)) H_I and H_{I + a} for the grid rotation a = 2 pi m / N."""
    alpha = 2.0 * math.pi * m / w.N
    rotated = rotate_subspace(w, subspace_for_interval(w, interval), alpha)
    return two_sided_gap(rotated, subspace_for_interval(w, interval.rotated(alpha)))


def isotony_gap(w: SpectralWeights, inner: Interval, outer: Interval) -> float:
    """containment_gap(H_I, H_J) for I inside J."""
    if not inner.is_subset_of(outer):
        raise DomainError(f"{inner} is not contained in {outer}")
    return containment_gap(subspace_for_interval(w, inner), subspace_for_interval(w, outer))


def additivity_check(
    w: SpectralWeights,
    small: Interval,
    coverage: float = 1.0,
    big: Interval = I_PLUS,
) -> float:
    """
    Two-sided gap between H_big and the span of the rotated H_small that stay inside big.

    Grid rotations m = 0, 1, 2, ... are admitted while the shifted grid points of small remain
    interior points of big; coverage < 1 keeps only that fraction of them.
    """
    n = w.N
    small_points = snap_interval(w.K, small).interior
    big_points = set(snap_interval(w.K, big).interior)
    admissible = [
        m for m in range(n)
        if all((p + m) % n in big_points for p in small_points)
    ]
    if not admissible:
        raise DomainError(f"{small} fits nowhere inside {big}")
    keep = admissible[: max(1, int(math.floor(coverage * len(admissible))))]
    covered = {(p + m) % n for m in keep for p in small_points}
    union = subspace_for_points(w, covered, label="rotations")
    gap = two_sided_gap(union, subspace_for_interval(w, big))
    logger.debug(
        f"Additivity gap {gap:.3e} with {len(keep)} of {len(admissible)} rotations",
        extra={"K": w.K},
    )
    return gap


def double_cone_subspace(w: SpectralWeights, alpha: float, beta: float) -> Tuple[RealSubspace, float]:
    """
    H(W(alpha)) intersected with H(W(beta)) for the wedges over the arcs I_+ + alpha, I_+ + beta.

    Returns:
        (intersection, two-sided gap against H of the intersection arc)
    """
    arc_a = I_PLUS.rotated(alpha)
    arc_b = I_PLUS.rotated(beta)
    common = arc_a.intersection(arc_b)
    if common is None:
        raise EmptyIntervalError(f"wedge base arcs {arc_a} and {arc_b} are disjoint")
    S = intersect(subspace_for_interval(w, arc_a), subspace_for_interval(w, arc_b), "O")
    expected = subspace_for_interval(w, common)
    return S, two_sided_gap(S, expected)


@dataclass
class DualityReport:
    """Wedge duality with the boundary bookkeeping of grid masks."""

    K: int
    dim_local: int
    dim_complement: int
    dim_opposite: int
    boundary_points: int
    boundary_defect_dims: int
    gap_opposite_in_complement: float
    gap_complement_in_closure: float
    double_complement_gap: float
    snap_distance: float
    extra: Dict = field(default_factory=dict)

    @property
    def exact_bookkeeping(self) -> bool:
        return self.boundary_defect_dims == 2 * self.boundary_points

    def to_dict(self) -> Dict:
        return {
            "K": self.K,
            "dim_local": self.dim_local,
            "dim_complement": self.dim_complement,
            "dim_opposite": self.dim_opposite,
            "boundary_points": self.boundary_points,
            "boundary_defect_dims": self.boundary_defect_dims,
            "exact_bookkeeping": self.exact_bookkeeping,
            "gap_opposite_in_complement": self.gap_opposite_in_complement,
            "gap_complement_in_closure": self.gap_complement_in_closure,
            "double_complement_gap": self.double_complement_gap,
            "snap_distance": self.snap_distance,
        }


def wedge_duality_report(w: SpectralWeights, interval: Interval = I_PLUS) -> DualityReport:
    """
    Compare (H_I)' with H of the interior of the complementary arc.

    The complement is exactly H on the complementary grid points including the two snapped
    boundary points; each boundary point carries 2 real dimensions missing from the open
    opposite arc.
    """
    arc = snap_interval(w.K, interval)
    local = subspace_for_interval(w, interval)
    complement = symplectic_complement(local)
    opposite = subspace_for_interval(w, interval.complement())
    closure_points = [j for j in range(w.N) if j not in set(arc.interior)]
    closure = subspace_for_points(w, closure_points, label="closure")

    report = DualityReport(
        K=w.K,
        dim_local=local.dim,
        dim_complement=complement.dim,
        dim_opposite=opposite.dim,
        boundary_points=len(arc.boundary),
        boundary_defect_dims=complement.dim - opposite.dim,
        gap_opposite_in_complement=containment_gap(opposite, complement),
        gap_complement_in_closure=two_sided_gap(complement, closure),
        double_complement_gap=two_sided_gap(symplectic_complement(complement), local),
        snap_distance=arc.snap_distance,
    )
    logger.debug(f"Wedge duality for {interval}", extra=report.to_dict())
    return report


def standardness_scan(w_list: List[SpectralWeights], interval: Interval) -> List[Dict]:
    """
    One row per cutoff for a fixed arc: K, dim, intersection_dim, span_codim, codim_ratio
    (codim / dim), separating_margin and the double precision smallest_angle between S and iS.
    """
    rows = []
    for w in w_list:
        S = subspace_for_interval(w, interval)
        nullity, margin = grid_separating_margin(w, S.points)
        intersection_dim = 2 * nullity
        codim = 2 * S.N - 2 * S.dim + intersection_dim
        rows.append({
            "K": w.K,
            "dim": S.dim,
            "intersection_dim": intersection_dim,
            "span_codim": codim,
            "codim_ratio": codim / S.dim,
            "separating_margin": margin,
            "smallest_angle": smallest_angle(S),
        })
    return rows
