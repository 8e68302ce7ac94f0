"""
dS QFT Lab - Geometry Module

Causal geometry of two-dimensional de Sitter space embedded in 3D Minkowski space:
Lorentz group elements (rotations R0(alpha), boosts Lambda1(t) and their rotated versions),
points on the hyperboloid, arcs of the Cauchy circle S^1, wedges and double cones, and the
domain of dependence of a boosted arc restricted back to S^1.

Conventions:
    - Ambient metric diag(+1, -1, -1); dS is x0^2 - x1^2 - x2^2 = -r^2.
    - S^1 is the time-zero circle, x(psi) = (0, r sin psi, r cos psi).
    - Two points are causally related iff <x, y> <= -r^2 (ambient criterion).
    - The matrix R0(alpha) moves the point at angle psi to psi - alpha. The one-particle
      rotation u(R0(alpha)) shifts function supports by +alpha; Interval.rotated follows the
      latter and is used only with the representation.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize_scalar

from app.errors import DisconnectedIntervalError, DomainError, MismatchedRadiusError
from app.utils import wrap_angle

logger = logging.getLogger(__name__)

MINKOWSKI = np.diag([1.0, -1.0, -1.0])
TWO_PI = 2.0 * math.pi
HYPERBOLOID_TOLERANCE = 1e-10
CAUSAL_TOLERANCE = 1e-12
COMPLEX_STEP = 1e-20

DEFAULT_DOD_SAMPLES = 4096
MIN_DOD_SAMPLES = 64
ENDPOINT_XATOL = 1e-12

Scalar = Union[float, complex]


# ============================================================================
# Group elements
# ============================================================================

@dataclass(frozen=True)
class GroupElement:
    """A 3x3 Lorentz matrix acting on the ambient Minkowski space."""

    matrix: np.ndarray

    def __post_init__(self):
        if np.shape(self.matrix) != (3, 3):
            raise DomainError(f"group element must be 3x3, got shape {np.shape(self.matrix)}")

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ other.matrix)

    def apply(self, point: "DSPoint") -> "DSPoint":
        """Image of a dS point."""
        return DSPoint(np.real_if_close(self.matrix @ point.x), point.radius)

    def inverse(self) -> "GroupElement":
        """Lorentz inverse eta M^T eta."""
        return GroupElement(MINKOWSKI @ self.matrix.T @ MINKOWSKI)

    def lorentz_defect(self) -> float:
        """Max entry of |M^T eta M - eta|."""
        return float(np.max(np.abs(self.matrix.T @ MINKOWSKI @ self.matrix - MINKOWSKI)))

    def is_proper_orthochronous(self, tol: float = 1e-12) -> bool:
        """det = 1, (0,0) entry positive and the Minkowski form preserved."""
        m = np.real_if_close(self.matrix)
        if np.iscomplexobj(m):
            return False
        return (
            self.lorentz_defect() <= tol
            and abs(np.linalg.det(m) - 1.0) <= tol
            and m[0, 0] > 0
        )


def identity() -> GroupElement:
    return GroupElement(np.eye(3))


def _trig(value: Scalar) -> Tuple[Scalar, Scalar]:
    if isinstance(value, complex):
        return np.cos(value), np.sin(value)
    return math.cos(value), math.sin(value)


def _hyp(value: Scalar) -> Tuple[Scalar, Scalar]:
    if isinstance(value, complex):
        return np.cosh(value), np.sinh(value)
    return math.cosh(value), math.sinh(value)


def rotation(alpha: Scalar) -> GroupElement:
    """Rotation R0(alpha) about the time axis."""
    c, s = _trig(alpha)
    dtype = complex if isinstance(alpha, complex) else float
    return GroupElement(np.array(
        [[1.0, 0.0, 0.0],
         [0.0, c, -s],
         [0.0, s, c]],
        dtype=dtype,
    ))


def _boost_one(t: Scalar) -> GroupElement:
    ch, sh = _hyp(t)
    dtype = complex if isinstance(t, complex) else float
    return GroupElement(np.array(
        [[ch, 0.0, sh],
         [0.0, 1.0, 0.0],
         [sh, 0.0, ch]],
        dtype=dtype,
    ))


def boost(t: Scalar, alpha: float = 0.0) -> GroupElement:
    """
    Boost Lambda^(alpha)(t) = R0(alpha) Lambda1(t) R0(-alpha).

    t is the rapidity. Complex t gives the analytic continuation; Lambda1(i pi) is the
    reflection diag(-1, 1, -1).
    """
    if alpha == 0.0:
        return _boost_one(t)
    return rotation(alpha) @ _boost_one(t) @ rotation(-alpha)


def reflection_p1() -> GroupElement:
    """P1: x2 -> -x2 (psi -> pi - psi on S^1)."""
    return GroupElement(np.diag([1.0, 1.0, -1.0]))


def reflection_t() -> GroupElement:
    """Time reversal x0 -> -x0."""
    return GroupElement(np.diag([-1.0, 1.0, 1.0]))


def lie_generators() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Ambient so(1,2) generators (m0, m1, m2) = d/dt of R0(t), Lambda1(t), Lambda^(pi/2)(t) at 0.

    Derivatives are taken by complex step, exact to rounding for these analytic curves.
    """
    h = COMPLEX_STEP
    m0 = np.imag(rotation(1j * h).matrix) / h
    m1 = np.imag(boost(1j * h).matrix) / h
    m2 = np.imag(
        (rotation(math.pi / 2) @ _boost_one(1j * h) @ rotation(-math.pi / 2)).matrix
    ) / h
    return m0, m1, m2


def structure_constants(generators: Tuple[np.ndarray, ...]) -> np.ndarray:
    """
    Structure constants C[a, b, c] with [m_a, m_b] = sum_c C[a, b, c] m_c.

    Solved by least squares on the flattened generator basis; the residual is checked.
    """
    basis = np.stack([g.ravel() for g in generators], axis=1)
    n = len(generators)
    constants = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            commutator = generators[a] @ generators[b] - generators[b] @ generators[a]
            coeffs, *_ = np.linalg.lstsq(basis, commutator.ravel(), rcond=None)
            if np.max(np.abs(basis @ coeffs - commutator.ravel())) > 1e-10:
                raise DomainError("generators do not close under commutation")
            constants[a, b] = coeffs
    return constants


# ============================================================================
# Points
# ============================================================================

def minkowski(x: np.ndarray, y: np.ndarray) -> float:
    """Ambient product x0 y0 - x1 y1 - x2 y2."""
    return float(x[0] * y[0] - x[1] * y[1] - x[2] * y[2])


@dataclass(frozen=True)
class DSPoint:
    """A point on the de Sitter hyperboloid of radius r."""

    x: np.ndarray
    radius: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "x", x)
        defect = abs(minkowski(x, x) + self.radius ** 2)
        if defect > HYPERBOLOID_TOLERANCE * self.radius ** 2:
            raise DomainError(f"point {x} is off the hyperboloid of radius {self.radius}")


def point_on_circle(psi: float, radius: float) -> DSPoint:
    """The point x(psi) of the time-zero circle."""
    return DSPoint(np.array([0.0, radius * math.sin(psi), radius * math.cos(psi)]), radius)


def angle_of(point: DSPoint) -> float:
    """Angular coordinate atan2(x1, x2) in (-pi, pi]."""
    return math.atan2(point.x[1], point.x[2])


def causally_related(x: DSPoint, y: DSPoint) -> bool:
    """
    True iff <x, y> <= -r^2.

    Reflexive and symmetric; antipodal points give <x, y> = +r^2.

    Raises:
        MismatchedRadiusError: points on different hyperboloids
    """
    if abs(x.radius - y.radius) > 1e-12 * max(x.radius, y.radius):
        raise MismatchedRadiusError(f"radii differ: {x.radius} vs {y.radius}")
    r2 = x.radius ** 2
    return minkowski(x.x, y.x) <= -r2 + CAUSAL_TOLERANCE * r2


def causal_shadow(point: DSPoint) -> Tuple[float, float]:
    """
    Arc of S^1 causally related to a point, as (center angle, half width).

    With rho = sqrt(x1^2 + x2^2) >= r the shadow is |psi - atan2(x1, x2)| <= arccos(r / rho).
    """
    x1, x2 = point.x[1], point.x[2]
    rho = math.hypot(x1, x2)
    center = math.atan2(x1, x2)
    # points of S^1 itself: rho = r up to rounding, where acos loses half the digits
    if rho - point.radius <= 4.0 * np.finfo(float).eps * rho:
        return center, 0.0
    half_width = math.acos(min(1.0, point.radius / rho))
    return center, half_width


# ============================================================================
# Intervals
# ============================================================================

@dataclass(frozen=True)
class Interval:
    """
    Open arc {psi : lo < psi < hi} of S^1, stored with lo in [0, 2 pi) and hi = lo + length.
    """

    lo: float
    hi: float

    def __post_init__(self):
        length = self.hi - self.lo
        if not (0.0 < length < TWO_PI):
            raise DomainError(f"interval length must lie in (0, 2 pi), got {length}")

    @classmethod
    def from_bounds(cls, lo: float, hi: float) -> "Interval":
        """Arc from lo to hi counterclockwise; length (hi - lo) mod 2 pi."""
        length = float(np.mod(hi - lo, TWO_PI))
        if length == 0.0:
            raise DomainError(f"degenerate interval ({lo}, {hi})")
        start = wrap_angle(lo)
        return cls(start, start + length)

    @classmethod
    def centered(cls, center: float, length: float) -> "Interval":
        start = wrap_angle(center - length / 2.0)
        return cls(start, start + length)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return self.lo + self.length / 2.0

    def offset(self, psi: float) -> float:
        """(psi - lo) mod 2 pi."""
        return float(np.mod(psi - self.lo, TWO_PI))

    def contains(self, psi: float) -> bool:
        d = self.offset(psi)
        return 0.0 < d < self.length

    def contains_arc(self, lo: float, hi: float) -> bool:
        """True iff the closed arc [lo, hi] (hi >= lo, unwrapped) lies inside this open arc."""
        width = hi - lo
        if width < 0.0 or width >= self.length:
            return False
        d = self.offset(lo)
        return d > 0.0 and d + width < self.length

    def is_subset_of(self, other: "Interval", tol: float = 1e-12) -> bool:
        d = other.offset(self.lo)
        if d > TWO_PI - tol:
            d -= TWO_PI
        return d >= -tol and d + self.length <= other.length + tol

    def rotated(self, alpha: float) -> "Interval":
        """Support of u(R0(alpha))h for h supported in this arc (shift by +alpha)."""
        return Interval.from_bounds(self.lo + alpha, self.lo + alpha + self.length)

    def complement(self) -> "Interval":
        """Interior of the complementary arc."""
        return Interval(wrap_angle(self.hi), wrap_angle(self.hi) + TWO_PI - self.length)

    def intersection(self, other: "Interval") -> Optional["Interval"]:
        """
        Intersection arc, or None if empty.

        Raises:
            DisconnectedIntervalError: the two arcs meet in two pieces
        """
        d = other.offset(self.lo)
        # other as [0, L2] relative to its own lo; self as [d, d + L1]
        pieces: List[Tuple[float, float]] = []
        lo, hi = d, min(d + self.length, other.length)
        if hi > lo:
            pieces.append((lo, hi))
        if d + self.length > TWO_PI:
            lo, hi = 0.0, min(d + self.length - TWO_PI, other.length)
            if hi > lo:
                pieces.append((lo, hi))
        if not pieces:
            return None
        if len(pieces) > 1:
            raise DisconnectedIntervalError("arcs intersect in two components")
        lo, hi = pieces[0]
        return Interval.from_bounds(other.lo + lo, other.lo + hi)


I_PLUS = Interval.centered(0.0, math.pi)
I_MINUS = I_PLUS.complement()


# ============================================================================
# Regions
# ============================================================================

class RegionKind(str, Enum):
    """Kind of localization region."""
    WEDGE = "wedge"
    DOUBLE_CONE = "double_cone"


def _in_standard_wedge(x: np.ndarray) -> bool:
    return x[2] > abs(x[0])


def _base_arc_of_wedge(generator: GroupElement, radius: float, n: int = 2048) -> Optional[Interval]:
    """Arc {psi : x(psi) in g W1}, located on a grid and refined by bisection."""
    inverse = generator.inverse().matrix
    psis = np.linspace(0.0, TWO_PI, n, endpoint=False)

    def inside(psi: float) -> bool:
        y = np.real(inverse @ point_on_circle(psi, radius).x)
        return _in_standard_wedge(y)

    flags = np.array([inside(p) for p in psis])
    if not flags.any():
        return None
    if flags.all():
        raise DisconnectedIntervalError("wedge contains the whole circle")

    # roll so that sample 0 lies outside, unwrapping the angles
    shift = int(np.argmin(flags))
    order = (np.arange(n) + shift) % n
    flags = flags[order]
    angles = psis[order] + TWO_PI * ((np.arange(n) + shift) >= n)
    inside_idx = np.flatnonzero(flags)
    start, stop = int(inside_idx[0]), int(inside_idx[-1])
    if stop - start + 1 != inside_idx.size:
        raise DisconnectedIntervalError("wedge meets S^1 in several arcs")

    def refine(outside: float, insider: float) -> float:
        for _ in range(60):
            mid = 0.5 * (outside + insider)
            if inside(mid):
                insider = mid
            else:
                outside = mid
        return 0.5 * (outside + insider)

    step = TWO_PI / n
    lo = refine(angles[start] - step, angles[start])
    hi = refine(angles[stop] + step, angles[stop])
    return Interval.from_bounds(lo, hi)


@dataclass(frozen=True)
class Region:
    """A wedge gW1 or a double cone with base arc on S^1."""

    kind: RegionKind
    generator: GroupElement = field(default_factory=identity)
    base_interval: Optional[Interval] = None

    @classmethod
    def wedge(cls, generator: Optional[GroupElement] = None, radius: float = 1.0) -> "Region":
        g = generator or identity()
        return cls(RegionKind.WEDGE, g, _base_arc_of_wedge(g, radius))

    @classmethod
    def double_cone(cls, base: Interval) -> "Region":
        """Causal completion O_I of an arc with |I| <= pi."""
        if base.length > math.pi + 1e-12:
            raise DomainError(f"double cone base longer than a half circle: {base.length}")
        return cls(RegionKind.DOUBLE_CONE, identity(), base)


def wedge_at(alpha: float, radius: float = 1.0) -> Region:
    """The wedge R0(alpha) W1."""
    return Region.wedge(rotation(alpha), radius)


def region_contains(region: Region, point: DSPoint) -> bool:
    """Membership by pull-back through the generator."""
    y = np.real(region.generator.inverse().matrix @ point.x)
    if region.kind == RegionKind.WEDGE:
        return _in_standard_wedge(y)
    center, half_width = causal_shadow(DSPoint(y, point.radius))
    return region.base_interval.contains_arc(center - half_width, center + half_width)


def spacelike_complement(region: Region) -> Region:
    """
    Causal complement: W' = g R0(pi) W1 for W = g W1; for a double cone the double cone
    over the complementary arc.
    """
    if region.kind == RegionKind.WEDGE:
        base = region.base_interval.complement() if region.base_interval else None
        return Region(RegionKind.WEDGE, region.generator @ rotation(math.pi), base)
    return Region(
        RegionKind.DOUBLE_CONE, region.generator, region.base_interval.complement()
    )


# ============================================================================
# Domain of dependence on S^1
# ============================================================================

def _shadow_bounds(generator: GroupElement, psi: float, radius: float) -> Tuple[float, float]:
    y = generator.apply(point_on_circle(psi, radius))
    center, half_width = causal_shadow(y)
    # unwrap the center next to psi
    center = psi + math.remainder(center - psi, TWO_PI)
    return center - half_width, center + half_width


def dod_interval(
    g: GroupElement,
    interval: Interval,
    n_grid: int = DEFAULT_DOD_SAMPLES,
    radius: float = 1.0,
) -> Interval:
    """
    J = Gamma(g I) intersected with S^1.

    Each point of g I has a closed-form causal shadow on S^1; J is the union of the shadows
    over n_grid samples of I. The extreme endpoints are then refined with a bounded scalar
    minimisation to 1e-12 in the arc parameter.

    Args:
        g: Group element applied to the arc
        interval: Arc I of S^1
        n_grid: Number of samples (>= 64)
        radius: de Sitter radius

    Returns:
        The arc J

    Raises:
        DomainError: n_grid below 64
        DisconnectedIntervalError: the sampled shadows do not form a single proper arc
    """
    if n_grid < MIN_DOD_SAMPLES:
        raise DomainError(f"n_grid must be >= {MIN_DOD_SAMPLES}, got {n_grid}")

    psis = interval.lo + interval.length * np.linspace(0.0, 1.0, n_grid)
    bounds = np.array([_shadow_bounds(g, float(p), radius) for p in psis])
    lower, upper = bounds[:, 0], bounds[:, 1]

    step = interval.length / (n_grid - 1)
    gaps = np.maximum(lower[1:] - upper[:-1], lower[:-1] - upper[1:])
    if np.any(gaps > 10.0 * step * max(1.0, float(np.max(np.abs(g.matrix))))):
        raise DisconnectedIntervalError(f"domain of dependence of {interval} is not an arc")

    def refine(column: int, sign: float) -> float:
        # sign +1 minimises the lower bounds, -1 maximises the upper bounds
        values = sign * bounds[:, column]
        i = int(np.argmin(values))
        a = float(psis[max(i - 1, 0)])
        b = float(psis[min(i + 1, n_grid - 1)])
        result = minimize_scalar(
            lambda p: sign * _shadow_bounds(g, float(p), radius)[column],
            bounds=(a, b),
            method="bounded",
            options={"xatol": ENDPOINT_XATOL},
        )
        return sign * min(float(result.fun), float(values[i]))

    lo = refine(0, 1.0)
    hi = refine(1, -1.0)
    if hi - lo >= TWO_PI:
        raise DisconnectedIntervalError(f"domain of dependence of {interval} covers S^1")

    logger.debug(
        f"dod_interval of {interval}",
        extra={"lo": lo, "hi": hi, "samples": n_grid},
    )
    return Interval(wrap_angle(lo), wrap_angle(lo) + (hi - lo))
