"""
dS QFT Lab - Special Functions

Complex Gamma (Lanczos with reflection), the Legendre function P_s of complex degree through
its Gauss hypergeometric representation, and derivation of the model parameters
(nu, s+, s-, c_nu) from the Casimir eigenvalue zeta and the de Sitter radius r.

All functions are pure and thread-safe. Double precision is the default; passing
precision=Precision.EXTENDED evaluates through mpmath at settings.extended_dps digits and
returns mpmath numbers.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import mpmath
from scipy.special import digamma

from app.config import Precision, settings
from app.errors import DomainError, GammaPoleError, NonConvergenceError, NonRealResultError
from app.errors import NumericalRangeError

logger = logging.getLogger(__name__)

Number = Union[complex, mpmath.mpc, mpmath.mpf]


# ============================================================================
# Constants
# ============================================================================

# Lanczos approximation, g = 7, n = 9
LANCZOS_G = 7
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

POLE_TOLERANCE = 1e-14
SERIES_TERM_CAP = 1_000_000
SERIES_RELATIVE_TOL = 1e-17
# Below this value of (1+x)/2 the logarithmic continuation around x = -1 is used
LOG_BRANCH_SWITCH = 0.25
# exp() overflows above this
MAX_LOG_MAGNITUDE = 709.7


# ============================================================================
# Gamma
# ============================================================================

def _check_pole(z: complex) -> None:
    nearest = round(z.real)
    if nearest <= 0 and abs(z - nearest) < POLE_TOLERANCE:
        raise GammaPoleError(f"Gamma has a pole at z = {nearest} (got z = {z})")


def _log_sin_pi(z: complex) -> complex:
    """
    log(sin(pi z)) without overflow for large |Im z|.

    For Im w > 0, sin w = (i/2) e^{-iw} (1 - e^{2iw}); the lower half plane follows by
    conjugation. Only the value mod 2*pi*i is meaningful.
    """
    w = math.pi * z
    if abs(w.imag) < 20.0:
        return cmath.log(cmath.sin(w))
    if w.imag < 0:
        return _log_sin_pi(z.conjugate()).conjugate()
    return -1j * w + cmath.log(1.0 - cmath.exp(2j * w)) + cmath.log(0.5j)


def complex_loggamma(z: complex) -> complex:
    """
    Logarithm of the Gamma function (Lanczos approximation, reflection for Re z < 1/2).

    The imaginary part is only determined mod 2*pi; exp() of the result is Gamma(z). Use this
    for ratios of Gamma values whose magnitudes leave the double range.

    Args:
        z: Complex argument, not a non-positive integer

    Returns:
        log Gamma(z) on some branch

    Raises:
        GammaPoleError: z within 1e-14 of a non-positive integer
    """
    z = complex(z)
    _check_pole(z)

    if z.real < 0.5:
        return math.log(math.pi) - _log_sin_pi(z) - complex_loggamma(1.0 - z)

    z -= 1.0
    x = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        x += LANCZOS_COEFFS[i] / (z + i)
    t = z + LANCZOS_G + 0.5
    return HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def complex_gamma(z: complex, precision: Precision = Precision.DOUBLE) -> Number:
    """
    Gamma function of a complex argument.

    Relative error is below 1e-12 for |z| <= 200 away from the poles, as long as the value is
    representable in double precision.

    Args:
        z: Complex argument
        precision: DOUBLE (Lanczos) or EXTENDED (mpmath at settings.extended_dps digits)

    Returns:
        Gamma(z) as a Python complex, or an mpmath number in extended mode

    Raises:
        GammaPoleError: z within 1e-14 of a non-positive integer
        NumericalRangeError: |Gamma(z)| overflows double precision
    """
    z = complex(z)
    if precision == Precision.EXTENDED:
        _check_pole(z)
        with mpmath.workdps(settings.extended_dps):
            return mpmath.gamma(mpmath.mpc(z.real, z.imag))

    log_value = complex_loggamma(z)
    if log_value.real > MAX_LOG_MAGNITUDE:
        raise NumericalRangeError(f"|Gamma({z})| exceeds double range")
    return cmath.exp(log_value)


# ============================================================================
# Hypergeometric series and Legendre functions
# ============================================================================

def _is_integer_degree(s: complex) -> bool:
    return abs(s.imag) < POLE_TOLERANCE and abs(s.real - round(s.real)) < POLE_TOLERANCE


def _hypergeometric_series(s: complex, z: float) -> complex:
    """
    2F1(-s, s+1; 1; z) summed term by term.

    From n >= |s(s+1)| on, consecutive terms shrink at least by the factor z, so the tail
    after term n is bounded by |t_n| z / (1 - z).
    """
    a, b = -s, s + 1.0
    ratio_onset = abs(s * (s + 1.0))
    term = 1.0 + 0j
    total = term
    n = 0
    while True:
        term *= (a + n) * (b + n) / ((n + 1.0) ** 2) * z
        n += 1
        total += term
        if term == 0:
            return total
        if n >= ratio_onset:
            tail = abs(term) * z / (1.0 - z)
            if tail <= SERIES_RELATIVE_TOL * max(abs(total), 1e-300):
                return total
        if n >= SERIES_TERM_CAP:
            raise NonConvergenceError(
                f"2F1 series for s={s}, z={z} did not meet its tail bound in {n} terms"
            )


def _logarithmic_continuation(s: complex, zc: float) -> complex:
    """
    P_s evaluated from the expansion of 2F1(a, b; a+b; z) around z = 1 (here a+b = 1).

    zc = (1+x)/2 is passed separately so that points close to x = -1 keep full accuracy.
    """
    a, b = -s, s + 1.0
    log_zc = math.log(zc)
    psi_one = complex(digamma(1.0))
    psi_a = complex(digamma(a))
    psi_b = complex(digamma(b))
    ratio_onset = abs(s * (s + 1.0))

    coeff = 1.0 + 0j
    power = 1.0
    total = coeff * (2.0 * psi_one - psi_a - psi_b - log_zc)
    n = 0
    while True:
        psi_one += 1.0 / (n + 1.0)
        psi_a += 1.0 / (a + n)
        psi_b += 1.0 / (b + n)
        coeff *= (a + n) * (b + n) / ((n + 1.0) ** 2)
        power *= zc
        n += 1
        term = coeff * power * (2.0 * psi_one - psi_a - psi_b - log_zc)
        total += term
        if n >= ratio_onset:
            tail = 2.0 * abs(term) * zc / (1.0 - zc)
            if tail <= SERIES_RELATIVE_TOL * max(abs(total), 1e-300):
                break
        if n >= SERIES_TERM_CAP:
            raise NonConvergenceError(
                f"log-continued 2F1 for s={s}, zc={zc} did not converge in {n} terms"
            )
    return -(cmath.sin(math.pi * s) / math.pi) * total


def legendre_p_split(s: complex, z: float, zc: float) -> complex:
    """
    P_s at the point x with z = (1-x)/2 and zc = (1+x)/2 supplied separately.

    Callers that know x only through an angle (x = -cos theta gives z = cos^2(theta/2),
    zc = sin^2(theta/2)) avoid the cancellation in 1 + x this way.
    """
    s = complex(s)
    if _is_integer_degree(s) or zc >= LOG_BRANCH_SWITCH:
        return _hypergeometric_series(s, z)
    return _logarithmic_continuation(s, zc)


def legendre_p(s: complex, x: float, precision: Precision = Precision.DOUBLE) -> Number:
    """
    Legendre function of the first kind P_s(x) for complex degree s and -1 < x <= 1.

    P_s(x) = 2F1(-s, s+1; 1; (1-x)/2). The series is used directly for (1+x)/2 >= 1/4; closer
    to x = -1 the same function is summed from its logarithmic expansion around argument 1.

    Args:
        s: Complex degree
        x: Real argument in (-1, 1]
        precision: DOUBLE or EXTENDED (mpmath hyp2f1)

    Returns:
        P_s(x)

    Raises:
        DomainError: x <= -1 or x > 1
        NonConvergenceError: series failed its tail bound within 10^6 terms
    """
    x = float(x)
    if not (-1.0 < x <= 1.0):
        raise DomainError(f"legendre_p requires -1 < x <= 1, got x = {x}")
    s = complex(s)

    if precision == Precision.EXTENDED:
        with mpmath.workdps(settings.extended_dps):
            degree = mpmath.mpc(s.real, s.imag)
            return mpmath.hyp2f1(-degree, degree + 1, 1, (1 - mpmath.mpf(x)) / 2)

    return legendre_p_split(s, (1.0 - x) / 2.0, (1.0 + x) / 2.0)


# ============================================================================
# Model parameters
# ============================================================================

class Series(str, Enum):
    """Unitary irreducible representation series of SO_0(1,2)."""
    PRINCIPAL = "principal"
    COMPLEMENTARY = "complementary"


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the free field and the quantities derived from them."""

    zeta: float
    radius: float
    nu: complex
    s_plus: complex
    s_minus: complex
    c_nu: float
    series: Series

    def key(self) -> Tuple[float, float]:
        """Cache key identifying the model."""
        return (self.zeta, self.radius)


def make_params(zeta: float, radius: float) -> ModelParams:
    """
    Derive nu, s+-, c_nu and the representation series from (zeta, r).

    nu = i sqrt(1/4 - zeta^2) for 0 < zeta < 1/2 (complementary series) and
    nu = sqrt(zeta^2 - 1/4) for zeta >= 1/2 (principal series); s+- = -1/2 -+ i nu;
    c_nu = 1 / (2 cos(i nu pi)).

    Raises:
        DomainError: zeta <= 0 or radius <= 0
        NonRealResultError: c_nu not real positive
    """
    if not zeta > 0:
        raise DomainError(f"zeta must be positive, got {zeta}")
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")

    if zeta < 0.5:
        nu = 1j * math.sqrt(0.25 - zeta * zeta)
        series = Series.COMPLEMENTARY
    else:
        nu = complex(math.sqrt(zeta * zeta - 0.25), 0.0)
        series = Series.PRINCIPAL

    s_plus = -0.5 - 1j * nu
    s_minus = -1.0 - s_plus

    c_complex = 1.0 / (2.0 * cmath.cos(1j * nu * math.pi))
    if abs(c_complex.imag) > 1e-14 * abs(c_complex) or c_complex.real <= 0:
        raise NonRealResultError(f"c_nu = {c_complex} is not real positive")

    params = ModelParams(
        zeta=float(zeta),
        radius=float(radius),
        nu=nu,
        s_plus=s_plus,
        s_minus=s_minus,
        c_nu=c_complex.real,
        series=series,
    )
    logger.debug(
        f"Model parameters for zeta={zeta}, r={radius}",
        extra={"series": series.value, "nu": str(nu), "c_nu": params.c_nu},
    )
    return params


def casimir_defect(params: ModelParams) -> Tuple[float, float]:
    """
    Consistency of s+(1+s+) with the Casimir eigenvalue.

    Returns:
        (|s+(1+s+) + zeta^2|, |s+(1+s+) + nu^2 + 1/4|)
    """
    s = params.s_plus
    value = s * (1.0 + s)
    via_zeta = abs(value + params.zeta ** 2)
    via_nu = abs(value + params.nu ** 2 + 0.25)
    return via_zeta, via_nu
