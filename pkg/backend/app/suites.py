"""
dS QFT Lab - Verification Suites

One function per suite. Each turns a SuiteConfig into a SuiteReport of metrics, thresholds and
pass flags; run_suites executes the selected suites on a thread pool and returns the reports in
dependency order.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from app import __version__
from app.config import Precision
from app.fock import (
    FockConfig,
    Polynomial,
    ccr_defect,
    coherent_overlap_check,
    derivation_consistency,
    full_generator,
    gamma_coherent_defect,
    interaction_generator,
    low_lying_spectrum,
    node_refinement_defect,
    normal_order_agreement,
    normal_ordered_power,
    rotation_covariance_defect,
    two_point_function,
    vacuum,
    vacuum_weyl_check,
    weyl_check,
    wick_oracle_defect,
)
from app.geometry import (
    I_MINUS,
    I_PLUS,
    Interval,
    Region,
    boost,
    causally_related,
    dod_interval,
    point_on_circle,
    rotation,
    spacelike_complement,
)
from app.modloc import (
    additivity_check,
    bump_vector,
    covariance_gap,
    double_cone_subspace,
    fsl_leakage,
    isotony_gap,
    microcausality_value,
    snap_interval,
    standardness_scan,
    theta_maps_wedge_to_opposite,
    tomita_residual,
    tomita_residual_extended,
    wedge_duality_report,
    wedge_vector,
)
from app.oneparticle import (
    FourierVector,
    SpectralWeights,
    asymptotic_ratio,
    convexity_scan,
    gram_matrix,
    grid_inner_product,
    h_norm,
    inner_product,
    inner_product_quadrature,
    kernel_fourier_check,
    monotonicity_defect,
    multiplier_norm_and_bound,
    near_identity_multipliers,
    omega_apply,
    omega_table,
    pack_cauchy,
    product_identity_defect,
    sobolev_half_norm,
    unpack_cauchy,
)
from app.representation import (
    MIN_STRUCTURE_K,
    OperatorH,
    boost_generator,
    boost_unitary,
    covariance_of_rotated_boost,
    generator_by_quadrature,
    negative_control_weights,
    rotation_apply,
    spectrum,
    structure_constant_defect,
    structure_constant_report,
    theta_boost_check,
    theta_grid_defect,
)
from app.schemas import SUITE_ORDER, SuiteConfig, SuiteName, SuiteReport
from app.specfun import ModelParams, casimir_defect, make_params
from app.utils import canonical_hash, max_abs, seed_from_hash

logger = logging.getLogger(__name__)


# ============================================================================
# Suite Stage (for progress visibility)
# ============================================================================

class SuiteStage:
    """Suite lifecycle stages - monotonic, never go backward."""
    QUEUED = "queued"
    RUNNING = "running"
    COMPLETED = "completed"
    FAILED = "failed"


# Fixed scan parameters
OMEGA_ZETA_SCAN = (0.1, 0.3, 0.49, 0.5, 0.51, 1.0, 2.0, 5.0)
OMEGA_RADII = (0.5, 1.0, 2.0)
OMEGA_RADIUS_K = 512
KAPPA_ZETAS = (0.3, 0.7, 1.5)
MAX_KERNEL_K = 32
TOMITA_SCAN = (24, 48, 96)
TOMITA_K = 48
TOMITA_FLOOR = 1e-10
EXTENDED_TOMITA_K = 16
FSL_K = 128
FSL_TIMES = (0.25, 0.5, -0.5)
FSL_SUBINTERVAL_TIME = 0.3
FSL_CONTROL_SHRINK = 0.5
FSL_NEAR_SHRINK = 0.95
STANDARD_SCAN = (16, 32, 64)
FOCK_VECTOR_NORM = 0.5
WICK_ORACLE_CUTOFFS = (2, 4)


# ============================================================================
# Context
# ============================================================================

@dataclass
class SuiteContext:
    """Shared inputs of one run."""

    config: SuiteConfig
    config_hash: str
    params: ModelParams

    @property
    def precision(self) -> Precision:
        return self.config.precision

    def weights(
        self,
        K: Optional[int] = None,
        zeta: Optional[float] = None,
        radius: Optional[float] = None,
    ) -> SpectralWeights:
        if zeta is None and radius is None:
            params = self.params
        else:
            params = make_params(
                self.config.zeta if zeta is None else zeta,
                self.config.radius if radius is None else radius,
            )
        return SpectralWeights.from_params(params, K or self.config.K, self.precision)

    def rng(self, suite: SuiteName) -> np.random.Generator:
        """Per-suite generator seeded from the config hash; independent of scheduling."""
        digest = canonical_hash({"config_hash": self.config_hash, "suite": suite.value})
        return np.random.default_rng(seed_from_hash(digest))

    def report(
        self,
        suite: SuiteName,
        metrics: Dict[str, float],
        params: Optional[Dict] = None,
        diagnostics: Optional[Dict] = None,
        tables: Optional[Dict] = None,
    ) -> SuiteReport:
        metrics = {name: float(value) for name, value in metrics.items()}
        thresholds = {name: self.config.threshold(suite, name) for name in metrics}
        echo = {"zeta": self.config.zeta, "radius": self.config.radius, "K": self.config.K}
        echo.update(params or {})
        return SuiteReport.from_metrics(
            suite,
            metrics,
            thresholds,
            params=echo,
            diagnostics=diagnostics or {},
            tables=tables or {},
            version=__version__,
            config_hash=self.config_hash,
        )


def _random_vector(rng: np.random.Generator, K: int, support: Optional[int] = None) -> FourierVector:
    coeff = rng.standard_normal(2 * K + 1) + 1j * rng.standard_normal(2 * K + 1)
    if support is not None:
        coeff[np.abs(np.arange(-K, K + 1)) > support] = 0.0
    return FourierVector(K, coeff)


def _normalized(w: SpectralWeights, h: FourierVector, norm: float) -> FourierVector:
    return h * (norm / h_norm(w, h))


def _relative(value: float, scale: float) -> float:
    return value / scale if scale > 0 else value


# ============================================================================
# Suites
# ============================================================================

def suite_geometry(ctx: SuiteContext) -> SuiteReport:
    """Lorentz group, analytic continuation, domains of dependence, causal complements."""
    rng = ctx.rng(SuiteName.GEOMETRY)
    r = ctx.config.radius

    lorentz = 0.0
    group_law = 0.0
    for _ in range(16):
        s, t, a = rng.uniform(-2.0, 2.0, size=3)
        g = rotation(a) @ boost(t, alpha=float(s))
        lorentz = max(lorentz, g.lorentz_defect())
        group_law = max(group_law, max_abs((boost(s) @ boost(t)).matrix - boost(s + t).matrix))
        group_law = max(group_law, max_abs((rotation(s) @ rotation(t)).matrix - rotation(s + t).matrix))

    continuation = max_abs(boost(1j * math.pi).matrix - np.diag([-1.0, 1.0, -1.0]))

    dod_defect = 0.0
    for t in (0.3, -0.7, 1.5):
        J = dod_interval(boost(t), I_PLUS, radius=r)
        dod_defect = max(dod_defect, abs(J.length - I_PLUS.length), abs(math.remainder(J.center, 2 * math.pi)))

    wedge = Region.wedge(radius=r)
    twice = spacelike_complement(spacelike_complement(wedge))
    involution = max_abs(twice.generator.matrix - wedge.generator.matrix)

    # sample points of W1 and W1' (boosted points of I_+ and I_-)
    inside = [boost(t).apply(point_on_circle(p, r)) for p in np.linspace(-1.4, 1.4, 7) for t in (-1.0, 0.0, 1.0)]
    outside = [boost(t).apply(point_on_circle(p, r)) for p in np.linspace(1.75, 4.5, 7) for t in (-1.0, 0.0, 1.0)]
    violations = sum(causally_related(x, y) for x in inside for y in outside)

    metrics = {
        "lorentz_defect": lorentz,
        "group_law_defect": group_law,
        "continuation_defect": continuation,
        "dod_wedge_invariance": dod_defect,
        "complement_involution": involution,
        "causal_complement_violations": violations,
    }
    return ctx.report(SuiteName.GEOMETRY, metrics, diagnostics={"wedge_base": str(wedge.base_interval)})


def _radius_scan(ctx: SuiteContext) -> List[Dict]:
    """Weight checks over the zeta scan and OMEGA_RADII at K = OMEGA_RADIUS_K."""
    rows = []
    for radius in OMEGA_RADII:
        for zeta in OMEGA_ZETA_SCAN:
            v = ctx.weights(OMEGA_RADIUS_K, zeta=zeta, radius=radius)
            rows.append({
                "zeta": zeta,
                "radius": radius,
                "K": OMEGA_RADIUS_K,
                "positivity_defect": max(0.0, -float(np.min(v.w))),
                "evenness_defect": max_abs(v.w - v.w[::-1]),
                "monotonicity_defect": monotonicity_defect(v),
                "asymptotic_ratio": asymptotic_ratio(v),
            })
    return rows


def suite_omega(ctx: SuiteContext) -> SuiteReport:
    """Positivity, evenness, monotonicity, asymptotics and the product identity of omega~."""
    w = ctx.weights()
    scan = {zeta: ctx.weights(zeta=zeta) for zeta in OMEGA_ZETA_SCAN}
    scan[ctx.config.zeta] = w
    radius_rows = _radius_scan(ctx)

    metrics = {
        "positivity_defect": max(0.0, -float(np.min(w.w))),
        "evenness_defect": max_abs(w.w - w.w[::-1]),
        "monotonicity_defect": max(monotonicity_defect(v) for v in scan.values()),
        "asymptote_deviation": abs(asymptotic_ratio(w) - 1.0),
        "product_identity_defect": max(product_identity_defect(v) for v in scan.values()),
        "casimir_defect": max(casimir_defect(ctx.params)),
        "radius_scan_defect": max(
            max(row["positivity_defect"], row["evenness_defect"], row["monotonicity_defect"])
            for row in radius_rows
        ),
        "radius_scan_asymptote": max(abs(row["asymptotic_ratio"] - 1.0) for row in radius_rows),
    }
    diagnostics = {
        "series": ctx.params.series.value,
        "nu": str(ctx.params.nu),
        "c_nu": ctx.params.c_nu,
        "convexity": {str(zeta): convexity_scan(v) for zeta, v in sorted(scan.items())},
    }
    return ctx.report(
        SuiteName.OMEGA,
        metrics,
        params={"precision": ctx.precision.value},
        diagnostics=diagnostics,
        tables={"omega": omega_table(w), "omega_radius_scan": radius_rows},
    )


def suite_kernel(ctx: SuiteContext) -> SuiteReport:
    """Fourier coefficients of the two-point kernel against 1 / (2 omega~)."""
    K = min(ctx.config.K, MAX_KERNEL_K)
    report = kernel_fourier_check(ctx.params, K, ctx.precision)

    by_zeta = {ctx.config.zeta: report.kappa_radius}
    for zeta in KAPPA_ZETAS:
        if zeta not in by_zeta:
            params = make_params(zeta, ctx.config.radius)
            by_zeta[zeta] = kernel_fourier_check(params, K, ctx.precision).kappa_radius
    kappas = list(by_zeta.values())
    spread = (max(kappas) - min(kappas)) / abs(np.mean(kappas))

    # double-integral oracle on trigonometric polynomials of degree 4
    rng = ctx.rng(SuiteName.KERNEL)
    cf = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    cg = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    degrees = np.arange(-4, 5)

    def f(psi):
        return np.exp(1j * np.multiply.outer(psi, degrees)) @ cf

    def g(psi):
        return np.exp(1j * np.multiply.outer(psi, degrees)) @ cg

    w = ctx.weights(K)
    r = ctx.config.radius
    expected = report.kappa_radius * inner_product(
        w, FourierVector.from_function(f, K, r), FourierVector.from_function(g, K, r)
    )
    oracle = inner_product_quadrature(ctx.params, f, g)

    metrics = {
        "max_deviation": report.max_deviation,
        "kappa_spread": spread,
        "inner_product_oracle_error": abs(oracle - expected) / abs(expected),
    }
    rows = [
        {"k": k, "q": q, "deviation": d}
        for k, (q, d) in enumerate(zip(report.coefficients, report.deviations))
    ]
    diagnostics = {
        "kappa": report.kappa,
        "kappa_radius": report.kappa_radius,
        "kappa_radius_minus_two": report.kappa_radius - 2.0,
        "quadrature_agreement": report.quadrature_agreement,
        "node_count": report.node_count,
        "kappa_radius_by_zeta": {str(zeta): value for zeta, value in sorted(by_zeta.items())},
    }
    return ctx.report(
        SuiteName.KERNEL, metrics, params={"K": K}, diagnostics=diagnostics, tables={"kernel": rows}
    )


def suite_rep(ctx: SuiteContext) -> SuiteReport:
    """so(1,2) relations, boost unitaries and the wedge reflection."""
    K = max(ctx.config.K, MIN_STRUCTURE_K)
    w = ctx.weights(K)
    r = ctx.config.radius
    L = boost_generator(w)
    scale = max_abs(L.M)

    control = structure_constant_report(negative_control_weights(K, r))
    quadrature = generator_by_quadrature(w, lambda psi: r * np.cos(psi))
    theta = theta_boost_check(w)

    rng = ctx.rng(SuiteName.REP)
    h = _random_vector(rng, K, support=K // 2)
    U = boost_unitary(L, 0.8)

    metrics = {
        "structure_defect": structure_constant_defect(w),
        "negative_control_inverse": 1.0 / control.max_defect,
        "rotation_relation_any_weights": control.relation_defects["[m0,m1]"],
        "generator_quadrature_defect": _relative(max_abs(L.M - quadrature.M), scale),
        "rotated_boost_covariance": _relative(covariance_of_rotated_boost(w, 0.37), scale),
        "l_pi_defect": _relative(max_abs(boost_generator(w, math.pi).M + L.M), scale),
        "theta_anticommutation": theta["anticommutation"],
        "theta_unitary_commutation": theta["unitary_commutation"],
        "theta_grid_defect": _relative(theta_grid_defect(h, r), h.l2_norm()),
        "boost_unitarity": U.unitarity_defect(),
        "group_law": max_abs(boost_unitary(L, 0.3).M @ boost_unitary(L, 0.5).M - U.M),
        "rotation_invariance": abs(h_norm(w, rotation_apply(h, 0.9)) - h_norm(w, h)) / h_norm(w, h),
    }
    rows = [{"index": i, "eigenvalue": float(v)} for i, v in enumerate(spectrum(L).values)]
    return ctx.report(
        SuiteName.REP,
        metrics,
        params={"K": K},
        diagnostics={"negative_control": control.to_dict()},
        tables={"l1_spectrum": rows},
    )


def suite_sobolev(ctx: SuiteContext) -> SuiteReport:
    """Multiplier bound on H^{1/2} and the identities of the one-particle inner product."""
    w = ctx.weights()
    K, r = w.K, w.radius
    rng = ctx.rng(SuiteName.SOBOLEV)

    family = near_identity_multipliers(K, r) + [FourierVector.from_function(np.cos, K, r)]
    bounds = [multiplier_norm_and_bound(w, chi) for chi in family]
    ratio = max(b.measured_norm / b.bound for b in bounds)

    unit = FourierVector.basis(K, 0) * math.sqrt(2.0 * math.pi * r)
    identity_norm = multiplier_norm_and_bound(w, unit).measured_norm

    chi = family[5]
    single = multiplier_norm_and_bound(w, chi).bound
    double = multiplier_norm_and_bound(w, chi * 2.0).bound

    f = _random_vector(rng, K)
    omega_f = omega_apply(w, f)
    half = 0.5 * sobolev_half_norm(w, f)

    h, g = _random_vector(rng, K), _random_vector(rng, K)
    direct = inner_product(w, h, g)

    a, c = rng.standard_normal(w.N), rng.standard_normal(w.N)
    data = unpack_cauchy(w, pack_cauchy(w, a, c))

    G = gram_matrix(w, [_random_vector(rng, K) for _ in range(6)])
    eigenvalues = np.linalg.eigvalsh(0.5 * (G + G.conj().T))

    metrics = {
        "bound_ratio": ratio,
        "identity_norm_error": abs(identity_norm - 1.0),
        "homogeneity_defect": abs(double - 2.0 * single) / single,
        "sobolev_identity_defect": abs(h_norm(w, omega_f) ** 2 - half) / half,
        "parseval_defect": abs(grid_inner_product(w, h, g) - direct) / abs(direct),
        "pack_roundtrip": max(max_abs(data.a - a), max_abs(data.c - c)),
        "gram_negativity": max(0.0, -float(eigenvalues[0])) / float(eigenvalues[-1]),
    }
    diagnostics = {
        "a": bounds[0].a,
        "b": bounds[0].b,
        "tail_ratio": bounds[0].tail_ratio,
        "smooth_family": all(b.smooth for b in bounds),
    }
    rows = [{"member": i, "measured": b.measured_norm, "bound": b.bound} for i, b in enumerate(bounds)]
    return ctx.report(SuiteName.SOBOLEV, metrics, diagnostics=diagnostics, tables={"multipliers": rows})


def suite_modular(ctx: SuiteContext) -> SuiteReport:
    """Windowed Tomita identity for vectors localized in I_+ and its convergence in K."""
    window = ctx.config.window
    rows = []
    for K in TOMITA_SCAN:
        wk = ctx.weights(K)
        rows.append({"K": K, "residual": tomita_residual(wk, wedge_vector(wk), window)})
    ratios = [
        (b["residual"] + TOMITA_FLOOR) / (a["residual"] + TOMITA_FLOOR)
        for a, b in zip(rows, rows[1:])
    ]

    w = ctx.weights(TOMITA_K)
    residual = tomita_residual(w, wedge_vector(w), window)
    wrong = tomita_residual(w, wedge_vector(w, I_MINUS), window)
    wc = ctx.weights()
    diagnostics = {
        "wrong_wedge_residual": wrong,
        "config_K_residual": tomita_residual(wc, wedge_vector(wc), window),
    }
    if ctx.precision == Precision.EXTENDED:
        we = ctx.weights(EXTENDED_TOMITA_K)
        diagnostics["extended_residual"] = tomita_residual_extended(we, wedge_vector(we))

    metrics = {
        "tomita_residual": residual,
        "convergence_ratio": max(ratios),
        "wrong_wedge_inverse": 1.0 / max(wrong, 1e-300),
    }
    return ctx.report(
        SuiteName.MODULAR,
        metrics,
        params={"window": window, "tomita_K": TOMITA_K},
        diagnostics=diagnostics,
        tables={"tomita_convergence": rows},
    )


def suite_fsl(ctx: SuiteContext) -> SuiteReport:
    """Boosted Cauchy data stays inside the domain of dependence (at K = 128 or more)."""
    w = ctx.weights(max(ctx.config.K, FSL_K))
    wedge_h = bump_vector(w, I_PLUS, 1.0, 1.0)
    wedge = max(fsl_leakage(w, I_PLUS, wedge_h, t) for t in FSL_TIMES)

    sub = Interval.centered(0.0, math.pi / 2)
    sub_vector = bump_vector(w, sub, 1.0, 0.5)
    subinterval = fsl_leakage(w, sub, sub_vector, FSL_SUBINTERVAL_TIME)
    control = fsl_leakage(w, sub, sub_vector, FSL_SUBINTERVAL_TIME, shrink=FSL_CONTROL_SHRINK)
    near = fsl_leakage(w, sub, sub_vector, FSL_SUBINTERVAL_TIME, shrink=FSL_NEAR_SHRINK)

    metrics = {
        "wedge_leakage": wedge,
        "subinterval_leakage": subinterval,
        "negative_control_inverse": 1.0 / max(control, 1e-300),
    }
    return ctx.report(
        SuiteName.FSL,
        metrics,
        params={
            "fsl_K": w.K,
            "times": list(FSL_TIMES),
            "subinterval_time": FSL_SUBINTERVAL_TIME,
            "control_shrink": FSL_CONTROL_SHRINK,
            "near_shrink": FSL_NEAR_SHRINK,
        },
        diagnostics={"negative_control_leakage": control, "near_shrink_leakage": near},
    )


def suite_micro(ctx: SuiteContext) -> SuiteReport:
    """Im <h1, h2> vanishes for vectors localized in disjoint arcs."""
    w = ctx.weights()
    I1 = Interval.centered(0.0, 1.0)
    I2 = Interval.centered(math.pi, 1.5)
    smooth = microcausality_value(w, bump_vector(w, I1, 1.0, 0.5), I1, bump_vector(w, I2, 0.3, 1.0), I2)

    rng = ctx.rng(SuiteName.MICRO)
    grid = 0.0
    for _ in range(4):
        vectors = []
        for interval in (I1, I2):
            points = list(snap_interval(w.K, interval).interior)
            a = np.zeros(w.N)
            c = np.zeros(w.N)
            a[points] = rng.standard_normal(len(points))
            c[points] = rng.standard_normal(len(points))
            vectors.append(pack_cauchy(w, a, c))
        scale = h_norm(w, vectors[0]) * h_norm(w, vectors[1])
        grid = max(grid, microcausality_value(w, vectors[0], I1, vectors[1], I2) / scale)

    metrics = {"microcausality": smooth, "grid_microcausality": grid}
    return ctx.report(SuiteName.MICRO, metrics, params={"I1": str(I1), "I2": str(I2)})


def suite_additivity(ctx: SuiteContext) -> SuiteReport:
    """Rotations of a three-point arc generate H(I_+)."""
    w = ctx.weights()
    small = Interval.centered(0.0, 4.0 * 2.0 * math.pi / w.N)
    control = additivity_check(w, small, coverage=0.5)
    metrics = {
        "additivity_gap": additivity_check(w, small),
        "self_gap": additivity_check(w, I_PLUS),
        "negative_control_inverse": 1.0 / max(control, 1e-300),
    }
    return ctx.report(
        SuiteName.ADDITIVITY,
        metrics,
        params={"small": str(small)},
        diagnostics={"negative_control_gap": control},
    )


def suite_standard(ctx: SuiteContext) -> SuiteReport:
    """Cyclic and separating properties of H_I across growing K."""
    weights = [ctx.weights(K) for K in STANDARD_SCAN]
    wedge_rows = standardness_scan(weights, I_PLUS)
    short_rows = standardness_scan(weights, Interval.centered(0.0, 2.0 * math.pi / 3.0))
    ratios = [b["codim_ratio"] / a["codim_ratio"] for a, b in zip(wedge_rows, wedge_rows[1:])]

    metrics = {
        "intersection_dim": max(row["intersection_dim"] for row in wedge_rows + short_rows),
        "codim_ratio_growth": max(ratios),
    }
    diagnostics = {
        "min_separating_margin": min(row["separating_margin"] for row in wedge_rows + short_rows),
        "min_smallest_angle": min(row["smallest_angle"] for row in wedge_rows + short_rows),
    }
    tables = {
        "standardness": [dict(row, arc="I_plus") for row in wedge_rows]
        + [dict(row, arc="2pi/3") for row in short_rows],
    }
    return ctx.report(
        SuiteName.STANDARD,
        metrics,
        params={"scan": list(STANDARD_SCAN)},
        diagnostics=diagnostics,
        tables=tables,
    )


def suite_duality(ctx: SuiteContext) -> SuiteReport:
    """Wedge duality, covariance, isotony and double cones."""
    w = ctx.weights()
    report = wedge_duality_report(w)
    arc = Interval.centered(0.3, 1.2)
    _, cone_gap = double_cone_subspace(w, 0.4, -0.5)

    metrics = {
        "duality_gap": max(report.gap_opposite_in_complement, report.gap_complement_in_closure),
        "boundary_bookkeeping_error": abs(report.boundary_defect_dims - 2 * report.boundary_points),
        "double_complement_gap": report.double_complement_gap,
        "covariance_gap": max(covariance_gap(w, arc, m) for m in (1, 2, 3)),
        "isotony_gap": isotony_gap(w, Interval.centered(0.1, 0.8), Interval.centered(0.0, 2.0)),
        "double_cone_gap": cone_gap,
    }
    diagnostics = {
        "duality": report.to_dict(),
        "theta_wedge_leakage": theta_maps_wedge_to_opposite(w, bump_vector(w, I_PLUS, 1.0, 1.0)),
    }
    return ctx.report(SuiteName.DUALITY, metrics, diagnostics=diagnostics)


def suite_fock(ctx: SuiteContext) -> SuiteReport:
    """CCR, coherent vectors, normal ordering and the interacting boost generator."""
    cfg = FockConfig(ctx.config.M, ctx.config.N_max)
    w = ctx.weights()
    rng = ctx.rng(SuiteName.FOCK)
    h = _normalized(w, _random_vector(rng, w.K, support=cfg.M), FOCK_VECTOR_NORM)
    g = _normalized(w, _random_vector(rng, w.K, support=cfg.M), FOCK_VECTOR_NORM)
    P = Polynomial(tuple(ctx.config.polynomial))
    omega = vacuum(cfg)

    top = min(6, cfg.N_max)
    hermite = max((normal_order_agreement(cfg, w, h, n) for n in range(2, top + 1)), default=0.0)
    vacuum_values = max(
        abs(np.vdot(omega, normal_ordered_power(cfg, w, h, n).matrix @ omega))
        for n in range(1, min(4, cfg.N_max) + 1)
    )
    V2 = interaction_generator(cfg, w, Polynomial.monomial(2)).matrix
    L = full_generator(cfg, w, P)

    l1 = boost_generator(w)
    A = boost_unitary(l1, 0.4)
    B = OperatorH(w.K, 1j * l1.M, w, "i l1")

    metrics = {
        "ccr_defect": ccr_defect(cfg, w, h, g) if cfg.N_max >= 2 else 0.0,
        "two_point_defect": abs(two_point_function(cfg, w, h, g) - inner_product(w, h, g)),
        "coherent_overlap": coherent_overlap_check(cfg, w, h, g),
        "hermite_agreement": hermite,
        "normal_order_vacuum": vacuum_values,
        "vacuum_interaction": abs(np.vdot(omega, V2 @ omega)),
        "hermiticity": L.hermiticity_defect(),
        "rotation_covariance": rotation_covariance_defect(cfg, w, P),
        "node_refinement": node_refinement_defect(cfg, w, P),
        "gamma_coherent_defect": gamma_coherent_defect(cfg, A, h),
        "derivation_consistency": derivation_consistency(cfg, B),
        "wick_oracle_defect": wick_oracle_defect(FockConfig(*WICK_ORACLE_CUTOFFS), w, P),
    }
    diagnostics = {
        "dim": cfg.dim,
        "vacuum_weyl_defect": vacuum_weyl_check(cfg, w, h),
        "weyl_defect": weyl_check(cfg, w, h, g),
    }
    rows = [{"index": i, "eigenvalue": float(v)} for i, v in enumerate(low_lying_spectrum(L))]
    return ctx.report(
        SuiteName.FOCK,
        metrics,
        params={
            "M": cfg.M,
            "N_max": cfg.N_max,
            "polynomial": list(P.coefficients),
            "wick_oracle_cutoffs": list(WICK_ORACLE_CUTOFFS),
        },
        diagnostics=diagnostics,
        tables={"fock_spectrum": rows},
    )


SUITES: Dict[SuiteName, Callable[[SuiteContext], SuiteReport]] = {
    SuiteName.GEOMETRY: suite_geometry,
    SuiteName.OMEGA: suite_omega,
    SuiteName.KERNEL: suite_kernel,
    SuiteName.REP: suite_rep,
    SuiteName.SOBOLEV: suite_sobolev,
    SuiteName.MODULAR: suite_modular,
    SuiteName.FSL: suite_fsl,
    SuiteName.MICRO: suite_micro,
    SuiteName.ADDITIVITY: suite_additivity,
    SuiteName.STANDARD: suite_standard,
    SuiteName.DUALITY: suite_duality,
    SuiteName.FOCK: suite_fock,
}


# ============================================================================
# Runner
# ============================================================================

def make_context(config: SuiteConfig) -> SuiteContext:
    """Validate the model parameters and fingerprint the configuration."""
    config_hash = canonical_hash(config.canonical())
    params = make_params(config.zeta, config.radius)
    return SuiteContext(config=config, config_hash=config_hash, params=params)


def run_suite(name: SuiteName, ctx: SuiteContext) -> SuiteReport:
    """Run one suite and stamp its wall time."""
    logger.info(f"Suite {name.value}: {SuiteStage.RUNNING}", extra={"stage": SuiteStage.RUNNING})
    start = time.perf_counter()
    try:
        report = SUITES[name](ctx)
    except Exception as e:
        logger.error(f"Suite {name.value} failed: {e}", extra={"stage": SuiteStage.FAILED})
        raise
    report.wall_time = time.perf_counter() - start

    failing = [metric for metric, ok in report.passed.items() if not ok]
    if failing:
        logger.warning(f"Suite {name.value} failing metrics: {failing}")
    logger.info(
        f"Suite {name.value}: {SuiteStage.COMPLETED} in {report.wall_time:.2f}s",
        extra={"stage": SuiteStage.COMPLETED, "passed": report.all_passed},
    )
    return report


def run_suites(config: SuiteConfig, suites: Optional[List[SuiteName]] = None) -> List[SuiteReport]:
    """
    Execute the selected suites and return their reports in dependency order.

    Suites share the model parameters and the spectral-weight cache; the weights at the
    configured K are computed before the pool starts. Report contents do not depend on the
    number of workers.

    Raises:
        ContractError: invalid model parameters or truncations
        NumericalError: propagated from the first failing suite
    """
    selected = config.suites if suites is None else suites
    ordered = [name for name in SUITE_ORDER if name in selected]
    if not ordered:
        logger.info("No suites selected")
        return []

    ctx = make_context(config)
    ctx.weights()
    logger.info(
        f"Running {len(ordered)} suites with {config.workers} workers",
        extra={"config_hash": ctx.config_hash, "stage": SuiteStage.QUEUED},
    )

    pool = ThreadPoolExecutor(max_workers=config.workers)
    try:
        futures = {name: pool.submit(run_suite, name, ctx) for name in ordered}
        reports = [futures[name].result() for name in ordered]
    except BaseException:
        pool.shutdown(wait=True, cancel_futures=True)
        raise
    pool.shutdown(wait=True)
    return reports
