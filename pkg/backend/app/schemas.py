"""
dS QFT Lab - Pydantic Schemas

Suite configuration (the single JSON document a run is driven by) and per-suite reports.
"""

from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import Precision


# ============================================================================
# Suites
# ============================================================================

class SuiteName(str, Enum):
    """Verification suites, in dependency order."""
    GEOMETRY = "geometry"
    OMEGA = "omega"
    KERNEL = "kernel"
    REP = "rep"
    SOBOLEV = "sobolev"
    MODULAR = "modular"
    FSL = "fsl"
    MICRO = "micro"
    ADDITIVITY = "additivity"
    STANDARD = "standard"
    DUALITY = "duality"
    FOCK = "fock"


SUITE_ORDER: List[SuiteName] = list(SuiteName)


# Default pass thresholds, keyed "suite.metric". Every metric passes iff value <= threshold;
# negative controls are reported through their reciprocal ("*_inverse").
DEFAULT_THRESHOLDS: Dict[str, float] = {
    # geometry
    "geometry.lorentz_defect": 1e-12,
    "geometry.group_law_defect": 1e-12,
    "geometry.continuation_defect": 1e-12,
    "geometry.dod_wedge_invariance": 1e-9,
    "geometry.complement_involution": 1e-12,
    "geometry.causal_complement_violations": 0.5,
    # omega
    "omega.positivity_defect": 1e-15,
    "omega.evenness_defect": 1e-15,
    "omega.monotonicity_defect": 1e-12,
    "omega.asymptote_deviation": 0.05,
    "omega.product_identity_defect": 1e-12,
    "omega.casimir_defect": 1e-13,
    "omega.radius_scan_defect": 1e-12,
    "omega.radius_scan_asymptote": 0.01,
    # kernel
    "kernel.max_deviation": 1e-8,
    "kernel.kappa_spread": 1e-8,
    "kernel.inner_product_oracle_error": 1e-6,
    # rep
    "rep.structure_defect": 1e-10,
    "rep.negative_control_inverse": 1e3,
    "rep.rotation_relation_any_weights": 1e-12,
    "rep.generator_quadrature_defect": 1e-12,
    "rep.rotated_boost_covariance": 1e-12,
    "rep.l_pi_defect": 1e-13,
    "rep.theta_anticommutation": 1e-12,
    "rep.theta_unitary_commutation": 1e-10,
    "rep.theta_grid_defect": 1e-12,
    "rep.boost_unitarity": 1e-11,
    "rep.group_law": 1e-11,
    "rep.rotation_invariance": 1e-13,
    # sobolev
    "sobolev.bound_ratio": 1.0,
    "sobolev.identity_norm_error": 1e-12,
    "sobolev.homogeneity_defect": 1e-12,
    "sobolev.sobolev_identity_defect": 1e-12,
    "sobolev.parseval_defect": 1e-12,
    "sobolev.pack_roundtrip": 1e-12,
    "sobolev.gram_negativity": 1e-12,
    # modular
    "modular.tomita_residual": 1e-3,
    "modular.convergence_ratio": 1.1,
    "modular.wrong_wedge_inverse": 10.0,
    # fsl
    "fsl.wedge_leakage": 1e-6,
    "fsl.subinterval_leakage": 1e-5,
    "fsl.negative_control_inverse": 1e6,
    # micro
    "micro.microcausality": 1e-12,
    "micro.grid_microcausality": 1e-12,
    # additivity
    "additivity.additivity_gap": 1e-12,
    "additivity.self_gap": 1e-12,
    "additivity.negative_control_inverse": 10.0,
    # standard
    "standard.intersection_dim": 0.5,
    "standard.codim_ratio_growth": 1.0,
    # duality
    "duality.duality_gap": 1e-10,
    "duality.boundary_bookkeeping_error": 0.5,
    "duality.double_complement_gap": 1e-10,
    "duality.covariance_gap": 1e-12,
    "duality.isotony_gap": 1e-12,
    "duality.double_cone_gap": 1e-10,
    # fock
    "fock.ccr_defect": 1e-12,
    "fock.two_point_defect": 1e-12,
    "fock.coherent_overlap": 1e-12,
    "fock.hermite_agreement": 1e-12,
    "fock.normal_order_vacuum": 1e-12,
    "fock.vacuum_interaction": 1e-12,
    "fock.hermiticity": 1e-12,
    "fock.rotation_covariance": 1e-12,
    "fock.node_refinement": 1e-10,
    "fock.gamma_coherent_defect": 1e-10,
    "fock.derivation_consistency": 1e-6,
    "fock.wick_oracle_defect": 1e-12,
}


# ============================================================================
# Configuration
# ============================================================================

class SuiteConfig(BaseModel):
    """A verification run: model, truncations and the suites to execute."""

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    zeta: float = Field(1.0, gt=0, description="Casimir parameter zeta (mass in units of 1/r)")
    radius: float = Field(1.0, gt=0, description="de Sitter radius r")
    K: int = Field(64, ge=8, description="One-particle mode cutoff |k| <= K")
    M: int = Field(2, ge=0, description="Fock mode cutoff |k| <= M")
    N_max: int = Field(6, ge=1, description="Total occupation cutoff")
    window: float = Field(6.0, gt=0, description="Spectral window of the Tomita test")
    polynomial: List[float] = Field(
        default_factory=lambda: [0.0, 0.0, 0.0, 0.0, 1.0],
        description="Interaction polynomial coefficients, ascending powers",
    )
    tolerances: Dict[str, float] = Field(
        default_factory=dict, description="Threshold overrides keyed 'suite.metric'"
    )
    suites: List[SuiteName] = Field(default_factory=lambda: list(SUITE_ORDER))
    output_dir: str = Field("reports", description="Report directory")
    precision: Precision = Field(Precision.DOUBLE, description="double or extended")
    workers: int = Field(2, ge=1, le=64, description="Suites run concurrently")

    @field_validator("tolerances")
    @classmethod
    def check_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        for key, threshold in value.items():
            if key not in DEFAULT_THRESHOLDS:
                raise ValueError(f"unknown metric '{key}'")
            if not threshold > 0:
                raise ValueError(f"threshold for '{key}' must be positive, got {threshold}")
        return value

    @model_validator(mode="after")
    def check_cutoffs(self) -> "SuiteConfig":
        if self.M > self.K:
            raise ValueError(f"Fock cutoff M={self.M} exceeds mode cutoff K={self.K}")
        return self

    def threshold(self, suite: SuiteName, metric: str) -> float:
        key = f"{suite.value}.{metric}"
        return self.tolerances.get(key, DEFAULT_THRESHOLDS[key])

    def canonical(self) -> Dict[str, Any]:
        """Hashable view: everything that influences results (output_dir and workers excluded)."""
        return self.model_dump(mode="json", exclude={"output_dir", "workers"})


# ============================================================================
# Reports
# ============================================================================

class SuiteReport(BaseModel):
    """Outcome of one suite: metrics with thresholds and pass flags."""

    suite: SuiteName
    params: Dict[str, Any] = Field(default_factory=dict, description="Parameter echo")
    metrics: Dict[str, float] = Field(default_factory=dict)
    thresholds: Dict[str, float] = Field(default_factory=dict)
    passed: Dict[str, bool] = Field(default_factory=dict)
    all_passed: bool = True
    diagnostics: Dict[str, Any] = Field(default_factory=dict, description="Values without thresholds")
    tables: Dict[str, List[Dict[str, Any]]] = Field(default_factory=dict, description="CSV tables")
    version: str
    config_hash: str
    wall_time: float = Field(0.0, exclude=True, description="Seconds; not part of the report hash")

    @classmethod
    def from_metrics(
        cls,
        suite: SuiteName,
        metrics: Dict[str, float],
        thresholds: Dict[str, float],
        **kwargs,
    ) -> "SuiteReport":
        passed = {name: bool(value <= thresholds[name]) for name, value in metrics.items()}
        return cls(
            suite=suite,
            metrics=metrics,
            thresholds=thresholds,
            passed=passed,
            all_passed=all(passed.values()),
            **kwargs,
        )

    def canonical(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")
