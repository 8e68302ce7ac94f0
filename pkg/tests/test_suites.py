"""
dS QFT Lab - Suite Runner Tests

Tests for the suite configuration, per-suite seeding, the thread-pool runner and report
determinism.
"""

import pytest

CHEAP_SUITES = ["geometry", "omega", "rep", "fock"]


def _config(**overrides):
    from app.schemas import SuiteConfig

    data = {"K": 32, "M": 1, "N_max": 4, "suites": CHEAP_SUITES, "workers": 2}
    data.update(overrides)
    return SuiteConfig.model_validate(data)


# ============================================================================
# Configuration Tests
# ============================================================================

class TestSuiteConfig:
    """Test SuiteConfig validation."""

    def test_defaults(self):
        """An empty document selects every suite at the default truncations."""
        from app.schemas import SUITE_ORDER, SuiteConfig

        config = SuiteConfig.model_validate({})
        assert config.K == 64
        assert config.suites == SUITE_ORDER
        assert config.polynomial == [0.0, 0.0, 0.0, 0.0, 1.0]

    @pytest.mark.parametrize("field,value", [("zeta", -1.0), ("radius", 0.0), ("K", 4), ("N_max", 0)])
    def test_out_of_range_fields(self, field, value):
        """Non-positive model parameters and tiny cutoffs are rejected."""
        from pydantic import ValidationError

        with pytest.raises(ValidationError):
            _config(**{field: value})

    def test_fock_cutoff_above_mode_cutoff(self):
        """M > K is rejected."""
        from pydantic import ValidationError

        with pytest.raises(ValidationError):
            _config(K=8, M=9)

    def test_unknown_field(self):
        """Unknown top-level keys are rejected."""
        from pydantic import ValidationError

        with pytest.raises(ValidationError):
            _config(tolerance={})

    def test_unknown_tolerance_key(self):
        """Threshold overrides must name an existing metric."""
        from pydantic import ValidationError

        with pytest.raises(ValidationError):
            _config(tolerances={"omega.not_a_metric": 1e-3})

    def test_non_positive_tolerance(self):
        """Threshold overrides must be positive."""
        from pydantic import ValidationError

        with pytest.raises(ValidationError):
            _config(tolerances={"omega.casimir_defect": 0.0})

    def test_threshold_override(self):
        """Overrides replace the default for one metric only."""
        from app.schemas import DEFAULT_THRESHOLDS, SuiteName

        config = _config(tolerances={"omega.casimir_defect": 0.5})
        assert config.threshold(SuiteName.OMEGA, "casimir_defect") == 0.5
        assert config.threshold(SuiteName.OMEGA, "evenness_defect") == DEFAULT_THRESHOLDS["omega.evenness_defect"]

    def test_canonical_ignores_runtime_fields(self):
        """output_dir and workers do not enter the config hash."""
        from app.suites import make_context

        a = make_context(_config(output_dir="a", workers=1))
        b = make_context(_config(output_dir="b", workers=4))
        c = make_context(_config(zeta=2.0))
        assert a.config_hash == b.config_hash
        assert a.config_hash != c.config_hash
        assert a.config_hash.startswith("sha256:")


class TestSuiteReport:
    """Test pass flags."""

    def test_pass_rule(self):
        """A metric passes iff value <= threshold."""
        from app.schemas import SuiteName, SuiteReport

        report = SuiteReport.from_metrics(
            SuiteName.OMEGA,
            {"a": 1e-13, "b": 1e-12, "c": 2e-12},
            {"a": 1e-12, "b": 1e-12, "c": 1e-12},
            version="0",
            config_hash="sha256:0",
        )
        assert report.passed == {"a": True, "b": True, "c": False}
        assert report.all_passed is False

    def test_wall_time_not_serialized(self):
        """Wall time stays out of the canonical form."""
        from app.schemas import SuiteName, SuiteReport

        report = SuiteReport.from_metrics(SuiteName.OMEGA, {}, {}, version="0", config_hash="sha256:0")
        report.wall_time = 3.0
        assert "wall_time" not in report.canonical()


# ============================================================================
# Runner Tests
# ============================================================================

class TestRunner:
    """Test run_suites."""

    def test_per_suite_seeds_differ(self):
        """Each suite draws from its own generator."""
        from app.schemas import SuiteName
        from app.suites import make_context

        ctx = make_context(_config())
        a = ctx.rng(SuiteName.FOCK).standard_normal(4)
        b = ctx.rng(SuiteName.REP).standard_normal(4)
        again = ctx.rng(SuiteName.FOCK).standard_normal(4)
        assert (a == again).all()
        assert not (a == b).all()

    def test_empty_selection(self):
        """No suites, no reports."""
        from app.suites import run_suites

        assert run_suites(_config(suites=[])) == []

    def test_invalid_model_raises(self):
        """Model parameters are validated before any suite starts."""
        from app.errors import DomainError
        from app.schemas import SuiteConfig
        from app.suites import run_suites

        config = SuiteConfig.model_construct(**{**_config().model_dump(), "zeta": -1.0})
        with pytest.raises(DomainError):
            run_suites(config)

    def test_reports_in_suite_order(self):
        """Reports come back in dependency order whatever the selection order."""
        from app.schemas import SuiteName
        from app.suites import run_suites

        reports = run_suites(_config(suites=["omega", "geometry"]))
        assert [r.suite for r in reports] == [SuiteName.GEOMETRY, SuiteName.OMEGA]

    def test_cheap_suites_pass(self):
        """Geometry, omega, representation and Fock suites pass at small truncations."""
        from app.suites import run_suites

        reports = run_suites(_config())
        failing = {r.suite.value: [m for m, ok in r.passed.items() if not ok] for r in reports}
        assert all(r.all_passed for r in reports), failing

    def test_thresholds_recorded(self):
        """Every metric carries its threshold and pass flag."""
        from app.suites import run_suites

        (report,) = run_suites(_config(suites=["omega"], tolerances={"omega.casimir_defect": 0.25}))
        assert set(report.metrics) == set(report.thresholds) == set(report.passed)
        assert report.thresholds["casimir_defect"] == 0.25
        assert report.params["K"] == 32

    def test_tightened_threshold_fails(self):
        """An impossible threshold turns a metric red."""
        from app.suites import run_suites

        (report,) = run_suites(_config(suites=["omega"], tolerances={"omega.asymptote_deviation": 1e-300}))
        assert report.passed["asymptote_deviation"] is False
        assert report.all_passed is False

    def test_deterministic_across_workers(self):
        """Same config, same report hash, whatever the worker count."""
        from app.reports import build_summary
        from app.suites import make_context, run_suites

        one = _config(workers=1)
        four = _config(workers=4)
        config_hash = make_context(one).config_hash
        a = build_summary(run_suites(one), config_hash)
        b = build_summary(run_suites(four), config_hash)
        assert a["reports_hash"] == b["reports_hash"]

    def test_negative_controls_are_inverted(self):
        """Negative controls report large violations as small reciprocals."""
        from app.suites import run_suites

        (report,) = run_suites(_config(suites=["rep"]))
        assert report.metrics["negative_control_inverse"] < report.thresholds["negative_control_inverse"]
        control = report.diagnostics["negative_control"]
        assert control["max_defect"] > 1e-3

    @pytest.mark.slow
    def test_all_suites_pass_at_defaults(self):
        """The full default configuration passes every metric."""
        from app.schemas import SuiteConfig
        from app.suites import run_suites

        reports = run_suites(SuiteConfig.model_validate({}))
        failing = {r.suite.value: [m for m, ok in r.passed.items() if not ok] for r in reports}
        assert len(reports) == 12
        assert all(r.all_passed for r in reports), failing


# ============================================================================
# Suite Content Tests
# ============================================================================

class TestSuiteContent:
    """Test which quantities a suite thresholds and which it only records."""

    def test_kappa_radius_is_a_diagnostic(self):
        """kappa r is recorded per zeta but never thresholded."""
        from app.schemas import DEFAULT_THRESHOLDS
        from app.suites import KAPPA_ZETAS, run_suites

        (report,) = run_suites(_config(K=16, suites=["kernel"]))
        assert "kappa_radius_deviation" not in report.metrics
        assert "kernel.kappa_radius_deviation" not in DEFAULT_THRESHOLDS
        assert set(report.metrics) == {"max_deviation", "kappa_spread", "inner_product_oracle_error"}
        minus_two = report.diagnostics["kappa_radius_minus_two"]
        assert minus_two == report.diagnostics["kappa_radius"] - 2.0
        by_zeta = report.diagnostics["kappa_radius_by_zeta"]
        assert {str(z) for z in KAPPA_ZETAS} <= set(by_zeta)

    def test_wick_oracle_metric(self):
        """The Fock suite thresholds the contraction-subtracted oracle at fixed cutoffs."""
        from app.suites import run_suites

        (report,) = run_suites(_config(suites=["fock"]))
        assert report.params["wick_oracle_cutoffs"] == [2, 4]
        assert report.passed["wick_oracle_defect"]

    @pytest.mark.slow
    def test_omega_radius_scan(self):
        """The weight checks hold at K = 512 for every radius of the scan."""
        from app.suites import OMEGA_RADII, OMEGA_RADIUS_K, OMEGA_ZETA_SCAN, run_suites

        (report,) = run_suites(_config(suites=["omega"]))
        rows = report.tables["omega_radius_scan"]
        assert len(rows) == len(OMEGA_RADII) * len(OMEGA_ZETA_SCAN)
        assert {row["radius"] for row in rows} == {0.5, 1.0, 2.0}
        assert all(row["K"] == OMEGA_RADIUS_K == 512 for row in rows)
        assert report.metrics["radius_scan_defect"] <= 1e-12
        assert report.metrics["radius_scan_asymptote"] < 0.01
        assert report.passed["radius_scan_defect"] and report.passed["radius_scan_asymptote"]
