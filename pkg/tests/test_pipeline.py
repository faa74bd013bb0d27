import math

import numpy as np
import pytest

from helpers import CALIBRATED_PEAK_CHI
from physics.dipole_model import write_dipole_table
from physics.errors import (
    CalibrationError,
    ConfigError,
    ConfigValidationError,
    EmptyGridError,
    TwinBeamError,
)
from physics.moments import report_columns
from physics.propagation import SolverMethod
from scripts.pipelines.squeeze_pipeline import (
    TwinBeamPipeline,
    calibrate_to_noise_figure,
    current_peak_chi,
)

MU = 9.0e-26


@pytest.fixture
def pipeline(calibrated_config):
    return TwinBeamPipeline(calibrated_config)


def test_reports_cover_every_channel(pipeline):
    reports = pipeline.run()
    assert [r.n for r in reports] == [14, 16, 18]
    assert [r.k for r in reports] == [0, 1, 2]
    np.testing.assert_allclose([r.omega_c_over_pu for r in reports], [11.0, 13.0, 15.0], rtol=1e-14)
    for report in reports:
        assert report.var > 0
        assert report.var_snl > 0
        assert report.snf_db == pytest.approx(10 * report.snf_log10)
        assert report.solver_delta < 1e-8
        assert report.mean_n_pr > 0
        assert report.mean_I_pr > 0
        assert list(report.as_row()) == report_columns()


def test_calibration_sets_peak_chi(pipeline):
    assert current_peak_chi(pipeline, 3, 14) == pytest.approx(CALIBRATED_PEAK_CHI, rel=1e-12)
    assert pipeline.model.calibration_scale > 0


def test_calibrated_pair_is_squeezed(pipeline):
    report = pipeline.pair(3, 14)
    assert report.n == 14
    assert report.snf_log10 < 0
    assert report.mean_n_pr == pytest.approx(pipeline.state.photon_number, rel=1e-2)


def test_without_bound_dipole_there_is_no_squeezing(sim_config):
    config = sim_config.with_section("dipole", mu_b=0.0)
    reports = TwinBeamPipeline(config).run()
    for report in reports:
        assert report.snf_log10 == 0.0
        assert report.two_mode_snf_log10 == 0.0
        assert report.var == pytest.approx(1.0e4)


def test_single_channel_matches_two_mode_closed_form(calibrated_config):
    config = calibrated_config.with_section("physics", channel_orders_n=[14])
    report = TwinBeamPipeline(config).pair(3, 14)
    assert report.snf_log10 == pytest.approx(report.two_mode_snf_log10, rel=1e-10)


def test_weak_extra_channel_stays_close_to_two_mode(tmp_path, calibrated_config):
    table = write_dipole_table(tmp_path / "dipoles.txt", MU, {14: MU, 18: 0.01 * MU})
    config = calibrated_config.with_section("physics", channel_orders_n=[14, 18]).with_section(
        "dipole", variant="table_file", table_path=str(table)
    )
    report = TwinBeamPipeline(config).pair(3, 14)
    assert report.snf_log10 != report.two_mode_snf_log10
    assert abs(report.snf_log10 - report.two_mode_snf_log10) <= 0.01 * abs(report.two_mode_snf_log10)


def test_pair_adds_requested_channel(pipeline):
    report = pipeline.pair(3, 20)
    assert report.n == 20
    assert report.omega_c_over_pu == pytest.approx(17.0)


def test_inadmissible_pair_is_rejected(pipeline):
    with pytest.raises(EmptyGridError):
        pipeline.pair(3, 2)
    with pytest.raises(EmptyGridError):
        pipeline.pair(16, 16)


def test_invalid_physics_is_rejected(sim_config):
    with pytest.raises(ConfigValidationError):
        TwinBeamPipeline(sim_config.with_section("physics", pressure_bar=0.0))


def test_solver_choice_does_not_change_results(calibrated_config):
    analytic = TwinBeamPipeline(calibrated_config).pair(3, 14)
    config = calibrated_config.with_section("solver", method="eigen", cross_check="ode", ode_steps=2000)
    eigen = TwinBeamPipeline(config).pair(3, 14)
    assert eigen.snf_log10 == pytest.approx(analytic.snf_log10, rel=1e-8)
    assert eigen.solver_delta < 1e-8


def test_no_cross_check_leaves_delta_empty(calibrated_config):
    config = calibrated_config.with_section("solver", cross_check=None)
    assert math.isnan(TwinBeamPipeline(config).pair(3, 14).solver_delta)
    assert TwinBeamPipeline(config).method is SolverMethod.ANALYTIC


def test_chi_and_transfer_rows(pipeline):
    chi = pipeline.chi_rows()
    assert [r["n"] for r in chi] == [14, 16, 18]
    assert chi[0]["kappa_c_re"] < 0
    assert abs(chi[0]["chi_c_im"]) > abs(chi[1]["chi_c_im"])
    rows = pipeline.transfer_rows(z=0.0)
    assert len(rows) == 16
    for row in rows:
        expected = 1.0 if row["row"] == row["col"] else 0.0
        assert row["re"] == expected
        assert row["im"] == 0.0


def test_wigner_slice_diagnostics(pipeline):
    grid, diagnostics = pipeline.wigner(14)
    section = pipeline.config.wigner
    assert grid.values.shape == tuple(section.samples)
    assert grid.mode_pair == (0, 1)
    assert grid.metadata["n"] == 14
    assert diagnostics["numeric_slice_integral"] == pytest.approx(
        diagnostics["analytic_slice_integral"], rel=1e-3
    )
    assert diagnostics["symplectic_residual"] >= 0
    with pytest.raises(EmptyGridError):
        pipeline.wigner(2)


def test_calibrate_to_noise_figure(pipeline):
    result = calibrate_to_noise_figure(pipeline, 3, 14, -0.5)
    assert result.snf_db == pytest.approx(-0.5, abs=1e-6)
    assert 0 < result.peak_chi < CALIBRATED_PEAK_CHI
    assert pipeline.with_model(result.model).pair(3, 14).snf_db == pytest.approx(-0.5, abs=1e-6)


def test_calibrate_to_one_db_of_squeezing(pipeline):
    result = calibrate_to_noise_figure(pipeline, 3, 14, -1.0)
    assert result.snf_db == pytest.approx(-1.0, abs=1e-6)
    assert CALIBRATED_PEAK_CHI < result.peak_chi < 1e-5
    report = pipeline.with_model(result.model).pair(3, 14)
    assert report.snf_log10 == pytest.approx(-0.1, abs=1e-7)
    assert current_peak_chi(pipeline.with_model(result.model), 3, 14) == pytest.approx(result.peak_chi, rel=1e-10)


def test_calibration_target_must_squeeze(pipeline):
    with pytest.raises(CalibrationError):
        calibrate_to_noise_figure(pipeline, 3, 14, 0.5)
    with pytest.raises(CalibrationError):
        calibrate_to_noise_figure(pipeline, 3, 14, -30.0, max_chi=1e-7)


def test_calibration_without_bound_dipole_is_a_simulation_error(calibrated_config):
    with pytest.raises(TwinBeamError):
        TwinBeamPipeline(calibrated_config.with_section("dipole", mu_b=0.0))


def test_unknown_solver_is_a_config_error(sim_config):
    with pytest.raises(ConfigError):
        TwinBeamPipeline(sim_config.with_section("solver", method="magnus"))
