import math
from dataclasses import replace
from pathlib import Path

import pytest

from physics.dipole_model import (
    DipoleModel,
    DipoleVariant,
    calibrate_dipole,
    channel_dipoles,
    effective_recombination_dipole,
    intensity_scaling,
    load_dipole_model,
    peak_chi_c,
    read_dipole_table,
    write_dipole_table,
)
from physics.errors import CalibrationError, TableMissingChannelError, TwinBeamError
from physics.params_modes import build_mode_grid, derive_quantities

REPO_ROOT = Path(__file__).resolve().parents[1]
MU = 9.0e-26


@pytest.fixture
def derived(default_cfg):
    return derive_quantities(default_cfg)


def test_constant_variant_is_channel_independent(default_cfg, derived):
    model = DipoleModel(DipoleVariant.CONSTANT, mu0=MU, mu_b=2 * MU)
    grid = build_mode_grid(default_cfg)
    dipoles = channel_dipoles(model, grid, derived)
    assert dipoles.mu_eg == (MU, MU, MU)
    assert dipoles.mu_b == 2 * MU


def test_variant_accepts_string():
    assert DipoleModel("plateau_cutoff", mu0=MU, mu_b=MU).variant is DipoleVariant.PLATEAU_CUTOFF


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mu0": 0.0},
        {"cutoff_decay": 0.0},
        {"intensity_scaling_exponent": -1.0},
        {"reference_intensity": 0.0},
    ],
)
def test_invalid_models_are_rejected(kwargs):
    params = {"variant": "constant", "mu0": MU, "mu_b": MU, **kwargs}
    with pytest.raises(ValueError):
        DipoleModel(**params)


def test_table_variant_needs_entries():
    with pytest.raises(ValueError):
        DipoleModel(DipoleVariant.TABLE_FILE, mu0=0.0, mu_b=MU)


def test_intensity_scaling_half_power():
    model = DipoleModel(DipoleVariant.CONSTANT, mu0=MU, mu_b=MU, intensity_scaling_exponent=1.0)
    assert intensity_scaling(model, 4 * model.reference_intensity) == pytest.approx(2.0)
    flat = DipoleModel(DipoleVariant.CONSTANT, mu0=MU, mu_b=MU)
    assert intensity_scaling(flat, 1e10) == 1.0


def test_intensity_scaling_enters_recombination_dipole(derived):
    model = DipoleModel(
        DipoleVariant.CONSTANT,
        mu0=MU,
        mu_b=MU,
        intensity_scaling_exponent=2.0,
        reference_intensity=derived.pump_intensity / 3.0,
    )
    assert effective_recombination_dipole(model, 14, derived) == pytest.approx(3.0 * MU, rel=1e-12)


def test_plateau_cutoff_rolls_off_above_cutoff(derived):
    photon = derived.photon_energy_pu
    near = replace(derived, cutoff_energy=20 * photon)
    model = DipoleModel(DipoleVariant.PLATEAU_CUTOFF, mu0=MU, mu_b=MU, cutoff_decay=0.5)
    assert effective_recombination_dipole(model, 14, near) == MU
    assert effective_recombination_dipole(model, 20, near) == MU
    assert effective_recombination_dipole(model, 22, near) == pytest.approx(MU * math.exp(-1.0), rel=1e-12)
    assert effective_recombination_dipole(model, 26, near) == pytest.approx(MU * math.exp(-3.0), rel=1e-12)


def test_table_missing_channel(tmp_path, default_cfg, derived):
    path = write_dipole_table(tmp_path / "dipoles.txt", MU, {14: MU, 16: 0.5 * MU})
    model = load_dipole_model("table_file", mu0=0.0, mu_b=0.0, table_path=str(path))
    with pytest.raises(TableMissingChannelError) as excinfo:
        channel_dipoles(model, build_mode_grid(default_cfg), derived)
    assert "n=18" in str(excinfo.value)
    assert isinstance(excinfo.value, KeyError)


def test_table_header_overrides_bound_dipole(tmp_path, default_cfg, derived):
    entries = {14: complex(MU, 1e-27), 16: 0.5 * MU, 18: 0.25 * MU}
    path = write_dipole_table(tmp_path / "dipoles.txt", complex(2 * MU, -3e-27), entries)
    model = load_dipole_model("table_file", mu0=0.0, mu_b=MU, table_path=str(path))
    assert model.mu_b == complex(2 * MU, -3e-27)
    dipoles = channel_dipoles(model, build_mode_grid(default_cfg), derived)
    assert dipoles.mu_eg == (entries[14], entries[16], entries[18])


def test_table_reader_ignores_comments(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("# header\n\n14 1.0 0.0  # plateau\n16 2.0 -1.0\n", encoding="utf-8")
    mu_b, entries = read_dipole_table(path)
    assert mu_b is None
    assert entries == {14: 1.0 + 0j, 16: 2.0 - 1.0j}


@pytest.mark.parametrize("content", ["14 1.0\n", "14 1.0 0.0\n14 2.0 0.0\n", "x 1.0 0.0\n"])
def test_table_reader_rejects_malformed_lines(tmp_path, content):
    path = tmp_path / "table.txt"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ValueError):
        read_dipole_table(path)


def test_missing_table_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_dipole_model("table_file", mu0=0.0, mu_b=MU, table_path=str(tmp_path / "absent.txt"))


def test_bundled_table_covers_plateau():
    model = load_dipole_model(
        "table_file", mu0=0.0, mu_b=MU, table_path=str(REPO_ROOT / "configs" / "dipole_table.txt")
    )
    orders = set(model.table_map)
    assert {14, 16, 18, 20}.issubset(orders)


def test_calibration_hits_target(default_cfg):
    grid = build_mode_grid(default_cfg)
    model = DipoleModel(DipoleVariant.CONSTANT, mu0=MU, mu_b=MU)
    before = peak_chi_c(model, grid, default_cfg)
    calibrated = calibrate_dipole(model, grid, 5e-6, default_cfg)
    assert peak_chi_c(calibrated, grid, default_cfg) == pytest.approx(5e-6, rel=1e-12)
    assert calibrated.calibration_scale == pytest.approx(math.sqrt(5e-6 / before), rel=1e-12)
    assert calibrated.mu0 / model.mu0 == pytest.approx(calibrated.calibration_scale)
    assert calibrated.mu_b / model.mu_b == pytest.approx(calibrated.calibration_scale)


def test_calibration_without_bound_dipole_fails(default_cfg):
    grid = build_mode_grid(default_cfg)
    model = DipoleModel(DipoleVariant.CONSTANT, mu0=MU, mu_b=0.0)
    with pytest.raises(TwinBeamError):
        calibrate_dipole(model, grid, 5e-6, default_cfg)
    with pytest.raises(CalibrationError):
        calibrate_dipole(replace(model, mu_b=MU), grid, 0.0, default_cfg)


def test_scaled_scales_table_entries():
    model = DipoleModel(DipoleVariant.TABLE_FILE, mu0=0.0, mu_b=MU, table=((14, MU),))
    doubled = model.scaled(2.0).scaled(1.5)
    assert doubled.table_map[14] == pytest.approx(3.0 * MU)
    assert doubled.calibration_scale == pytest.approx(3.0)
