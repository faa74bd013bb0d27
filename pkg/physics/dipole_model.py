import cmath
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from loguru import logger

from physics.errors import CalibrationError, TableMissingChannelError
from physics.params_modes import DerivedQuantities, ModeGrid, PhysicalConfig, derive_quantities
from physics.susceptibility import chi_c_eff, transition_frequency

# 5e14 W/cm^2
DEFAULT_REFERENCE_INTENSITY = 5.0e18


class DipoleVariant(Enum):
    CONSTANT = "constant"
    PLATEAU_CUTOFF = "plateau_cutoff"
    TABLE_FILE = "table_file"


@dataclass(frozen=True)
class DipoleModel:
    """
    Phenomenological effective dipoles.

    mu0 and mu_b are in units that make the susceptibility dimensionless
    (1/eps0 absorbed), i.e. sqrt(J m^3).
    """

    variant: DipoleVariant
    mu0: complex
    mu_b: complex
    cutoff_decay: float = 1.0
    intensity_scaling_exponent: float = 0.0
    reference_intensity: float = DEFAULT_REFERENCE_INTENSITY
    table_path: Optional[str] = None
    table: Tuple[Tuple[int, complex], ...] = field(default_factory=tuple)
    calibration_scale: float = 1.0

    def __post_init__(self):
        if isinstance(self.variant, str):
            object.__setattr__(self, "variant", DipoleVariant(self.variant))
        object.__setattr__(self, "mu0", complex(self.mu0))
        object.__setattr__(self, "mu_b", complex(self.mu_b))
        if self.variant is not DipoleVariant.TABLE_FILE and self.mu0 == 0:
            raise ValueError("mu0 must be non-zero")
        if not self.cutoff_decay > 0:
            raise ValueError(f"cutoff_decay must be > 0, got {self.cutoff_decay}")
        if self.intensity_scaling_exponent < 0:
            raise ValueError(
                f"intensity_scaling_exponent must be >= 0, got {self.intensity_scaling_exponent}"
            )
        if not self.reference_intensity > 0:
            raise ValueError(f"reference_intensity must be > 0, got {self.reference_intensity}")
        if self.variant is DipoleVariant.TABLE_FILE and not self.table:
            raise ValueError("table_file variant needs table entries (use load_dipole_model)")

    @property
    def table_map(self) -> Dict[int, complex]:
        return dict(self.table)

    def scaled(self, factor: float) -> "DipoleModel":
        """Multiply every dipole amplitude (mu_eg and mu_b) by factor."""
        return replace(
            self,
            mu0=self.mu0 * factor,
            mu_b=self.mu_b * factor,
            table=tuple((n, mu * factor) for n, mu in self.table),
            calibration_scale=self.calibration_scale * factor,
        )


@dataclass(frozen=True)
class ChannelDipoles:
    """mu_eg(n w_pu) per grid channel (grid order) and the shared bound element."""

    mu_eg: Tuple[complex, ...]
    mu_b: complex

    def __post_init__(self):
        values = list(self.mu_eg) + [self.mu_b]
        if not all(cmath.isfinite(v) for v in values):
            raise ValueError(f"non-finite dipole value in {values}")


def intensity_scaling(model: DipoleModel, intensity: float) -> float:
    """s(I) = (I / I_ref)^(p/2)."""
    return (intensity / model.reference_intensity) ** (model.intensity_scaling_exponent / 2.0)


def effective_recombination_dipole(model: DipoleModel, n: int, derived: DerivedQuantities) -> complex:
    if model.variant is DipoleVariant.TABLE_FILE:
        entries = model.table_map
        if n not in entries:
            raise TableMissingChannelError(
                f"dipole table {model.table_path or '<inline>'} has no entry for n={n}"
            )
        return entries[n]

    amplitude = model.mu0 * intensity_scaling(model, derived.pump_intensity)
    if model.variant is DipoleVariant.CONSTANT:
        return amplitude

    photon = derived.photon_energy_pu
    energy = n * photon
    if energy <= derived.cutoff_energy:
        return amplitude
    return amplitude * math.exp(-model.cutoff_decay * (energy - derived.cutoff_energy) / photon)


def bound_dipole(model: DipoleModel) -> complex:
    return model.mu_b


def channel_dipoles(model: DipoleModel, grid: ModeGrid, derived: DerivedQuantities) -> ChannelDipoles:
    return ChannelDipoles(
        mu_eg=tuple(effective_recombination_dipole(model, ch.n, derived) for ch in grid.channels),
        mu_b=bound_dipole(model),
    )


def peak_chi_c(model: DipoleModel, grid: ModeGrid, cfg: PhysicalConfig) -> float:
    derived = derive_quantities(cfg)
    dipoles = channel_dipoles(model, grid, derived)
    omega_eg = transition_frequency(cfg)
    return max(
        abs(chi_c_eff(grid, dipoles, derived.gas_density_rho, cfg.dephasing_gamma, omega_eg, ch.n))
        for ch in grid.channels
    )


def calibrate_dipole(
    model: DipoleModel, grid: ModeGrid, target_peak_chi: float, cfg: PhysicalConfig
) -> DipoleModel:
    """
    Rescale mu_eg and mu_b by a common factor so that max_k |chi_c| hits the target.
    """
    if not target_peak_chi > 0:
        raise CalibrationError(f"target_peak_chi must be > 0, got {target_peak_chi}")
    current = peak_chi_c(model, grid, cfg)
    if current == 0:
        raise CalibrationError("cannot calibrate: all conjugate susceptibilities vanish (mu_b = 0?)")
    factor = math.sqrt(target_peak_chi / current)
    logger.info(
        f"Calibrating dipoles: peak |chi_c| {current:.4e} -> {target_peak_chi:.4e} "
        f"(amplitude factor {factor:.6e})"
    )
    return model.scaled(factor)


# ----------------- Table file -----------------
def read_dipole_table(path: Union[str, Path]) -> Tuple[Optional[complex], Dict[int, complex]]:
    """
    Parse `n re im` records and an optional `mu_b re im` header line.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Dipole table not found: {path}")

    mu_b = None
    entries: Dict[int, complex] = {}
    with path.open("r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            key, re_part, im_part = parts
            value = complex(float(re_part), float(im_part))
            if key == "mu_b":
                mu_b = value
            else:
                n = int(key)
                if n in entries:
                    raise ValueError(f"{path}:{lineno}: duplicate entry for n={n}")
                entries[n] = value
    return mu_b, entries


def write_dipole_table(
    path: Union[str, Path], mu_b: complex, entries: Dict[int, complex]
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        f.write("# effective recombination dipoles: n re(mu_eg) im(mu_eg)\n")
        f.write(f"mu_b {mu_b.real:.17g} {mu_b.imag:.17g}\n")
        for n in sorted(entries):
            mu = complex(entries[n])
            f.write(f"{n} {mu.real:.17g} {mu.imag:.17g}\n")
    return path


def load_dipole_model(
    variant: Union[str, DipoleVariant],
    mu0: complex,
    mu_b: complex,
    cutoff_decay: float = 1.0,
    intensity_scaling_exponent: float = 0.0,
    reference_intensity: float = DEFAULT_REFERENCE_INTENSITY,
    table_path: Optional[str] = None,
) -> DipoleModel:
    """Build a DipoleModel, reading the table file for the table variant."""
    variant = DipoleVariant(variant)
    table: Tuple[Tuple[int, complex], ...] = ()
    if variant is DipoleVariant.TABLE_FILE:
        if not table_path:
            raise ValueError("table_file variant requires table_path")
        table_mu_b, entries = read_dipole_table(table_path)
        table = tuple(sorted(entries.items()))
        if table_mu_b is not None:
            mu_b = table_mu_b
        logger.debug(f"Loaded {len(table)} dipole entries from {table_path}")
    return DipoleModel(
        variant=variant,
        mu0=mu0,
        mu_b=mu_b,
        cutoff_decay=cutoff_decay,
        intensity_scaling_exponent=intensity_scaling_exponent,
        reference_intensity=reference_intensity,
        table_path=table_path,
        table=table,
    )
