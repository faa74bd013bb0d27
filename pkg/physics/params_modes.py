import math
from dataclasses import dataclass, field, replace
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import constants

from physics.errors import ConfigValidationError, EmptyGridError, Violation, ViolationKind

# cutoff law of the three-step model
CUTOFF_UP_FACTOR = 3.17


@dataclass(frozen=True)
class PhysicalConfig:
    """Experiment parameters in SI units (J, m, s, Pa, K, W/m^2)."""

    pump_wavelength: float
    pump_intensity: float
    pressure: float
    temperature: float
    cell_length_z: float
    dephasing_gamma: float
    ground_energy_Eg: float
    excited_energy_Ee: float
    ionization_potential_Ip: float
    probe_order_q: int
    channel_orders_n: Tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "channel_orders_n", tuple(int(n) for n in self.channel_orders_n))
        object.__setattr__(self, "probe_order_q", int(self.probe_order_q))

    @property
    def omega_pu(self) -> float:
        return 2.0 * math.pi * constants.c / self.pump_wavelength

    @property
    def pump_photon_energy(self) -> float:
        return constants.h * constants.c / self.pump_wavelength

    def with_updates(self, **changes) -> "PhysicalConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class DerivedQuantities:
    gas_density_rho: float
    ponderomotive_Up: float
    cutoff_energy: float
    field_amplitude_E0: float
    photon_energy_pu: float
    pump_intensity: float


@dataclass(frozen=True)
class Channel:
    """One conjugate mode reached by absorbing n pump photons."""

    n: int
    omega_c: float

    @property
    def k_c(self) -> float:
        return self.omega_c / constants.c


@dataclass(frozen=True)
class ModeGrid:
    omega_pu: float
    omega_pr: float
    probe_order_q: int
    channels: Tuple[Channel, ...]

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def n_modes(self) -> int:
        return len(self.channels) + 1

    @property
    def k_pr(self) -> float:
        return self.omega_pr / constants.c

    @property
    def omegas(self) -> np.ndarray:
        """Angular frequencies, probe first then conjugates in grid order."""
        return np.array([self.omega_pr] + [ch.omega_c for ch in self.channels])

    @property
    def wavevectors(self) -> np.ndarray:
        return self.omegas / constants.c

    @property
    def channel_orders(self) -> List[int]:
        return [ch.n for ch in self.channels]

    @property
    def conjugate_orders(self) -> List[int]:
        return [ch.n - self.probe_order_q for ch in self.channels]

    def channel_index(self, n: int) -> int:
        for k, ch in enumerate(self.channels):
            if ch.n == n:
                return k
        raise KeyError(f"channel n={n} is not on the grid {self.channel_orders}")


def gas_density(pressure: float, temperature: float) -> float:
    """Ideal-gas number density in 1/m^3."""
    if pressure <= 0 or temperature <= 0:
        raise ValueError(f"pressure and temperature must be positive, got {pressure}, {temperature}")
    return pressure / (constants.k * temperature)


def field_amplitude(intensity: float) -> float:
    """Peak field (V/m) of a linearly polarized monochromatic wave."""
    if intensity < 0:
        raise ValueError(f"intensity must be non-negative, got {intensity}")
    return math.sqrt(2.0 * intensity / (constants.epsilon_0 * constants.c))


def ponderomotive_energy(intensity: float, wavelength: float) -> float:
    """U_p = e^2 E0^2 / (4 m_e w^2) in J."""
    if wavelength <= 0:
        raise ValueError(f"wavelength must be positive, got {wavelength}")
    omega = 2.0 * math.pi * constants.c / wavelength
    e0 = field_amplitude(intensity)
    return constants.e**2 * e0**2 / (4.0 * constants.m_e * omega**2)


def derive_quantities(cfg: PhysicalConfig) -> DerivedQuantities:
    up = ponderomotive_energy(cfg.pump_intensity, cfg.pump_wavelength)
    return DerivedQuantities(
        gas_density_rho=gas_density(cfg.pressure, cfg.temperature),
        ponderomotive_Up=up,
        cutoff_energy=cfg.ionization_potential_Ip + CUTOFF_UP_FACTOR * up,
        field_amplitude_E0=field_amplitude(cfg.pump_intensity),
        photon_energy_pu=cfg.pump_photon_energy,
        pump_intensity=cfg.pump_intensity,
    )


def validate_config(cfg: PhysicalConfig) -> PhysicalConfig:
    """
    Check every invariant of the physical configuration.

    Returns:
        The same config when it is valid.

    Raises:
        ConfigValidationError carrying the complete list of violations.
    """
    violations: List[Violation] = []

    positive = {
        "pump_wavelength": cfg.pump_wavelength,
        "pump_intensity": cfg.pump_intensity,
        "pressure": cfg.pressure,
        "temperature": cfg.temperature,
        "cell_length_z": cfg.cell_length_z,
        "dephasing_gamma": cfg.dephasing_gamma,
        "ionization_potential_Ip": cfg.ionization_potential_Ip,
        "probe_order_q": cfg.probe_order_q,
    }
    for name, value in positive.items():
        if not (value > 0) or not math.isfinite(value):
            violations.append(
                Violation(ViolationKind.NON_POSITIVE_PARAMETER, f"{name} must be > 0, got {value}")
            )

    if not cfg.channel_orders_n:
        violations.append(
            Violation(ViolationKind.NON_POSITIVE_PARAMETER, "channel_orders_n is empty")
        )

    if not cfg.excited_energy_Ee > cfg.ground_energy_Eg:
        violations.append(
            Violation(
                ViolationKind.INCONSISTENT_ENERGIES,
                f"excited energy {cfg.excited_energy_Ee} J must exceed ground energy "
                f"{cfg.ground_energy_Eg} J",
            )
        )
    if not math.isclose(cfg.ionization_potential_Ip, -cfg.ground_energy_Eg, rel_tol=1e-12):
        violations.append(
            Violation(
                ViolationKind.INCONSISTENT_ENERGIES,
                f"ionization potential {cfg.ionization_potential_Ip} J must equal -Eg "
                f"({-cfg.ground_energy_Eg} J)",
            )
        )

    if cfg.pump_wavelength > 0:
        photon = cfg.pump_photon_energy
        for n in cfg.channel_orders_n:
            if n <= 0:
                violations.append(
                    Violation(ViolationKind.NON_POSITIVE_PARAMETER, f"channel order {n} must be > 0")
                )
                continue
            if not n * photon > cfg.ionization_potential_Ip:
                violations.append(
                    Violation(
                        ViolationKind.BELOW_THRESHOLD_CHANNEL,
                        f"n={n}: n*hbar*w_pu = {n * photon:.6g} J <= Ip = "
                        f"{cfg.ionization_potential_Ip:.6g} J",
                    )
                )
            if not n > cfg.probe_order_q:
                violations.append(
                    Violation(
                        ViolationKind.NEGATIVE_CONJUGATE_FREQUENCY,
                        f"n={n}: conjugate order n - q = {n - cfg.probe_order_q} is not positive",
                    )
                )

    if violations:
        raise ConfigValidationError(violations)
    return cfg


def default_channel_orders(cfg: PhysicalConfig, parity: str = "even") -> Tuple[int, ...]:
    """Channel orders from threshold up to the cutoff, filtered by parity."""
    if parity not in ("even", "odd", "any"):
        raise ValueError(f"parity must be 'even', 'odd' or 'any', got: {parity}")
    derived = derive_quantities(cfg)
    photon = cfg.pump_photon_energy
    n_max = int(math.floor(derived.cutoff_energy / photon))
    orders = []
    for n in range(cfg.probe_order_q + 1, n_max + 1):
        if parity == "even" and n % 2:
            continue
        if parity == "odd" and not n % 2:
            continue
        if n * photon > cfg.ionization_potential_Ip:
            orders.append(n)
    return tuple(orders)


def build_mode_grid(cfg: PhysicalConfig) -> ModeGrid:
    """
    Probe at q*w_pu plus one conjugate channel per admissible n.

    Orders failing the above-threshold or positive-frequency filter are skipped.

    Raises:
        EmptyGridError if no channel survives.
    """
    omega_pu = cfg.omega_pu
    omega_pr = cfg.probe_order_q * omega_pu
    photon = cfg.pump_photon_energy

    channels = []
    for n in sorted(set(cfg.channel_orders_n)):
        if not n * photon > cfg.ionization_potential_Ip:
            logger.debug(f"Skipping n={n}: below ionization threshold")
            continue
        total = n * omega_pu
        omega_c = total - omega_pr
        if not omega_c > 0:
            logger.debug(f"Skipping n={n}: conjugate frequency {omega_c:.4g} rad/s not positive")
            continue
        assert abs((omega_c + omega_pr) - total) <= np.spacing(total), (
            f"energy conservation broken for n={n}"
        )
        channels.append(Channel(n=n, omega_c=omega_c))

    if not channels:
        raise EmptyGridError(
            f"no channel in {list(cfg.channel_orders_n)} is admissible for probe order "
            f"q={cfg.probe_order_q}"
        )
    return ModeGrid(
        omega_pu=omega_pu,
        omega_pr=omega_pr,
        probe_order_q=cfg.probe_order_q,
        channels=tuple(channels),
    )


def restrict_grid(grid: ModeGrid, orders: Sequence[int]) -> ModeGrid:
    """Sub-grid keeping only the listed channel orders."""
    wanted = set(orders)
    kept = tuple(ch for ch in grid.channels if ch.n in wanted)
    if not kept:
        raise EmptyGridError(f"none of {sorted(wanted)} is on the grid {grid.channel_orders}")
    return replace(grid, channels=kept)


def uniform_grid(n_channels: int, omega_pu: float = 1.0, probe_order_q: int = 1) -> ModeGrid:
    """Grid with consecutive channel orders q+1, ..., q+N in arbitrary frequency units."""
    if n_channels < 1:
        raise EmptyGridError(f"n_channels must be >= 1, got {n_channels}")
    omega_pr = probe_order_q * omega_pu
    channels = tuple(
        Channel(n=n, omega_c=n * omega_pu - omega_pr)
        for n in range(probe_order_q + 1, probe_order_q + n_channels + 1)
    )
    return ModeGrid(omega_pu=omega_pu, omega_pr=omega_pr, probe_order_q=probe_order_q, channels=channels)
