"""YAML configuration: sections as dataclasses, boundary units converted to SI once."""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from physics.dipole_model import DipoleModel, load_dipole_model
from physics.errors import ConfigError
from physics.params_modes import PhysicalConfig, default_channel_orders
from utils import units

ComplexLike = Union[float, int, List[float]]


def parse_complex(value: ComplexLike, name: str) -> complex:
    """Accept a real number or a [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"{name}: expected [re, im], got {value}")
        return complex(float(value[0]), float(value[1]))
    try:
        return complex(float(value))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{name}: not a number: {value!r}") from e


@dataclass
class PhysicsSection:
    pump_wavelength_nm: float = 1240.0
    pump_intensity_w_cm2: float = 5.0e14
    pressure_bar: float = 0.5
    temperature_k: float = 300.0
    cell_length_mm: float = 2.0
    dephasing_gamma: float = 1.2e9  # 1/s
    ground_energy_ev: float = -12.13
    excited_energy_ev: float = -1.0
    ionization_potential_ev: float = 12.13
    probe_order_q: int = 3
    channel_orders_n: Optional[List[int]] = field(default_factory=lambda: [14, 16, 18])
    channel_parity: str = "even"

    def to_physical(self) -> PhysicalConfig:
        cfg = PhysicalConfig(
            pump_wavelength=units.nm_to_m(self.pump_wavelength_nm),
            pump_intensity=units.w_cm2_to_w_m2(self.pump_intensity_w_cm2),
            pressure=units.bar_to_pa(self.pressure_bar),
            temperature=float(self.temperature_k),
            cell_length_z=units.mm_to_m(self.cell_length_mm),
            dephasing_gamma=float(self.dephasing_gamma),
            ground_energy_Eg=units.ev_to_joule(self.ground_energy_ev),
            excited_energy_Ee=units.ev_to_joule(self.excited_energy_ev),
            ionization_potential_Ip=units.ev_to_joule(self.ionization_potential_ev),
            probe_order_q=self.probe_order_q,
            channel_orders_n=tuple(self.channel_orders_n or ()),
        )
        if self.channel_orders_n is None:
            cfg = cfg.with_updates(channel_orders_n=default_channel_orders(cfg, self.channel_parity))
        return cfg


@dataclass
class DipoleSection:
    variant: str = "constant"
    mu0: ComplexLike = 9.0e-26
    mu_b: ComplexLike = 9.0e-26
    cutoff_decay: float = 1.0
    intensity_scaling_exponent: float = 0.0
    reference_intensity_w_cm2: float = 5.0e14
    table_path: Optional[str] = None
    calibrate_peak_chi: Optional[float] = None
    target_snf_db: Optional[float] = None

    def to_model(self) -> DipoleModel:
        try:
            return load_dipole_model(
                variant=self.variant,
                mu0=parse_complex(self.mu0, "dipole.mu0"),
                mu_b=parse_complex(self.mu_b, "dipole.mu_b"),
                cutoff_decay=self.cutoff_decay,
                intensity_scaling_exponent=self.intensity_scaling_exponent,
                reference_intensity=units.w_cm2_to_w_m2(self.reference_intensity_w_cm2),
                table_path=self.table_path,
            )
        except (ValueError, FileNotFoundError) as e:
            raise ConfigError(f"dipole section: {e}") from e


@dataclass
class QuantumSection:
    probe_photon_number: float = 1.0e4
    probe_phase: float = 0.0


@dataclass
class SolverSection:
    method: str = "analytic"
    cross_check: Optional[str] = "eigen"
    ode_steps: int = 10_000
    condition_limit: float = 1.0e8


@dataclass
class MapSection:
    probe_orders: List[int] = field(default_factory=lambda: [1, 3, 5, 7])
    channel_orders: Optional[List[int]] = field(default_factory=lambda: [14, 16, 18, 20])


@dataclass
class SweepSection:
    variable: str = "pump_intensity"
    start: float = 1.0e14
    stop: float = 6.0e14
    count: int = 11
    spacing: str = "linear"
    channel_n: int = 14
    probe_order_q: Optional[int] = None


@dataclass
class WignerSection:
    channel_n: int = 14
    x_range: List[float] = field(default_factory=lambda: [-4.0, 4.0])
    y_range: List[float] = field(default_factory=lambda: [-4.0, 4.0])
    samples: List[int] = field(default_factory=lambda: [101, 101])
    literal: bool = False


@dataclass
class ProcessingSection:
    max_workers: Optional[int] = None


@dataclass
class LoggingSection:
    level: str = "INFO"
    save_logs: bool = False
    log_file: str = "twin_beams.log"


_SECTIONS = {
    "physics": PhysicsSection,
    "dipole": DipoleSection,
    "quantum": QuantumSection,
    "solver": SolverSection,
    "map": MapSection,
    "sweep": SweepSection,
    "wigner": WignerSection,
    "processing": ProcessingSection,
    "logging": LoggingSection,
}


def _coerce_numbers(section_cls, raw: Dict[str, Any]) -> Dict[str, Any]:
    """
    Float fields accept ints and exponent strings such as "5.0e14", which
    yaml.safe_load leaves as str.
    """
    out = dict(raw)
    for f in fields(section_cls):
        if f.name not in out or out[f.name] is None:
            continue
        if f.type in (float, Optional[float]) and not isinstance(out[f.name], bool):
            out[f.name] = float(out[f.name])
    return out


# sections that cannot change any computed number
_UNHASHED = ("processing", "logging")


@dataclass
class SimulationConfig:
    """Complete run configuration."""

    physics: PhysicsSection = field(default_factory=PhysicsSection)
    dipole: DipoleSection = field(default_factory=DipoleSection)
    quantum: QuantumSection = field(default_factory=QuantumSection)
    solver: SolverSection = field(default_factory=SolverSection)
    map: MapSection = field(default_factory=MapSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    wigner: WignerSection = field(default_factory=WignerSection)
    processing: ProcessingSection = field(default_factory=ProcessingSection)
    logging: LoggingSection = field(default_factory=LoggingSection)
    source: Optional[str] = field(default=None, compare=False)

    @classmethod
    def from_dict(cls, config_dict: Optional[Dict[str, Any]], source: Optional[str] = None) -> "SimulationConfig":
        config_dict = config_dict or {}
        if not isinstance(config_dict, dict):
            raise ConfigError(f"top level of the config must be a mapping, got {type(config_dict).__name__}")

        problems: List[str] = [f"unknown section '{name}'" for name in config_dict if name not in _SECTIONS]
        sections = {}
        for name, section_cls in _SECTIONS.items():
            raw = config_dict.get(name) or {}
            if not isinstance(raw, dict):
                problems.append(f"section '{name}' must be a mapping")
                continue
            known = {f.name for f in fields(section_cls)}
            unknown = sorted(set(raw) - known)
            problems.extend(f"unknown key '{name}.{key}'" for key in unknown)
            if not unknown:
                try:
                    sections[name] = section_cls(**_coerce_numbers(section_cls, raw))
                except (TypeError, ValueError) as e:
                    problems.append(f"section '{name}': {e}")

        if problems:
            raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))
        return cls(**sections, source=source)

    @classmethod
    def from_yaml(cls, config_path: Union[str, Path]) -> "SimulationConfig":
        """Load configuration from YAML file"""
        path = Path(config_path)
        if not path.is_file():
            raise ConfigError(f"Config file not found: {config_path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                config_dict = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"could not parse {config_path}: {e}") from e
        return cls.from_dict(config_dict, source=str(path))

    def to_dict(self, include_unhashed: bool = True) -> Dict[str, Any]:
        out = {name: asdict(getattr(self, name)) for name in _SECTIONS}
        if not include_unhashed:
            for name in _UNHASHED:
                out.pop(name)
        return out

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of every result-relevant section."""
        canonical = json.dumps(self.to_dict(include_unhashed=False), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def with_section(self, name: str, **changes) -> "SimulationConfig":
        if name not in _SECTIONS:
            raise ConfigError(f"unknown section '{name}'")
        current = getattr(self, name)
        known = {f.name for f in fields(current)}
        unknown = sorted(set(changes) - known)
        if unknown:
            raise ConfigError(f"unknown key(s) for '{name}': {unknown}")
        return replace(self, **{name: replace(current, **changes)})

    def physical(self) -> PhysicalConfig:
        return self.physics.to_physical()

    def dipole_model(self) -> DipoleModel:
        return self.dipole.to_model()


def load_config(config_path: Optional[Union[str, Path]] = None) -> SimulationConfig:
    """Built-in defaults when no path is given."""
    if config_path is None:
        return SimulationConfig()
    return SimulationConfig.from_yaml(config_path)

