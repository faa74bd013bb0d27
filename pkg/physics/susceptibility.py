"""Effective third-order susceptibilities and propagation couplings."""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np
from scipy import constants

from physics.params_modes import ModeGrid, PhysicalConfig

if TYPE_CHECKING:
    from physics.dipole_model import ChannelDipoles


@dataclass(frozen=True)
class SusceptibilityPair:
    """chi_pr^eff and chi_c^eff per grid channel (grid order), dimensionless."""

    chi_pr: np.ndarray
    chi_c: np.ndarray


@dataclass(frozen=True)
class CouplingCoefficients:
    """kappa_pr and kappa_c per channel, in 1/m."""

    kappa_pr: np.ndarray
    kappa_c: np.ndarray

    @property
    def n_channels(self) -> int:
        return len(self.kappa_pr)


def transition_frequency(cfg: PhysicalConfig) -> float:
    """w_eg = (E_e - E_g) / hbar."""
    return (cfg.excited_energy_Ee - cfg.ground_energy_Eg) / constants.hbar


def _numerator(dipoles: "ChannelDipoles", rho: float, k: int) -> complex:
    # (-i/hbar) * (-rho * mu_eg * mu_b)
    return (-1j / constants.hbar) * (-rho * dipoles.mu_eg[k] * dipoles.mu_b)


def chi_pr_eff(
    grid: ModeGrid,
    dipoles: "ChannelDipoles",
    rho: float,
    gamma: float,
    omega_eg: float,
    n: int,
) -> complex:
    """
    Probe susceptibility for channel n.

    The resonance denominator w_eg + w_c - n w_pu - i gamma equals
    w_eg - w_pr - i gamma on the grid, and is evaluated in that form.
    """
    k = grid.channel_index(n)
    return _numerator(dipoles, rho, k) / (omega_eg - grid.omega_pr - 1j * gamma)


def chi_c_eff(
    grid: ModeGrid,
    dipoles: "ChannelDipoles",
    rho: float,
    gamma: float,
    omega_eg: float,
    n: int,
) -> complex:
    """Conjugate susceptibility for channel n, denominator w_eg - w_c - i gamma."""
    k = grid.channel_index(n)
    omega_c = grid.channels[k].omega_c
    return _numerator(dipoles, rho, k) / (omega_eg - omega_c - 1j * gamma)


def susceptibilities(
    grid: ModeGrid, dipoles: "ChannelDipoles", rho: float, gamma: float, omega_eg: float
) -> SusceptibilityPair:
    if len(dipoles.mu_eg) != grid.n_channels:
        raise ValueError(
            f"{len(dipoles.mu_eg)} dipoles given for a grid of {grid.n_channels} channels"
        )
    chi_pr = np.array(
        [chi_pr_eff(grid, dipoles, rho, gamma, omega_eg, ch.n) for ch in grid.channels]
    )
    chi_c = np.array(
        [chi_c_eff(grid, dipoles, rho, gamma, omega_eg, ch.n) for ch in grid.channels]
    )
    return SusceptibilityPair(chi_pr=chi_pr, chi_c=chi_c)


def kappa(
    grid: ModeGrid, chis: SusceptibilityPair, n: Optional[int] = None
) -> CouplingCoefficients:
    """
    kappa_c = (i k_c / 2) chi_c and kappa_pr = (i k_pr / 2) chi_pr, with k = w/c.

    With n given, only that channel is returned.
    """
    k_c = np.array([ch.k_c for ch in grid.channels])
    kappa_pr = 0.5j * grid.k_pr * np.asarray(chis.chi_pr)
    kappa_c = 0.5j * k_c * np.asarray(chis.chi_c)
    if n is not None:
        idx = grid.channel_index(n)
        return CouplingCoefficients(kappa_pr=kappa_pr[idx : idx + 1], kappa_c=kappa_c[idx : idx + 1])
    return CouplingCoefficients(kappa_pr=kappa_pr, kappa_c=kappa_c)
