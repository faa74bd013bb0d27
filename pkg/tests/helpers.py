import numpy as np

from physics.propagation import assemble_hmxw
from physics.susceptibility import CouplingCoefficients

# peak |chi_c| used wherever a visibly squeezed operating point is needed
CALIBRATED_PEAK_CHI = 5.0e-6


def random_kappas(rng: np.random.Generator, n_channels: int, z: float, bound: float = 3.0):
    """|kappa z| <= bound per entry, random phases."""

    def draw():
        magnitude = rng.uniform(0.05, 1.0, n_channels) * bound / z
        return magnitude * np.exp(2j * np.pi * rng.uniform(size=n_channels))

    return CouplingCoefficients(kappa_pr=draw(), kappa_c=draw())


def random_arrow(rng: np.random.Generator, n_channels: int, z: float = 2e-3, bound: float = 3.0):
    return assemble_hmxw(random_kappas(rng, n_channels, z, bound))


def two_mode_arrow(kappa_pr: complex, kappa_c: complex):
    return assemble_hmxw(
        CouplingCoefficients(kappa_pr=np.array([kappa_pr]), kappa_c=np.array([kappa_c]))
    )


def two_mode_squeezer(zeta: float) -> np.ndarray:
    """T for g = 1 and real zeta."""
    c, s = np.cosh(zeta), np.sinh(zeta)
    return np.array([[c, s], [s, c]], dtype=complex)
