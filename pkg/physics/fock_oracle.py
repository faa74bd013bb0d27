"""Brute-force intensity moments in a truncated Fock space."""

from typing import Sequence

import numpy as np
from scipy import stats

from physics.errors import DimensionMismatchError, TruncationInsufficientError
from physics.moments import InputState, IntensityMoments, OperatorCombo

MAX_ORACLE_MODES = 3
TAIL_MASS_LIMIT = 1.0e-10
# products of up to four operators climb at most this many levels
_LEVEL_HEADROOM = 4


def annihilation_matrix(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def coherent_amplitudes(eta: complex, dim: int) -> np.ndarray:
    """Truncated coherent state, renormalized."""
    amps = np.zeros(dim, dtype=complex)
    amps[0] = 1.0
    for n in range(1, dim):
        amps[n] = amps[n - 1] * eta / np.sqrt(n)
    return amps / np.linalg.norm(amps)


def coherent_tail_mass(eta: complex, dim: int) -> float:
    """Poisson weight of levels the truncation cannot represent faithfully."""
    first_unsafe = max(dim - _LEVEL_HEADROOM, 0)
    return float(stats.poisson.sf(first_unsafe - 1, abs(eta) ** 2))


class FockOracle:
    """
    Applies OperatorCombos to an explicit product-state tensor.

    Args:
        n_modes: number of input modes, probe first (at most 3).
        truncation_dim: Fock levels kept per mode.
    """

    def __init__(self, n_modes: int, truncation_dim: int):
        if truncation_dim < 2:
            raise ValueError(f"truncation_dim must be >= 2, got {truncation_dim}")
        if not 1 <= n_modes <= MAX_ORACLE_MODES:
            raise DimensionMismatchError(
                f"the Fock oracle handles 1 to {MAX_ORACLE_MODES} modes, got {n_modes}"
            )
        self.n_modes = n_modes
        self.dim = truncation_dim
        self.a = annihilation_matrix(truncation_dim)
        self.adag = self.a.conj().T

    def initial_state(self, state: InputState) -> np.ndarray:
        tail = coherent_tail_mass(state.eta, self.dim)
        if tail > TAIL_MASS_LIMIT:
            raise TruncationInsufficientError(
                f"coherent tail mass {tail:.3e} above {TAIL_MASS_LIMIT:.0e} "
                f"for |eta|={abs(state.eta):.3g} at dim {self.dim}"
            )
        psi = coherent_amplitudes(state.eta, self.dim)
        vacuum = np.zeros(self.dim, dtype=complex)
        vacuum[0] = 1.0
        for _ in range(self.n_modes - 1):
            psi = np.multiply.outer(psi, vacuum)
        return psi

    def _apply_single(self, matrix: np.ndarray, psi: np.ndarray, mode: int) -> np.ndarray:
        out = np.tensordot(matrix, psi, axes=([1], [mode]))
        return np.moveaxis(out, 0, mode)

    def apply(self, op: OperatorCombo, psi: np.ndarray) -> np.ndarray:
        if op.n_modes != self.n_modes:
            raise DimensionMismatchError(
                f"operator acts on {op.n_modes} modes, oracle holds {self.n_modes}"
            )
        out = op.constant * psi
        for m in range(self.n_modes):
            if op.coeff_a[m] != 0:
                out = out + op.coeff_a[m] * self._apply_single(self.a, psi, m)
            if op.coeff_adag[m] != 0:
                out = out + op.coeff_adag[m] * self._apply_single(self.adag, psi, m)
        return out

    def expectation(self, ops: Sequence[OperatorCombo], state: InputState) -> complex:
        psi = self.initial_state(state)
        phi = psi
        for op in reversed(list(ops)):
            phi = self.apply(op, phi)
        return complex(np.vdot(psi, phi))


def fock_oracle(
    probe: OperatorCombo,
    conjugate: OperatorCombo,
    state: InputState,
    truncation_dim: int = 40,
) -> IntensityMoments:
    """The intensity moment set of `intensity_moments`, computed by brute force."""
    oracle = FockOracle(probe.n_modes, truncation_dim)
    pd, p = probe.dagger(), probe
    cd, c = conjugate.dagger(), conjugate
    return IntensityMoments(
        mean_pr=oracle.expectation([pd, p], state),
        mean_ck=oracle.expectation([cd, c], state),
        second_pr=oracle.expectation([pd, p, pd, p], state),
        second_ck=oracle.expectation([cd, c, cd, c], state),
        cross_pr_ck=oracle.expectation([pd, p, cd, c], state),
        cross_ck_pr=oracle.expectation([cd, c, pd, p], state),
    )
