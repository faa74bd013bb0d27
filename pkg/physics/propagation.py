"""
Coupled-mode propagation of the probe/conjugate operator vector.

The vector v = (E_pr, E_c1^dag, ..., E_cN^dag) obeys i dv/dz = H v with the
arrow-shaped coupling matrix H. Three independent propagators are provided:
an eigendecomposition, a closed form built on H^3 = s H, and a fixed-step RK4
integrator used as an oracle.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from loguru import logger
from scipy import linalg

from physics.errors import DefectiveMatrixError, DimensionMismatchError
from physics.params_modes import ModeGrid
from physics.susceptibility import CouplingCoefficients

DEFAULT_CONDITION_LIMIT = 1.0e8
DEFAULT_ODE_STEPS = 10_000

# below this |s t^2| the sinh/cosh factors switch to their Taylor series
_SERIES_THRESHOLD = 1.0e-6


class SolverMethod(Enum):
    EIGEN = "eigen"
    ANALYTIC = "analytic"
    ODE = "ode"


@dataclass(frozen=True)
class CouplingMatrix:
    """H_mxw: zero diagonal, row 0 = i kappa_pr, column 0 = i conj(kappa_c)."""

    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def s(self) -> complex:
        return arrow_s(self.matrix)


@dataclass(frozen=True)
class TransferMatrix:
    matrix: np.ndarray
    method: SolverMethod
    condition: float = 1.0

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


MatrixLike = Union[CouplingMatrix, np.ndarray]


def _as_array(H: MatrixLike) -> np.ndarray:
    arr = H.matrix if isinstance(H, CouplingMatrix) else np.asarray(H, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"coupling matrix must be square, got shape {arr.shape}")
    return arr


def assemble_hmxw(kappas: CouplingCoefficients) -> CouplingMatrix:
    kappa_pr = np.atleast_1d(np.asarray(kappas.kappa_pr, dtype=complex))
    kappa_c = np.atleast_1d(np.asarray(kappas.kappa_c, dtype=complex))
    if kappa_pr.ndim != 1 or kappa_pr.shape != kappa_c.shape:
        raise DimensionMismatchError(
            f"kappa_pr {kappa_pr.shape} and kappa_c {kappa_c.shape} must be equal-length vectors"
        )
    if kappa_pr.size == 0:
        raise DimensionMismatchError("at least one channel is required")

    dim = kappa_pr.size + 1
    H = np.zeros((dim, dim), dtype=complex)
    H[0, 1:] = 1j * kappa_pr
    H[1:, 0] = 1j * np.conj(kappa_c)
    return CouplingMatrix(matrix=H)


def arrow_s(H: MatrixLike) -> complex:
    """s = sum_j H[0, j] H[j, 0] = -sum_j kappa_pr_j conj(kappa_c_j)."""
    arr = _as_array(H)
    return complex(np.dot(arr[0, 1:], arr[1:, 0]))


def transfer_eigen(
    H: MatrixLike, z: float, condition_limit: float = DEFAULT_CONDITION_LIMIT
) -> TransferMatrix:
    """
    T(z) = V exp(-i Lambda z) V^-1 from the eigendecomposition H = V Lambda V^-1.

    Raises:
        DefectiveMatrixError when cond(V) exceeds condition_limit.
    """
    arr = _as_array(H)
    eigvals, vecs = linalg.eig(arr)
    condition = float(np.linalg.cond(vecs))
    if not np.isfinite(condition) or condition > condition_limit:
        raise DefectiveMatrixError(
            f"eigenvector matrix condition {condition:.3e} exceeds limit {condition_limit:.1e}"
        )
    phases = np.exp(-1j * eigvals * z)
    # (V diag(phases)) V^-1, solved rather than inverted
    T = linalg.solve(vecs.T, (vecs * phases).T).T
    return TransferMatrix(matrix=T, method=SolverMethod.EIGEN, condition=condition)


def _sinh_factors(w: complex):
    """
    f1 = sinh(r)/r and f2 = (cosh(r) - 1)/r^2 with r = sqrt(w); both even in r.
    """
    if abs(w) < _SERIES_THRESHOLD:
        f1 = 1.0 + w / 6.0 + w * w / 120.0
        f2 = 0.5 + w / 24.0 + w * w / 720.0
        return f1, f2
    r = np.sqrt(complex(w))
    f1 = np.sinh(r) / r
    f2 = 2.0 * np.sinh(r / 2.0) ** 2 / w
    return complex(f1), complex(f2)


def transfer_analytic(H: MatrixLike, z: float) -> TransferMatrix:
    """
    Closed form exp(-i H z) for an arrow matrix.

    With t = -i z and H^3 = s H the series collapses to
    T = I + t H sinh(sqrt(s) t)/(sqrt(s) t) + t^2 H^2 (cosh(sqrt(s) t) - 1)/(s t^2).
    """
    arr = _as_array(H)
    dim = arr.shape[0]
    t = -1j * z
    f1, f2 = _sinh_factors(arrow_s(arr) * t * t)
    T = np.eye(dim, dtype=complex) + (t * f1) * arr + (t * t * f2) * (arr @ arr)
    return TransferMatrix(matrix=T, method=SolverMethod.ANALYTIC)


def transfer_ode_oracle(H: MatrixLike, z: float, steps: int = DEFAULT_ODE_STEPS) -> TransferMatrix:
    """Classical RK4 on dV/dz = -i H V from V(0) = I, with `steps` equal steps."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    arr = _as_array(H)
    dim = arr.shape[0]
    h = z / steps
    A = -1j * h * arr
    eye = np.eye(dim, dtype=complex)

    # one RK4 step applied to the identity gives the step propagator
    k1 = A @ eye
    k2 = A @ (eye + 0.5 * k1)
    k3 = A @ (eye + 0.5 * k2)
    k4 = A @ (eye + k3)
    step = eye + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0

    T = np.linalg.matrix_power(step, steps)
    return TransferMatrix(matrix=T, method=SolverMethod.ODE)


def transfer_matrix(
    H: MatrixLike,
    z: float,
    method: Union[str, SolverMethod] = SolverMethod.ANALYTIC,
    ode_steps: int = DEFAULT_ODE_STEPS,
    condition_limit: float = DEFAULT_CONDITION_LIMIT,
) -> TransferMatrix:
    """Dispatch to one propagator; eigen falls back to analytic on a defective H."""
    method = SolverMethod(method)
    if method is SolverMethod.ANALYTIC:
        return transfer_analytic(H, z)
    if method is SolverMethod.ODE:
        return transfer_ode_oracle(H, z, ode_steps)
    try:
        return transfer_eigen(H, z, condition_limit)
    except DefectiveMatrixError as e:
        logger.warning(f"{e}; falling back to the analytic propagator")
        return transfer_analytic(H, z)


def field_scale(grid: ModeGrid) -> np.ndarray:
    """sqrt(w^3) per mode, probe first."""
    return np.sqrt(grid.omegas**3)


def symplectic_residual(T: Union[TransferMatrix, np.ndarray], grid: ModeGrid) -> float:
    """
    max |S eta S^dag - eta| for S = D^-1 T D, D = diag(sqrt(w^3)), eta = diag(1, -1, ..., -1).

    Zero when T is an exact Bogoliubov transformation of the photon operators.
    """
    mat = T.matrix if isinstance(T, TransferMatrix) else np.asarray(T, dtype=complex)
    if mat.shape != (grid.n_modes, grid.n_modes):
        raise DimensionMismatchError(
            f"transfer matrix {mat.shape} does not match a grid of {grid.n_modes} modes"
        )
    d = field_scale(grid)
    # normalized to the probe scale
    d = d / d[0]
    S = mat * d[np.newaxis, :] / d[:, np.newaxis]
    eta = np.diag([1.0] + [-1.0] * grid.n_channels)
    return float(np.max(np.abs(S @ eta @ S.conj().T - eta)))
