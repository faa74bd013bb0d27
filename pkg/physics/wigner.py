"""
Gaussian Wigner distribution of the output probe/conjugate state.

Quadratures are ordered X = (x_pr, p_pr, x_c1, p_c1, ...), with
alpha = (x_pr + i p_pr)/sqrt(2) and beta_j = (x_cj + i p_cj)/sqrt(2).
Values are densities with respect to the amplitude measure
d^2 alpha d^2 beta_1 ... d^2 beta_N, so the vacuum peak is (2/pi)^(N+1).
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate

from physics.errors import DimensionMismatchError, SingularQuadraticFormError
from physics.propagation import TransferMatrix

CONDITION_LIMIT = 1.0e12
_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class QuadraturePoint:
    x: Tuple[float, ...]
    p: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if len(self.x) != len(self.p):
            raise DimensionMismatchError(f"{len(self.x)} x values but {len(self.p)} p values")
        if not all(math.isfinite(v) for v in self.x + self.p):
            raise ValueError("quadratures must be finite")

    @classmethod
    def from_amplitudes(cls, alpha: complex, betas: Sequence[complex]) -> "QuadraturePoint":
        amps = [complex(alpha)] + [complex(b) for b in betas]
        return cls(
            x=tuple(math.sqrt(2.0) * a.real for a in amps),
            p=tuple(math.sqrt(2.0) * a.imag for a in amps),
        )

    @property
    def n_modes(self) -> int:
        return len(self.x)

    @property
    def alpha(self) -> complex:
        return complex(self.x[0], self.p[0]) * _SQRT_HALF

    @property
    def betas(self) -> Tuple[complex, ...]:
        return tuple(complex(x, p) * _SQRT_HALF for x, p in zip(self.x[1:], self.p[1:]))

    def as_vector(self) -> np.ndarray:
        out = np.empty(2 * self.n_modes)
        out[0::2] = self.x
        out[1::2] = self.p
        return out


@dataclass
class WignerGrid:
    """W sampled over (x_i, x_j) of a mode pair with every other quadrature fixed."""

    mode_pair: Tuple[int, int]
    x_axis: np.ndarray
    y_axis: np.ndarray
    values: np.ndarray
    normalization: float
    fixed: np.ndarray
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.x_axis) < 2 or len(self.y_axis) < 2:
            raise ValueError("a Wigner slice needs at least 2 samples per axis")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite Wigner values")

    def numeric_integral(self) -> float:
        """Trapezoidal integral of the slice over both axes."""
        inner = integrate.trapezoid(self.values, self.y_axis, axis=1)
        return float(integrate.trapezoid(inner, self.x_axis))


def _condition(matrix: np.ndarray) -> float:
    """2-norm condition number, inf for a singular matrix."""
    singular = np.linalg.svd(matrix, compute_uv=False)
    if singular[-1] == 0:
        return math.inf
    return float(singular[0] / singular[-1])


def _amplitude_map(n_modes: int) -> np.ndarray:
    """L with (alpha, conj(beta_1), ..., conj(beta_N)) = L X."""
    L = np.zeros((n_modes, 2 * n_modes), dtype=complex)
    L[0, 0] = _SQRT_HALF
    L[0, 1] = 1j * _SQRT_HALF
    for m in range(1, n_modes):
        L[m, 2 * m] = _SQRT_HALF
        L[m, 2 * m + 1] = -1j * _SQRT_HALF
    return L


class GaussianWigner:
    """
    W(X) = C exp(-2 |R X - d|^2), built once from T and eta.

    The output amplitudes are mapped back to input amplitudes with T^-1 and the
    input Wigner function (coherent probe, vacuum conjugates) is evaluated there.
    With literal=True the map uses T itself.

    Args:
        T: transfer matrix, probe first.
        eta: coherent amplitude of the input probe.
        literal: use T instead of T^-1 for the amplitude map.
    """

    def __init__(self, T: Union[TransferMatrix, np.ndarray], eta: complex, literal: bool = False):
        mat = T.matrix if isinstance(T, TransferMatrix) else np.asarray(T, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"transfer matrix must be square, got {mat.shape}")
        self.n_modes = mat.shape[0]
        self.eta = complex(eta)
        self.literal = literal

        if literal:
            amplitude_map = mat
        else:
            if _condition(mat) > CONDITION_LIMIT:
                raise SingularQuadraticFormError("transfer matrix is not invertible")
            amplitude_map = np.linalg.inv(mat)

        A = amplitude_map @ _amplitude_map(self.n_modes)
        R = np.empty((2 * self.n_modes, 2 * self.n_modes))
        R[0::2] = A.real
        R[1::2] = A.imag
        condition = _condition(R)
        if condition > CONDITION_LIMIT:
            raise SingularQuadraticFormError(f"quadratic form is degenerate (cond {condition:.3e})")
        self.R = R
        self.d = np.zeros(2 * self.n_modes)
        self.d[0] = self.eta.real
        self.d[1] = self.eta.imag
        self.center = np.linalg.solve(R, self.d)
        self.precision = 4.0 * R.T @ R
        # dx dp = 2 d^2 alpha per mode
        self.normalization = (4.0 / math.pi) ** self.n_modes * abs(np.linalg.det(R))

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != 2 * self.n_modes:
            raise DimensionMismatchError(
                f"expected {2 * self.n_modes} quadratures, got {X.shape[-1]}"
            )
        residual = X @ self.R.T - self.d
        return self.normalization * np.exp(-2.0 * np.sum(residual**2, axis=-1))

    def covariance(self, coordinates: str = "amplitude") -> np.ndarray:
        """Second moments; quadrature coordinates give vacuum I/2, amplitude ones I/4."""
        cov = np.linalg.inv(self.precision)
        if coordinates == "quadrature":
            return cov
        if coordinates == "amplitude":
            return cov / 2.0
        raise ValueError(f"coordinates must be 'amplitude' or 'quadrature', got: {coordinates}")

    def peak_amplitudes(self) -> Tuple[complex, Tuple[complex, ...]]:
        c = self.center
        amps = (c[0::2] + 1j * c[1::2]) * _SQRT_HALF
        return complex(amps[0]), tuple(complex(a) for a in amps[1:])


def wigner_output(
    point: QuadraturePoint,
    T: Union[TransferMatrix, np.ndarray],
    eta: complex,
    literal: bool = False,
) -> float:
    gaussian = GaussianWigner(T, eta, literal=literal)
    if point.n_modes != gaussian.n_modes:
        raise DimensionMismatchError(
            f"point has {point.n_modes} modes, transfer matrix {gaussian.n_modes}"
        )
    return float(gaussian(point.as_vector()))


def wigner_covariance(
    T: Union[TransferMatrix, np.ndarray],
    coordinates: str = "amplitude",
    literal: bool = False,
) -> np.ndarray:
    """Covariance of the Gaussian; independent of eta."""
    return GaussianWigner(T, 0.0, literal=literal).covariance(coordinates)


def _fixed_vector(n_modes: int, fixed: Optional[Union[Sequence[float], Dict[int, float]]]) -> np.ndarray:
    base = np.zeros(2 * n_modes)
    if fixed is None:
        return base
    if isinstance(fixed, dict):
        for idx, value in fixed.items():
            base[idx] = value
        return base
    arr = np.asarray(fixed, dtype=float)
    if arr.shape != base.shape:
        raise DimensionMismatchError(f"fixed quadratures need shape {base.shape}, got {arr.shape}")
    return arr


def _check_pair(mode_pair: Tuple[int, int], n_modes: int) -> Tuple[int, int]:
    i, j = (int(v) for v in mode_pair)
    if i == j or not (0 <= i < n_modes and 0 <= j < n_modes):
        raise DimensionMismatchError(f"mode pair {mode_pair} invalid for {n_modes} modes")
    return i, j


def wigner_slice_2d(
    T: Union[TransferMatrix, np.ndarray],
    eta: complex,
    mode_pair: Tuple[int, int] = (0, 1),
    x_range: Tuple[float, float] = (-4.0, 4.0),
    y_range: Tuple[float, float] = (-4.0, 4.0),
    samples: Tuple[int, int] = (101, 101),
    fixed: Optional[Union[Sequence[float], Dict[int, float]]] = None,
    literal: bool = False,
) -> WignerGrid:
    """
    W over (x_i, x_j) for mode_pair (i, j); all other quadratures fixed (default 0).

    values[a, b] corresponds to x_i = x_axis[a], x_j = y_axis[b].
    """
    gaussian = GaussianWigner(T, eta, literal=literal)
    i, j = _check_pair(mode_pair, gaussian.n_modes)
    nx, ny = samples
    if nx < 2 or ny < 2:
        raise ValueError(f"samples must be >= 2 per axis, got {samples}")

    x_axis = np.linspace(x_range[0], x_range[1], nx)
    y_axis = np.linspace(y_range[0], y_range[1], ny)
    base = _fixed_vector(gaussian.n_modes, fixed)
    points = np.broadcast_to(base, (nx, ny, base.size)).copy()
    points[:, :, 2 * i] = x_axis[:, np.newaxis]
    points[:, :, 2 * j] = y_axis[np.newaxis, :]
    values = gaussian(points)
    eta_c = complex(eta)
    return WignerGrid(
        mode_pair=(i, j),
        x_axis=x_axis,
        y_axis=y_axis,
        values=values,
        normalization=gaussian.normalization,
        fixed=base,
        metadata={"literal": literal, "eta": [eta_c.real, eta_c.imag]},
    )


def wigner_slice_integral_analytic(
    T: Union[TransferMatrix, np.ndarray],
    eta: complex,
    mode_pair: Tuple[int, int] = (0, 1),
    fixed: Optional[Union[Sequence[float], Dict[int, float]]] = None,
    literal: bool = False,
) -> float:
    """
    Closed-form integral of W over (x_i, x_j) with the remaining quadratures fixed.

    For precision P split into the integrated block A, coupling B and rest D:
    C 2 pi / sqrt(det A) exp(-(f - f0)^T (D - B^T A^-1 B)(f - f0) / 2).
    """
    gaussian = GaussianWigner(T, eta, literal=literal)
    i, j = _check_pair(mode_pair, gaussian.n_modes)
    base = _fixed_vector(gaussian.n_modes, fixed)

    free = [2 * i, 2 * j]
    rest = [k for k in range(base.size) if k not in free]
    P = gaussian.precision
    A = P[np.ix_(free, free)]
    B = P[np.ix_(free, rest)]
    D = P[np.ix_(rest, rest)]
    delta = base[rest] - gaussian.center[rest]
    schur = D - B.T @ np.linalg.solve(A, B)
    exponent = -0.5 * delta @ schur @ delta
    return float(
        gaussian.normalization * 2.0 * math.pi / math.sqrt(np.linalg.det(A)) * math.exp(exponent)
    )


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def min_symplectic_eigenvalue(cov: np.ndarray) -> float:
    """
    Smallest symplectic eigenvalue of a quadrature covariance; >= 1/2 for a physical state.
    """
    cov = np.asarray(cov, dtype=float)
    n_modes = cov.shape[0] // 2
    eigvals = np.linalg.eigvals(1j * symplectic_form(n_modes) @ cov)
    return float(np.min(np.abs(eigvals)))
