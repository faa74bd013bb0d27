"""
Photon statistics of the output probe and conjugate fields.

Output fields are linear combinations of input annihilation/creation operators
(OperatorCombo). Expectation values on a coherent probe with vacuum conjugates
are taken exactly by displacing the probe operator and applying vacuum Wick
contractions.
"""

import cmath
import itertools
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import constants

from physics.errors import (
    DimensionMismatchError,
    NonPositiveVarianceError,
    NonRealVarianceError,
    UnsupportedOrderError,
    ZeroSNLError,
)
from physics.params_modes import ModeGrid
from physics.propagation import TransferMatrix

MAX_WICK_ORDER = 4
HERMITICITY_TOL = 1.0e-10
DEFAULT_PROBE_PHOTON_NUMBER = 1.0e4


class Normalization(Enum):
    FIELD = "field"
    PHOTON = "photon"


@dataclass(frozen=True)
class InputState:
    """Coherent probe |eta> with every conjugate mode in vacuum."""

    eta: complex

    def __post_init__(self):
        object.__setattr__(self, "eta", complex(self.eta))
        if not cmath.isfinite(self.eta):
            raise ValueError(f"eta must be finite, got {self.eta}")

    @classmethod
    def from_photon_number(cls, photon_number: float, phase: float = 0.0) -> "InputState":
        if photon_number < 0:
            raise ValueError(f"photon_number must be >= 0, got {photon_number}")
        return cls(eta=cmath.rect(math.sqrt(photon_number), phase))

    @property
    def photon_number(self) -> float:
        return abs(self.eta) ** 2


@dataclass(frozen=True)
class OperatorCombo:
    """
    F = constant + sum_m coeff_a[m] a_m + sum_m coeff_adag[m] a_m^dag over input modes.

    Mode 0 is the probe.
    """

    constant: complex
    coeff_a: np.ndarray
    coeff_adag: np.ndarray
    normalization: Normalization = Normalization.PHOTON

    def __post_init__(self):
        a = np.asarray(self.coeff_a, dtype=complex)
        adag = np.asarray(self.coeff_adag, dtype=complex)
        if a.ndim != 1 or a.shape != adag.shape:
            raise DimensionMismatchError(
                f"coefficient vectors must be 1-D and equal length, got {a.shape} and {adag.shape}"
            )
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(adag))):
            raise ValueError("operator coefficients must be finite")
        object.__setattr__(self, "coeff_a", a)
        object.__setattr__(self, "coeff_adag", adag)
        object.__setattr__(self, "constant", complex(self.constant))

    @property
    def n_modes(self) -> int:
        return self.coeff_a.size

    def dagger(self) -> "OperatorCombo":
        return OperatorCombo(
            constant=self.constant.conjugate(),
            coeff_a=np.conj(self.coeff_adag),
            coeff_adag=np.conj(self.coeff_a),
            normalization=self.normalization,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorCombo):
            return NotImplemented
        return (
            self.constant == other.constant
            and np.array_equal(self.coeff_a, other.coeff_a)
            and np.array_equal(self.coeff_adag, other.coeff_adag)
            and self.normalization is other.normalization
        )


@dataclass(frozen=True)
class OutputFields:
    """E_pr(z) and E_ck(z) for every conjugate k, as input-operator combos."""

    probe: OperatorCombo
    conjugates: Tuple[OperatorCombo, ...]

    def conjugate(self, k: int) -> OperatorCombo:
        return self.conjugates[k]

    def conjugate_dagger(self, k: int) -> OperatorCombo:
        return self.conjugates[k].dagger()


@dataclass(frozen=True)
class IntensityMoments:
    """First and second moments of I_pr = E_pr^dag E_pr and I_ck = E_ck^dag E_ck."""

    mean_pr: complex
    mean_ck: complex
    second_pr: complex
    second_ck: complex
    cross_pr_ck: complex
    cross_ck_pr: complex

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.mean_pr,
                self.mean_ck,
                self.second_pr,
                self.second_ck,
                self.cross_pr_ck,
                self.cross_ck_pr,
            ]
        )


@dataclass(frozen=True)
class TwoModeResult:
    var: float
    var_snl: float
    snf_log10: float
    g: complex
    zeta: complex


@dataclass
class SqueezeReport:
    """Per conjugate channel statistics; snf columns are log10 and 10*log10."""

    k: int
    n: int
    omega_c_over_pu: float
    mean_I_pr: float
    mean_I_ck: float
    mean_n_pr: float
    mean_n_ck: float
    var: float
    var_snl: float
    snf_log10: float
    snf_db: float
    two_mode_snf_log10: float
    symplectic_residual: float
    solver_delta: float = float("nan")
    extra: Dict[str, float] = field(default_factory=dict)

    def as_row(self) -> Dict[str, float]:
        row = asdict(self)
        row.update(row.pop("extra"))
        return row


# ----------------- Output operators -----------------
def field_normalization(grid: ModeGrid) -> np.ndarray:
    """e_m = sqrt(hbar w_m^3 / (eps0 pi^2 c^3)) per mode, probe first."""
    omegas = grid.omegas
    return np.sqrt(
        constants.hbar * omegas**3 / (constants.epsilon_0 * math.pi**2 * constants.c**3)
    )


def output_operator_combos(
    T: Union[TransferMatrix, np.ndarray],
    grid: ModeGrid,
    normalization: Union[str, Normalization] = Normalization.PHOTON,
) -> OutputFields:
    """
    Apply T to the input vector (E_pr(0), E_c1^dag(0), ..., E_cN^dag(0)).

    Row 0 gives E_pr(z); row k gives E_ck^dag(z), whose dagger is E_ck(z).
    With field normalization each input operator carries its e_m factor.
    """
    normalization = Normalization(normalization)
    mat = T.matrix if isinstance(T, TransferMatrix) else np.asarray(T, dtype=complex)
    dim = grid.n_modes
    if mat.shape != (dim, dim):
        raise DimensionMismatchError(
            f"transfer matrix {mat.shape} does not match a grid of {dim} modes"
        )

    if normalization is Normalization.FIELD:
        e = field_normalization(grid).astype(complex)
    else:
        e = np.ones(dim, dtype=complex)

    def row_combo(i: int) -> OperatorCombo:
        coeff_a = np.zeros(dim, dtype=complex)
        coeff_adag = np.zeros(dim, dtype=complex)
        coeff_a[0] = mat[i, 0] * e[0]
        coeff_adag[1:] = mat[i, 1:] * e[1:]
        return OperatorCombo(0.0, coeff_a, coeff_adag, normalization)

    probe = row_combo(0)
    conjugates = tuple(row_combo(k).dagger() for k in range(1, dim))
    return OutputFields(probe=probe, conjugates=conjugates)


# ----------------- Wick engine -----------------
def _displaced_constant(op: OperatorCombo, state: InputState) -> complex:
    return op.constant + op.coeff_a[0] * state.eta + op.coeff_adag[0] * state.eta.conjugate()


def _contraction(left: OperatorCombo, right: OperatorCombo) -> complex:
    # <0| F_left F_right |0> for the fluctuation parts; only a a^dag survives
    return complex(np.dot(left.coeff_a, right.coeff_adag))


def _vacuum_product(ops: Sequence[OperatorCombo]) -> complex:
    """Sum over complete pairings of ordered vacuum contractions."""
    if not ops:
        return 1.0 + 0.0j
    if len(ops) % 2:
        return 0.0j
    first, rest = ops[0], ops[1:]
    total = 0.0j
    for j, partner in enumerate(rest):
        remaining = rest[:j] + rest[j + 1 :]
        total += _contraction(first, partner) * _vacuum_product(remaining)
    return total


def wick_moment(ops: Sequence[OperatorCombo], state: InputState) -> complex:
    """
    <eta, 0 | F_1 F_2 ... F_k | eta, 0> for k <= 4.

    The probe operator is displaced, a_0 -> eta + a_0, every term is expanded into
    c-number and fluctuation factors, and the ordered fluctuation products are
    evaluated by vacuum Wick contraction.
    """
    ops = list(ops)
    if len(ops) > MAX_WICK_ORDER:
        raise UnsupportedOrderError(
            f"products of at most {MAX_WICK_ORDER} operators are supported, got {len(ops)}"
        )
    if not ops:
        return 1.0 + 0.0j
    n_modes = ops[0].n_modes
    if any(op.n_modes != n_modes for op in ops):
        raise DimensionMismatchError("all operators must act on the same set of modes")

    shifts = [_displaced_constant(op, state) for op in ops]
    total = 0.0j
    for picks in itertools.product((False, True), repeat=len(ops)):
        flucts = [op for op, pick in zip(ops, picks) if pick]
        if len(flucts) % 2:
            continue
        c_number = 1.0 + 0.0j
        for shift, pick in zip(shifts, picks):
            if not pick:
                c_number *= shift
        if c_number == 0:
            continue
        total += c_number * _vacuum_product(flucts)
    return total


def _connected_quadratic(
    a: Tuple[OperatorCombo, OperatorCombo],
    b: Tuple[OperatorCombo, OperatorCombo],
    state: InputState,
) -> complex:
    """
    <A B> - <A><B> for A = F1 F2 and B = F3 F4.

    Only pairings that link A to B survive; the disconnected c-number terms
    cancel analytically.
    """
    f1, f2 = a
    f3, f4 = b
    d1, d2, d3, d4 = (_displaced_constant(f, state) for f in (f1, f2, f3, f4))
    c13 = _contraction(f1, f3)
    c14 = _contraction(f1, f4)
    c23 = _contraction(f2, f3)
    c24 = _contraction(f2, f4)
    return d1 * d3 * c24 + d1 * d4 * c23 + d2 * d3 * c14 + d2 * d4 * c13 + c13 * c24 + c14 * c23


def _real_part(value: complex, scale: float, what: str) -> float:
    if abs(value.imag) > HERMITICITY_TOL * max(scale, abs(value.real), 1e-300):
        raise NonRealVarianceError(
            f"{what} has imaginary residue {value.imag:.3e} (real part {value.real:.6e})"
        )
    return float(value.real)


def intensity_moments(
    probe: OperatorCombo, conjugate: OperatorCombo, state: InputState
) -> IntensityMoments:
    pd, p = probe.dagger(), probe
    cd, c = conjugate.dagger(), conjugate
    return IntensityMoments(
        mean_pr=wick_moment([pd, p], state),
        mean_ck=wick_moment([cd, c], state),
        second_pr=wick_moment([pd, p, pd, p], state),
        second_ck=wick_moment([cd, c, cd, c], state),
        cross_pr_ck=wick_moment([pd, p, cd, c], state),
        cross_ck_pr=wick_moment([cd, c, pd, p], state),
    )


def mean_intensity(op: OperatorCombo, state: InputState) -> float:
    value = wick_moment([op.dagger(), op], state)
    return _real_part(value, abs(value), "mean intensity")


def variance_relative_intensity(
    probe: OperatorCombo, conjugate: OperatorCombo, state: InputState
) -> float:
    """
    Var(I_pr - I_ck) = <I_pr^2> - <I_pr>^2 + <I_ck^2> - <I_ck>^2
                       - <I_pr I_ck> - <I_ck I_pr> + 2 <I_pr><I_ck>.

    Evaluated as connected correlators so that the |eta|^4 terms cancel exactly.
    """
    i_pr = (probe.dagger(), probe)
    i_ck = (conjugate.dagger(), conjugate)
    terms = [
        _connected_quadratic(i_pr, i_pr, state),
        _connected_quadratic(i_ck, i_ck, state),
        -_connected_quadratic(i_pr, i_ck, state),
        -_connected_quadratic(i_ck, i_pr, state),
    ]
    scale = max(abs(t) for t in terms)
    return _real_part(sum(terms), scale, "relative-intensity variance")


def variance_relative_intensity_expanded(
    probe: OperatorCombo, conjugate: OperatorCombo, state: InputState
) -> float:
    """The same variance assembled term by term from raw wick_moment values."""
    m = intensity_moments(probe, conjugate, state)
    terms = [
        m.second_pr,
        -m.mean_pr**2,
        m.second_ck,
        -m.mean_ck**2,
        -m.cross_pr_ck,
        -m.cross_ck_pr,
        2.0 * m.mean_pr * m.mean_ck,
    ]
    scale = max(abs(t) for t in terms)
    return _real_part(sum(terms), scale, "relative-intensity variance")


def variance_snl(probe: OperatorCombo, conjugate: OperatorCombo, state: InputState) -> float:
    """Var_SNL = <E_pr^dag E_pr> + <E_ck^dag E_ck> with the output combos."""
    return mean_intensity(probe, state) + mean_intensity(conjugate, state)


def noise_figure(var: float, var_snl: float) -> float:
    """S_NF = log10(var / var_snl); negative means relative-intensity squeezing."""
    if var_snl == 0:
        raise ZeroSNLError("shot-noise variance is zero; noise figure undefined")
    ratio = var / var_snl
    if not ratio > 0:
        raise NonPositiveVarianceError(f"variance ratio must be positive, got {ratio}")
    return math.log10(ratio)


def to_db(snf_log10: float) -> float:
    return 10.0 * snf_log10


# ----------------- Two-mode closed form -----------------
def two_mode_parameters(kappa_pr: complex, kappa_ck: complex, z: float) -> Tuple[complex, complex]:
    """g = sqrt(kappa_pr / conj(kappa_ck)), zeta = z sqrt(conj(kappa_ck) kappa_pr)."""
    kappa_pr = complex(kappa_pr)
    kappa_ck_star = complex(kappa_ck).conjugate()
    if kappa_ck_star == 0:
        raise ZeroDivisionError("two-mode gain g is undefined for kappa_ck = 0")
    g = cmath.sqrt(kappa_pr / kappa_ck_star)
    zeta = z * cmath.sqrt(kappa_ck_star * kappa_pr)
    return g, zeta


def two_mode_closed_form(g: complex, zeta: complex, probe_photon_number: float) -> TwoModeResult:
    n_pr = probe_photon_number
    ch, sh = cmath.cosh(zeta), cmath.sinh(zeta)
    ch_c, sh_c = cmath.cosh(zeta.conjugate()), cmath.sinh(zeta.conjugate())
    g2 = abs(g) ** 2
    gi2 = 1.0 / g2

    var_snl = g2 * abs(sh) ** 2 + gi2 * abs(sh) ** 2 + (abs(ch) ** 2 + gi2 * abs(sh) ** 2) * n_pr

    mixed = (ch**2 * sh_c**2 + ch_c**2 * sh**2).real
    cs2 = abs(ch * sh) ** 2
    var = (
        (abs(ch) ** 4 + (g2 - gi2) * cs2 - mixed + gi2**2 * abs(sh) ** 4) * n_pr
        + (g2 + gi2) * cs2
        - mixed
    )
    return TwoModeResult(
        var=var,
        var_snl=var_snl,
        snf_log10=noise_figure(var, var_snl),
        g=g,
        zeta=zeta,
    )


def two_mode_analytic(
    kappa_pr: complex, kappa_ck: complex, z: float, probe_photon_number: float
) -> TwoModeResult:
    """Minimum-coupling limit: a single probe/conjugate pair, closed form."""
    g, zeta = two_mode_parameters(kappa_pr, kappa_ck, z)
    return two_mode_closed_form(g, zeta, probe_photon_number)


def squeeze_statistics(
    fields: OutputFields, state: InputState, k: int
) -> Tuple[float, float, float]:
    """(var, var_snl, snf_log10) for conjugate index k (photon normalization expected)."""
    probe, conj = fields.probe, fields.conjugate(k)
    var = variance_relative_intensity(probe, conj, state)
    snl = variance_snl(probe, conj, state)
    return var, snl, noise_figure(var, snl)


def report_columns() -> List[str]:
    return [
        "k",
        "n",
        "omega_c_over_pu",
        "mean_I_pr",
        "mean_I_ck",
        "mean_n_pr",
        "mean_n_ck",
        "var",
        "var_snl",
        "snf_log10",
        "snf_db",
        "two_mode_snf_log10",
        "symplectic_residual",
        "solver_delta",
    ]
