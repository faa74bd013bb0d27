import numpy as np
import pytest
from scipy import linalg

from helpers import random_arrow, random_kappas, two_mode_arrow, two_mode_squeezer
from physics.errors import DefectiveMatrixError, DimensionMismatchError
from physics.params_modes import build_mode_grid, uniform_grid
from physics.propagation import (
    SolverMethod,
    arrow_s,
    assemble_hmxw,
    field_scale,
    symplectic_residual,
    transfer_analytic,
    transfer_eigen,
    transfer_matrix,
    transfer_ode_oracle,
)
from physics.susceptibility import CouplingCoefficients

Z = 2e-3


def test_assemble_arrow_structure(rng):
    kappas = random_kappas(rng, 3, Z)
    H = assemble_hmxw(kappas).matrix
    assert H.shape == (4, 4)
    np.testing.assert_array_equal(np.diag(H), 0)
    np.testing.assert_array_equal(H[0, 1:], 1j * kappas.kappa_pr)
    np.testing.assert_array_equal(H[1:, 0], 1j * np.conj(kappas.kappa_c))
    np.testing.assert_array_equal(H[1:, 1:], 0)


@pytest.mark.parametrize(
    "kappa_pr, kappa_c",
    [([1.0, 2.0], [1.0]), ([], []), ([[1.0]], [[1.0]])],
)
def test_assemble_rejects_bad_shapes(kappa_pr, kappa_c):
    with pytest.raises(DimensionMismatchError):
        assemble_hmxw(CouplingCoefficients(kappa_pr=np.array(kappa_pr), kappa_c=np.array(kappa_c)))


def test_arrow_s_and_cube_identity(rng):
    for n in (1, 2, 5, 8):
        kappas = random_kappas(rng, n, Z)
        coupling = assemble_hmxw(kappas)
        H = coupling.matrix
        expected_s = -np.sum(kappas.kappa_pr * np.conj(kappas.kappa_c))
        assert coupling.s == pytest.approx(expected_s, rel=1e-13)
        np.testing.assert_allclose(H @ H @ H, coupling.s * H, rtol=1e-12, atol=1e-12 * np.abs(H).max() ** 3)


def test_non_square_matrix_is_rejected():
    with pytest.raises(DimensionMismatchError):
        arrow_s(np.zeros((2, 3)))


@pytest.mark.parametrize("n_channels", [1, 2, 4, 8])
def test_analytic_matches_expm(rng, n_channels):
    for _ in range(10):
        H = random_arrow(rng, n_channels, Z)
        expected = linalg.expm(-1j * H.matrix * Z)
        scale = max(np.abs(expected).max(), 1.0)
        assert np.abs(transfer_analytic(H, Z).matrix - expected).max() / scale < 1e-10


@pytest.mark.parametrize("n_channels", [1, 3, 8])
def test_eigen_matches_analytic(rng, n_channels):
    for _ in range(20):
        H = random_arrow(rng, n_channels, Z)
        eigen = transfer_eigen(H, Z)
        analytic = transfer_analytic(H, Z).matrix
        scale = max(np.abs(analytic).max(), 1.0)
        assert np.abs(eigen.matrix - analytic).max() / scale < 1e-8
        assert eigen.method is SolverMethod.EIGEN
        assert eigen.condition >= 1.0


def test_ode_oracle_matches_analytic(rng):
    for _ in range(5):
        H = random_arrow(rng, 3, Z)
        ode = transfer_ode_oracle(H, Z, steps=10_000).matrix
        analytic = transfer_analytic(H, Z).matrix
        scale = max(np.abs(analytic).max(), 1.0)
        assert np.abs(ode - analytic).max() / scale < 1e-8


def test_ode_oracle_is_fourth_order(rng):
    H = random_arrow(rng, 3, Z, bound=1.0)
    exact = transfer_analytic(H, Z).matrix
    coarse = np.abs(transfer_ode_oracle(H, Z, 40).matrix - exact).max()
    fine = np.abs(transfer_ode_oracle(H, Z, 80).matrix - exact).max()
    assert np.log2(coarse / fine) == pytest.approx(4.0, abs=0.2)


def test_ode_oracle_rejects_zero_steps(rng):
    with pytest.raises(ValueError):
        transfer_ode_oracle(random_arrow(rng, 1), Z, steps=0)


@pytest.mark.parametrize("method", list(SolverMethod))
def test_zero_length_is_identity(rng, method):
    H = random_arrow(rng, 4, Z)
    T = transfer_matrix(H, 0.0, method, ode_steps=10)
    np.testing.assert_allclose(T.matrix, np.eye(5), atol=1e-12)


@pytest.mark.parametrize("method", ["analytic", "eigen"])
def test_semigroup(rng, method):
    H = random_arrow(rng, 3, Z)
    total = transfer_matrix(H, Z, method).matrix
    product = transfer_matrix(H, 0.7 * Z, method).matrix @ transfer_matrix(H, 0.3 * Z, method).matrix
    scale = max(np.abs(total).max(), 1.0)
    assert np.abs(product - total).max() / scale < 1e-10


def test_real_matched_coupling_is_two_mode_squeezer():
    zeta = 0.8
    H = two_mode_arrow(zeta / Z, zeta / Z)
    np.testing.assert_allclose(transfer_analytic(H, Z).matrix, two_mode_squeezer(zeta), rtol=1e-13)


def test_weak_coupling_uses_series_branch():
    H = two_mode_arrow(1e-3, 2e-3 + 1e-3j)
    expected = linalg.expm(-1j * H.matrix * Z)
    np.testing.assert_allclose(transfer_analytic(H, Z).matrix, expected, rtol=1e-14, atol=1e-15)


def test_defective_matrix_raises_and_dispatcher_falls_back():
    # kappa_c = 0 leaves a nilpotent Jordan block
    H = two_mode_arrow(3.0e2, 0.0)
    with pytest.raises(DefectiveMatrixError):
        transfer_eigen(H, Z)
    T = transfer_matrix(H, Z, "eigen")
    assert T.method is SolverMethod.ANALYTIC
    np.testing.assert_allclose(T.matrix, np.eye(2) - 1j * Z * H.matrix, atol=1e-15)


def test_dispatcher_accepts_strings(rng):
    H = random_arrow(rng, 2, Z)
    assert transfer_matrix(H, Z, "ode", ode_steps=100).method is SolverMethod.ODE
    assert transfer_matrix(H, Z, "analytic").method is SolverMethod.ANALYTIC
    with pytest.raises(ValueError):
        transfer_matrix(H, Z, "magnus")


def test_field_scale():
    grid = uniform_grid(2, omega_pu=2.0)
    np.testing.assert_allclose(field_scale(grid), np.sqrt(np.array([2.0, 2.0, 4.0]) ** 3))


def test_identity_is_symplectic(default_cfg):
    grid = build_mode_grid(default_cfg)
    assert symplectic_residual(np.eye(grid.n_modes), grid) == 0.0


def test_frequency_weighted_couplings_are_symplectic(default_cfg):
    grid = build_mode_grid(default_cfg.with_updates(channel_orders_n=(14,)))
    kappa_c = 600.0
    # kappa_pr / kappa_c = (w_pr / w_c)^3 makes D^-1 H D pseudo-Hermitian
    kappa_pr = kappa_c * (3.0 / 11.0) ** 3
    T = transfer_analytic(two_mode_arrow(kappa_pr, kappa_c), default_cfg.cell_length_z)
    assert symplectic_residual(T, grid) < 1e-12


def test_generic_couplings_break_symplecticity(default_cfg, rng):
    grid = build_mode_grid(default_cfg)
    T = transfer_analytic(random_arrow(rng, 3, Z, bound=1.0), Z)
    assert symplectic_residual(T, grid) > 1e-3


def test_symplectic_residual_checks_dimension(default_cfg):
    with pytest.raises(DimensionMismatchError):
        symplectic_residual(np.eye(2), build_mode_grid(default_cfg))
