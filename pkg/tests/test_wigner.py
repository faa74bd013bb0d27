import math

import numpy as np
import pytest

from helpers import random_arrow, two_mode_squeezer
from physics.errors import DimensionMismatchError, SingularQuadraticFormError
from physics.propagation import transfer_analytic
from physics.wigner import (
    GaussianWigner,
    QuadraturePoint,
    min_symplectic_eigenvalue,
    symplectic_form,
    wigner_covariance,
    wigner_output,
    wigner_slice_2d,
    wigner_slice_integral_analytic,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)


def _unit(size, entries):
    u = np.zeros(size)
    for idx, value in entries.items():
        u[idx] = value
    return u


def test_quadrature_point_round_trip():
    point = QuadraturePoint.from_amplitudes(1.0 + 2.0j, [-0.5j, 3.0])
    assert point.n_modes == 3
    assert point.alpha == pytest.approx(1.0 + 2.0j)
    assert point.betas == pytest.approx((-0.5j, 3.0))
    np.testing.assert_allclose(
        point.as_vector(), math.sqrt(2.0) * np.array([1.0, 2.0, 0.0, -0.5, 3.0, 0.0])
    )


def test_quadrature_point_validation():
    with pytest.raises(DimensionMismatchError):
        QuadraturePoint(x=(0.0, 1.0), p=(0.0,))
    with pytest.raises(ValueError):
        QuadraturePoint(x=(math.inf,), p=(0.0,))


def test_vacuum_peak_and_covariance():
    gaussian = GaussianWigner(np.eye(2), 0.0)
    assert gaussian(np.zeros(4)) == pytest.approx((2.0 / math.pi) ** 2, rel=1e-14)
    np.testing.assert_allclose(gaussian.covariance("quadrature"), 0.5 * np.eye(4), atol=1e-15)
    np.testing.assert_allclose(gaussian.covariance("amplitude"), 0.25 * np.eye(4), atol=1e-15)
    with pytest.raises(ValueError):
        gaussian.covariance("polar")


def test_coherent_probe_is_displaced():
    eta = 1.5 - 0.7j
    alpha, betas = GaussianWigner(np.eye(3), eta).peak_amplitudes()
    assert alpha == pytest.approx(eta)
    assert betas == pytest.approx((0.0, 0.0), abs=1e-15)
    at_peak = wigner_output(QuadraturePoint.from_amplitudes(eta, [0.0, 0.0]), np.eye(3), eta)
    assert at_peak == pytest.approx((2.0 / math.pi) ** 3, rel=1e-12)


def test_peak_follows_transfer_matrix(rng):
    T = transfer_analytic(random_arrow(rng, 2, bound=1.0), 2e-3).matrix
    eta = 2.0 + 1.0j
    alpha, betas = GaussianWigner(T, eta).peak_amplitudes()
    assert alpha == pytest.approx(T[0, 0] * eta, rel=1e-12)
    for k, beta in enumerate(betas, start=1):
        assert beta == pytest.approx(np.conj(T[k, 0] * eta), rel=1e-12)


def test_covariance_is_independent_of_eta(rng):
    T = transfer_analytic(random_arrow(rng, 2, bound=1.0), 2e-3)
    np.testing.assert_allclose(
        GaussianWigner(T, 3.0 - 2.0j).covariance(), wigner_covariance(T), rtol=1e-12
    )


@pytest.mark.parametrize("zeta", [0.25, 0.5, 1.0])
def test_two_mode_squeezed_covariance(zeta):
    cov = wigner_covariance(two_mode_squeezer(zeta), "quadrature")
    squeezed = [_unit(4, {0: SQRT_HALF, 2: -SQRT_HALF}), _unit(4, {1: SQRT_HALF, 3: SQRT_HALF})]
    stretched = [_unit(4, {0: SQRT_HALF, 2: SQRT_HALF}), _unit(4, {1: SQRT_HALF, 3: -SQRT_HALF})]
    for u in squeezed:
        assert u @ cov @ u == pytest.approx(0.5 * math.exp(-2 * zeta), rel=1e-10)
    for u in stretched:
        assert u @ cov @ u == pytest.approx(0.5 * math.exp(2 * zeta), rel=1e-10)
    assert min_symplectic_eigenvalue(cov) == pytest.approx(0.5, rel=1e-10)


def test_literal_map_squeezes_the_other_quadrature():
    zeta = 0.5
    cov = wigner_covariance(two_mode_squeezer(zeta), "quadrature", literal=True)
    u = _unit(4, {0: SQRT_HALF, 2: SQRT_HALF})
    assert u @ cov @ u == pytest.approx(0.5 * math.exp(-2 * zeta), rel=1e-10)


def test_singular_transfer_matrix():
    with pytest.raises(SingularQuadraticFormError):
        GaussianWigner(np.zeros((2, 2)), 1.0)
    with pytest.raises(SingularQuadraticFormError):
        GaussianWigner(np.zeros((2, 2)), 1.0, literal=True)
    with pytest.raises(DimensionMismatchError):
        GaussianWigner(np.eye(3)[:2], 1.0)


def test_point_dimension_must_match():
    with pytest.raises(DimensionMismatchError):
        wigner_output(QuadraturePoint.from_amplitudes(1.0, []), np.eye(2), 1.0)
    with pytest.raises(DimensionMismatchError):
        GaussianWigner(np.eye(2), 0.0)(np.zeros(3))


def test_slice_layout_and_fixed_quadratures():
    T = two_mode_squeezer(0.3)
    grid = wigner_slice_2d(T, 1.0, x_range=(-2, 2), y_range=(-1, 3), samples=(5, 7), fixed={1: 0.2})
    assert grid.values.shape == (5, 7)
    assert grid.mode_pair == (0, 1)
    assert grid.fixed[1] == 0.2
    gaussian = GaussianWigner(T, 1.0)
    point = np.array([grid.x_axis[3], 0.2, grid.y_axis[6], 0.0])
    assert grid.values[3, 6] == pytest.approx(gaussian(point), rel=1e-14)
    assert grid.metadata["eta"] == [1.0, 0.0]


@pytest.mark.parametrize(
    "kwargs",
    [{"mode_pair": (1, 1)}, {"mode_pair": (0, 2)}, {"fixed": [0.0, 1.0]}],
)
def test_slice_rejects_bad_layout(kwargs):
    with pytest.raises(DimensionMismatchError):
        wigner_slice_2d(np.eye(2), 0.0, **kwargs)


def test_slice_needs_two_samples():
    with pytest.raises(ValueError):
        wigner_slice_2d(np.eye(2), 0.0, samples=(1, 5))


def test_slice_integral_matches_closed_form():
    T = two_mode_squeezer(0.5)
    eta = 1.0 + 0.5j
    gaussian = GaussianWigner(T, eta)
    fixed = gaussian.center.copy()
    fixed[1] += 0.3
    x0, y0 = fixed[0], fixed[2]
    grid = wigner_slice_2d(
        T, eta, x_range=(x0 - 8, x0 + 8), y_range=(y0 - 8, y0 + 8), samples=(401, 401), fixed=fixed
    )
    analytic = wigner_slice_integral_analytic(T, eta, fixed=fixed)
    assert grid.numeric_integral() == pytest.approx(analytic, rel=1e-6)


def test_slice_moments_follow_precision_block():
    T = two_mode_squeezer(0.5)
    eta = 2.0
    gaussian = GaussianWigner(T, eta)
    free = [0, 2]
    x0, y0 = gaussian.center[free]
    grid = wigner_slice_2d(
        T,
        eta,
        x_range=(x0 - 8, x0 + 8),
        y_range=(y0 - 8, y0 + 8),
        samples=(401, 401),
        fixed=gaussian.center,
    )
    weights = grid.values / grid.values.sum()
    X, Y = np.meshgrid(grid.x_axis, grid.y_axis, indexing="ij")
    mean = np.array([np.sum(weights * X), np.sum(weights * Y)])
    dx, dy = X - mean[0], Y - mean[1]
    cov = np.array(
        [
            [np.sum(weights * dx * dx), np.sum(weights * dx * dy)],
            [np.sum(weights * dx * dy), np.sum(weights * dy * dy)],
        ]
    )
    np.testing.assert_allclose(mean, [x0, y0], atol=1e-8)
    expected = np.linalg.inv(gaussian.precision[np.ix_(free, free)])
    np.testing.assert_allclose(cov, expected, atol=1e-4)


def test_vacuum_slice_integral():
    # (2/pi)^2 * pi over one x-x plane with the p quadratures at zero
    assert wigner_slice_integral_analytic(np.eye(2), 0.0) == pytest.approx(4.0 / math.pi, rel=1e-12)


def test_symplectic_form_and_vacuum_eigenvalue():
    J = symplectic_form(2)
    np.testing.assert_array_equal(J @ J, -np.eye(4))
    assert min_symplectic_eigenvalue(0.5 * np.eye(4)) == pytest.approx(0.5)
