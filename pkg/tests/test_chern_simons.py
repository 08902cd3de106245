import math

import numpy as np
import pytest

from gaugekit.chern_simons import (
    GroupMap,
    InvariantFrameForm,
    S3Grid,
    constant_map,
    cs_gradient_check,
    cs_value,
    curvature_form,
    gauge_act,
    identity_map,
    lambda_theta,
    map_degree,
    map_product,
    pairing,
    random_form,
    square_map,
    zero_form,
)
from gaugekit.errors import GridTooCoarse, InputError, MismatchedLattice, TooRough


def cubic(lam):
    # tr(theta ^ d theta) and tr(theta^3) integrated with the structure constants of V_a = x e_a
    return 3 * lam**2 - 2 * lam**3


@pytest.fixture(scope="module")
def grid():
    return S3Grid(16, 32, 32)


def test_grid_weights_and_frame(grid):
    assert grid.weights.min() > 0
    assert grid.weights.sum() == pytest.approx(2 * math.pi**2, rel=1e-13)
    # V_a = x e_a are orthonormal tangent vectors
    gram = np.einsum("a...k,b...k->...ab", grid.frame, grid.frame)
    np.testing.assert_allclose(gram, np.broadcast_to(np.eye(3), gram.shape), atol=1e-14)
    np.testing.assert_allclose(np.einsum("a...k,...k->a...", grid.frame, grid.points), 0, atol=1e-14)


def test_grid_validation():
    with pytest.raises(InputError):
        S3Grid(3, 16, 16)
    with pytest.raises(InputError):
        S3Grid(8, 15, 16)


def test_polynomials_integrate_exactly(grid):
    # int x_0^2 over S^3 = pi^2 / 2, int x_0^2 x_2^2 = pi^2 / 12
    x = grid.points
    assert grid.integrate(x[..., 0] ** 2) == pytest.approx(math.pi**2 / 2, rel=1e-12)
    assert grid.integrate(x[..., 0] ** 2 * x[..., 2] ** 2) == pytest.approx(math.pi**2 / 12, rel=1e-12)


def test_directional_derivative_of_linear_function(grid):
    # V_a x_k = (x e_a)_k exactly for the coordinate functions (FD error only)
    x = grid.points
    dv = grid.directional(x)
    np.testing.assert_allclose(dv, grid.frame, atol=5e-4)


def test_zero_form(grid):
    A = zero_form(grid)
    assert cs_value(A) == 0.0
    assert np.all(curvature_form(A) == 0.0)


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 0.75, 1.0, -0.6])
def test_lambda_theta_cubic(grid, lam):
    assert cs_value(lambda_theta(grid, lam)) == pytest.approx(cubic(lam), abs=1e-3)


@pytest.mark.parametrize("lam", [0.0, 0.3, 1.0, 1.7])
def test_lambda_theta_curvature(grid, lam):
    # F(V_b, V_c) = -2 lam e_a + lam^2 [e_b, e_c] = 2 (lam^2 - lam) e_a
    F = curvature_form(lambda_theta(grid, lam))
    want = 2 * (lam**2 - lam) * np.eye(3)
    np.testing.assert_allclose(F, np.broadcast_to(want, F.shape), atol=1e-12)


def test_curvature_small_scaling(grid):
    A = random_form(grid, 3, amplitude=1.0)
    norms = [np.sqrt(grid.integrate(np.sum(curvature_form(A.scaled(s)) ** 2, axis=(-2, -1)))) for s in (0, 0.05, 0.1, 0.2)]
    assert norms[0] == 0.0
    assert all(b > a for a, b in zip(norms, norms[1:]))
    # linear at small scale
    assert norms[2] / norms[1] == pytest.approx(2.0, rel=0.05)


def test_gauge_by_identity_gives_maurer_cartan(grid):
    A = gauge_act(zero_form(grid), identity_map(grid))
    np.testing.assert_allclose(A.coeffs, np.broadcast_to(np.eye(3), A.coeffs.shape), atol=5e-4)


def test_constant_gauge_keeps_cs(grid):
    A = random_form(grid, 5, amplitude=0.2)
    g = constant_map(grid, [0.3, -0.2, 0.9, 0.1])
    assert cs_value(gauge_act(A, g)) == pytest.approx(cs_value(A), abs=2e-3)


@pytest.mark.parametrize("seed", range(3))
def test_shift_law_identity(grid, seed):
    A = random_form(grid, seed, amplitude=0.1)
    assert cs_value(gauge_act(A, identity_map(grid))) - cs_value(A) == pytest.approx(1.0, abs=2e-3)


def test_shift_law_square(grid):
    A = random_form(grid, 9, amplitude=0.1)
    g = map_product(identity_map(grid), identity_map(grid))
    np.testing.assert_allclose(g.values, square_map(grid).values, atol=1e-15)
    shift = cs_value(gauge_act(A, g)) - cs_value(A)
    assert abs(shift - round(shift)) <= 2e-3 and round(shift) == 2


def test_map_degrees(grid):
    assert map_degree(constant_map(grid, [1, 2, 3, 4])).rounded == 0
    assert map_degree(identity_map(grid)).rounded == 1
    d1 = map_degree(square_map(grid)).rounded
    d2 = map_degree(square_map(S3Grid(24, 48, 48))).rounded
    assert d1 == d2 == 2


def test_map_degree_too_rough():
    with pytest.raises(TooRough):
        map_degree(square_map(S3Grid(4, 8, 8)))


def test_quadrature_converges(grid):
    # degree of the identity map: error shrinks at least first order under refinement
    errs = [abs(map_degree(identity_map(S3Grid(n, 2 * n, 2 * n))).raw - 1.0) for n in (8, 16, 32)]
    for a, b in zip(errs, errs[1:]):
        assert b <= a / 2


def test_gradient_examples(grid):
    fd, pr = cs_gradient_check(lambda_theta(grid, 1.0), random_form(grid, 2, amplitude=0.5))
    assert abs(fd) <= 1e-3 and abs(pr) <= 1e-3
    fd, pr = cs_gradient_check(lambda_theta(grid, 0.5), lambda_theta(grid, 1.0))
    assert fd == pytest.approx(pr, abs=1e-3)
    assert pr == pytest.approx(6 * 0.5 - 6 * 0.25, abs=1e-3)
    assert cs_gradient_check(random_form(grid, 1), zero_form(grid)) == (0.0, 0.0)


@pytest.mark.parametrize("seed", range(5))
def test_gradient_identity_random(grid, seed):
    A = random_form(grid, 100 + seed, amplitude=0.3)
    a = random_form(grid, 200 + seed, amplitude=0.3)
    fd, pr = cs_gradient_check(A, a)
    assert fd == pytest.approx(pr, abs=1e-3)


def test_gradient_step_bounds(grid):
    with pytest.raises(InputError):
        cs_gradient_check(zero_form(grid), zero_form(grid), h=1.0)


def test_resolution_check():
    A = random_form(S3Grid(16, 32, 32), 0, amplitude=0.1)
    assert cs_value(A, check_resolution=True) == pytest.approx(cs_value(A), abs=1e-12)
    no_source = InvariantFrameForm(A.grid, A.coeffs)
    with pytest.raises(InputError):
        cs_value(no_source, check_resolution=True)
    assert cs_value(lambda_theta(S3Grid(16, 32, 32), 0.5), check_resolution=True) == pytest.approx(0.5, abs=1e-3)
    # a wiggly form does not converge at fourth order under coarsening
    rough = InvariantFrameForm.from_function(
        S3Grid(16, 32, 32), lambda p: np.sin(12 * p[..., 0])[..., None, None] * np.ones((3, 3))
    )
    with pytest.raises(GridTooCoarse):
        cs_value(rough, check_resolution=True)


def test_grid_mismatch(grid):
    with pytest.raises(MismatchedLattice):
        gauge_act(zero_form(grid), identity_map(S3Grid(8, 16, 16)))
    with pytest.raises(MismatchedLattice):
        pairing(zero_form(grid), zero_form(S3Grid(8, 16, 16)))


def test_shapes_are_checked(grid):
    with pytest.raises(InputError):
        InvariantFrameForm(grid, np.zeros((2, 2, 2, 3, 3)))
    with pytest.raises(InputError):
        GroupMap(grid, np.zeros((2, 2, 2, 4)))
