import numpy as np
from numpy.testing import assert_allclose

from quermass import (
    Ball,
    LogPerturbedBall,
    TestFunction,
    integrate,
    spherical_gradient,
    spherical_laplacian,
    tangent_hessian,
)


def _support_field(body):
    return lambda X: body.support_values(X)


def test_ball_hessian_is_radius_times_identity(grid3):
    # Q[h] = R I for the ball of radius R, at every node
    for R in (1.0, 2.5):
        Q, err = tangent_hessian(_support_field(Ball(R)), grid3.nodes, grid3.frames)
        expected = np.broadcast_to(R * np.eye(2), Q.shape)
        assert_allclose(Q, expected, atol=1e-9)
        # the estimate reports the pre-extrapolation truncation, so it is
        # conservative: small, but far above the actual extrapolated error
        assert err.max() < 1e-5


def test_hessian_output_symmetric(grid4):
    body = LogPerturbedBall(TestFunction.coordinate_harmonic(4), 0.3)
    Q, err = tangent_hessian(_support_field(body), grid4.nodes, grid4.frames)
    assert np.array_equal(Q, np.swapaxes(Q, 1, 2))
    assert err.max() < 1e-4


def test_laplacian_eigenfunction_degree2(grid3, grid4):
    # x_1^2 - 1/n is a spherical harmonic with eigenvalue 2n
    for grid, n in ((grid3, 3), (grid4, 4)):
        psi = TestFunction.coordinate_harmonic(n)
        lap = spherical_laplacian(psi, grid.nodes, grid.frames)
        assert_allclose(lap, -2.0 * n * psi(grid.nodes), atol=5e-8)


def test_laplacian_eigenfunction_degree4(grid3):
    # the zonal degree-4 harmonic has eigenvalue 4(n+2)
    n = 3
    psi = TestFunction.zonal_degree4(n)
    lap = spherical_laplacian(psi, grid3.nodes, grid3.frames)
    assert_allclose(lap, -4.0 * (n + 2) * psi(grid3.nodes), atol=5e-8)


def test_gradient_of_coordinate_harmonic(grid3):
    # on the sphere, grad (x_1^2) = 2 x_1 (e_1 - x_1 x)
    psi = TestFunction.coordinate_harmonic(3)
    G = spherical_gradient(psi, grid3.nodes)
    X = grid3.nodes
    expected = 2.0 * X[:, [0]] * (np.eye(3)[0][None, :] - X[:, [0]] * X)
    assert_allclose(G, expected, atol=1e-8)
    # gradient is tangential
    assert_allclose(np.einsum("mi,mi->m", G, X), 0.0, atol=1e-12)


def test_gradient_norm_integral_matches_eigenvalue(grid3):
    # int |grad psi|^2 = 2n int psi^2 for a degree-2 harmonic
    n = 3
    psi = TestFunction.coordinate_harmonic(n)
    G = spherical_gradient(psi, grid3.nodes)
    lhs = float(np.dot(grid3.weights, np.einsum("mi,mi->m", G, G)))
    rhs = 2.0 * n * integrate(grid3, lambda X: psi(X) ** 2)
    assert_allclose(lhs, rhs, rtol=1e-7)


def test_hessian_error_estimate_tracks_accuracy(grid3):
    body = LogPerturbedBall(TestFunction.coordinate_harmonic(3), 0.2)
    Q_ref, _ = tangent_hessian(_support_field(body), grid3.nodes, grid3.frames,
                               step=5e-4)
    Q, err = tangent_hessian(_support_field(body), grid3.nodes, grid3.frames)
    actual = np.max(np.abs(Q - Q_ref))
    assert actual < 1e-7
    # conservative: the estimate should not undershoot the actual deviation
    assert err.max() >= actual
    assert err.max() < 1e-4
