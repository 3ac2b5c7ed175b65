import numpy as np
import pytest
from numpy.testing import assert_allclose

from quermass import (
    Ball,
    Box,
    DomainError,
    EmbeddedCube,
    LogPerturbedBall,
    PMeanSpec,
    TestFunction,
    UnsupportedBodyError,
    WulffSampled,
    body_from_json,
    minkowski_support,
    pmean,
    pmean_values,
    support,
    wulff_membership,
    wulff_support_upper,
)
from quermass.bodies import require_smooth


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def test_support_values():
    e1 = np.array([1.0, 0.0, 0.0])
    u = _unit([1.0, -2.0, 2.0])

    assert support(Ball(1.5), e1) == 1.5
    assert support(Ball(1.5), u) == 1.5

    box = Box((1.0, 2.0, 0.5))
    assert support(box, e1) == 1.0
    assert_allclose(support(box, u), (1.0 * 1 + 2.0 * 2 + 0.5 * 2) / 3.0, rtol=1e-15)

    cube = EmbeddedCube(3, (0, 2))
    assert support(cube, e1) == 1.0
    assert support(cube, np.array([0.0, 1.0, 0.0])) == 0.0
    assert_allclose(support(cube, u), (1.0 + 2.0) / 3.0, rtol=1e-15)

    psi = TestFunction.coordinate_harmonic(3)
    pb = LogPerturbedBall(psi, 0.1)
    assert_allclose(support(pb, e1), np.exp(0.1 * (1.0 - 1.0 / 3.0)), rtol=1e-15)


def test_support_rejects_non_unit():
    with pytest.raises(DomainError):
        support(Ball(1.0), np.array([1.0, 1.0, 0.0]))


def test_body_validation():
    with pytest.raises(DomainError):
        Ball(-1.0)
    with pytest.raises(DomainError):
        Box((1.0, -2.0))
    with pytest.raises(DomainError):
        EmbeddedCube(3, (0, 5))
    with pytest.raises(DomainError):
        EmbeddedCube(3, (1, 1))


def test_smoothness_flags():
    assert Ball(1.0).is_smooth
    assert LogPerturbedBall(TestFunction.constant(3, 0.0), 1.0).is_smooth
    assert not Box((1.0, 1.0)).is_smooth
    assert not EmbeddedCube(3, (0,)).is_smooth
    require_smooth(Ball(1.0), "test")
    with pytest.raises(UnsupportedBodyError):
        require_smooth(Box((1.0, 1.0)), "test")


def test_minkowski_support_additive(rng):
    b0 = Box((1.0, 0.5, 2.0))
    b1 = Ball(0.7)
    for _ in range(20):
        u = _unit(rng.standard_normal(3))
        expected = 0.3 * support(b0, u) + 1.2 * support(b1, u)
        assert_allclose(minkowski_support(b0, b1, 0.3, 1.2, u), expected, rtol=1e-14)
    with pytest.raises(DomainError):
        minkowski_support(b0, b1, -0.1, 1.0, _unit([1, 1, 1]))


def test_pmean_spec_validation():
    b = Ball(1.0)
    with pytest.raises(DomainError):
        PMeanSpec(1.5, 0.5, b, b)
    with pytest.raises(DomainError):
        PMeanSpec(-0.1, 0.5, b, b)
    with pytest.raises(DomainError):
        PMeanSpec(0.5, 1.5, b, b)


def test_pmean_endpoints_and_zero_convention(grid3):
    U = grid3.nodes
    cube0 = EmbeddedCube(3, (1, 2))
    cube1 = EmbeddedCube(3, (0, 1))
    h0 = cube0.support_values(U)
    h1 = cube1.support_values(U)

    # t endpoints return the respective support exactly, even for p = 0
    assert np.array_equal(pmean_values(PMeanSpec(0.0, 0.0, cube0, cube1), U), h0)
    assert np.array_equal(pmean_values(PMeanSpec(0.0, 1.0, cube0, cube1), U), h1)

    # p = 0 geometric mean vanishes where either factor vanishes
    g = pmean_values(PMeanSpec(0.0, 0.5, cube0, cube1), U)
    dead = (h0 == 0.0) | (h1 == 0.0)
    assert np.all(g[dead] == 0.0)
    live = ~dead
    assert_allclose(g[live], np.sqrt(h0[live] * h1[live]), rtol=1e-14)

    e1 = np.array([1.0, 0.0, 0.0])
    # 2^{-1/p} gap value from the acceptance example family
    assert_allclose(pmean(PMeanSpec(0.5, 0.5, cube0, cube1), e1), 0.25, rtol=1e-14)


def test_pmean_ordering(rng):
    # 0-mean <= p-mean <= arithmetic mean, pointwise, over random data
    b0 = Box((1.0, 2.0, 0.5))
    b1 = Ball(1.3)
    for _ in range(1000):
        u = _unit(rng.standard_normal(3))
        p = rng.uniform(0.05, 1.0)
        t = rng.uniform(0.0, 1.0)
        g0 = pmean(PMeanSpec(0.0, t, b0, b1), u)
        gp = pmean(PMeanSpec(p, t, b0, b1), u)
        g1 = pmean(PMeanSpec(1.0, t, b0, b1), u)
        assert g0 <= gp + 1e-12
        assert gp <= g1 + 1e-12


def test_pmean_monotone_in_p(rng):
    b0 = Box((1.0, 2.0, 0.5))
    b1 = Ball(1.3)
    for _ in range(100):
        u = _unit(rng.standard_normal(3))
        t = rng.uniform(0.1, 0.9)
        ps = np.sort(rng.uniform(0.05, 1.0, size=4))
        vals = [pmean(PMeanSpec(p, t, b0, b1), u) for p in ps]
        assert np.all(np.diff(vals) >= -1e-12)


def test_zero_sum_scaling_identity(grid3, rng):
    # 0-combination of dilates: gauge(lam0 K0, lam1 K1) = lam0^{1-t} lam1^t gauge(K0, K1)
    U = grid3.nodes
    b0 = Box((1.0, 2.0, 0.5))
    b1 = Ball(1.3)
    for _ in range(10):
        lam0, lam1 = rng.uniform(0.2, 3.0, size=2)
        t = rng.uniform(0.0, 1.0)
        lhs = pmean_values(
            PMeanSpec(0.0, t, Box((lam0 * 1.0, lam0 * 2.0, lam0 * 0.5)), Ball(lam1 * 1.3)),
            U,
        )
        rhs = lam0 ** (1.0 - t) * lam1**t * pmean_values(PMeanSpec(0.0, t, b0, b1), U)
        assert_allclose(lhs, rhs, rtol=1e-12)


def test_wulff_ball_and_box(grid3, rng):
    # constant gauge R on the grid: support bound at grid nodes is exactly R
    R = 1.7
    vals = np.full(grid3.node_count, R)
    for i in range(0, grid3.node_count, 11):
        value, _ = wulff_support_upper(grid3, vals, grid3.nodes[i])
        assert_allclose(value, R, atol=1e-12)

    # box gauge on +-e_i reproduces the box support function exactly
    dirs = np.vstack([np.eye(3), -np.eye(3)])
    a = np.array([1.0, 2.0, 0.5])
    fvals = np.abs(dirs) @ a
    for _ in range(25):
        u = _unit(rng.standard_normal(3))
        value, x = wulff_support_upper(dirs, fvals, u)
        assert_allclose(value, np.abs(u) @ a, atol=1e-12)

    with pytest.raises(DomainError):
        wulff_support_upper(dirs, -fvals, _unit([1, 0, 0]))


def test_wulff_membership():
    dirs = np.vstack([np.eye(3), -np.eye(3)])
    vals = np.ones(6)
    assert wulff_membership(dirs, vals, np.array([0.99, 0.0, 0.0]))
    assert wulff_membership(dirs, vals, np.array([1.0, 0.0, 0.0]))
    assert not wulff_membership(dirs, vals, np.array([1.01, 0.0, 0.0]))
    assert wulff_membership(dirs, vals, np.array([0.5, -0.5, 0.5]))


def test_wulff_sampled_body(grid3):
    vals = np.full(grid3.node_count, 2.0)
    body = WulffSampled(grid3.nodes, vals)
    assert not body.is_smooth
    out = body.support_values(grid3.nodes[:5])
    assert_allclose(out, 2.0, atol=1e-12)
    with pytest.raises(DomainError):
        WulffSampled(grid3.nodes, -vals)


def test_inclusion_chain_of_wulff_gauges(grid3, rng):
    # gauges are ordered pointwise, hence the Wulff shapes are nested:
    # any point of the outer polytope for the 0-gauge satisfies the
    # constraints of the p-gauge polytope, and so on up to p = 1
    b0 = Box((1.0, 2.0, 0.5))
    b1 = Ball(1.3)
    U = grid3.nodes
    g0 = pmean_values(PMeanSpec(0.0, 0.4, b0, b1), U)
    gp = pmean_values(PMeanSpec(0.5, 0.4, b0, b1), U)
    g1 = pmean_values(PMeanSpec(1.0, 0.4, b0, b1), U)
    assert np.all(g0 <= gp + 1e-12)
    assert np.all(gp <= g1 + 1e-12)
    for _ in range(5):
        u = _unit(rng.standard_normal(3))
        _, x = wulff_support_upper(U, g0, u)
        assert wulff_membership(U, gp, x, tol=1e-9)
        _, x = wulff_support_upper(U, gp, u)
        assert wulff_membership(U, g1, x, tol=1e-9)


def test_body_json_roundtrip():
    bodies = [
        Ball(1.25),
        Box((1.0, 2.0, 0.5)),
        EmbeddedCube(4, (0, 1)),
        LogPerturbedBall(TestFunction.coordinate_harmonic(3), 0.2),
        WulffSampled(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4)),
    ]
    U3 = np.array([_unit([1.0, -0.3, 0.4])])
    for body in bodies:
        again = body_from_json(body.to_json())
        assert type(again) is type(body)
        if isinstance(body, (Box, WulffSampled)) or (
            isinstance(body, EmbeddedCube) and body.dimension != 3
        ):
            continue
        assert_allclose(again.support_values(U3), body.support_values(U3), rtol=1e-15)
    with pytest.raises(DomainError):
        body_from_json({"type": "dodecahedron"})
