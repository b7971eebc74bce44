import numpy as np
import pytest

from spreadcert import (
    DegenerateInputError,
    DiffusionConfig,
    GraphSpec,
    IterationBudgetError,
    StabilityError,
    build,
    check_stability,
    from_adjacency,
    spreading,
    steady_state_direct,
    steady_state_iterative,
    trajectory_csv,
)


def two_node(weight=0.9):
    return build(GraphSpec(kind="explicit_edges", n=2, edges=((0, 1, weight),)))


def test_check_stability_values():
    assert check_stability(two_node(0.9), 0.0) == 1.0
    assert check_stability(two_node(0.9), 0.5) == pytest.approx(0.55, rel=1e-12)
    g4 = build(GraphSpec(kind="cycle", n=4))
    assert check_stability(g4, 0.5) == pytest.approx(0.0, abs=1e-15)


def test_direct_rho_zero_is_identity():
    g = two_node()
    res = steady_state_direct(g, 0.0, np.array([0.3, 0.7]))
    assert np.array_equal(res.p_inf, [0.3, 0.7])
    assert res.xi == 0.0
    assert res.iterations == 0


def test_direct_zero_graph_scalar_algebra():
    g = from_adjacency(np.zeros((3, 3)))
    p0 = np.array([1.0, 2.0, 0.5])
    for rho in (0.25, 0.8):
        res = steady_state_direct(g, rho, p0)
        assert np.allclose(res.p_inf, (1 - rho) * p0, rtol=1e-14)
        assert res.xi == pytest.approx(rho, rel=1e-12)


def test_direct_two_node_uniform_eigenvector():
    res = steady_state_direct(two_node(0.9), 0.5, np.array([1.0, 1.0]))
    assert np.allclose(res.p_inf, (0.5 / 0.55) * np.ones(2), rtol=1e-13)
    assert res.xi == pytest.approx(abs(0.5 / 0.55 - 1.0), rel=1e-12)
    assert res.xi == pytest.approx(1.0 / 11.0, rel=1e-12)


def test_direct_residual_and_nonnegativity():
    g = build(GraphSpec(kind="random_geometric", n=30, radius=0.5, seed=14,
                        target_spectral_norm=0.95))
    rng = np.random.default_rng(1)
    p0 = rng.random(30)
    res = steady_state_direct(g, 0.9, p0)
    system = np.eye(30) - 0.9 * g.adjacency
    assert np.linalg.norm(system @ res.p_inf - 0.1 * p0) <= 1e-10 * np.linalg.norm(p0)
    assert np.all(res.p_inf >= 0.0)


def test_direct_errors():
    with pytest.raises(StabilityError):
        steady_state_direct(build(GraphSpec(kind="cycle", n=4)), 0.5, np.ones(4))
    with pytest.raises(DegenerateInputError):
        steady_state_direct(two_node(), 0.5, np.zeros(2))
    with pytest.raises(DegenerateInputError):
        steady_state_direct(two_node(), 0.5, np.array([1.0, -0.2]))


def test_iterative_rho_zero_one_step():
    res = steady_state_iterative(two_node(), DiffusionConfig(rho=0.0), np.array([0.2, 0.4]))
    assert res.iterations == 1
    assert np.array_equal(res.p_inf, [0.2, 0.4])


def test_iterative_matches_direct():
    g = build(GraphSpec(kind="grid2d", rows=4, cols=5, target_spectral_norm=0.9))
    rng = np.random.default_rng(5)
    p0 = rng.random(20)
    tol = 1e-12
    for rho in (0.1, 0.5, 0.9):
        direct = steady_state_direct(g, rho, p0)
        iterative = steady_state_iterative(g, DiffusionConfig(rho=rho, tol=tol), p0)
        gap = np.linalg.norm(direct.p_inf - iterative.p_inf)
        assert gap <= 10.0 * tol * np.linalg.norm(p0)
        assert iterative.xi == pytest.approx(direct.xi, abs=1e-10)


def test_iteration_count_grows_with_tight_margin():
    p0 = np.array([1.0, 0.5])
    g = two_node(1.5)
    fast = steady_state_iterative(g, DiffusionConfig(rho=0.5 / 1.5), p0)  # margin 0.5
    slow = steady_state_iterative(g, DiffusionConfig(rho=0.66), p0)  # rho*||G|| = 0.99
    assert check_stability(g, 0.66) == pytest.approx(0.01, abs=1e-12)
    assert slow.iterations >= fast.iterations


def test_iteration_budget_error_carries_state():
    g = two_node(1.5)
    with pytest.raises(IterationBudgetError) as err:
        steady_state_iterative(g, DiffusionConfig(rho=0.66, max_iters=3), np.array([1.0, 0.0]))
    assert err.value.iterations == 3
    assert err.value.last_iterate.shape == (2,)
    assert err.value.residual > 0.0


def test_trajectory_contraction_and_nonnegativity():
    g = build(GraphSpec(kind="cycle", n=10, target_spectral_norm=0.9))
    rng = np.random.default_rng(8)
    p0 = rng.random(10)
    rho = 0.7
    res = steady_state_iterative(g, DiffusionConfig(rho=rho, record_trajectory=True), p0)
    direct = steady_state_direct(g, rho, p0)
    rate = rho * g.spectral_norm
    for p_t, p_next in zip(res.trajectory, res.trajectory[1:]):
        assert np.all(p_t >= 0.0)
        before = np.linalg.norm(p_t - direct.p_inf)
        after = np.linalg.norm(p_next - direct.p_inf)
        assert after <= rate * before + 1e-12
    assert len(res.trajectory) == res.iterations + 1


def test_partial_sum_identity():
    # p_T = (1-rho) sum_{k<T} (rho G)^k p0 + (rho G)^T p0, via explicit powers
    g = build(GraphSpec(kind="cycle", n=5, target_spectral_norm=0.8))
    p0 = np.array([1.0, 0.0, 0.0, 2.0, 0.0])
    rho = 0.6
    res = steady_state_iterative(g, DiffusionConfig(rho=rho, tol=1e-3, record_trajectory=True), p0)
    m = rho * g.adjacency
    for t, p_t in enumerate(res.trajectory):
        acc = sum(np.linalg.matrix_power(m, k) @ p0 for k in range(t)) if t else np.zeros(5)
        expected = (1 - rho) * acc + np.linalg.matrix_power(m, t) @ p0
        assert np.allclose(p_t, expected, atol=1e-10)


def test_spreading_values():
    p0 = np.array([1.0, 0.0])
    assert spreading(p0, p0) == 0.0
    assert spreading(2 * p0, p0) == pytest.approx(1.0, rel=1e-15)
    assert spreading(np.array([1.0, 1.0]), p0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DegenerateInputError):
        spreading(p0, np.zeros(2))


def test_trajectory_csv_rendering():
    g = two_node(0.5)
    res = steady_state_iterative(g, DiffusionConfig(rho=0.4, record_trajectory=True),
                                 np.array([1.0, 0.0]))
    text = trajectory_csv(res)
    lines = text.strip().splitlines()
    assert lines[0] == "t,node_0,node_1"
    assert len(lines) == len(res.trajectory) + 1
    assert lines[1] == "0,1.0,0.0"
    plain = steady_state_direct(g, 0.4, np.array([1.0, 0.0]))
    with pytest.raises(DegenerateInputError):
        trajectory_csv(plain)


def test_config_validation():
    with pytest.raises(ValueError):
        DiffusionConfig(rho=1.0)
    with pytest.raises(ValueError):
        DiffusionConfig(rho=0.5, tol=0.0)
    with pytest.raises(ValueError):
        DiffusionConfig(rho=0.5, max_iters=0)
