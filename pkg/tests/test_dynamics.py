import numpy as np
import pytest

from seedgame import (ConsumptionState, DiscountedSolver,
                      SeedingPair, TailCertificationError, WeightedDigraph,
                      agent_utility, auto_horizon, best_response_step,
                      simulate, write_trajectory_csv)

from conftest import MARKET


def nash_like_pair(n, rng):
    return SeedingPair(s_bar=rng.random(n), s_under=rng.random(n))


class TestSeedingPair:
    def test_zeros(self):
        pair = SeedingPair.zeros(3)
        assert pair.n == 3
        assert np.array_equal(pair.s_bar, np.zeros(3))

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            SeedingPair(np.array([-0.1, 0.0]), np.zeros(2))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            SeedingPair(np.array([np.nan, 0.0]), np.zeros(2))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            SeedingPair(np.zeros(2), np.zeros(3))

    def test_read_only(self):
        pair = SeedingPair.zeros(2)
        with pytest.raises(ValueError):
            pair.s_bar[0] = 1.0


class TestBestResponseStep:
    def test_isolated_agents_jump_to_base_level(self):
        g = WeightedDigraph.empty(3)
        state = ConsumptionState(np.zeros(3), np.zeros(3), k=0)
        nxt = best_response_step(state, g, MARKET)
        assert nxt.k == 1
        # alpha - price = 1 for both products when nobody influences anybody
        assert np.allclose(nxt.x_bar, 1.0)
        assert np.allclose(nxt.x_under, 1.0)

    def test_single_step_by_hand(self, two_node):
        # x1' = 1 + g12 * (x2 + beta * y2) with g12 = 0.5, beta = 0.5
        state = ConsumptionState(np.array([0.0, 2.0]), np.array([0.0, 4.0]), k=0)
        nxt = best_response_step(state, two_node, MARKET)
        assert nxt.x_bar[0] == pytest.approx(1 + 0.5 * (2 + 0.5 * 4))
        assert nxt.x_under[0] == pytest.approx(1 + 0.5 * (4 + 0.5 * 2))
        assert nxt.x_bar[1] == pytest.approx(1.0)

    def test_steady_state_is_fixed(self, cp_graph):
        # x* solves x = (alpha - p) 1 + (1 + beta) G x when both sides seed alike
        dense = cp_graph.to_dense()
        x_star = np.linalg.solve(np.eye(12) - 1.5 * dense, np.ones(12))
        state = ConsumptionState(x_star, x_star, k=3)
        nxt = best_response_step(state, cp_graph, MARKET)
        assert np.allclose(nxt.x_bar, x_star, atol=1e-12)
        assert np.allclose(nxt.x_under, x_star, atol=1e-12)


class TestAgentUtility:
    def test_matches_hand_formula(self, two_node):
        state = ConsumptionState(np.array([0.0, 2.0]), np.array([0.0, 4.0]), k=0)
        x = 1.5
        # (alpha - p) x - x^2/2 + x * g12 * (x2_own + beta * x2_other)
        expected = 1.0 * x - x * x / 2 + x * 0.5 * (2.0 + 0.5 * 4.0)
        got = agent_utility(1, x, state, two_node, MARKET, firm="a")
        assert got == pytest.approx(expected)

    def test_best_response_maximizes(self, cp_graph):
        rng = np.random.default_rng(0)
        state = ConsumptionState(rng.random(12), rng.random(12), k=0)
        nxt = best_response_step(state, cp_graph, MARKET)
        for i in (1, 4, 7):
            best = agent_utility(i, float(nxt.x_bar[i - 1]), state, cp_graph, MARKET)
            for bump in (-0.05, 0.05):
                worse = agent_utility(i, float(nxt.x_bar[i - 1]) + bump,
                                      state, cp_graph, MARKET)
                assert worse <= best


class TestSimulate:
    def test_empty_graph_geometric_sum(self):
        g = WeightedDigraph.empty(3)
        traj = simulate(g, MARKET, SeedingPair.zeros(3), tail_tol=1e-12)
        # x(k) = 1 for k >= 1, so the discounted sum is delta/(1-delta) = 1
        assert np.allclose(traj.discounted_bar, 1.0, atol=1e-10)
        assert np.allclose(traj.discounted_under, 1.0, atol=1e-10)

    def test_matches_closed_form(self, cp_graph):
        rng = np.random.default_rng(1)
        seeding = nash_like_pair(12, rng)
        traj = simulate(cp_graph, MARKET, seeding, tail_tol=1e-12)
        y_bar, y_under = DiscountedSolver(cp_graph, MARKET).consumption(seeding)
        assert np.abs(traj.discounted_bar - y_bar).max() <= 1e-10
        assert np.abs(traj.discounted_under - y_under).max() <= 1e-10

    def test_tail_bound_is_honest(self, cp_graph):
        rng = np.random.default_rng(2)
        seeding = nash_like_pair(12, rng)
        exact_bar, exact_under = DiscountedSolver(cp_graph, MARKET).consumption(seeding)
        for horizon in (3, 6, 12, 24):
            traj = simulate(cp_graph, MARKET, seeding, horizon=horizon)
            gap = max(np.abs(traj.discounted_bar - exact_bar).max(),
                      np.abs(traj.discounted_under - exact_under).max())
            assert gap <= traj.tail_bound + 1e-12

    def test_states_stored_and_indexed(self, two_node):
        traj = simulate(two_node, MARKET, SeedingPair.zeros(2), horizon=5)
        assert traj.horizon == 5
        assert len(traj.states) == 6
        assert [s.k for s in traj.states] == list(range(6))

    def test_store_states_off(self, two_node):
        traj = simulate(two_node, MARKET, SeedingPair.zeros(2), horizon=5,
                        store_states=False)
        assert traj.states == ()
        ref = simulate(two_node, MARKET, SeedingPair.zeros(2), horizon=5)
        assert np.array_equal(traj.discounted_bar, ref.discounted_bar)

    def test_discounted_sums_property(self, two_node):
        traj = simulate(two_node, MARKET, SeedingPair.zeros(2), horizon=4)
        s_bar, s_under = traj.discounted_sums
        assert np.array_equal(s_bar, traj.discounted_bar)
        assert np.array_equal(s_under, traj.discounted_under)

    def test_seeding_size_mismatch(self, two_node):
        with pytest.raises(ValueError):
            simulate(two_node, MARKET, SeedingPair.zeros(3))

    def test_never_negative_states(self, test_suite):
        rng = np.random.default_rng(3)
        for name, graph in test_suite[:8]:
            seeding = nash_like_pair(graph.n, rng)
            traj = simulate(graph, MARKET, seeding, horizon=20)
            for state in traj.states:
                assert state.x_bar.min() >= 0, name
                assert state.x_under.min() >= 0, name


class TestTailCertification:
    def test_auto_horizon_meets_target(self, test_suite):
        for name, graph in test_suite:
            seeding = SeedingPair.zeros(graph.n)
            for tol in (1e-6, 1e-10):
                traj = simulate(graph, MARKET, seeding, tail_tol=tol)
                assert traj.tail_bound <= tol, name

    def test_auto_horizon_minimal(self, cp_graph):
        seeding = SeedingPair.zeros(12)
        horizon = auto_horizon(cp_graph, MARKET, seeding, 1e-10)
        shorter = simulate(cp_graph, MARKET, seeding, horizon=horizon - 1)
        assert shorter.tail_bound > 1e-10

    def test_growth_branch_certifies(self):
        # max weighted in-degree 1.2 puts mu = 1.8 above 1 while
        # delta * mu = 0.9 still contracts; rho = sqrt(0.24) passes checks
        g = WeightedDigraph(2, [(1, 2, 1.2), (2, 1, 0.2)])
        traj = simulate(g, MARKET, SeedingPair.zeros(2), tail_tol=1e-10)
        y_bar, _ = DiscountedSolver(g, MARKET).consumption(SeedingPair.zeros(2))
        assert np.abs(traj.discounted_bar - y_bar).max() <= 1e-8

    def test_marginal_growth_branch(self):
        # max weighted in-degree exactly 2/3 makes mu = 1 (linear growth cap)
        g = WeightedDigraph(2, [(1, 2, 2.0 / 3.0), (2, 1, 0.1)])
        traj = simulate(g, MARKET, SeedingPair.zeros(2), tail_tol=1e-10)
        y_bar, _ = DiscountedSolver(g, MARKET).consumption(SeedingPair.zeros(2))
        assert np.abs(traj.discounted_bar - y_bar).max() <= 1e-8

    def test_refuses_uncertifiable(self):
        # rho = sqrt(1.7 * 0.9) ~ 1.237 passes the model checks, but
        # delta * (1 + beta) * 1.7 = 1.275 defeats the per-entry certificate
        g = WeightedDigraph(2, [(1, 2, 1.7), (2, 1, 0.9)])
        with pytest.raises(TailCertificationError):
            simulate(g, MARKET, SeedingPair.zeros(2))


class TestTrajectoryCsv:
    def test_layout(self, two_node, tmp_path):
        traj = simulate(two_node, MARKET, SeedingPair.zeros(2), horizon=3)
        path = tmp_path / "t.csv"
        write_trajectory_csv(traj, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "k,node,x_bar,x_under"
        assert len(lines) == 1 + 4 * 2
        k, node, x_bar, x_under = lines[1].split(",")
        assert (k, node) == ("0", "1")
        assert float(x_bar) == 0.0

    def test_values_round_trip_exactly(self, cp_graph, tmp_path):
        rng = np.random.default_rng(4)
        traj = simulate(cp_graph, MARKET, nash_like_pair(12, rng), horizon=4)
        path = tmp_path / "t.csv"
        write_trajectory_csv(traj, path)
        rows = [line.split(",") for line in path.read_text().splitlines()[1:]]
        for state in traj.states:
            for idx in range(12):
                k, node, x_bar, x_under = rows[state.k * 12 + idx]
                assert int(k) == state.k and int(node) == idx + 1
                assert float(x_bar) == state.x_bar[idx]
                assert float(x_under) == state.x_under[idx]

    def test_requires_states(self, two_node, tmp_path):
        traj = simulate(two_node, MARKET, SeedingPair.zeros(2), horizon=3,
                        store_states=False)
        with pytest.raises(ValueError):
            write_trajectory_csv(traj, tmp_path / "t.csv")
