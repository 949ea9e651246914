import numpy as np
import pytest

import geopursuit as gp
from geopursuit.engine import Captured, Evaded, lion_step, predict_lion
from geopursuit.strategies import evader_move


class TestGameConfig:
    def test_validates_epsilon_and_substep(self, disk):
        with pytest.raises(gp.ValidationError):
            gp.GameConfig(0.0, 10, 0.01)
        with pytest.raises(gp.ValidationError):
            gp.GameConfig(0.1, 10, 0.02)  # fewer than 10 substeps
        with pytest.raises(gp.ValidationError):
            gp.GameConfig(0.1, 10, 0.003)  # does not divide epsilon
        with pytest.raises(gp.ValidationError):
            gp.GameConfig(0.1, 0, 0.01)
        cfg = gp.GameConfig(0.1, 10, 0.01)
        assert cfg.substeps_per_interval == 10

    def test_default_horizon_formula(self, disk, plane):
        assert gp.default_horizon_steps(disk, 0.05) == 16000
        with pytest.raises(gp.ValidationError):
            gp.default_horizon_steps(plane, 0.05)


class TestLionStep:
    def test_unit_speed_toward_target(self, disk):
        leg = lion_step(disk, disk.point(0, 0), disk.point(0.5, 0.5), 0.1)
        want = 0.1 / np.sqrt(2)
        assert leg.endpoint.coords == pytest.approx((want, want), abs=1e-12)
        assert leg.travel == pytest.approx(0.1, abs=1e-15)

    def test_waiting_rule_when_closer_than_epsilon(self, disk):
        leg = lion_step(disk, disk.point(0, 0), disk.point(0.05, 0), 0.1)
        # reaches the target at local time 0.05, then stays
        assert leg.position_at(0.05).coords == pytest.approx((0.05, 0.0), abs=1e-12)
        assert leg.position_at(0.08).coords == pytest.approx((0.05, 0.0), abs=1e-12)
        assert leg.position_at(0.1).coords == pytest.approx((0.05, 0.0), abs=1e-12)
        assert leg.travel == pytest.approx(0.05, abs=1e-15)

    def test_chebyshev_arc_length_speed(self, cheb):
        leg = lion_step(cheb, cheb.point(0, 0), cheb.point(0.4, 0.2), 0.1)
        assert leg.endpoint.coords == pytest.approx((0.1, 0.05), abs=1e-12)

    def test_aim_betweenness(self, disk, cheb, tree):
        rng = np.random.default_rng(0)
        for space in (disk, cheb, tree):
            for _ in range(50):
                lion, man = gp.random_start_pair(space, rng, 0.1)
                nxt = lion_step(space, lion, man, 0.1).endpoint
                defect = (space.distance(lion, nxt)
                          + space.distance(nxt, man)
                          - space.distance(lion, man))
                assert abs(defect) <= 1e-9


class TestPredictLion:
    def test_matches_step_endpoint(self, disk):
        lion, man = disk.point(0, 0), disk.point(0.5, 0.5)
        assert (predict_lion(disk, lion, man, 0.1).coords
                == lion_step(disk, lion, man, 0.1).endpoint.coords)

    def test_degenerate_same_point(self, disk):
        p = disk.point(0.3, 0.3)
        assert predict_lion(disk, p, p, 0.1) == p

    def test_pure_function_bitwise(self, cheb):
        lion, man = cheb.point(-0.2, 0.1), cheb.point(0.4, -0.3)
        a = predict_lion(cheb, lion, man, 0.07)
        b = predict_lion(cheb, lion, man, 0.07)
        assert a.coords == b.coords


class TestEvaderMoves:
    def test_stationary(self, disk):
        m = disk.point(0.2, 0.2)
        assert evader_move(gp.Stationary(), disk, m, disk.point(0, 0), 0.1) == m

    def test_radial_flee_plane_example(self, plane):
        target = evader_move(gp.RadialFlee(), plane, plane.point(1, 0),
                             plane.point(0, 0), 0.1)
        assert target.coords == pytest.approx((1.1, 0.0), abs=1e-12)

    def test_radial_flee_clips_at_disk_boundary(self, disk):
        target = evader_move(gp.RadialFlee(), disk, disk.point(0.95, 0),
                             disk.point(0, 0), 0.1)
        assert target.coords == pytest.approx((1.0, 0.0), abs=1e-12)

    def test_circle_runner_fixed_orientation(self, circle):
        target = evader_move(gp.CircleRunner(1), circle, circle.point(0.5),
                             circle.point(0.0), 0.05)
        assert target.coords[0] == pytest.approx(0.55, abs=1e-15)

    def test_circle_runner_rejects_other_spaces(self, disk):
        with pytest.raises(gp.ValidationError):
            evader_move(gp.CircleRunner(1), disk, disk.point(0, 0),
                        disk.point(0.5, 0), 0.1)

    def test_greedy_candidates_within_epsilon(self, disk, cheb, circle, tree):
        rng = np.random.default_rng(1)
        strategy = gp.GreedyMaxDistance(16)
        for space in (disk, cheb, circle, tree):
            for _ in range(25):
                man, lion = gp.random_start_pair(space, rng, 0.05)
                target = evader_move(strategy, space, man, lion, 0.1, rng)
                assert space.distance(man, target) <= 0.1 + 1e-9
                space.check_point(target)

    def test_greedy_never_reduces_distance_to_prediction(self, disk):
        rng = np.random.default_rng(2)
        strategy = gp.GreedyMaxDistance(32)
        for _ in range(25):
            man, lion = gp.random_start_pair(disk, rng, 0.2)
            predicted = predict_lion(disk, lion, man, 0.1)
            target = evader_move(strategy, disk, man, lion, 0.1, rng)
            # staying put is always a candidate, so greedy can only gain
            assert (disk.distance(target, predicted)
                    >= disk.distance(man, predicted) - 1e-12)

    def test_scripted_clips_and_exhausts(self, disk):
        waypoints = [disk.point(0.9, 0.0)]
        strategy = gp.Scripted(waypoints).fresh()
        m = disk.point(0.0, 0.0)
        first = evader_move(strategy, disk, m, disk.point(-0.5, 0), 0.1)
        assert first.coords == pytest.approx((0.1, 0.0), abs=1e-12)
        # list exhausted: behaves as stationary
        second = evader_move(strategy, disk, m, disk.point(-0.5, 0), 0.1)
        assert second == m

    def test_make_evader_specs(self, disk, circle):
        assert isinstance(gp.make_evader({"kind": "stationary"}, disk),
                          gp.Stationary)
        greedy = gp.make_evader({"kind": "greedy_max_distance", "k": 8}, disk)
        assert greedy.k == 8
        runner = gp.make_evader({"kind": "circle_runner", "orientation": -1},
                                circle)
        assert runner.orientation == -1
        scripted = gp.make_evader(
            {"kind": "scripted", "waypoints": [[0.1, 0.0], [0.2, 0.0]]}, disk)
        assert len(scripted.waypoints) == 2
        with pytest.raises(gp.ValidationError):
            gp.make_evader({"kind": "zigzag"}, disk)


class TestRunGame:
    def test_stationary_capture_time(self, disk):
        cfg = gp.GameConfig(0.1, 200, 0.01)
        trace, outcome = gp.run_game(disk, cfg, disk.point(-0.5, 0),
                                     disk.point(0.5, 0), gp.Stationary(),
                                     seed=0)
        assert isinstance(outcome, Captured)
        # distance falls at unit speed from 1.0; capture within one substep
        # of the ideal first strictly-below-epsilon sample
        assert outcome.t == pytest.approx(0.91, abs=0.01 + 1e-12)
        assert trace.dist[-1] < 0.1

    def test_rejects_foreign_start_points(self, disk, cheb):
        cfg = gp.GameConfig(0.1, 10, 0.01)
        with pytest.raises(gp.SpaceMismatchError):
            gp.run_game(disk, cfg, cheb.point(0, 0), disk.point(0.5, 0),
                        gp.Stationary(), seed=0)

    def test_capture_tol_delays_capture(self, disk):
        strict = gp.GameConfig(0.1, 200, 0.01, capture_tol=0.05)
        trace, outcome = gp.run_game(disk, strict, disk.point(-0.5, 0),
                                     disk.point(0.5, 0), gp.Stationary(),
                                     seed=0)
        assert isinstance(outcome, Captured)
        # capture only once the distance falls below epsilon - capture_tol
        assert trace.dist[-1] < 0.1 - 0.05
        assert np.all(trace.dist[:-1] >= 0.1 - 0.05)

    def test_capture_at_t0_when_starting_close(self, disk):
        cfg = gp.GameConfig(0.1, 10, 0.01)
        trace, outcome = gp.run_game(disk, cfg, disk.point(0, 0),
                                     disk.point(0.05, 0), gp.Stationary(),
                                     seed=0)
        assert outcome == Captured(0.0)
        assert trace.n_samples == 1

    def test_circle_runner_evades_with_constant_distance(self, circle):
        cfg = gp.GameConfig(0.05, 400, 0.005)
        trace, outcome = gp.run_game(circle, cfg, circle.point(0.0),
                                     circle.point(0.4), gp.CircleRunner(1),
                                     seed=0)
        assert outcome == Evaded(cfg.horizon_time)
        d = trace.moment_distances()
        assert np.max(np.abs(d - 0.4)) <= 1e-9

    def test_greedy_captured_on_disk(self, disk):
        cfg = gp.GameConfig.with_defaults(disk, 0.05)
        rng = np.random.default_rng(5)
        lion0, man0 = gp.random_start_pair(disk, rng, 0.05)
        _, outcome = gp.run_game(disk, cfg, lion0, man0,
                                 gp.GreedyMaxDistance(32), seed=5)
        assert isinstance(outcome, Captured)

    def test_moments_exact_epsilon_grid(self, disk):
        cfg = gp.GameConfig(0.1, 37, 0.01)
        trace, _ = gp.run_game(disk, cfg, disk.point(-0.9, 0),
                               disk.point(0.9, 0), gp.Stationary(), seed=0)
        for i, m in enumerate(trace.moments):
            assert m.t == i * 0.1

    def test_step_length_and_lipschitz_invariants(self, disk, cheb, tree):
        rng = np.random.default_rng(8)
        for space in (disk, cheb, tree):
            cfg = gp.GameConfig.with_defaults(space, 0.1)
            lion0, man0 = gp.random_start_pair(space, rng, 0.1)
            trace, _ = gp.run_game(space, cfg, lion0, man0,
                                   gp.GreedyMaxDistance(8), seed=8)
            d = trace.moment_distances()
            for i in range(len(trace.moments) - 1):
                if d[i] >= 0.1:
                    step = space.distance(trace.moments[i].lion,
                                          trace.moments[i + 1].lion)
                    assert abs(step - 0.1) <= 1e-9
            dt = np.diff(trace.times)
            for rows in (trace.lion_rows, trace.man_rows):
                hops = space.dist_rows(rows[:-1], rows[1:])
                assert np.all(hops <= dt + 1e-9)

    def test_monotone_distance_on_capture_spaces(self, disk, cheb, tree):
        rng = np.random.default_rng(9)
        for space in (disk, cheb, tree):
            cfg = gp.GameConfig.with_defaults(space, 0.1)
            lion0, man0 = gp.random_start_pair(space, rng, 0.1)
            trace, _ = gp.run_game(space, cfg, lion0, man0,
                                   gp.GreedyMaxDistance(8), seed=9)
            d = trace.moment_distances()
            assert np.all(np.diff(d) <= 1e-9)

    def test_bitwise_deterministic(self, cheb):
        cfg = gp.GameConfig.with_defaults(cheb, 0.1)
        lion0, man0 = cheb.point(-0.4, 0.2), cheb.point(0.5, -0.1)
        runs = [gp.run_game(cheb, cfg, lion0, man0, gp.GreedyMaxDistance(16),
                            seed=3) for _ in range(2)]
        (t1, o1), (t2, o2) = runs
        assert o1 == o2
        assert np.array_equal(t1.times, t2.times)
        assert np.array_equal(t1.lion_rows, t2.lion_rows)
        assert np.array_equal(t1.man_rows, t2.man_rows)
        assert np.array_equal(t1.dist, t2.dist)
        assert t1.moments == t2.moments


class TestDistanceProfile:
    def test_decreasing_for_stationary(self, disk):
        cfg = gp.GameConfig(0.1, 50, 0.01)
        trace, _ = gp.run_game(disk, cfg, disk.point(-0.5, 0),
                               disk.point(0.5, 0), gp.Stationary(), seed=0)
        t, d = gp.distance_profile(trace)
        assert len(t) == len(d) == trace.n_samples
        assert np.all(np.diff(d) < 0)

    def test_constant_for_circle_runner(self, circle):
        cfg = gp.GameConfig(0.05, 100, 0.005)
        trace, _ = gp.run_game(circle, cfg, circle.point(0.0),
                               circle.point(0.4), gp.CircleRunner(1), seed=0)
        _, d = gp.distance_profile(trace)
        assert np.max(np.abs(d - 0.4)) <= 1e-9

    def test_empty_trace_rejected(self, disk):
        cfg = gp.GameConfig(0.1, 10, 0.01)
        trace, _ = gp.run_game(disk, cfg, disk.point(0, 0),
                               disk.point(0.5, 0), gp.Stationary(), seed=0)
        trace.times = np.array([])
        trace.dist = np.array([])
        with pytest.raises(gp.ValidationError):
            gp.distance_profile(trace)


class TestSweep:
    def test_disk_stationary_grid_all_captured(self, disk):
        rows = gp.sweep_capture_time(disk, [0.2, 0.1], [gp.Stationary()],
                                     trials=3, seed=0)
        assert len(rows) == 6
        assert all(r.outcome == "captured" for r in rows)
        assert all(r.capture_time is not None for r in rows)

    def test_plane_radial_flee_all_evaded(self, plane):
        rows = gp.sweep_capture_time(plane, [0.1], [gp.RadialFlee()],
                                     trials=3, seed=0, horizon_steps=50)
        assert all(r.outcome == "evaded" for r in rows)
        assert all(r.capture_time is None for r in rows)

    def test_rejects_nonpositive_epsilon(self, disk):
        with pytest.raises(gp.ValidationError):
            gp.sweep_capture_time(disk, [0.1, -0.2], [gp.Stationary()],
                                  trials=1, seed=0)

    def test_deterministic_rows(self, disk):
        kw = dict(trials=2, seed=4)
        r1 = gp.sweep_capture_time(disk, [0.1], [gp.GreedyMaxDistance(8)], **kw)
        r2 = gp.sweep_capture_time(disk, [0.1], [gp.GreedyMaxDistance(8)], **kw)
        assert r1 == r2
