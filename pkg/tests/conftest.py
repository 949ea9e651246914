import numpy as np
import pytest

import geopursuit as gp


@pytest.fixture(scope="session")
def disk():
    return gp.EuclideanDiskSpace(1.0)


@pytest.fixture(scope="session")
def cheb():
    return gp.ChebyshevDiskSpace(1.0)


@pytest.fixture(scope="session")
def circle():
    return gp.CircleSpace(1.0)


@pytest.fixture(scope="session")
def circle_2pi():
    return gp.CircleSpace(2.0 * np.pi)


@pytest.fixture(scope="session")
def tree():
    return gp.MetricTreeSpace([tuple(e) for e in gp.DEMO_TREE_EDGES])


@pytest.fixture(scope="session")
def plane():
    return gp.EuclideanPlaneSpace()


@pytest.fixture(scope="session")
def star_tree():
    return gp.MetricTreeSpace([("a", "b", 1.0), ("b", "c", 1.0),
                               ("b", "d", 2.0)])


def run_seeded_game(space, epsilon, evader, seed, horizon_steps=None):
    config = gp.GameConfig.with_defaults(space, epsilon,
                                         horizon_steps=horizon_steps)
    rng = np.random.default_rng(seed)
    lion0, man0 = gp.random_start_pair(space, rng, epsilon)
    return gp.run_game(space, config, lion0, man0, evader, seed=seed)


def colinear_march_game(space, epsilon):
    """Fixed colinear chase: both players march +x, evader on scripted
    waypoints spaced exactly epsilon, then exhausting to stationary."""
    config = gp.GameConfig.with_defaults(space, epsilon)
    waypoints = [space.point(-0.4 + epsilon * (k + 1), 0.0) for k in range(6)]
    return gp.run_game(space, config, space.point(-0.9, 0.0),
                       space.point(-0.4, 0.0), gp.Scripted(waypoints), seed=0)


@pytest.fixture(scope="session")
def seeded_games(disk, cheb, tree):
    """20 seeded games across the three capture backends, mixing evader
    kinds and step sizes; shared by the diagnostics invariants.

    Kept to regimes whose per-step distance change is either exactly zero
    or far above the classifier tolerance: adversarial greedy evaders on
    the disks end in asymptotic tail-chases whose per-step change sweeps
    through every scale, which no single-tolerance classifier can bucket
    consistently (that behaviour has its own test)."""
    games = []
    seeds = iter(range(100, 200))
    for space in (disk, cheb):
        for evader in (gp.Stationary(), gp.RadialFlee()):
            for epsilon in (0.1, 0.2):
                games.append((space, *run_seeded_game(space, epsilon, evader,
                                                      next(seeds))))
        for epsilon in (0.1, 0.2):
            games.append((space, *colinear_march_game(space, epsilon)))
    for evader in (gp.Stationary(), gp.RadialFlee(),
                   gp.GreedyMaxDistance(16)):
        for epsilon in (0.1, 0.2):
            games.append((tree, *run_seeded_game(tree, epsilon, evader,
                                                 next(seeds))))
    games.append((disk, *run_seeded_game(disk, 0.05, gp.RadialFlee(),
                                         next(seeds))))
    games.append((tree, *run_seeded_game(tree, 0.05,
                                         gp.GreedyMaxDistance(32),
                                         next(seeds))))
    assert len(games) == 20
    return games


def last_separated_moment(trace):
    d = trace.moment_distances()
    eps = trace.config.epsilon
    last = 0
    while last + 1 < len(trace.moments) and d[last + 1] >= eps:
        last += 1
    return last
