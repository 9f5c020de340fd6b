import csv

import numpy as np
import pytest

from macrocolumn import benchmark as bm
from macrocolumn.fixtures import pair_memory
from macrocolumn.reference import RefEdge

SMALL = bm.BenchConfig(seed=3, n_envs=2, n_features=5, width=15)


def test_environments_are_deterministic_and_injective():
    a = bm.gen_environments(np.random.default_rng(5), 40, 30, 10)
    b = bm.gen_environments(np.random.default_rng(5), 40, 30, 10)
    assert a == b and len(a) == 40
    assert all(len(set(e.placement)) == 10 for e in a)
    (one,) = bm.gen_environments(np.random.default_rng(0), 1, 1, 1)
    assert one.placement == ((0, 0),)
    with pytest.raises(ValueError):
        bm.gen_environments(np.random.default_rng(0), 1, 2, 5)


def test_path_shape():
    env = bm.gen_environments(np.random.default_rng(1), 1, 30, 10)[0]
    path = bm.gen_exploration_path(env, np.random.default_rng(2), visits=4, episode_len=100)
    assert len(path.steps) == 100
    arrivals = [s for s in path.steps if s.feature is not None and s.move != (0, 0)]
    pauses = [s for s in path.steps if s.feature is not None and s.move == (0, 0)]
    assert len(arrivals) == len(pauses) == 40
    assert all(path.order.count(f) == 4 for f in range(10))
    assert all(a != b for a, b in zip(path.order, path.order[1:]))
    with pytest.raises(ValueError):
        bm.gen_exploration_path(env, np.random.default_rng(2), visits=5, episode_len=100)


def test_graph_is_torus_difference():
    env = bm.gen_environments(np.random.default_rng(1), 1, 30, 10)[0]
    path = bm.gen_exploration_path(env, np.random.default_rng(2))
    g = bm.derive_graph(env, path)
    assert len(g) == 10  # one tour repeated
    for e in g:
        (ax, ay), (bx, by) = env.placement[e.tail], env.placement[e.head]
        assert ((bx - ax) % 30, (by - ay) % 30) == (e.dx, e.dy)


def test_path_reproduces_scripted_displacements():
    # five features whose consecutive differences are the alpha tour's edges
    env = bm.Environment(0, 30, 30, ((9, 10), (14, 5), (10, 1), (17, 9), (17, 16)))
    path = bm.path_from_order(env, [2, 1, 0, 3, 4, 2], (11, 0), 20)
    got = {(e.tail, e.head): (e.dx, e.dy) for e in bm.derive_graph(env, path)}
    assert got[(2, 1)] == (4, 4)
    assert got[(1, 0)] == (25, 5)
    assert got[(0, 3)] == (8, 29)
    assert got[(3, 4)] == (0, 7)
    assert got[(4, 2)] == (23, 15)  # this closing edge differs from the scripted -7 -1


def test_small_scenario_lockstep_clean():
    run = bm.run_benchmark(SMALL)
    assert run.lockstep_clean and run.stored_edges == run.ref_edges
    assert all(r.oriented for r in run.results)
    assert sum(r.nav_errors for r in run.results) == 0


def test_empty_scenario_clean():
    mc = bm.make_macrocolumn(SMALL, 1)
    ls = bm.Lockstep(mc, bm.RefModel(2, 15), compare=True)
    assert not ls.mismatches and bm.memory_difference(mc, ls.ref.memory) == (set(), set())


@pytest.mark.parametrize("fault", bm.FAULTS)
def test_faults_are_caught(fault):
    rep = bm.cross_check(SMALL, fault=fault)
    assert not rep.clean and rep.first.startswith("cycle")


def test_determinism():
    a = bm.run_benchmark(SMALL, check=False).results
    b = bm.run_benchmark(SMALL, check=False).results
    assert a == b


def test_summary_and_csv(tmp_path):
    run = bm.run_benchmark(SMALL, check=False)
    m = bm.summarize(run.results)
    assert sum(m.steps_histogram.values()) == m.episodes == 2
    p = tmp_path / "r.csv"
    bm.write_csv(p, [run])
    rows = list(csv.reader(open(p)))
    assert tuple(rows[0]) == bm.CSV_FIELDS and len(rows) == 3
    lines = bm.summary_lines([run], {"seed": 3})
    assert lines[0] == "seed = 3" and any(l.startswith("nav_errors = ") for l in lines)
    single = bm.summarize(run.results[:1])
    assert sum(single.steps_histogram.values()) == 1


def test_duplicate_graphs_are_regenerated():
    # two features on a 2x2 torus admit only three distinct learned graphs
    cfg = bm.BenchConfig(seed=0, n_envs=3, n_features=2, width=2, episode_len=10, visits=2)
    world = bm.build_world(cfg)
    assert len({bm._edge_signature(g) for g in world.graphs}) == 3
    with pytest.raises(RuntimeError):
        bm.build_world(bm.BenchConfig(seed=0, n_envs=4, n_features=2, width=2,
                                      episode_len=10, visits=2))


def test_random_cell_walk_stays_in_lockstep():
    cfg = bm.BenchConfig(seed=0, n_envs=2, n_features=5, width=15, episode_len=2000, walk="cells")
    run = bm.run_benchmark(cfg)
    assert run.lockstep_clean
    assert all(r.oriented for r in run.results)
    with pytest.raises(ValueError):
        bm.BenchConfig(walk="teleport")
