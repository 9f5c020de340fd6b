"""Mouse-in-the-dark benchmark: environments, exploration, orientation/navigation, metrics.

Everything is driven through :class:`Lockstep`, which feeds one stream of
:class:`~macrocolumn.reference.RefInputs` to the spiking macrocolumn and, when
present, to the reference model, comparing decoded outputs cycle by cycle.
"""

from __future__ import annotations

import csv
import statistics
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .column import ControlInputs, Dimensions, Macrocolumn, StepOutputs
from .grid import DisplacementCode, displacement_to_signed
from .neural import SdpParams
from .place_cells import DISTAL
from .reference import RefEdge, RefInputs, RefMemory, RefModel, Symbols


# ----------------------------------------------------------------------------- environments

@dataclass(frozen=True)
class Environment:
    id: int
    width: int
    height: int
    placement: tuple[tuple[int, int], ...]  # feature index -> (x, y)

    def __post_init__(self):
        if len(set(self.placement)) != len(self.placement):
            raise ValueError("feature placements must be distinct cells")

    def feature_at(self, cell) -> int | None:
        try:
            return self.placement.index(tuple(cell))
        except ValueError:
            return None

    def torus_delta(self, a: int, b: int) -> tuple[int, int]:
        """Displacement residues from feature ``a`` to feature ``b``."""
        (ax, ay), (bx, by) = self.placement[a], self.placement[b]
        return (bx - ax) % self.width, (by - ay) % self.height


def gen_environments(rng: np.random.Generator, n: int, width: int, n_features: int,
                     height: int | None = None) -> list[Environment]:
    height = width if height is None else height
    if n < 1 or n_features < 1:
        raise ValueError("need at least one environment and one feature")
    if n_features > width * height:
        raise ValueError(f"cannot place {n_features} features on a {width}x{height} grid")
    return [_gen_env(rng, i, width, height, n_features) for i in range(n)]


def _gen_env(rng, i, width, height, n_features) -> Environment:
    cells = rng.choice(width * height, size=n_features, replace=False)
    return Environment(i, width, height, tuple((int(c) % width, int(c) // width) for c in cells))


# ----------------------------------------------------------------------------- exploration

@dataclass(frozen=True)
class PathStep:
    move: tuple[int, int]
    feature: int | None


@dataclass(frozen=True)
class ExplorationPath:
    steps: tuple[PathStep, ...]
    order: tuple[int, ...]  # features in arrival order

    def arrivals(self) -> list[int]:
        return [st.feature for st in self.steps if st.feature is not None and st.move != (0, 0)]


def _signed_move(delta: tuple[int, int], width: int, height: int) -> tuple[int, int]:
    return displacement_to_signed(delta[0], width), displacement_to_signed(delta[1], height)


def path_from_order(env: Environment, order: Sequence[int], start: tuple[int, int],
                    episode_len: int) -> ExplorationPath:
    """Direct torus hops between consecutive features, a pause after every arrival."""
    steps: list[PathStep] = []
    pos = tuple(start)
    for f in order:
        target = env.placement[f]
        delta = ((target[0] - pos[0]) % env.width, (target[1] - pos[1]) % env.height)
        steps.append(PathStep(_signed_move(delta, env.width, env.height), f))
        steps.append(PathStep((0, 0), f))
        pos = target
    if len(steps) > episode_len:
        raise ValueError(f"path needs {len(steps)} steps, episode has {episode_len}")
    steps.extend(PathStep((0, 0), None) for _ in range(episode_len - len(steps)))
    return ExplorationPath(tuple(steps), tuple(order))


def gen_exploration_path(env: Environment, rng: np.random.Generator, visits: int = 4,
                         episode_len: int = 100) -> ExplorationPath:
    n = len(env.placement)
    if visits < 1:
        raise ValueError("visits must be >= 1")
    if 2 * visits * n + 1 > episode_len:
        raise ValueError(f"episode_len {episode_len} too short for {visits} visits to {n} features")
    # one pseudo-random tour, repeated, so every edge is presented `visits` times
    tour = [int(f) for f in rng.permutation(n)]
    order = tour * visits if n > 1 else tour
    empty = [(x, y) for x in range(env.width) for y in range(env.height)
             if (x, y) not in env.placement]
    if empty:
        start = empty[int(rng.integers(len(empty)))]
    else:
        start = env.placement[tour[-1]]
    return path_from_order(env, order, start, episode_len)


def derive_graph(env: Environment, path: ExplorationPath) -> set[RefEdge]:
    edges = set()
    order = path.order
    for a, b in zip(order, order[1:]):
        if a == b:
            continue
        dx, dy = env.torus_delta(a, b)
        edges.add(RefEdge(env.id, a, dx, dy, b))
    return edges


def compute_segment_bound(edges: Iterable[RefEdge]) -> dict[str, int]:
    """Per-minicolumn segment demand: the most distinct contexts any one
    (neuron, head) pair must hold.  Key ``"max"`` is the overall bound."""
    groups: dict[str, dict[tuple, set]] = {k: {} for k in DISTAL if k != "tail"}
    for e in set(edges):
        for col in groups:
            own = getattr(e, "eid" if col == "eId" else col)
            ctx = tuple(getattr(e, "eid" if k == "eId" else k) for k in DISTAL if k != col)
            groups[col].setdefault((own, e.head), set()).add(ctx)
    out = {col: max((len(v) for v in g.values()), default=0) for col, g in groups.items()}
    out["max"] = max(out.values(), default=0)
    return out


# ----------------------------------------------------------------------------- lockstep

@dataclass(frozen=True)
class Mismatch:
    cycle: int
    inputs: RefInputs
    spiking: tuple
    reference: tuple

    def describe(self) -> str:
        return (f"cycle {self.cycle}: spiking {_fmt_dec(self.spiking)} != "
                f"reference {_fmt_dec(self.reference)} (inputs {self.inputs})")


def _fmt_dec(d) -> str:
    eids, dx, dy = d
    return f"(eId_out={sorted(eids)}, i_dx={dx}, i_dy={dy})"


class Lockstep:
    """Drives the macrocolumn and (optionally) the reference model on one input stream."""

    def __init__(self, mc: Macrocolumn, ref: RefModel | None = None, compare: bool = False,
                 trace=None):
        self.mc, self.ref = mc, ref
        self.compare = compare
        self.cycle = 0
        self.mismatches: list[Mismatch] = []
        self.trace = trace

    def step(self, inp: RefInputs) -> StepOutputs:
        self.cycle += 1
        out = self.mc.step(ControlInputs.from_ref(inp, self.mc.dims))
        if self.ref is not None:
            rout = self.ref.step(inp)
            if self.compare:
                mine = out.decoded()
                theirs = (self.ref.state.eid_out, rout.i_dx, rout.i_dy)
                if mine != theirs:
                    self.mismatches.append(Mismatch(self.cycle, inp, mine, theirs))
        if self.trace is not None:
            self.trace(self.cycle, inp, out)
        return out

    def orient_reset(self) -> None:
        self.mc.orient_reset()
        if self.ref is not None:
            self.ref.orient_reset()

    def tail(self) -> int | None:
        hot = np.flatnonzero(self.mc.state.tail)
        return int(hot[0]) if hot.size == 1 else None


def run_exploration(ls: Lockstep, envs: Sequence[Environment],
                    paths: Sequence[ExplorationPath]) -> None:
    for env, path in zip(envs, paths):
        ls.step(RefInputs(orient_init=True))
        eid = frozenset([env.id])
        for st in path.steps:
            ls.step(RefInputs(eid_in=eid, xmove=st.move[0], ymove=st.move[1],
                              feature=st.feature, explore=True))


def teach_edges(ls: Lockstep, edges: Iterable[RefEdge], reps: int = 2,
                width: int | None = None) -> None:
    """Present each edge ``reps`` times as an explore-mode feature/move/feature triple."""
    width = width or ls.mc.dims.width
    for e in edges:
        move = (displacement_to_signed(e.dx, width), displacement_to_signed(e.dy, width))
        for _ in range(reps):
            ls.step(RefInputs(orient_init=True))
            ls.step(RefInputs(eid_in=frozenset([e.eid]), feature=e.tail, explore=True))
            ls.step(RefInputs(eid_in=frozenset([e.eid]), xmove=move[0], ymove=move[1],
                              feature=e.head, explore=True))


# ----------------------------------------------------------------------------- episodes

@dataclass
class EpisodeResult:
    env_id: int
    seed: int
    segments: int
    steps_to_orient: int | None
    oriented_fraction: float | None
    nav_queries: int = 0
    nav_errors: int = 0
    null_queries: int = 0
    reorientations: int = 0

    @property
    def oriented(self) -> bool:
        return self.steps_to_orient is not None


class _Agent:
    def __init__(self, env: Environment, graph: set[RefEdge], rng: np.random.Generator):
        self.env, self.rng = env, rng
        self.succ: dict[int, list[int]] = {}
        for e in sorted(graph):
            self.succ.setdefault(e.tail, []).append(e.head)
        n = len(env.placement)
        empty = [(x, y) for x in range(env.width) for y in range(env.height)
                 if (x, y) not in env.placement]
        self.pos = empty[int(rng.integers(len(empty)))] if empty else env.placement[0]
        self.last_feature: int | None = None
        self.paused = False
        self.n = n

    @property
    def here(self) -> int | None:
        return self.env.feature_at(self.pos)

    def move_to(self, f: int) -> tuple[int, int]:
        tgt = self.env.placement[f]
        delta = ((tgt[0] - self.pos[0]) % self.env.width, (tgt[1] - self.pos[1]) % self.env.height)
        return _signed_move(delta, self.env.width, self.env.height)

    def apply(self, move: tuple[int, int]) -> int | None:
        self.pos = ((self.pos[0] + move[0]) % self.env.width,
                    (self.pos[1] + move[1]) % self.env.height)
        f = self.here
        if f is not None:
            self.last_feature = f
        return f

    def random_cell_hop(self) -> tuple[int, int]:
        cell = (int(self.rng.integers(self.env.width)), int(self.rng.integers(self.env.height)))
        delta = ((cell[0] - self.pos[0]) % self.env.width, (cell[1] - self.pos[1]) % self.env.height)
        return _signed_move(delta, self.env.width, self.env.height)

    def wander_hop(self) -> tuple[int, int]:
        """Move along a learned edge from the current feature (or to a random feature)."""
        here = self.here
        if here is not None and self.succ.get(here):
            nxt = self.succ[here][int(self.rng.integers(len(self.succ[here])))]
        else:
            nxt = int(self.rng.integers(self.n))
        return self.move_to(nxt)


WALKS = ("edges", "cells")


def run_orientation_nav(ls: Lockstep, env: Environment, graph: set[RefEdge],
                        rng: np.random.Generator, steps: int = 100, seed: int = 0,
                        walk: str = "edges") -> EpisodeResult:
    """One orientation + navigation episode of ``steps`` cycles after the orient-init cycle.

    Orientation: hop to a random feature, pause on arrival, then follow
    learned edges until ``eId_out`` is a single environment.  Navigation:
    query targets in random order; a returned displacement becomes the next
    move, and landing anywhere but the target is a navigation error that
    resets orientation.

    With ``walk="cells"`` the unoriented agent instead jumps to uniformly
    random cells, features or not, pausing whenever it lands on a feature.
    """
    if walk not in WALKS:
        raise ValueError(f"walk must be one of {WALKS}")
    agent = _Agent(env, graph, rng)
    true_env = frozenset([env.id])
    ls.step(RefInputs(orient_init=True))
    res = EpisodeResult(env.id, seed, ls.mc.dims.segments, None, None)
    oriented = False
    good = total = 0
    targets: list[int] = []
    pending: tuple[tuple[int, int], int] | None = None
    wander = False

    def hop(move):
        before = agent.here
        f = agent.apply(move)
        agent.paused = move == (0, 0) and f is not None and before == f
        return ls.step(RefInputs(xmove=move[0], ymove=move[1], feature=f)), f

    for t in range(1, steps + 1):
        counted = res.steps_to_orient is not None
        if not oriented:
            if walk == "cells" and not (agent.here is not None and not agent.paused):
                out, _ = hop(agent.random_cell_hop())
            elif agent.here is None:
                out, _ = hop(agent.move_to(int(rng.integers(agent.n))))
            elif not agent.paused:
                out, _ = hop((0, 0))
            else:
                out, _ = hop(agent.wander_hop())
            if len(out.decoded()[0]) == 1:
                oriented, targets, pending, wander = True, [], None, False
                if res.steps_to_orient is None:
                    res.steps_to_orient = t
        elif pending is not None:
            move, target = pending
            pending = None
            out, f = hop(move)
            targets = []
            if f != target:
                res.nav_errors += 1
                res.reorientations += 1
                ls.orient_reset()
                oriented, agent.paused = False, False
        elif agent.here is None:
            out, _ = hop(agent.move_to(int(rng.integers(agent.n))))
            targets = []
        elif wander:
            wander = False
            out, _ = hop(agent.wander_hop())
            targets = []
        else:
            if not targets:
                targets = [int(x) for x in rng.permutation(agent.n) if x != agent.here]
            target = targets.pop(0)
            out = ls.step(RefInputs(feature=agent.here, target=target, query=True))
            _, dx, dy = out.decoded()
            if dx is not None and dy is not None:
                res.nav_queries += 1
                pending = (_signed_move((dx, dy), env.width, env.height), target)
            else:
                res.null_queries += 1
                wander = not targets
        if counted:
            total += 1
            if out.decoded()[0] == true_env and ls.tail() == agent.last_feature:
                good += 1

    if res.steps_to_orient is not None:
        res.oriented_fraction = good / total if total else 1.0
    return res


# ----------------------------------------------------------------------------- full pipeline

@dataclass(frozen=True)
class BenchConfig:
    seed: int = 0
    n_envs: int = 40
    n_features: int = 10
    width: int = 30
    episode_len: int = 100
    visits: int = 4
    segments: int | None = None  # None = computed bound
    params: SdpParams = field(default_factory=SdpParams)
    composite: tuple[int, ...] | None = None
    recall: str = "exact"
    learn_partial: bool = False
    walk: str = "edges"

    def __post_init__(self):
        for k in ("n_envs", "n_features", "width", "episode_len", "visits"):
            if getattr(self, k) < 1:
                raise ValueError(f"{k} must be >= 1")
        if self.segments is not None and self.segments < 1:
            raise ValueError("segments must be >= 1")
        if self.walk not in WALKS:
            raise ValueError(f"walk must be one of {WALKS}")


@dataclass
class World:
    """Environments, exploration paths and ground-truth graphs for one seed."""

    config: BenchConfig
    envs: list[Environment]
    paths: list[ExplorationPath]
    graphs: list[set[RefEdge]]
    agent_seeds: list[np.random.SeedSequence]

    @property
    def all_edges(self) -> set[RefEdge]:
        return set().union(*self.graphs) if self.graphs else set()

    def segment_bound(self) -> dict[str, int]:
        return compute_segment_bound(self.all_edges)


def _edge_signature(graph: set[RefEdge]) -> frozenset:
    return frozenset(e._replace(eid=0) for e in graph)


def build_world(cfg: BenchConfig) -> World:
    """Generate environments and paths from independent seed streams.

    An environment whose learned graph duplicates an earlier one is
    regenerated, so orientation can always single out the true environment.
    """
    env_ss, path_ss, agent_ss = np.random.SeedSequence(cfg.seed).spawn(3)
    env_rng = np.random.default_rng(env_ss)
    path_rngs = [np.random.default_rng(s) for s in path_ss.spawn(cfg.n_envs)]
    envs, paths, graphs, seen = [], [], [], set()
    for i in range(cfg.n_envs):
        for _attempt in range(100):
            env = _gen_env(env_rng, i, cfg.width, cfg.width, cfg.n_features) \
                if cfg.n_features <= cfg.width * cfg.width else None
            if env is None:
                raise ValueError("too many features for the grid")
            path = gen_exploration_path(env, path_rngs[i], cfg.visits, cfg.episode_len)
            g = derive_graph(env, path)
            sig = _edge_signature(g)
            if sig not in seen or cfg.n_envs == 1:
                break
        else:
            raise RuntimeError("could not generate distinguishable environments")
        seen.add(sig)
        envs.append(env)
        paths.append(path)
        graphs.append(g)
    return World(cfg, envs, paths, graphs, agent_ss.spawn(cfg.n_envs))


def make_macrocolumn(cfg: BenchConfig, segments: int) -> Macrocolumn:
    from .codec import CompositeCode

    code = DisplacementCode(cfg.width, CompositeCode(cfg.composite) if cfg.composite else None)
    return Macrocolumn(Dimensions(cfg.n_envs, cfg.n_features, cfg.width, segments), cfg.params,
                       code, cfg.recall, cfg.learn_partial)


@dataclass
class RunResult:
    config: BenchConfig
    segments: int
    bound: dict[str, int]
    results: list[EpisodeResult]
    mismatches: list[Mismatch]
    memory_diff: tuple[set, set] = (set(), set())
    stored_edges: int = 0
    ref_edges: int = 0
    cycles: int = 0

    @property
    def lockstep_clean(self) -> bool:
        return not self.mismatches and not self.memory_diff[0] and not self.memory_diff[1]


def run_benchmark(cfg: BenchConfig, world: World | None = None, segments: int | None = None,
                  check: bool = True, fault: str | None = None, trace=None) -> RunResult:
    """Explore every environment, then one orientation/navigation episode each.

    With ``check`` the reference model runs alongside and every cycle, in
    both phases, must produce identical decoded outputs.  After exploration
    the decoded place-cell edges must also equal its memory.
    """
    world = world or build_world(cfg)
    bound = world.segment_bound()
    n_seg = segments or cfg.segments or max(bound["max"], 1)
    mc = make_macrocolumn(cfg, n_seg)
    ref = RefModel(cfg.n_envs, cfg.width) if check else None
    ls = Lockstep(mc, ref, compare=check, trace=trace)
    run_exploration(ls, world.envs, world.paths)

    if fault:
        inject_fault(mc, fault)
    diff = (set(), set())
    stored = len(mc.pl.decoded_edges())
    if ref is not None:
        diff = memory_difference(mc, ref.memory)

    results = []
    for env, graph, ss in zip(world.envs, world.graphs, world.agent_seeds):
        rng = np.random.default_rng(ss)
        results.append(run_orientation_nav(ls, env, graph, rng, cfg.episode_len, cfg.seed,
                                           cfg.walk))
    return RunResult(cfg, n_seg, bound, results, ls.mismatches, diff, stored,
                     len(ref.memory) if ref is not None else 0, ls.cycle)


def memory_difference(mc: Macrocolumn, mem: RefMemory) -> tuple[set, set]:
    """Edges only in the place cells / only in the reference memory, for every minicolumn."""
    ref_edges = set(mem)
    extra, missing = set(), set()
    for name in mc.pl.columns:
        got = mc.pl.decoded_edges(name)
        extra |= got - ref_edges
        missing |= ref_edges - got
    return extra, missing


@dataclass
class CrossCheckReport:
    scenario: str
    cycles: int
    first: str | None

    @property
    def clean(self) -> bool:
        return self.first is None


def cross_check(cfg: BenchConfig, fault: str | None = None, name: str = "") -> CrossCheckReport:
    """Run the oracle alongside the spiking model and report the first divergence."""
    run = run_benchmark(cfg, check=True, fault=fault)
    first = None
    extra, missing = run.memory_diff
    if run.mismatches:
        first = run.mismatches[0].describe()
    elif extra or missing:
        first = (f"after exploration: {len(extra)} edge(s) only in place cells, "
                 f"{len(missing)} only in reference memory")
    return CrossCheckReport(name or f"seed {cfg.seed}", run.cycles, first)


FAULTS = ("weight", "tie")


def inject_fault(mc: Macrocolumn, kind: str) -> None:
    """Deliberately break the spiking model (used to prove the oracle catches it).

    ``weight`` drops one captured synapse of the first committed dx segment;
    ``tie`` reverses the 1-WTA tie rule in the displacement minicolumns.
    """
    if kind == "weight":
        col = mc.pl.columns["dx"]
        hits = np.argwhere(col.committed)
        if hits.size == 0:
            return
        f, i, j = hits[0]
        seg = col.weights[f, i, j]
        seg[int(np.argmax(seg[1:])) + 1] = 0
    elif kind == "tie":
        for name in ("dx", "dy"):
            mc.pl.columns[name].tie_break = "highest"
    else:
        raise ValueError(f"unknown fault {kind!r}; choose from {FAULTS}")


# ----------------------------------------------------------------------------- metrics

@dataclass
class Metrics:
    episodes: int
    oriented: int
    steps_histogram: dict[int, int]
    median_steps: float | None
    max_steps: int | None
    mean_fraction: dict[int, float]
    min_fraction: dict[int, float]
    nav_queries: int
    nav_errors: int


def summarize(results: Sequence[EpisodeResult]) -> Metrics:
    steps = [r.steps_to_orient for r in results if r.steps_to_orient is not None]
    by_s: dict[int, list[float]] = {}
    for r in results:
        if r.oriented_fraction is not None:
            by_s.setdefault(r.segments, []).append(r.oriented_fraction)
    return Metrics(
        episodes=len(results),
        oriented=len(steps),
        steps_histogram=dict(sorted(Counter(steps).items())),
        median_steps=statistics.median(steps) if steps else None,
        max_steps=max(steps) if steps else None,
        mean_fraction={k: statistics.fmean(fr) for k, fr in sorted(by_s.items())},
        min_fraction={k: min(fr) for k, fr in sorted(by_s.items())},
        nav_queries=sum(r.nav_queries for r in results),
        nav_errors=sum(r.nav_errors for r in results),
    )


CSV_FIELDS = ("phase", "env_id", "seed", "segments", "steps_to_orient", "oriented_fraction",
              "nav_queries", "nav_errors")


def write_csv(path, runs: Iterable[RunResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for run in runs:
            for r in run.results:
                w.writerow(["navigate", r.env_id, r.seed, r.segments,
                            "" if r.steps_to_orient is None else r.steps_to_orient,
                            "" if r.oriented_fraction is None else f"{r.oriented_fraction:.6f}",
                            r.nav_queries, r.nav_errors])


def summary_lines(runs: Sequence[RunResult], echo: dict[str, object]) -> list[str]:
    """``key = value`` lines: parameter echo, then per-segment-count aggregates."""
    lines = [f"{k} = {v}" for k, v in echo.items()]
    all_results = [r for run in runs for r in run.results]
    agg = summarize(all_results)
    for run in runs:
        tag = f"seed{run.config.seed}"
        lines.append(f"segment_bound.{tag} = {run.bound['max']}")
        for col in ("dx", "dy", "eId"):
            lines.append(f"segment_bound.{tag}.{col} = {run.bound[col]}")
        lines.append(f"segments_used.{tag} = {run.segments}")
    lines += [
        f"episodes = {agg.episodes}",
        f"oriented_episodes = {agg.oriented}",
        f"median_steps_to_orient = {agg.median_steps}",
        f"max_steps_to_orient = {agg.max_steps}",
        f"nav_queries = {agg.nav_queries}",
        f"nav_errors = {agg.nav_errors}",
        f"lockstep_mismatches = {sum(len(r.mismatches) for r in runs)}",
    ]
    for k, v in agg.steps_histogram.items():
        lines.append(f"steps_histogram.{k} = {v}")
    for segs, mean in agg.mean_fraction.items():
        lines.append(f"oriented_fraction.mean.s{segs} = {mean:.6f}")
        lines.append(f"oriented_fraction.min.s{segs} = {agg.min_fraction[segs]:.6f}")
    return lines
