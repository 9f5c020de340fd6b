"""``macrocolumn`` command line: run, sweep, verify, teach, trace.

Exit status is 0 on success, 1 when a verification fails, 2 on bad configuration.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import benchmark as bm
from .codec import BundleLayout, CompositeCode, encode_one_hot, decode_one_hot
from .column import ControlInputs, Dimensions, Macrocolumn, TRACE_HEADER, trace_line
from .config import ConfigError, load_config
from .fixtures import PAIR_SYMBOLS, PAIR_WIDTH, beta_drop_inputs, pair_edges_text, pair_memory
from .kernels import BACKEND
from .neural import SdpParams, overlap_backoff_bound, sdp_apply, temporal_spike_time
from .reference import RefMemory, RefModel, Symbols

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="flat 'key = value' config file")
    p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                   help="override one config key (repeatable)")
    p.add_argument("--seed", type=int, action="append",
                   help="benchmark seed (repeatable; replaces the 'seeds' key)")
    p.add_argument("--envs", type=int, help="number of environments (n_envs)")
    p.add_argument("--segments", help="segments per dendrite, or 'auto'")
    p.add_argument("--out", metavar="DIR", help="output directory (out_dir)")


def _load(args):
    over = list(args.set)
    if getattr(args, "seed", None):
        over.append("seeds = " + ",".join(str(s) for s in args.seed))
    if getattr(args, "envs", None) is not None:
        over.append(f"n_envs = {args.envs}")
    if getattr(args, "segments", None) is not None:
        over.append(f"segments = {args.segments}")
    if getattr(args, "out", None) is not None:
        over.append(f"out_dir = {args.out}")
    return load_config(args.config, over)


def _write_summary(path: str, lines: list[str]) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ----------------------------------------------------------------------------- run

def cmd_run(args) -> int:
    cfg = _load(args)
    if args.fixture == "pair":
        return _print_pair_trace(cfg.params())
    os.makedirs(cfg["out_dir"], exist_ok=True)
    runs = []
    for seed in cfg["seeds"]:
        t0 = time.perf_counter()
        run = bm.run_benchmark(cfg.bench(seed), check=cfg["check"])
        runs.append(run)
        agg = bm.summarize(run.results)
        print(f"seed {seed}: segments={run.segments} oriented {agg.oriented}/{agg.episodes} "
              f"median_steps={agg.median_steps} nav_errors={agg.nav_errors} "
              f"lockstep={'clean' if run.lockstep_clean else 'DIVERGED'} "
              f"({time.perf_counter() - t0:.1f}s)")
    bm.write_csv(os.path.join(cfg["out_dir"], "results.csv"), runs)
    echo = {"backend": BACKEND, **cfg.echo()}
    _write_summary(os.path.join(cfg["out_dir"], "summary.txt"), bm.summary_lines(runs, echo))
    if cfg["check"] and not all(r.lockstep_clean for r in runs):
        return EXIT_FAIL
    return EXIT_OK


def _print_pair_trace(params: SdpParams) -> int:
    mc, ls = _taught_pair(params)
    print(TRACE_HEADER)
    ls.trace = lambda step, inp, out: print(
        trace_line(step, ControlInputs.from_ref(inp, mc.dims), out, PAIR_SYMBOLS, PAIR_WIDTH))
    ls.cycle = 0
    ls.compare = True
    for inp in beta_drop_inputs():
        ls.step(inp)
    return EXIT_OK if not ls.mismatches else EXIT_FAIL


def _taught_pair(params: SdpParams, reps: int = 2):
    mem = pair_memory()
    dims = Dimensions(2, 5, PAIR_WIDTH, max(bm.compute_segment_bound(mem)["max"], 1))
    mc = Macrocolumn(dims, params)
    ls = bm.Lockstep(mc, RefModel(2, PAIR_WIDTH))
    bm.teach_edges(ls, list(mem), reps)
    return mc, ls


# ----------------------------------------------------------------------------- sweep

def cmd_sweep(args) -> int:
    cfg = _load(args)
    seg_list = tuple(int(x) for x in args.list.split(",")) if args.list else cfg["sweep_segments"]
    os.makedirs(cfg["out_dir"], exist_ok=True)
    runs = []
    table = []
    for segs in seg_list:
        fr, errs = [], 0
        for seed in cfg["seeds"]:
            run = bm.run_benchmark(cfg.bench(seed), segments=segs, check=False)
            runs.append(run)
            agg = bm.summarize(run.results)
            fr.append(agg.mean_fraction.get(segs, 0.0))
            errs += agg.nav_errors
        table.append((segs, float(np.mean(fr)), min(fr), errs))
    print("segments\tmean_oriented_fraction\tmin_seed_mean\tnav_errors")
    for segs, mean, lo, errs in table:
        print(f"{segs}\t{mean:.4f}\t{lo:.4f}\t{errs}")
    by_s = sorted(table)
    monotone = all(a[1] <= b[1] + 1e-12 for a, b in zip(by_s, by_s[1:]))
    print(f"advisory: oriented fraction {'is' if monotone else 'is NOT'} "
          f"non-decreasing in segment count")
    bm.write_csv(os.path.join(cfg["out_dir"], "sweep.csv"), runs)
    echo = {"backend": BACKEND, **cfg.echo(), "sweep": ",".join(map(str, seg_list))}
    lines = bm.summary_lines(runs, echo) + [f"advisory.monotone = {str(monotone).lower()}"]
    _write_summary(os.path.join(cfg["out_dir"], "sweep_summary.txt"), lines)
    return EXIT_OK


# ----------------------------------------------------------------------------- verify

def _invariant_checks(params: SdpParams, fuzz: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    yield "backoff bound (64, 48, 1) == 3", overlap_backoff_bound(64, 48, 1) == Fraction(3)

    yield "residue code (7,8,9) has 504 distinct codes", \
        len({CompositeCode((7, 8, 9)).encode(v).tobytes() for v in range(504)}) == 504
    yield "residue code (2,3,5) has 30 distinct codes", \
        len({CompositeCode((2, 3, 5)).encode(v).tobytes() for v in range(30)}) == 30

    layout = BundleLayout.state_vector(40, 10, 30)
    ok = True
    for name, w in layout.fields:
        for i in range(1, w + 1):
            ok &= decode_one_hot(encode_one_hot(i, w)) == i
    yield "one-hot round trip at benchmark widths", ok

    mc, _ = _taught_pair(params)
    vals = np.concatenate([c.weights[c.committed.astype(bool)].ravel()
                           for c in mc.pl.columns.values()])
    yield "taught segments are bimodal (0 / w_max)", set(np.unique(vals)) <= {0, params.w_max}

    weights = rng.integers(0, params.w_max + 1, size=(12, 4)).astype(np.uint8)
    ok = True
    for _ in range(fuzz):
        spikes = rng.integers(0, 2, 12).astype(np.uint8)
        fired = np.zeros(4, np.uint8)
        fired[rng.integers(4)] = 1
        weights = sdp_apply(weights, spikes, fired, params)
        ok &= bool(weights.max() <= params.w_max)
    yield f"weights stay in [0, w_max] over {fuzz} updates", ok

    ok = True
    for theta in range(1, 17):
        prev = None
        for matches in range(1, 17):
            fire = temporal_spike_time(matches, theta)
            ok &= prev is None or fire <= prev
            prev = fire
    yield "spike time non-increasing in match count", ok


def cmd_verify(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    failed = False
    for name, ok in _invariant_checks(params, 2_000 if args.quick else 100_000):
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failed |= not ok

    mc, ls = _taught_pair(params)
    if args.fault:
        bm.inject_fault(mc, args.fault)
    ls.compare = True
    ls.cycle = 0
    for inp in beta_drop_inputs():
        ls.step(inp)
    ok = not ls.mismatches
    print(f"{'PASS' if ok else 'FAIL'}  lockstep: hand-built pair, orientation script"
          + ("" if ok else f"; first divergence {ls.mismatches[0].describe()}"))
    failed |= not ok

    scenarios = [("2 envs, 15x15, 5 features", bm.BenchConfig(
        seed=cfg["seeds"][0], n_envs=2, n_features=5, width=15, params=params,
        recall=cfg["recall"]))]
    if not args.quick:
        scenarios.append((f"{cfg['n_envs']} envs, seed {cfg['seeds'][0]}",
                          cfg.bench(cfg["seeds"][0])))
    for name, bc in scenarios:
        rep = bm.cross_check(bc, fault=args.fault, name=name)
        print(f"{'PASS' if rep.clean else 'FAIL'}  lockstep: {name} ({rep.cycles} cycles)"
              + ("" if rep.clean else f"; first divergence {rep.first}"))
        failed |= not rep.clean
    return EXIT_FAIL if failed else EXIT_OK


# ----------------------------------------------------------------------------- teach

def _symbols_for(text: str) -> Symbols:
    envs, feats = [], set()
    for line in text.splitlines():
        parts = line.split("#", 1)[0].split()
        if len(parts) == 5:
            if parts[0] not in envs:
                envs.append(parts[0])
            feats.update((parts[1], parts[4]))
    return Symbols(tuple(envs), tuple(sorted(feats)))


def cmd_teach(args) -> int:
    cfg = _load(args)
    params = cfg.params()
    if args.edges:
        try:
            with open(args.edges) as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        text = pair_edges_text()
    width = args.width or (PAIR_WIDTH if not args.edges else cfg["width"])
    symbols = _symbols_for(text)
    try:
        mem = RefMemory.from_text(text, symbols, width)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not len(mem):
        print("(no edges)")
        return EXIT_OK
    bound = bm.compute_segment_bound(mem)["max"]
    seg = cfg["segments"] or bound
    mc = Macrocolumn(Dimensions(len(symbols.envs), len(symbols.features), width, seg), params)
    bm.teach_edges(bm.Lockstep(mc), list(mem), args.reps)
    print(mc.pl.dump(symbols), end="")
    loose = sum(int(((c.weights[c.committed.astype(bool)] != 0)
                     & (c.weights[c.committed.astype(bool)] != params.w_max)).any(axis=1).sum())
                for c in mc.pl.columns.values())
    if loose:
        print(f"warning: {loose} segment(s) not entrenched "
              f"(weights other than 0 and {params.w_max}); use --reps 2 or more")
    got = mc.pl.decoded_edges()
    if got != set(mem):
        print(f"FAIL: decoded {len(got)} edge(s), expected {len(mem)}")
        return EXIT_FAIL
    print(f"decoded {len(got)} edge(s) identical to input (segments={seg})")
    return EXIT_OK


# ----------------------------------------------------------------------------- trace

def cmd_trace(args) -> int:
    cfg = _load(args)
    if args.env is None:
        return _print_pair_trace(cfg.params())
    bc = cfg.bench(cfg["seeds"][0])
    world = bm.build_world(bc)
    if not 0 <= args.env < bc.n_envs:
        print(f"error: env must be in 0..{bc.n_envs - 1}", file=sys.stderr)
        return EXIT_CONFIG
    symbols = Symbols.default(bc.n_envs, bc.n_features)
    bound = world.segment_bound()["max"]
    mc = bm.make_macrocolumn(bc, bc.segments or bound)
    ls = bm.Lockstep(mc)
    bm.run_exploration(ls, world.envs, world.paths)
    print(TRACE_HEADER)
    ls.cycle = 0
    ls.trace = lambda step, inp, out: print(
        trace_line(step, ControlInputs.from_ref(inp, mc.dims), out, symbols, bc.width))
    env = world.envs[args.env]
    bm.run_orientation_nav(ls, env, world.graphs[args.env],
                           np.random.default_rng(world.agent_seeds[args.env]),
                           bc.episode_len, bc.seed, bc.walk)
    return EXIT_OK


# ----------------------------------------------------------------------------- entry

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="macrocolumn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="explore all environments, then orient and navigate")
    _common(r)
    r.add_argument("--fixture", choices=["pair"],
                   help="instead of the benchmark, replay the hand-built two-environment "
                        "orientation script and print its trace")
    r.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="repeat the benchmark over several segment counts")
    _common(sw)
    sw.add_argument("--list", metavar="S1,S2,...", help="segment counts (default 16,12,8,4)")
    sw.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify", help="oracle lockstep plus invariant checks")
    _common(ver)
    ver.add_argument("--quick", action="store_true", help="skip the full-size lockstep run")
    ver.add_argument("--fault", choices=bm.FAULTS,
                   help="inject a deliberate bug; verification is then expected to fail")
    ver.set_defaults(func=cmd_verify)

    t = sub.add_parser("teach", help="teach an edge list and dump the place cells")
    _common(t)
    t.add_argument("edges", nargs="?", help="edge file 'eId tail dx dy head' (default: "
                                            "built-in two-environment table)")
    t.add_argument("--reps", type=int, default=2, help="presentations per edge (default 2)")
    t.add_argument("--width", type=int, help="grid width (default 30)")
    t.set_defaults(func=cmd_teach)

    tr = sub.add_parser("trace", help="print a per-cycle tab-separated trace")
    _common(tr)
    tr.add_argument("--env", type=int, help="benchmark environment to trace (default: "
                                            "the built-in orientation script)")
    tr.set_defaults(func=cmd_trace)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
