"""Command line front end: ``wcsim run`` for sweeps, ``wcsim oracle`` for
brute-force cross-checks."""

from __future__ import annotations

import argparse
import sys

import numpy as np


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wcsim")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a sweep and write a CSV")
    run.add_argument("--config", help="JSON file with SweepSpec keys")
    run.add_argument("--algorithm", action="append",
                     choices=["randomized", "path", "hierarchical",
                              "qconsensus", "qhierarchical"],
                     help="repeatable; overrides the config's algorithm list")
    run.add_argument("--n", help="comma-separated N values")
    run.add_argument("--trials", type=int)
    run.add_argument("--alpha", type=float)
    run.add_argument("--gamma-db", type=float)
    run.add_argument("--epsilon", type=float)
    run.add_argument("--kappa", type=float)
    run.add_argument("--k-slots", type=int, dest="k_uses")
    run.add_argument("--u", type=float)
    run.add_argument("--phase", choices=["fixed", "uniform"], dest="phase_mode")
    run.add_argument("--radius-c", type=float)
    run.add_argument("--seed", type=int, dest="master_seed")
    run.add_argument("--max-slots", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--no-bandwidth", action="store_true",
                     help="skip per-slot coloring (B_tbp left empty)")
    run.add_argument("--out", help="output CSV path")
    run.add_argument("--quiet", action="store_true")

    oracle = sub.add_parser("oracle", help="cross-check against brute force")
    osub = oracle.add_subparsers(dest="oracle_command", required=True)

    nb = osub.add_parser("neighborhoods",
                         help="node/cluster neighborhoods vs brute force")
    nb.add_argument("--n-nodes", type=int, default=32)
    nb.add_argument("--instances", type=int, default=100)
    nb.add_argument("--seed", type=int, default=0)

    col = osub.add_parser("coloring", help="greedy color count vs exact chi")
    col.add_argument("--vertices", type=int, default=12)
    col.add_argument("--edge-prob", type=float, default=0.4)
    col.add_argument("--instances", type=int, default=20)
    col.add_argument("--seed", type=int, default=0)

    th = osub.add_parser("twohop", help="graph squaring vs BFS oracle")
    th.add_argument("--vertices", type=int, default=20)
    th.add_argument("--edge-prob", type=float, default=0.2)
    th.add_argument("--instances", type=int, default=50)
    th.add_argument("--seed", type=int, default=0)

    conn = osub.add_parser("connectivity",
                           help="gossip-radius connectivity rate over seeds")
    conn.add_argument("--n-nodes", type=int, default=1000)
    conn.add_argument("--seeds", type=int, default=200)
    conn.add_argument("--radius-c", type=float, default=4.0)
    return parser


def _cmd_run(args) -> int:
    from wcsim.harness import SweepSpec, run_sweep

    try:
        spec = SweepSpec.from_file(args.config) if args.config else SweepSpec()
        overrides = {
            "algorithms": tuple(args.algorithm) if args.algorithm else None,
            "n_values": tuple(int(v) for v in args.n.split(",")) if args.n else None,
            "trials": args.trials,
            "alpha": args.alpha,
            "gamma_db": args.gamma_db,
            "epsilon": args.epsilon,
            "kappa": args.kappa,
            "k_uses": args.k_uses,
            "u": args.u,
            "phase_mode": args.phase_mode,
            "radius_c": args.radius_c,
            "master_seed": args.master_seed,
            "max_slots": args.max_slots,
            "workers": args.workers,
            "out": args.out,
        }
        if args.no_bandwidth:
            overrides["track_bandwidth"] = False
        spec = spec.with_overrides(**overrides)
    except (ValueError, TypeError, OSError) as exc:
        print(f"wcsim: invalid sweep spec: {exc}", file=sys.stderr)
        return 2

    progress = None
    if not args.quiet:
        def progress(cfg):
            print(f"done {cfg.algorithm} N={cfg.n_nodes} trial={cfg.trial}",
                  file=sys.stderr)
    try:
        rows = run_sweep(spec, progress=progress)
    except OSError as exc:
        print(f"wcsim: cannot write output: {exc}", file=sys.stderr)
        return 3
    if not args.quiet:
        print(f"wrote {len(rows)} rows to {spec.out}")
    return 0


def _cmd_oracle_neighborhoods(args) -> int:
    from wcsim import channel, oracles
    from wcsim.topology import place_nodes

    rng = np.random.default_rng(args.seed)
    failures = 0
    for i in range(args.instances):
        placement = place_nodes(args.n_nodes, (args.seed, i))
        phase = "fixed" if i % 2 == 0 else "uniform"
        params = channel.ChannelParams(alpha=2 + 2 * rng.random(),
                                       gamma=0.5 + rng.random(),
                                       phase_mode=phase)
        powers = {m: float(p) for m, p in
                  enumerate(rng.random(args.n_nodes) * 10 * params.power_factor)}
        pos = placement.positions
        for n in range(args.n_nodes):
            got = channel.node_neighborhood(params, placement, powers, n)
            want = oracles.brute_node_neighborhood(
                params.alpha, params.G, params.gamma, pos, powers, n)
            if got != want:
                failures += 1
        ids = rng.permutation(args.n_nodes)
        clusters = {c: set(ids[c::4].tolist()) for c in range(4)}
        for n in range(args.n_nodes):
            got = channel.cluster_neighborhood(params, placement, clusters, powers, n)
            want = oracles.brute_cluster_neighborhood(
                params.alpha, params.G, params.gamma, pos, clusters, powers,
                n, phase)
            if got != want:
                failures += 1
    print(f"neighborhoods: {args.instances} instances, "
          f"{'PASS' if failures == 0 else f'FAIL ({failures} mismatches)'}")
    return 0 if failures == 0 else 1


def _cmd_oracle_coloring(args) -> int:
    from wcsim import oracles, spectrum

    rng = np.random.default_rng(args.seed)
    failures = 0
    for _ in range(args.instances):
        adj = oracles.random_graph(args.vertices, args.edge_prob, rng)
        g = spectrum.ConflictGraph(tuple(adj), {v: set(s) for v, s in adj.items()})
        greedy = spectrum.greedy_color(g)
        chi = oracles.exact_chromatic(adj)
        if not chi <= greedy <= g.max_degree() + 1:
            failures += 1
    print(f"coloring: {args.instances} instances, "
          f"{'PASS' if failures == 0 else f'FAIL ({failures})'}")
    return 0 if failures == 0 else 1


def _cmd_oracle_twohop(args) -> int:
    from wcsim import oracles, spectrum

    rng = np.random.default_rng(args.seed)
    failures = 0
    for _ in range(args.instances):
        adj = oracles.random_graph(args.vertices, args.edge_prob, rng)
        g = spectrum.ConflictGraph(tuple(adj), {v: set(s) for v, s in adj.items()})
        g2 = spectrum.two_hop_square(g)
        if g2.adj != oracles.bfs_two_hop(adj):
            failures += 1
    print(f"twohop: {args.instances} instances, "
          f"{'PASS' if failures == 0 else f'FAIL ({failures})'}")
    return 0 if failures == 0 else 1


def _cmd_oracle_connectivity(args) -> int:
    from wcsim.oracles import connected_by_union_find
    from wcsim.topology import gossip_radius, place_nodes

    radius = gossip_radius(args.n_nodes, args.radius_c)
    connected = 0
    for s in range(args.seeds):
        placement = place_nodes(args.n_nodes, s)
        connected += connected_by_union_find(placement.positions.tolist(), radius)
    rate = connected / args.seeds
    print(f"connectivity: {rate:.1%} of {args.seeds} seeds connected "
          f"at r={radius:.4f}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    handler = {
        "neighborhoods": _cmd_oracle_neighborhoods,
        "coloring": _cmd_oracle_coloring,
        "twohop": _cmd_oracle_twohop,
        "connectivity": _cmd_oracle_connectivity,
    }[args.oracle_command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
