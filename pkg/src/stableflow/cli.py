"""Command-line interface.

Exit codes: 0 success, 1 UNSTABLE verify verdict, 2 usage or parse error.
``-`` reads the instance from stdin; results go to stdout, diagnostics to
stderr.  Output is a deterministic function of the inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import CrossCheckFailure, InstanceParseError, StableFlowError
from .flow import FlowAssignment, classify, format_flow, parse_flow, value_of
from .io import parse_allocation, parse_instance, serialize_instance
from .lattice import join_meet
from .network import from_allocation, random_instance
from .oracle import cross_check, enumerate_stable
from .quasiflow import BoundsSpec, reduce_beta_gamma, reduce_gamma, solve_quasiflow_full
from .solver_basic import run_basic
from .solver_fast import run_fast
from .stability import StabilityMode, find_witness

_MODES = {
    "flow": StabilityMode.FLOW,
    "gamma": StabilityMode.GAMMA_PREFLOW,
    "quasi": StabilityMode.BETA_GAMMA_QUASIFLOW,
}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_instance(path: str):
    return parse_instance(_read(path))


def _cmd_solve(args) -> int:
    net, bounds = _load_instance(args.instance)
    if args.gamma or args.quasi:
        mode = StabilityMode.BETA_GAMMA_QUASIFLOW if args.quasi else StabilityMode.GAMMA_PREFLOW
        sol = solve_quasiflow_full(net, bounds, mode)
        flow = sol.flow
        stats = None
        sys.stdout.write(format_flow(net, flow))
        for v in net.internal_vertices:
            sys.stdout.write(f"x {v} {int(flow.excess[v])}\n")
    else:
        runner = run_basic if args.basic else run_fast
        flow, stats = runner(net, trace=args.trace)
        sys.stdout.write(format_flow(net, flow))
        if args.trace and stats.trace is not None:
            for edge, delta, phase in stats.trace:
                sys.stdout.write(f"u {edge} {delta} {phase}\n")
    if args.stats and stats is not None:
        sys.stdout.write(json.dumps(stats.stats_json(), sort_keys=True) + "\n")
    return 0


def _cmd_verify(args) -> int:
    net, bounds = _load_instance(args.instance)
    flow = parse_flow(net, _read(args.flow))
    mode = _MODES[args.mode]
    witness = find_witness(net, flow, mode,
                           gamma=bounds.gamma_array(net.n),
                           beta=bounds.beta_array(net.n))
    if witness is None:
        print("STABLE")
        return 0
    print("UNSTABLE " + " ".join(str(e) for e in witness.edges))
    return 1


def _cmd_oracle(args) -> int:
    net, bounds = _load_instance(args.instance)
    mode = _MODES[args.mode]
    stable = enumerate_stable(net, mode,
                              gamma=bounds.gamma_array(net.n),
                              beta=bounds.beta_array(net.n))
    print(f"stable {len(stable)}")
    for flow in stable:
        print(" ".join(str(int(x)) for x in flow.values))
    return 0


def _cmd_crosscheck(args) -> int:
    lo, hi = (int(x) for x in args.seeds.split(".."))
    seeds = list(range(lo, hi + 1))

    def one(seed: int) -> tuple[int, str]:
        net = random_instance(n=args.n, m=args.m, cap_max=args.cap_max,
                              source_count=1, sink_count=1, seed=seed)
        try:
            report = cross_check(net)
        except CrossCheckFailure as exc:
            return seed, f"FAIL {exc}"
        return seed, f"ok stable={report.stable_count} flows={report.feasible_flows_checked}"

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    failed = 0
    for seed, line in results:
        print(f"seed {seed}: {line}")
        if line.startswith("FAIL"):
            failed += 1
    print(f"crosscheck {len(seeds) - failed}/{len(seeds)} passed")
    return 0 if failed == 0 else 1


def _cmd_gen(args) -> int:
    net = random_instance(n=args.n, m=args.m, cap_max=args.cap_max,
                          source_count=args.sources, sink_count=args.sinks,
                          seed=args.seed)
    text = serialize_instance(net)
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_lattice(args) -> int:
    net, _ = _load_instance(args.instance)
    fa = parse_flow(net, _read(args.flow_a))
    fb = parse_flow(net, _read(args.flow_b))
    h, ell = join_meet(net, fa, fb)
    chosen = h if args.op == "join" else ell
    sys.stdout.write(format_flow(net, chosen))
    return 0


def _cmd_reduce(args) -> int:
    if args.kind == "sa":
        inst = parse_allocation(_read(args.instance))
        net = from_allocation(inst)
        sys.stdout.write(serialize_instance(net))
        return 0
    net, bounds = _load_instance(args.instance)
    if args.kind == "gamma":
        reduced, _ = reduce_gamma(net, bounds.gamma)
    else:
        reduced, _ = reduce_beta_gamma(net, bounds.beta, bounds.gamma)
    sys.stdout.write(serialize_instance(reduced))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stableflow")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute a stable flow / quasiflow")
    p.add_argument("instance")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--basic", action="store_true")
    g.add_argument("--fast", action="store_true", help="default solver")
    g.add_argument("--gamma", action="store_true", help="gamma-preflow mode")
    g.add_argument("--quasi", action="store_true", help="(beta,gamma)-quasiflow mode")
    p.add_argument("--trace", action="store_true",
                   help="emit one line per elementary update (edge, delta, phase)")
    p.add_argument("--stats", action="store_true", help="emit stats JSON")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="verify stability of a flow file")
    p.add_argument("--mode", choices=sorted(_MODES), default="flow")
    p.add_argument("instance")
    p.add_argument("flow")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("oracle", help="enumerate all stable assignments (tiny instances)")
    p.add_argument("--mode", choices=sorted(_MODES), default="flow")
    p.add_argument("instance")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("crosscheck", help="oracle cross-check over seeded instances")
    p.add_argument("--seeds", required=True, metavar="A..B")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--cap-max", type=int, default=2)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_crosscheck)

    p = sub.add_parser("gen", help="generate a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cap-max", type=int, default=10)
    p.add_argument("--sources", type=int, default=1)
    p.add_argument("--sinks", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("lattice", help="join or meet of two stable flows")
    p.add_argument("op", choices=["join", "meet"])
    p.add_argument("instance")
    p.add_argument("flow_a")
    p.add_argument("flow_b")
    p.set_defaults(func=_cmd_lattice)

    p = sub.add_parser("reduce", help="emit a reduced instance")
    p.add_argument("kind", choices=["sa", "gamma", "quasi"])
    p.add_argument("instance")
    p.set_defaults(func=_cmd_reduce)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (InstanceParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except StableFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
