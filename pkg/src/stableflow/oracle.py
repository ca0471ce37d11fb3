"""Definition-level brute force on tiny instances.

Enumerates every integral feasible assignment, filters by the mode's excess
bounds, and decides stability by literally quantifying over directed
unsaturated walks (simple up to one repeated vertex) and evaluating the two
domination conditions on each walk from the preference lists.  This shares
no code path with the BFS verifier and serves as ground truth for it and
for both solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import CrossCheckFailure, InstanceTooLarge
from .flow import FlowAssignment, compute_excesses
from .network import Network
from .stability import StabilityMode

_SEARCH_LIMIT = 3 ** 10  # assignments; matches m <= 10 with capacities <= 2


@dataclass
class StableSet:
    """Deduplicated list of stable assignments found by enumeration."""

    flows: list[FlowAssignment] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.flows)

    def __iter__(self):
        return iter(self.flows)

    def __contains__(self, item) -> bool:
        target = item.as_tuple() if isinstance(item, FlowAssignment) else tuple(item)
        return any(f.as_tuple() == target for f in self.flows)


def _bounds_arrays(net: Network, gamma, beta) -> tuple[np.ndarray, np.ndarray]:
    g = np.zeros(net.n, dtype=np.int64)
    b = np.zeros(net.n, dtype=np.int64)
    for arr, bound in ((g, gamma), (b, beta)):
        if bound is None:
            continue
        if isinstance(bound, dict):
            for v, x in bound.items():
                arr[v] = x
        else:
            arr[:] = np.asarray(bound, dtype=np.int64)
    return g, b


def definition_stable(net: Network, values, mode: StabilityMode = StabilityMode.FLOW,
                      gamma=None, beta=None) -> bool:
    """Direct stability check: enumerate every directed unsaturated walk
    with at most one repeated vertex and test the domination conditions."""
    vals = np.asarray(values, dtype=np.int64)
    a = net.arrays
    excess = compute_excesses(net, vals)
    g, b = _bounds_arrays(net, gamma, beta)

    unsat = [e for e in range(net.m) if vals[e] < a["cap"][e]]
    unsat_out: list[list[int]] = [[] for _ in range(net.n)]
    for e in unsat:
        unsat_out[net.tail(e)].append(e)

    def dominated_at_start(e: int) -> bool:
        # condition: start vertex internal and every strictly later edge in
        # its out-preference list is free; strengthened by mode
        u = net.tail(e)
        if not net.is_internal(u):
            return False
        order = net.out_pref[u]
        pos = order.index(e)
        if any(vals[e2] > 0 for e2 in order[pos + 1:]):
            return False
        if mode is StabilityMode.GAMMA_PREFLOW and excess[u] != 0:
            return False
        if mode is StabilityMode.BETA_GAMMA_QUASIFLOW and excess[u] > 0:
            return False
        return True

    def dominated_at_end(e: int) -> bool:
        v = net.head(e)
        if not net.is_internal(v):
            return False
        order = net.in_pref[v]
        pos = order.index(e)
        if any(vals[e2] > 0 for e2 in order[pos + 1:]):
            return False
        if mode is StabilityMode.BETA_GAMMA_QUASIFLOW and excess[v] < 0:
            return False
        return True

    # DFS over walks; prune once any vertex would be visited a third time or
    # a second vertex would repeat
    visits = np.zeros(net.n, dtype=np.int64)

    def violated_from(first: int) -> bool:
        start_ok = not dominated_at_start(first)

        def extend(last_edge: int, repeated_used: bool) -> bool:
            if start_ok and not dominated_at_end(last_edge):
                return True
            v = net.head(last_edge)
            for e2 in unsat_out[v]:
                w = net.head(e2)
                if visits[w] >= 2 or (visits[w] == 1 and repeated_used):
                    continue
                visits[w] += 1
                if extend(e2, repeated_used or visits[w] == 2):
                    visits[w] -= 1
                    return True
                visits[w] -= 1
            return False

        u, w = net.tail(first), net.head(first)
        visits[u] += 1
        visits[w] += 1
        hit = extend(first, visits[w] == 2)
        visits[u] -= 1
        visits[w] -= 1
        return hit

    return not any(violated_from(e) for e in unsat)


def _mode_feasible(net: Network, excess: np.ndarray, mode: StabilityMode,
                   g: np.ndarray, b: np.ndarray) -> bool:
    internal = net.internal_vertices
    if mode is StabilityMode.FLOW:
        return all(excess[v] == 0 for v in internal)
    if mode is StabilityMode.GAMMA_PREFLOW:
        return all(0 <= excess[v] <= g[v] for v in internal)
    return all(-b[v] <= excess[v] <= g[v] for v in internal)


def enumerate_assignments(net: Network):
    """Yield every integral feasible assignment in lexicographic edge order."""
    caps = [net.capacity(e) for e in range(net.m)]
    space = 1
    for c in caps:
        space *= c + 1
    if space > _SEARCH_LIMIT:
        raise InstanceTooLarge(
            f"search space {space} exceeds {_SEARCH_LIMIT} assignments")
    for combo in product(*(range(c + 1) for c in caps)):
        yield np.asarray(combo, dtype=np.int64)


def enumerate_stable(net: Network, mode: StabilityMode = StabilityMode.FLOW,
                     gamma=None, beta=None) -> StableSet:
    """Exact set of integral stable flows (or gamma-/beta-gamma-stable
    quasiflows) by exhaustive enumeration and the definition-level check."""
    g, b = _bounds_arrays(net, gamma, beta)
    found = StableSet()
    for vals in enumerate_assignments(net):
        excess = compute_excesses(net, vals)
        if not _mode_feasible(net, excess, mode, g, b):
            continue
        if definition_stable(net, vals, mode, gamma, beta):
            found.flows.append(FlowAssignment(vals.copy(), excess))
    return found


@dataclass
class CrossCheckReport:
    stable_count: int
    feasible_flows_checked: int
    basic_in_stable_set: bool
    fast_in_stable_set: bool
    verifier_agreements: int


def cross_check(net: Network) -> CrossCheckReport:
    """Assert, on one oracle-sized instance: both solvers' outputs belong to
    the enumerated stable set; the BFS verifier agrees with the
    definition-level check on every feasible flow; all stable pairs agree on
    terminal-incident edges; and every join/meet is again in the set."""
    from .lattice import join_meet, terminal_agreement
    from .solver_basic import run_basic
    from .solver_fast import run_fast
    from .stability import find_witness

    stable = enumerate_stable(net)
    if len(stable) == 0:
        raise CrossCheckFailure("existence", "no stable flow found by enumeration")

    basic_flow, _ = run_basic(net)
    fast_flow, _ = run_fast(net)
    if basic_flow not in stable:
        raise CrossCheckFailure("basic-in-stable-set", f"{basic_flow.as_tuple()}")
    if fast_flow not in stable:
        raise CrossCheckFailure("fast-in-stable-set", f"{fast_flow.as_tuple()}")

    agreements = 0
    flows_checked = 0
    for vals in enumerate_assignments(net):
        excess = compute_excesses(net, vals)
        if any(excess[v] != 0 for v in net.internal_vertices):
            continue
        flows_checked += 1
        by_def = definition_stable(net, vals)
        by_bfs = find_witness(net, FlowAssignment(vals.copy(), excess)) is None
        if by_def != by_bfs:
            raise CrossCheckFailure(
                "verifier-vs-definition",
                f"assignment {tuple(int(x) for x in vals)}: "
                f"definition says {by_def}, verifier says {by_bfs}")
        agreements += 1

    flows = list(stable)
    for i in range(len(flows)):
        for j in range(i + 1, len(flows)):
            if not terminal_agreement(net, flows[i], flows[j]):
                raise CrossCheckFailure(
                    "terminal-agreement",
                    f"{flows[i].as_tuple()} vs {flows[j].as_tuple()}")
            h, ell = join_meet(net, flows[i], flows[j])
            if h not in stable:
                raise CrossCheckFailure("join-stable", f"{h.as_tuple()}")
            if ell not in stable:
                raise CrossCheckFailure("meet-stable", f"{ell.as_tuple()}")

    return CrossCheckReport(
        stable_count=len(stable),
        feasible_flows_checked=flows_checked,
        basic_in_stable_set=True,
        fast_in_stable_set=True,
        verifier_agreements=agreements,
    )
