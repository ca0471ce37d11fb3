"""Stability verification for flows, gamma-preflows, and quasiflows.

Stability quantifies over all unsaturated directed paths, but the
domination conditions constrain only a path's first and last edge, so the
check reduces to reachability in the unsaturated-edge adjacency: a witness
exists iff some start-eligible unsaturated edge reaches some end-eligible
unsaturated edge by a directed walk (a single shared edge is allowed, and
closed walks are handled natively).  BFS returns a shortest witness for
deterministic tests.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ModeMismatch, NotAPreflow
from .flow import FlowAssignment, FlowClass, classify, compute_excesses
from .network import Network


class StabilityMode(enum.Enum):
    FLOW = "flow"
    GAMMA_PREFLOW = "gamma"
    BETA_GAMMA_QUASIFLOW = "quasi"


@dataclass(frozen=True)
class StabilityWitness:
    """An unsaturated directed edge sequence dominated at neither end."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]


def _values(flow) -> np.ndarray:
    return flow.values if isinstance(flow, FlowAssignment) else np.asarray(flow)


def _check_mode(net: Network, vals: np.ndarray, excess: np.ndarray,
                mode: StabilityMode, gamma, beta) -> None:
    cls = classify(net, vals)
    internal = net.arrays["is_internal"]
    if mode is StabilityMode.FLOW:
        # preflows admitted: a stable preflow is defined by the same two
        # domination conditions, and preflow completion must verify its input
        if cls not in (FlowClass.FLOW, FlowClass.PREFLOW):
            raise ModeMismatch(f"flow mode needs a preflow or flow, got {cls.value}")
    elif mode is StabilityMode.GAMMA_PREFLOW:
        if cls not in (FlowClass.FLOW, FlowClass.PREFLOW):
            raise ModeMismatch(f"gamma mode needs a preflow, got {cls.value}")
        g = _bound_array(net, gamma, "gamma")
        if np.any(excess[internal] > g[internal]):
            raise ModeMismatch("excess exceeds gamma at some internal vertex")
    elif mode is StabilityMode.BETA_GAMMA_QUASIFLOW:
        if cls is FlowClass.INFEASIBLE:
            raise ModeMismatch("quasiflow mode needs a feasible assignment")
        g = _bound_array(net, gamma, "gamma")
        b = _bound_array(net, beta, "beta")
        if np.any(excess[internal] > g[internal]) or np.any(-excess[internal] > b[internal]):
            raise ModeMismatch("excess outside [-beta, gamma] at some internal vertex")


def _bound_array(net: Network, bound, name: str) -> np.ndarray:
    if bound is None:
        raise ModeMismatch(f"{name} bounds required for this mode")
    arr = np.zeros(net.n, dtype=np.int64)
    if isinstance(bound, dict):
        for v, x in bound.items():
            arr[v] = x
    else:
        arr[:] = np.asarray(bound, dtype=np.int64)
    return arr


def find_witness(
    net: Network,
    flow,
    mode: StabilityMode = StabilityMode.FLOW,
    gamma=None,
    beta=None,
) -> StabilityWitness | None:
    """Return a shortest stability witness, or None iff the assignment is
    stable in the given mode.

    An unsaturated edge e = uv is start-eligible iff u is a source, or some
    edge strictly later than e in u's out-preference carries positive flow,
    or (gamma/quasi modes) u has positive excess.  It is end-eligible iff v
    is a sink, or some strictly later in-edge at v carries positive flow, or
    (quasi mode) v has negative excess.
    """
    vals = _values(flow)
    a = net.arrays
    excess = compute_excesses(net, vals)
    _check_mode(net, vals, excess, mode, gamma, beta)

    m = net.m
    unsat = vals < a["cap"]
    tail, head = a["tail"], a["head"]
    is_source, is_sink, is_internal = a["is_source"], a["is_sink"], a["is_internal"]
    out_off, out_lst = a["out_off"], a["out_lst"]
    in_off, in_lst = a["in_off"], a["in_lst"]

    # later-positive flags per edge, scanned over the preference lists
    later_pos_out = np.zeros(m, dtype=np.bool_)
    later_pos_in = np.zeros(m, dtype=np.bool_)
    for v in range(net.n):
        if not is_internal[v]:
            continue
        seen_pos = False
        for p in range(int(out_off[v + 1]) - 1, int(out_off[v]) - 1, -1):
            e = int(out_lst[p])
            later_pos_out[e] = seen_pos
            if vals[e] > 0:
                seen_pos = True
        seen_pos = False
        for p in range(int(in_off[v + 1]) - 1, int(in_off[v]) - 1, -1):
            e = int(in_lst[p])
            later_pos_in[e] = seen_pos
            if vals[e] > 0:
                seen_pos = True

    extra_start = mode in (StabilityMode.GAMMA_PREFLOW,
                           StabilityMode.BETA_GAMMA_QUASIFLOW)
    extra_end = mode is StabilityMode.BETA_GAMMA_QUASIFLOW

    def start_eligible(e: int) -> bool:
        u = int(tail[e])
        if is_source[u] or later_pos_out[e]:
            return True
        return extra_start and is_internal[u] and excess[u] > 0

    def end_eligible(e: int) -> bool:
        v = int(head[e])
        if is_sink[v] or later_pos_in[e]:
            return True
        return extra_end and is_internal[v] and excess[v] < 0

    # BFS over unsaturated edges; adjacency e1 -> e2 when head(e1) == tail(e2)
    parent = np.full(m, -2, dtype=np.int64)  # -2 unvisited, -1 start edge
    queue: deque[int] = deque()
    for e in range(m):
        if unsat[e] and start_eligible(e):
            parent[e] = -1
            queue.append(e)
    unsat_out: list[list[int]] = [[] for _ in range(net.n)]
    for e in range(m):
        if unsat[e]:
            unsat_out[int(tail[e])].append(e)

    goal = -1
    for e in list(queue):
        if end_eligible(e):
            goal = e
            queue.clear()
            break
    while queue and goal < 0:
        e = queue.popleft()
        for e2 in unsat_out[int(head[e])]:
            if parent[e2] != -2:
                continue
            parent[e2] = e
            if end_eligible(e2):
                goal = e2
                break
            queue.append(e2)
    if goal < 0:
        return None

    edges = []
    e = goal
    while e != -1:
        edges.append(int(e))
        e = int(parent[e])
    edges.reverse()
    vertices = [int(tail[edges[0]])] + [int(head[e]) for e in edges]
    return StabilityWitness(vertices=tuple(vertices), edges=tuple(edges))


def is_stable(net: Network, flow, mode: StabilityMode = StabilityMode.FLOW,
              gamma=None, beta=None) -> bool:
    return find_witness(net, flow, mode, gamma, beta) is None


def is_fully_blocking(net: Network, flow) -> bool:
    """True iff every directed source-to-sink path and every directed path
    from an excess internal vertex to a sink has a saturated edge."""
    vals = _values(flow)
    cls = classify(net, vals)
    if cls not in (FlowClass.PREFLOW, FlowClass.FLOW):
        raise NotAPreflow(f"fully-blocking check needs a preflow, got {cls.value}")
    a = net.arrays
    excess = compute_excesses(net, vals)
    unsat_out: list[list[int]] = [[] for _ in range(net.n)]
    for e in range(net.m):
        if vals[e] < a["cap"][e]:
            unsat_out[int(a["tail"][e])].append(e)

    queue: deque[int] = deque()
    for v in range(net.n):
        if a["is_source"][v] or (a["is_internal"][v] and excess[v] > 0):
            # paths are nontrivial: start vertices expand without being
            # "reached"; only travel through an edge reaches a vertex
            queue.append(v)
    reached = np.zeros(net.n, dtype=np.bool_)
    while queue:
        v = queue.popleft()
        for e in unsat_out[v]:
            w = int(a["head"][e])
            if a["is_sink"][w]:
                return False
            if not reached[w]:
                reached[w] = True
                queue.append(w)
    return True
