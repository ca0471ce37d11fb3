"""Structural operations on stable flows: terminal agreement, difference
decomposition with component typing, join/meet, and preflow completion.

Any two stable flows agree on every terminal-incident edge, so their
difference is a circulation supported away from the terminals; it peels
into weighted proper cycles (forward edges where f exceeds g, backward
where g exceeds f).  Connected components of the difference carry a single
type A/B/L/R, and the join/meet assemble a new stable flow component by
component.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import (
    MixedOrientation,
    ModeMismatch,
    NotACirculation,
    StateReconstructionFailed,
)
from .flow import FlowAssignment, FlowClass, classify, compute_excesses
from .network import Network
from .solver_basic import SolverState, run_basic
from .stability import StabilityMode, find_witness


def terminal_agreement(net: Network, f: FlowAssignment, g: FlowAssignment) -> bool:
    """True iff f and g coincide on every edge incident to a terminal."""
    a = net.arrays
    terminal_edge = (a["is_source"][a["tail"]] | a["is_sink"][a["head"]]
                     | a["is_source"][a["head"]] | a["is_sink"][a["tail"]])
    return bool(np.all(f.values[terminal_edge] == g.values[terminal_edge]))


@dataclass(frozen=True)
class DiffCycle:
    """One peeled proper cycle: forward edges come from A (f > g), backward
    edges from B (g > f)."""

    vertices: tuple[int, ...]  # closed: first == last
    edges: tuple[int, ...]
    forward: tuple[bool, ...]
    delta: int


@dataclass
class DiffDecomposition:
    a_edges: frozenset[int]
    b_edges: frozenset[int]
    weights: dict[int, int]          # omega(e) = |f(e) - g(e)|
    cycles: list[DiffCycle]
    components: list[frozenset[int]]  # edge sets of H's undirected components
    component_of_edge: dict[int, int]

    @property
    def is_empty(self) -> bool:
        return not self.weights


def decompose_difference(net: Network, f: FlowAssignment,
                         g: FlowAssignment) -> DiffDecomposition:
    """Decompose f - g into weighted proper cycles.

    Requires both inputs to be flows agreeing on terminal-incident edges
    (true for stable pairs); otherwise the reoriented difference fails
    conservation and NotACirculation is raised.
    """
    if classify(net, f) is not FlowClass.FLOW or classify(net, g) is not FlowClass.FLOW:
        raise NotACirculation("inputs must both be flows")
    if not terminal_agreement(net, f, g):
        raise NotACirculation("flows disagree on a terminal-incident edge")

    fv, gv = f.values, g.values
    a_edges = frozenset(int(e) for e in np.flatnonzero(fv > gv))
    b_edges = frozenset(int(e) for e in np.flatnonzero(gv > fv))
    weights = {e: int(abs(fv[e] - gv[e])) for e in sorted(a_edges | b_edges)}

    # reorient B-edges; omega must be a circulation
    balance = np.zeros(net.n, dtype=np.int64)
    out_adj: dict[int, list[tuple[int, int, bool]]] = {}
    for e, w in weights.items():
        u, v = net.tail(e), net.head(e)
        if e in b_edges:
            u, v = v, u
        balance[u] -= w
        balance[v] += w
        out_adj.setdefault(u, []).append((e, v, e in a_edges))
    if np.any(balance != 0):
        raise NotACirculation("difference is not conserved at every vertex")

    # peel cycles: lowest-vertex-id start, lowest-edge-id step
    remaining = dict(weights)
    for lst in out_adj.values():
        lst.sort()
    cycles: list[DiffCycle] = []
    while any(w > 0 for w in remaining.values()):
        start = min(u for u, lst in out_adj.items()
                    if any(remaining[e] > 0 for e, _, _ in lst))
        path_v = [start]
        path_e: list[tuple[int, bool]] = []
        seen_at = {start: 0}
        while True:
            u = path_v[-1]
            e, v, fw = next((item for item in out_adj[u] if remaining[item[0]] > 0))
            path_e.append((e, fw))
            path_v.append(v)
            if v in seen_at:
                k = seen_at[v]
                cyc_v = path_v[k:]
                cyc_e = path_e[k:]
                delta = min(remaining[e] for e, _ in cyc_e)
                for e, _ in cyc_e:
                    remaining[e] -= delta
                cycles.append(DiffCycle(
                    vertices=tuple(cyc_v),
                    edges=tuple(e for e, _ in cyc_e),
                    forward=tuple(fw for _, fw in cyc_e),
                    delta=delta,
                ))
                break
            seen_at[v] = len(path_v) - 1

    # undirected connected components of A union B
    comp_of_vertex: dict[int, int] = {}
    components: list[frozenset[int]] = []
    adj: dict[int, list[int]] = {}
    for e in weights:
        u, v = net.tail(e), net.head(e)
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for root in sorted(adj):
        if root in comp_of_vertex:
            continue
        cid = len(components)
        stack = [root]
        comp_of_vertex[root] = cid
        verts = {root}
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in comp_of_vertex:
                    comp_of_vertex[v] = cid
                    verts.add(v)
                    stack.append(v)
        components.append(frozenset(
            e for e in weights
            if net.tail(e) in verts))
    component_of_edge = {e: comp_of_vertex[net.tail(e)] for e in weights}

    return DiffDecomposition(
        a_edges=a_edges,
        b_edges=b_edges,
        weights=weights,
        cycles=cycles,
        components=components,
        component_of_edge=component_of_edge,
    )


def classify_components(net: Network, dec: DiffDecomposition) -> list[str]:
    """Type every difference component: 'A'/'B' when one flow wins
    throughout, else 'L'/'R' from the orientation of special-vertex pairs.

    A vertex on a cycle is special when its in-cycle edge pair mixes A and B
    (equivalently both edges enter it or both leave it); the pair is left
    when the first edge in cycle order is the preferred one.  Mixed evidence
    within a component means the inputs were not both stable and raises
    MixedOrientation.
    """
    types: list[str] = []
    evidence: list[set[str]] = [set() for _ in dec.components]

    for cyc in dec.cycles:
        k = len(cyc.edges)
        cid = dec.component_of_edge[cyc.edges[0]]
        for i in range(k):
            e_in = cyc.edges[i]
            e_out = cyc.edges[(i + 1) % k]
            v = cyc.vertices[i + 1] if i + 1 < len(cyc.vertices) else cyc.vertices[0]
            in_a = (e_in in dec.a_edges, e_out in dec.a_edges)
            if in_a[0] == in_a[1]:
                continue  # not special: both edges from the same flow
            # both enter v or both leave v; compare in the matching order
            if net.head(e_in) == v and net.head(e_out) == v:
                order = net.in_pref[v]
            elif net.tail(e_in) == v and net.tail(e_out) == v:
                order = net.out_pref[v]
            else:
                raise MixedOrientation(
                    f"cycle pair at vertex {v} is not same-sided; state corrupt")
            left = order.index(e_in) < order.index(e_out)
            evidence[cid].add("L" if left else "R")

    # vertex-local orientation per the preference-precedence characterization,
    # for rich components whose peeled cycles are all pure
    for cid, comp in enumerate(dec.components):
        has_a = any(e in dec.a_edges for e in comp)
        has_b = any(e in dec.b_edges for e in comp)
        if not (has_a and has_b) or evidence[cid]:
            continue
        verts = {net.tail(e) for e in comp} | {net.head(e) for e in comp}
        for v in verts:
            if not net.is_internal(v):
                continue
            for order in (net.in_pref[v], net.out_pref[v]):
                local = [e for e in order if e in comp]
                is_in = order is net.in_pref[v]
                for i, e1 in enumerate(local):
                    for e2 in local[i + 1:]:
                        a1, a2 = e1 in dec.a_edges, e2 in dec.a_edges
                        if a1 == a2:
                            continue
                        # L: A precedes B on the in side, B precedes A out
                        if is_in:
                            evidence[cid].add("L" if a1 else "R")
                        else:
                            evidence[cid].add("R" if a1 else "L")

    for cid, comp in enumerate(dec.components):
        has_a = any(e in dec.a_edges for e in comp)
        has_b = any(e in dec.b_edges for e in comp)
        if has_a and not has_b:
            types.append("A")
        elif has_b and not has_a:
            types.append("B")
        else:
            ev = evidence[cid]
            if len(ev) != 1:
                raise MixedOrientation(
                    f"component {cid} carries orientation evidence {sorted(ev)}")
            types.append(ev.pop())
    return types


def join_meet(net: Network, f: FlowAssignment,
              g: FlowAssignment) -> tuple[FlowAssignment, FlowAssignment]:
    """Join and meet of two stable flows: the join h copies f on components
    of type A and R and g on type B and L; the meet takes the opposite;
    elsewhere the flows already coincide."""
    dec = decompose_difference(net, f, g)
    types = classify_components(net, dec)
    h_vals = f.values.copy()
    l_vals = f.values.copy()
    for e in dec.weights:
        cid = dec.component_of_edge[e]
        take_f_for_h = types[cid] in ("A", "R")
        h_vals[e] = f.values[e] if take_f_for_h else g.values[e]
        l_vals[e] = g.values[e] if take_f_for_h else f.values[e]
    h = FlowAssignment.from_values(net, h_vals)
    ell = FlowAssignment.from_values(net, l_vals)
    return h, ell


def dominates(a_vals, b_vals, order: tuple[int, ...]) -> bool:
    """Domination of numeric functions on an ordered set: a dominates b when
    equal, or when some pivot e has a(e) > b(e) with a >= b before it and
    a <= b after it."""
    diffs = [int(a_vals[e]) - int(b_vals[e]) for e in order]
    if all(d == 0 for d in diffs):
        return True
    for i, d in enumerate(diffs):
        if d > 0 and all(x >= 0 for x in diffs[:i]) and all(x <= 0 for x in diffs[i + 1:]):
            return True
    return False


# -- preflow completion -------------------------------------------------------

def _reconstruct_state(net: Network, flow: FlowAssignment) -> SolverState:
    """Rebuild a solver state around an externally supplied stable preflow.

    Unsaturated e = uv is closed iff u is a source or some later out-edge of
    u carries flow; the active pointer is the leftmost unclosed unsaturated
    out-edge; the critical edge is the last positive in-edge.
    """
    st = SolverState(net)
    a = net.arrays
    st.f[:] = flow.values
    st.excess[:] = compute_excesses(net, flow.values)
    cap = a["cap"]
    for v in range(net.n):
        out = [int(e) for e in a["out_lst"][a["out_off"][v]:a["out_off"][v + 1]]]
        seen_pos = False
        for e in reversed(out):
            unsat = st.f[e] < cap[e]
            if unsat and (a["is_source"][v] or seen_pos):
                st.closed[e] = 1
            if st.f[e] > 0:
                seen_pos = True
        st.act[v] = a["out_off"][v]
        if a["is_internal"][v]:
            K._advance_active(v, st.net_tuple, st.state_tuple, st.cnt_tuple)
        ins = [int(e) for e in a["in_lst"][a["in_off"][v]:a["in_off"][v + 1]]]
        crit_pos = -1
        for i, e in enumerate(ins):
            if st.f[e] > 0:
                crit_pos = int(a["in_off"][v]) + i
        if a["is_internal"][v]:
            st.crit[v] = crit_pos
    for e in range(net.m):
        K._refresh(e, st.net_tuple, st.state_tuple, st.cnt_tuple)
    # counters polluted by setup refreshes are irrelevant here; reset them
    st.ctr[K.C_M] = 0
    st.ctr[K.C_PVIOL] = 0
    st.add_cnt[:] = 0
    # queue excess vertices: pushable ones into New, the rest into Excess
    for v in range(net.n):
        if a["is_internal"][v] and st.excess[v] > 0:
            if int(st.act[v]) < int(a["out_off"][v + 1]):
                K._q_push(st.qb_buf, st.qst, 2, st.in_qb, v)
            else:
                K._q_push(st.qa_buf, st.qst, 0, st.in_qa, v)
    return st


def _reconstruction_violations(st: SolverState) -> list[str]:
    """Check (C1) and (C3)(a)/(b) on a reconstructed state."""
    net = st.network
    a = net.arrays
    cap = a["cap"]
    problems = []
    for e in range(net.m):
        if a["is_source"][net.tail(e)] and st.f[e] < cap[e] and not st.closed[e]:
            problems.append(f"C1: unsaturated source edge {e} not closed")
    for v in net.internal_vertices:
        out = [int(x) for x in a["out_lst"][a["out_off"][v]:a["out_off"][v + 1]]]
        p = int(st.act[v]) - int(a["out_off"][v])
        if p < len(out):
            e = out[p]
            if st.closed[e] or st.f[e] >= cap[e]:
                problems.append(f"C3a: active edge {e} of {v} closed or saturated")
            if any(not st.closed[x] and st.f[x] < cap[x] for x in out[:p]):
                problems.append(f"C3a: open unsaturated edge before active at {v}")
            if any(st.f[x] > 0 for x in out[p + 1:]):
                problems.append(f"C3a: positive edge after active at {v}")
        else:
            if any(not st.closed[x] and st.f[x] < cap[x] for x in out):
                problems.append(f"C3b: open unsaturated edge at {v} with empty active")
    return problems


def complete_preflow(net: Network, preflow: FlowAssignment) -> FlowAssignment:
    """Complete a stable preflow to a stable flow without decreasing any
    value on the edges into the sinks (hence without decreasing the value).

    Reconstructs a solver state around the preflow and resumes basic
    iterations; the output is re-verified, and on any reconstruction problem
    the completion falls back to solving from scratch, which is sound
    because all stable flows agree on terminal-incident edges.
    """
    if find_witness(net, preflow, StabilityMode.FLOW) is not None:
        raise ModeMismatch("input preflow is not stable")
    a = net.arrays
    sink_edges = np.flatnonzero(a["is_sink"][a["head"]])

    def acceptable(candidate: FlowAssignment) -> bool:
        if classify(net, candidate) is not FlowClass.FLOW:
            return False
        if find_witness(net, candidate, StabilityMode.FLOW) is not None:
            return False
        return bool(np.all(candidate.values[sink_edges] >= preflow.values[sink_edges]))

    if classify(net, preflow) is FlowClass.FLOW:
        return preflow.copy()

    st = _reconstruct_state(net, preflow)
    problems = _reconstruction_violations(st)
    if not problems:
        K._resume_basic(st.net_tuple, st.state_tuple, st.cnt_tuple, st.queue_tuple)
        st.raise_for_status()
        st.check_excess_cache()
        completed = st.flow
        if acceptable(completed):
            return completed
        problems = ["completed flow failed post-verification"]

    warnings.warn(
        f"preflow completion fell back to a from-scratch solve: {problems[0]}",
        RuntimeWarning, stacklevel=2)
    fallback, _ = run_basic(net)
    if not acceptable(fallback):
        raise StateReconstructionFailed(
            f"reconstruction failed ({problems[0]}) and the from-scratch flow "
            f"did not dominate the preflow on the sink edges")
    return fallback
