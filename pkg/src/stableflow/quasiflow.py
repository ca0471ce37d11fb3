"""Gamma-preflow and (beta, gamma)-quasiflow problems via network reductions.

A stable gamma-preflow (excesses in [0, gamma(v)]) reduces to a stable flow
in the network extended, per internal vertex with positive gamma, by an
edge to a fresh auxiliary sink appended as least preferred.  The
(beta, gamma)-quasiflow problem (excesses in [-beta(v), gamma(v)]) splits
every internal vertex v into v' (inherits the in-edges) and v'' (inherits
the out-edges) joined by a non-binding edge, adds v' -> t* with capacity
gamma(v) and s* -> v'' with capacity beta(v), both less preferred than the
split edge, and pulls the stable flow of the reduced network back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .flow import FlowAssignment
from .network import Network, build_network
from .solver_fast import run_fast
from .stability import StabilityMode


@dataclass(frozen=True)
class BoundsSpec:
    """Per-internal-vertex excess bounds; absent vertices default to 0."""

    gamma: dict[int, int] = field(default_factory=dict)
    beta: dict[int, int] = field(default_factory=dict)

    def validate(self, net: Network) -> None:
        for name, bound in (("gamma", self.gamma), ("beta", self.beta)):
            for v, x in bound.items():
                if not net.is_internal(v):
                    raise ValueError(f"{name} bound on non-internal vertex {v}")
                if x < 0:
                    raise ValueError(f"{name}({v}) = {x} is negative")

    def gamma_array(self, n: int) -> np.ndarray:
        arr = np.zeros(n, dtype=np.int64)
        for v, x in self.gamma.items():
            arr[v] = x
        return arr

    def beta_array(self, n: int) -> np.ndarray:
        arr = np.zeros(n, dtype=np.int64)
        for v, x in self.beta.items():
            arr[v] = x
        return arr


@dataclass(frozen=True)
class ReductionMapping:
    """Correspondence between an original network and its reduction.

    Original edge ids are preserved (the reduction appends auxiliaries), so
    the edge map is the identity on 0..m-1.
    """

    n_original_edges: int
    vertex_in: dict[int, int]      # original v -> vertex inheriting delta_in(v)
    vertex_out: dict[int, int]     # original v -> vertex inheriting delta_out(v)
    split_edge: dict[int, int]     # internal v -> v'v'' edge id (beta-gamma only)
    gamma_edge: dict[int, int]     # internal v -> v'->t* edge id
    beta_edge: dict[int, int]      # internal v -> s*->v'' edge id
    aux_sink: int | None
    aux_source: int | None

    def pull_back(self, net: Network, reduced_flow: FlowAssignment) -> FlowAssignment:
        values = reduced_flow.values[:self.n_original_edges]
        return FlowAssignment.from_values(net, values)


def reduce_gamma(net: Network, gamma: dict[int, int]) -> tuple[Network, ReductionMapping]:
    """Extend the network for the gamma-preflow problem.

    Adds, per internal v with gamma(v) > 0, the edge v -> t* with capacity
    gamma(v) at the end of v's out-preference order; zero bounds add
    nothing.  When every bound is zero the network is returned unchanged.
    """
    BoundsSpec(gamma=dict(gamma)).validate(net)
    identity = {v: v for v in range(net.n)}
    positive = {v: g for v, g in sorted(gamma.items()) if g > 0}
    if not positive:
        return net, ReductionMapping(
            n_original_edges=net.m, vertex_in=identity, vertex_out=identity,
            split_edge={}, gamma_edge={}, beta_edge={},
            aux_sink=None, aux_source=None)

    t_star = net.n
    edges = list(net.edges)
    gamma_edge = {}
    out_pref = {v: list(net.out_pref[v]) for v in net.internal_vertices}
    in_pref = {v: list(net.in_pref[v]) for v in net.internal_vertices}
    for v, g in positive.items():
        gamma_edge[v] = len(edges)
        edges.append((v, t_star, int(g)))
        out_pref[v].append(gamma_edge[v])

    reduced = build_network(
        n=net.n + 1,
        edges=edges,
        sources=net.sources,
        sinks=set(net.sinks) | {t_star},
        in_pref=in_pref,
        out_pref=out_pref,
    )
    return reduced, ReductionMapping(
        n_original_edges=net.m, vertex_in=identity, vertex_out=identity,
        split_edge={}, gamma_edge=gamma_edge, beta_edge={},
        aux_sink=t_star, aux_source=None)


def reduce_beta_gamma(net: Network, beta: dict[int, int],
                      gamma: dict[int, int]) -> tuple[Network, ReductionMapping]:
    """Split-vertex reduction for the (beta, gamma)-quasiflow problem.

    The split edge v'v'' gets capacity sum of in-capacities plus beta(v),
    which no solution can exceed; the auxiliary edges sit after it in the
    preference orders, and zero bounds are omitted entirely.
    """
    bounds = BoundsSpec(gamma=dict(gamma), beta=dict(beta))
    bounds.validate(net)

    internal = net.internal_vertices
    vertex_in = {v: v for v in range(net.n)}      # v' keeps the original id
    vertex_out = dict(vertex_in)
    next_id = net.n
    for v in internal:
        vertex_out[v] = next_id                   # v'' gets a fresh id
        next_id += 1
    need_source = any(beta.get(v, 0) > 0 for v in internal)
    need_sink = any(gamma.get(v, 0) > 0 for v in internal)
    s_star = next_id if need_source else None
    next_id += 1 if need_source else 0
    t_star = next_id if need_sink else None
    next_id += 1 if need_sink else 0

    edges = [(vertex_out[u], vertex_in[w], c) for (u, w, c) in net.edges]
    split_edge = {}
    gamma_edge = {}
    beta_edge = {}
    in_sum = {v: 0 for v in internal}
    for (u, w, c) in net.edges:
        if w in in_sum:
            in_sum[w] += c
    for v in internal:
        split_edge[v] = len(edges)
        edges.append((vertex_in[v], vertex_out[v], in_sum[v] + int(beta.get(v, 0))))
    for v in internal:
        if gamma.get(v, 0) > 0:
            gamma_edge[v] = len(edges)
            edges.append((vertex_in[v], t_star, int(gamma[v])))
    for v in internal:
        if beta.get(v, 0) > 0:
            beta_edge[v] = len(edges)
            edges.append((s_star, vertex_out[v], int(beta[v])))

    in_pref = {}
    out_pref = {}
    for v in internal:
        in_pref[vertex_in[v]] = list(net.in_pref[v])
        out_pref[vertex_in[v]] = [split_edge[v]] + (
            [gamma_edge[v]] if v in gamma_edge else [])
        in_pref[vertex_out[v]] = [split_edge[v]] + (
            [beta_edge[v]] if v in beta_edge else [])
        out_pref[vertex_out[v]] = list(net.out_pref[v])

    reduced = build_network(
        n=next_id,
        edges=edges,
        sources=set(net.sources) | ({s_star} if s_star is not None else set()),
        sinks=set(net.sinks) | ({t_star} if t_star is not None else set()),
        in_pref=in_pref,
        out_pref=out_pref,
    )
    return reduced, ReductionMapping(
        n_original_edges=net.m, vertex_in=vertex_in, vertex_out=vertex_out,
        split_edge=split_edge, gamma_edge=gamma_edge, beta_edge=beta_edge,
        aux_sink=t_star, aux_source=s_star)


@dataclass
class QuasiflowSolution:
    flow: FlowAssignment          # on the original network
    reduced_network: Network
    reduced_flow: FlowAssignment
    mapping: ReductionMapping


def solve_quasiflow_full(net: Network, bounds: BoundsSpec,
                         mode: StabilityMode) -> QuasiflowSolution:
    """Solve via the reduction and keep the reduced artifacts for inspection."""
    bounds.validate(net)
    if mode is StabilityMode.GAMMA_PREFLOW:
        reduced, mapping = reduce_gamma(net, bounds.gamma)
    elif mode is StabilityMode.BETA_GAMMA_QUASIFLOW:
        reduced, mapping = reduce_beta_gamma(net, bounds.beta, bounds.gamma)
    else:
        raise ValueError(f"unsupported quasiflow mode {mode}")
    reduced_flow, _ = run_fast(reduced)
    flow = mapping.pull_back(net, reduced_flow)
    return QuasiflowSolution(flow=flow, reduced_network=reduced,
                             reduced_flow=reduced_flow, mapping=mapping)


def solve_quasiflow(net: Network, beta=None, gamma=None,
                    mode: StabilityMode = StabilityMode.GAMMA_PREFLOW) -> FlowAssignment:
    """Solve the gamma-preflow or (beta, gamma)-quasiflow problem on ``net``;
    the returned assignment satisfies the excess bounds and is stable in the
    requested mode."""
    bounds = BoundsSpec(gamma=dict(gamma or {}), beta=dict(beta or {}))
    return solve_quasiflow_full(net, bounds, mode).flow
