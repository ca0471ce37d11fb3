"""Fast stable-flow solver with O(n) flow updates per big iteration.

Work is organized into big iterations over the auxiliary graph
Gamma = (V; E+, E-) of middle plus free-active edges, partitioned into
active (E+) and critical (E-) members.  Within a big iteration the solver
walks proper paths (active edges forward, critical edges backward), moving
each excess packet one edge per step; a walk that revisits one of its own
vertices cancels the proper cycle with a single aggregated shift, a walk
that reaches a terminal or an existing tree freezes into the forest, and
once every packet is frozen the forest is drained toward the terminals in
topological order.  Any saturation, freeing, or Gamma change ends the big
iteration.  Total running time is O(nm).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from ._state import KernelState, RunStats
from .errors import DegenerateCycle, PartitionViolation, SolverError
from .flow import FlowAssignment
from .network import Network


class BigIterationOutcome(enum.Enum):
    SOLVED = "Solved"
    CYCLE_CANCELLED = "CycleCancelled"
    TREES_DRAINED = "TreesDrained"
    EVENT_SFM = "EventSFM"


_OUTCOME_BY_CODE = {
    K.OUT_SOLVED: BigIterationOutcome.SOLVED,
    K.OUT_CYCLE: BigIterationOutcome.CYCLE_CANCELLED,
    K.OUT_DRAINED: BigIterationOutcome.TREES_DRAINED,
    K.OUT_EVENT: BigIterationOutcome.EVENT_SFM,
}


@dataclass(frozen=True)
class GammaGraph:
    """Snapshot of Gamma: active members E+ and critical members E-."""

    e_plus: frozenset[int]
    e_minus: frozenset[int]

    @property
    def edges(self) -> frozenset[int]:
        return self.e_plus | self.e_minus


@dataclass(frozen=True)
class ProperWalk:
    """Alternating vertex/edge sequence; active edges are traversed forward
    and critical edges backward.  ``forward[i]`` is True when ``edges[i]``
    is traversed tail-to-head (an active edge)."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    forward: tuple[bool, ...]

    def is_cycle(self) -> bool:
        return len(self.vertices) >= 2 and self.vertices[0] == self.vertices[-1]


@dataclass
class TreeForest:
    """Proper trees rooted at sources / anti-rooted at sinks, stored as
    parent links.  ``parent_is_push[v]`` tells whether the parent edge is
    traversed as a push (active, increases toward the parent) or a balance
    (critical, decreases)."""

    parent_vertex: dict[int, int]
    parent_edge: dict[int, int]
    parent_is_push: dict[int, bool]

    def install(self, st: "FastState") -> None:
        st.in_tree[:] = 0
        st.par_v[:] = -1
        st.par_e[:] = -1
        st.par_push[:] = 0
        for v, p in self.parent_vertex.items():
            st.in_tree[v] = 1
            st.par_v[v] = p
            st.par_e[v] = self.parent_edge[v]
            st.par_push[v] = 1 if self.parent_is_push[v] else 0


class FastState(KernelState):
    """White-box fast-solver state."""

    def forest(self) -> TreeForest:
        treed = np.flatnonzero(self.in_tree == 1)
        return TreeForest(
            parent_vertex={int(v): int(self.par_v[v]) for v in treed},
            parent_edge={int(v): int(self.par_e[v]) for v in treed},
            parent_is_push={int(v): bool(self.par_push[v]) for v in treed},
        )


def start_fast(net: Network, trace: bool = False) -> FastState:
    """Run the initial iteration and return a fast-solver state whose pool
    holds the excess vertices."""
    st = FastState(net, trace=trace)
    K._init_iteration(st.net_tuple, st.state_tuple, st.cnt_tuple, st.queue_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    return st


def build_gamma(st: KernelState) -> GammaGraph:
    """Derive Gamma from the state and cross-check the tracked labels.

    Raises :class:`PartitionViolation` when an edge is simultaneously active
    and critical, when a middle edge is neither, or when the tracked labels
    disagree with the derivation.
    """
    net = st.network
    a = net.arrays
    e_plus = set()
    e_minus = set()
    for v in range(net.n):
        if not a["is_internal"][v]:
            continue
        ea = st.active_edge(v)
        ec = st.critical_edge(v)
        if ea is not None and ea == ec:
            raise PartitionViolation(f"edge {ea} is both active and critical")
        if ea is not None and st.f[ea] < net.capacity(ea):
            e_plus.add(ea)
        if ec is not None and 0 < st.f[ec] < net.capacity(ec):
            e_minus.add(ec)
    if e_plus & e_minus:
        raise PartitionViolation(f"edges {sorted(e_plus & e_minus)} in both E+ and E-")
    for e in range(net.m):
        if 0 < st.f[e] < net.capacity(e) and e not in e_plus and e not in e_minus:
            raise PartitionViolation(f"middle edge {e} is neither active nor critical")
        want = 1 if e in e_plus else (2 if e in e_minus else 0)
        if int(st.label[e]) != want:
            raise PartitionViolation(
                f"edge {e}: tracked label {int(st.label[e])} != derived {want}")
    return GammaGraph(e_plus=frozenset(e_plus), e_minus=frozenset(e_minus))


def advance_big_iteration(st: FastState) -> BigIterationOutcome:
    """Run one big iteration on the state; see the module docstring."""
    code = K._big_iteration(st.net_tuple, st.state_tuple, st.cnt_tuple,
                            st.queue_tuple, st.forest_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    return _OUTCOME_BY_CODE[int(code)]


def cancel_cycle(st: KernelState, cycle: ProperWalk) -> int:
    """Cancel a simple proper cycle: shift flow by the maximal Delta
    (min of f over backward edges and residual over forward edges).
    Returns Delta.  Excesses are unchanged; at least one edge saturates
    or frees."""
    if not cycle.is_cycle():
        raise DegenerateCycle("walk is not closed")
    net = st.network
    seen = set()
    for i, e in enumerate(cycle.edges):
        u, w = net.tail(e), net.head(e)
        a, b = cycle.vertices[i], cycle.vertices[i + 1]
        if cycle.forward[i]:
            if (u, w) != (a, b):
                raise DegenerateCycle(f"edge {e} does not run forward {a}->{b}")
        else:
            if (u, w) != (b, a):
                raise DegenerateCycle(f"edge {e} does not run backward {a}->{b}")
        if e in seen:
            raise DegenerateCycle(f"edge {e} repeats; cycle is not simple")
        seen.add(e)
        ea = st.active_edge(net.tail(e))
        ec = st.critical_edge(net.head(e))
        if cycle.forward[i] and ea != e:
            raise DegenerateCycle(f"forward edge {e} is not the active edge of its tail")
        if not cycle.forward[i] and ec != e:
            raise DegenerateCycle(f"backward edge {e} is not the critical edge of its head")

    k = len(cycle.edges)
    st.walk_e[:k] = np.asarray(cycle.edges, dtype=np.int64)
    st.walk_push[:k] = np.asarray([1 if fw else 0 for fw in cycle.forward],
                                  dtype=np.uint8)
    before = st.excess.copy()
    deltas = [net.capacity(e) - int(st.f[e]) if fw else int(st.f[e])
              for e, fw in zip(cycle.edges, cycle.forward)]
    K._cancel_span(0, k, st.net_tuple, st.state_tuple, st.cnt_tuple,
                   st.forest_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    if not np.array_equal(before, st.excess):
        raise SolverError("cycle cancellation changed an excess")
    return min(deltas)


def drain_trees(st: FastState, forest: TreeForest | None = None) -> BigIterationOutcome:
    """Drain all excess frozen in the forest toward the tree roots.

    Returns TREES_DRAINED when every treed excess reached a terminal
    (AllZeroed), EVENT_SFM when an intermediate edge saturated or freed."""
    if forest is not None:
        forest.install(st)
    r = K._drain_forest(st.net_tuple, st.state_tuple, st.cnt_tuple,
                        st.forest_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    return (BigIterationOutcome.EVENT_SFM if int(r) == 1
            else BigIterationOutcome.TREES_DRAINED)


def run_fast(net: Network, trace: bool = False) -> tuple[FlowAssignment, RunStats]:
    """Solve ``net`` with the fast algorithm; returns the integral stable
    flow and the run statistics (per-big-iteration update counts included)."""
    st = FastState(net, trace=trace)
    K._run_fast(st.net_tuple, st.state_tuple, st.cnt_tuple, st.queue_tuple,
                st.forest_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    internal = net.arrays["is_internal"]
    if np.any(st.excess[internal] != 0):
        raise SolverError("fast solver terminated with internal excess")
    return st.flow, st.run_stats("fast", trace)
