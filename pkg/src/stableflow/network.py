"""Network model: directed networks with per-vertex preference orders.

A network consists of a directed graph without loops or parallel edges,
disjoint source and sink sets with no edge entering a source or leaving a
sink, integer edge capacities, and for every internal (non-terminal) vertex
a strict preference order over its in-edges and over its out-edges (most
preferred first).  Networks are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BadCapacity,
    BadPreferencePermutation,
    DuplicateEdge,
    EdgeIntoSource,
    EdgeOutOfSink,
    InfeasibleParameters,
    LoopEdge,
    NetworkValidationError,
    PreferenceListOnTerminal,
    TerminalOverlap,
)

MAX_CAPACITY = 2**31  # per-edge bound so that sums of excesses stay in int64


@dataclass(frozen=True)
class Network:
    """Validated immutable network instance.

    Construct through :func:`build_network`; the constructor itself performs
    no validation.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]  # (tail, head, capacity)
    sources: frozenset[int]
    sinks: frozenset[int]
    in_pref: tuple[tuple[int, ...], ...]   # per vertex; empty for terminals
    out_pref: tuple[tuple[int, ...], ...]
    _arrays: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    def is_internal(self, v: int) -> bool:
        return v not in self.sources and v not in self.sinks

    @property
    def internal_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if self.is_internal(v))

    def tail(self, e: int) -> int:
        return self.edges[e][0]

    def head(self, e: int) -> int:
        return self.edges[e][1]

    def capacity(self, e: int) -> int:
        return self.edges[e][2]

    def in_rank(self, e: int) -> int:
        """Position of e in its head's in-preference list (0 = most preferred)."""
        return int(self.arrays["in_rank"][e])

    def out_rank(self, e: int) -> int:
        """Position of e in its tail's out-preference list."""
        return int(self.arrays["out_rank"][e])

    @property
    def arrays(self) -> dict:
        """Dense array view consumed by the solver kernels (cached)."""
        if not self._arrays:
            self._arrays.update(_build_arrays(self))
        return self._arrays


def _build_arrays(net: Network) -> dict:
    n, m = net.n, net.m
    tail = np.fromiter((t for t, _, _ in net.edges), dtype=np.int64, count=m)
    head = np.fromiter((h for _, h, _ in net.edges), dtype=np.int64, count=m)
    cap = np.fromiter((c for _, _, c in net.edges), dtype=np.int64, count=m)
    is_source = np.zeros(n, dtype=np.bool_)
    is_sink = np.zeros(n, dtype=np.bool_)
    for s in net.sources:
        is_source[s] = True
    for t in net.sinks:
        is_sink[t] = True
    is_internal = ~(is_source | is_sink)

    # CSR adjacency in preference order; terminals get edge-id order.
    out_lists: list[list[int]] = [[] for _ in range(n)]
    in_lists: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        if is_internal[v]:
            out_lists[v] = list(net.out_pref[v])
            in_lists[v] = list(net.in_pref[v])
    for e in range(m):
        if not is_internal[tail[e]]:
            out_lists[tail[e]].append(e)
        if not is_internal[head[e]]:
            in_lists[head[e]].append(e)

    out_off = np.zeros(n + 1, dtype=np.int64)
    in_off = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        out_off[v + 1] = out_off[v] + len(out_lists[v])
        in_off[v + 1] = in_off[v] + len(in_lists[v])
    out_lst = np.fromiter(
        (e for lst in out_lists for e in lst), dtype=np.int64, count=m)
    in_lst = np.fromiter(
        (e for lst in in_lists for e in lst), dtype=np.int64, count=m)

    out_pos = np.zeros(m, dtype=np.int64)  # absolute position in out_lst
    in_pos = np.zeros(m, dtype=np.int64)
    out_rank = np.zeros(m, dtype=np.int64)  # position within the vertex list
    in_rank = np.zeros(m, dtype=np.int64)
    for v in range(n):
        for i, e in enumerate(out_lists[v]):
            out_pos[e] = out_off[v] + i
            out_rank[e] = i
        for i, e in enumerate(in_lists[v]):
            in_pos[e] = in_off[v] + i
            in_rank[e] = i

    return {
        "tail": tail, "head": head, "cap": cap,
        "is_source": is_source, "is_sink": is_sink, "is_internal": is_internal,
        "out_off": out_off, "out_lst": out_lst,
        "in_off": in_off, "in_lst": in_lst,
        "out_pos": out_pos, "in_pos": in_pos,
        "out_rank": out_rank, "in_rank": in_rank,
        "cap_sum": int(cap.sum()),
    }


def build_network(
    n: int,
    edges: Sequence[tuple[int, int, int]],
    sources: Iterable[int],
    sinks: Iterable[int],
    in_pref: Mapping[int, Sequence[int]] | None = None,
    out_pref: Mapping[int, Sequence[int]] | None = None,
) -> Network:
    """Validate a raw description and return an immutable :class:`Network`.

    ``in_pref`` / ``out_pref`` map internal vertices to their incident edge
    ids, most preferred first.  A vertex with a single incident edge on a
    side may omit the list; it defaults to the singleton.  Terminals must
    not carry preference lists.
    """
    in_pref = dict(in_pref or {})
    out_pref = dict(out_pref or {})
    sources = frozenset(int(s) for s in sources)
    sinks = frozenset(int(t) for t in sinks)

    if sources & sinks:
        raise TerminalOverlap(f"vertices {sorted(sources & sinks)} are both source and sink")
    for v in sources | sinks:
        if not (0 <= v < n):
            raise TerminalOverlap(f"terminal {v} out of range 0..{n - 1}")

    seen_pairs: set[tuple[int, int]] = set()
    incident_in: dict[int, list[int]] = {v: [] for v in range(n)}
    incident_out: dict[int, list[int]] = {v: [] for v in range(n)}
    for e, (u, v, c) in enumerate(edges):
        if not (0 <= u < n and 0 <= v < n):
            raise NetworkValidationError(f"edge {e}: endpoint out of range")
        if u == v:
            raise LoopEdge(f"edge {e} is a loop at vertex {u}")
        if (u, v) in seen_pairs:
            raise DuplicateEdge(f"edge {e} duplicates pair ({u}, {v})")
        seen_pairs.add((u, v))
        if v in sources:
            raise EdgeIntoSource(f"edge {e} enters source {v}")
        if u in sinks:
            raise EdgeOutOfSink(f"edge {e} leaves sink {u}")
        if not isinstance(c, (int, np.integer)) or isinstance(c, bool):
            raise BadCapacity(f"edge {e}: capacity {c!r} is not an integer")
        if c < 0 or c > MAX_CAPACITY:
            raise BadCapacity(f"edge {e}: capacity {c} outside [0, 2^31]")
        incident_out[u].append(e)
        incident_in[v].append(e)

    internal = [v for v in range(n) if v not in sources and v not in sinks]
    for v in list(in_pref) + list(out_pref):
        if v in sources or v in sinks:
            raise PreferenceListOnTerminal(f"terminal {v} carries a preference list")

    full_in: list[tuple[int, ...]] = [() for _ in range(n)]
    full_out: list[tuple[int, ...]] = [() for _ in range(n)]
    for v in internal:
        for given, incident, label, store in (
            (in_pref.get(v), incident_in[v], "in", full_in),
            (out_pref.get(v), incident_out[v], "out", full_out),
        ):
            if given is None:
                if len(incident) > 1:
                    raise BadPreferencePermutation(
                        f"vertex {v}: missing {label}-preference list for "
                        f"{len(incident)} incident edges")
                given = list(incident)
            if sorted(given) != sorted(incident):
                raise BadPreferencePermutation(
                    f"vertex {v}: {label}-preference list {list(given)} is not a "
                    f"permutation of incident edges {sorted(incident)}")
            store[v] = tuple(int(e) for e in given)

    return Network(
        n=n,
        edges=tuple((int(u), int(v), int(c)) for u, v, c in edges),
        sources=sources,
        sinks=sinks,
        in_pref=tuple(full_in),
        out_pref=tuple(full_out),
    )


@dataclass(frozen=True)
class AllocationInstance:
    """Bipartite stable-allocation instance (workers x jobs with quotas)."""

    n_left: int
    n_right: int
    edges: tuple[tuple[int, int, int], ...]  # (left, right, capacity)
    quota_left: tuple[int, ...]
    quota_right: tuple[int, ...]
    # preference of each left vertex over its edge ids, most preferred first
    pref_left: tuple[tuple[int, ...], ...]
    pref_right: tuple[tuple[int, ...], ...]


def from_allocation(inst: AllocationInstance) -> Network:
    """Reduce a stable-allocation instance to a stable-flow network.

    Left vertices become 0..n_left-1, right vertices follow, then one source
    and one sink.  Original edges run left -> right with their capacities and
    preference orders; the new terminal edges s->u (capacity quota(u)) and
    v->t (capacity quota(v)) are each the sole entry of the corresponding
    singleton preference list.
    """
    nl, nr = inst.n_left, inst.n_right
    s = nl + nr
    t = nl + nr + 1
    edges: list[tuple[int, int, int]] = [
        (u, nl + v, c) for (u, v, c) in inst.edges]
    # terminal edges appended after the originals, ids nl+nr known offsets
    source_edge = {}
    sink_edge = {}
    for u in range(nl):
        source_edge[u] = len(edges)
        edges.append((s, u, int(inst.quota_left[u])))
    for v in range(nr):
        sink_edge[v] = len(edges)
        edges.append((nl + v, t, int(inst.quota_right[v])))

    in_pref = {}
    out_pref = {}
    for u in range(nl):
        in_pref[u] = (source_edge[u],)
        out_pref[u] = tuple(inst.pref_left[u])
    for v in range(nr):
        in_pref[nl + v] = tuple(inst.pref_right[v])
        out_pref[nl + v] = (sink_edge[v],)

    return build_network(
        n=nl + nr + 2,
        edges=edges,
        sources=[s],
        sinks=[t],
        in_pref=in_pref,
        out_pref=out_pref,
    )


def random_instance(
    n: int,
    m: int,
    cap_max: int,
    source_count: int,
    sink_count: int,
    seed: int,
) -> Network:
    """Seeded random network; a pure function of its arguments.

    Sources and sinks are disjoint random vertex sets, edges are sampled
    uniformly without replacement among legal (tail, head) pairs, capacities
    are uniform on [0, cap_max], and every preference list is a uniformly
    random permutation.
    """
    if n < 2 or source_count < 1 or sink_count < 1:
        raise InfeasibleParameters("need n >= 2 and at least one source and one sink")
    if source_count + sink_count > n:
        raise InfeasibleParameters("more terminals than vertices")
    if cap_max < 0 or cap_max > MAX_CAPACITY:
        raise InfeasibleParameters(f"cap_max {cap_max} outside [0, 2^31]")

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    sources = sorted(int(v) for v in perm[:source_count])
    sinks = sorted(int(v) for v in perm[source_count:source_count + sink_count])
    src_set, snk_set = set(sources), set(sinks)

    legal = [(u, v) for u in range(n) for v in range(n)
             if u != v and u not in snk_set and v not in src_set]
    if m > len(legal):
        raise InfeasibleParameters(
            f"m={m} exceeds the {len(legal)} legal vertex pairs")
    chosen = rng.choice(len(legal), size=m, replace=False)
    caps = rng.integers(0, cap_max + 1, size=m)
    edges = [(legal[int(i)][0], legal[int(i)][1], int(c))
             for i, c in zip(chosen, caps)]

    in_pref = {}
    out_pref = {}
    for v in range(n):
        if v in src_set or v in snk_set:
            continue
        ins = [e for e, (a, b, _) in enumerate(edges) if b == v]
        outs = [e for e, (a, b, _) in enumerate(edges) if a == v]
        in_pref[v] = [ins[int(i)] for i in rng.permutation(len(ins))]
        out_pref[v] = [outs[int(i)] for i in rng.permutation(len(outs))]

    return build_network(n, edges, sources, sinks, in_pref, out_pref)
