"""Text formats: network instances, allocation instances, flow files.

Instance format (one record per line, '#' starts a comment):

    p stableflow <n> <m>
    s <vertex> ...             # sources (one or more lines)
    t <vertex> ...             # sinks
    e <edge-id> <tail> <head> <capacity>
    in  <vertex> <edge-id> ... # most preferred first
    out <vertex> <edge-id> ...
    g <vertex> <gamma>         # optional, quasiflow modes
    b <vertex> <beta>          # optional

Edge ids are 0..m-1 and vertex ids 0..n-1.  An ``in``/``out`` line is
required for every internal vertex with at least one incident edge on that
side (singletons included).  Allocation instances use the analogous

    p stablealloc <n_left> <n_right> <m>
    e <edge-id> <left> <right> <capacity>
    q <vertex> <quota>         # left vertices 0..n_left-1, right follow
    pref <vertex> <edge-id> ...
"""

from __future__ import annotations

from .errors import InstanceParseError, NetworkValidationError
from .network import AllocationInstance, Network, build_network
from .quasiflow import BoundsSpec


def _records(text: str):
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        yield line_no, line.split()


def parse_instance(text: str) -> tuple[Network, BoundsSpec]:
    """Parse the instance format; raises line-numbered errors and forwards
    validation errors from build_network."""
    n = m = None
    sources: list[int] = []
    sinks: list[int] = []
    edges: dict[int, tuple[int, int, int]] = {}
    in_pref: dict[int, list[int]] = {}
    out_pref: dict[int, list[int]] = {}
    gamma: dict[int, int] = {}
    beta: dict[int, int] = {}

    for line_no, parts in _records(text):
        kind = parts[0]
        try:
            if kind == "p":
                if n is not None:
                    raise InstanceParseError(line_no, "duplicate problem line")
                if len(parts) != 4 or parts[1] != "stableflow":
                    raise InstanceParseError(line_no, "expected 'p stableflow <n> <m>'")
                n, m = int(parts[2]), int(parts[3])
                continue
            if n is None:
                raise InstanceParseError(line_no, "problem line must come first")
            if kind == "s":
                sources.extend(int(x) for x in parts[1:])
            elif kind == "t":
                sinks.extend(int(x) for x in parts[1:])
            elif kind == "e":
                if len(parts) != 5:
                    raise InstanceParseError(
                        line_no, "expected 'e <id> <tail> <head> <capacity>'")
                e, u, v, c = (int(x) for x in parts[1:])
                if not 0 <= e < m:
                    raise InstanceParseError(line_no, f"edge id {e} outside 0..{m - 1}")
                if e in edges:
                    raise InstanceParseError(line_no, f"duplicate edge id {e}")
                edges[e] = (u, v, c)
            elif kind in ("in", "out"):
                v = int(parts[1])
                store = in_pref if kind == "in" else out_pref
                if v in store:
                    raise InstanceParseError(line_no, f"duplicate {kind} line for vertex {v}")
                store[v] = [int(x) for x in parts[2:]]
            elif kind in ("g", "b"):
                if len(parts) != 3:
                    raise InstanceParseError(line_no, f"expected '{kind} <vertex> <bound>'")
                v, x = int(parts[1]), int(parts[2])
                if x < 0:
                    raise InstanceParseError(line_no, f"negative bound {x}")
                (gamma if kind == "g" else beta)[v] = x
            else:
                raise InstanceParseError(line_no, f"unknown record type {kind!r}")
        except ValueError as exc:
            raise InstanceParseError(line_no, f"bad integer field: {exc}") from None

    if n is None:
        raise InstanceParseError(0, "missing problem line")
    if len(edges) != m:
        missing = sorted(set(range(m)) - set(edges))
        raise InstanceParseError(0, f"missing edge records for ids {missing}")

    edge_list = [edges[e] for e in range(m)]
    terminal = set(sources) | set(sinks)
    for v in list(gamma) + list(beta):
        if v in terminal or not 0 <= v < n:
            raise InstanceParseError(0, f"excess bound on non-internal vertex {v}")

    # require explicit lists for internal vertices with incident edges
    for v in range(n):
        if v in terminal:
            continue
        has_in = any(h == v for _, h, _ in edge_list)
        has_out = any(t == v for t, _, _ in edge_list)
        if has_in and v not in in_pref:
            raise InstanceParseError(0, f"missing 'in' line for internal vertex {v}")
        if has_out and v not in out_pref:
            raise InstanceParseError(0, f"missing 'out' line for internal vertex {v}")

    net = build_network(n, edge_list, sources, sinks, in_pref, out_pref)
    return net, BoundsSpec(gamma=gamma, beta=beta)


def serialize_instance(net: Network, bounds: BoundsSpec | None = None) -> str:
    """Serialize so that parse(serialize(x)) is semantically identical."""
    lines = [f"p stableflow {net.n} {net.m}"]
    if net.sources:
        lines.append("s " + " ".join(str(v) for v in sorted(net.sources)))
    if net.sinks:
        lines.append("t " + " ".join(str(v) for v in sorted(net.sinks)))
    for e, (u, v, c) in enumerate(net.edges):
        lines.append(f"e {e} {u} {v} {c}")
    for v in net.internal_vertices:
        if net.in_pref[v]:
            lines.append(f"in {v} " + " ".join(str(e) for e in net.in_pref[v]))
        if net.out_pref[v]:
            lines.append(f"out {v} " + " ".join(str(e) for e in net.out_pref[v]))
    if bounds is not None:
        for v, x in sorted(bounds.gamma.items()):
            lines.append(f"g {v} {x}")
        for v, x in sorted(bounds.beta.items()):
            lines.append(f"b {v} {x}")
    return "\n".join(lines) + "\n"


def parse_allocation(text: str) -> AllocationInstance:
    """Parse the allocation-instance format."""
    nl = nr = m = None
    edges: dict[int, tuple[int, int, int]] = {}
    quotas: dict[int, int] = {}
    prefs: dict[int, list[int]] = {}
    for line_no, parts in _records(text):
        kind = parts[0]
        try:
            if kind == "p":
                if len(parts) != 5 or parts[1] != "stablealloc":
                    raise InstanceParseError(
                        line_no, "expected 'p stablealloc <n_left> <n_right> <m>'")
                nl, nr, m = int(parts[2]), int(parts[3]), int(parts[4])
                continue
            if nl is None:
                raise InstanceParseError(line_no, "problem line must come first")
            if kind == "e":
                e, u, v, c = (int(x) for x in parts[1:])
                if e in edges:
                    raise InstanceParseError(line_no, f"duplicate edge id {e}")
                edges[e] = (u, v, c)
            elif kind == "q":
                quotas[int(parts[1])] = int(parts[2])
            elif kind == "pref":
                prefs[int(parts[1])] = [int(x) for x in parts[2:]]
            else:
                raise InstanceParseError(line_no, f"unknown record type {kind!r}")
        except ValueError as exc:
            raise InstanceParseError(line_no, f"bad integer field: {exc}") from None
    if nl is None:
        raise InstanceParseError(0, "missing problem line")
    if len(edges) != m:
        raise InstanceParseError(0, "missing edge records")
    edge_list = [edges[e] for e in range(m)]

    def pref_for(v: int, incident: list[int]) -> tuple[int, ...]:
        lst = prefs.get(v)
        if lst is None:
            if len(incident) > 1:
                raise InstanceParseError(0, f"missing pref line for vertex {v}")
            lst = incident
        if sorted(lst) != sorted(incident):
            raise InstanceParseError(0, f"pref line for {v} is not a permutation")
        return tuple(lst)

    return AllocationInstance(
        n_left=nl,
        n_right=nr,
        edges=tuple(edge_list),
        quota_left=tuple(int(quotas.get(u, 0)) for u in range(nl)),
        quota_right=tuple(int(quotas.get(nl + v, 0)) for v in range(nr)),
        pref_left=tuple(pref_for(u, [e for e, (a, _, _) in enumerate(edge_list) if a == u])
                        for u in range(nl)),
        pref_right=tuple(pref_for(nl + v, [e for e, (_, b, _) in enumerate(edge_list) if b == v])
                         for v in range(nr)),
    )
