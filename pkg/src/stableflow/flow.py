"""Flow and preflow value semantics: excesses, feasibility, classification.

Excess of a vertex is inflow minus outflow.  A feasible assignment with
nonnegative excess at every non-source vertex is a preflow; a preflow with
zero excess at every internal vertex is a flow, and its value is the total
excess over the sinks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .network import Network


class FlowClass(enum.Enum):
    INFEASIBLE = "Infeasible"
    FEASIBLE_ONLY = "FeasibleOnly"
    PREFLOW = "Preflow"
    FLOW = "Flow"


@dataclass
class FlowAssignment:
    """Per-edge integer values plus the cached per-vertex excess table.

    The cache is established on construction and must equal a from-scratch
    recomputation at any checkpoint; solvers maintain it incrementally.
    """

    values: np.ndarray  # int64[m]
    excess: np.ndarray  # int64[n]

    @classmethod
    def from_values(cls, net: Network, values) -> "FlowAssignment":
        vals = np.asarray(values, dtype=np.int64).copy()
        if vals.shape != (net.m,):
            raise ValueError(f"expected {net.m} edge values, got {vals.shape}")
        return cls(values=vals, excess=compute_excesses(net, vals))

    def copy(self) -> "FlowAssignment":
        return FlowAssignment(self.values.copy(), self.excess.copy())

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(int(x) for x in self.values)

    def __eq__(self, other) -> bool:
        return isinstance(other, FlowAssignment) and np.array_equal(
            self.values, other.values)


def compute_excesses(net: Network, values) -> np.ndarray:
    """From-scratch excess table: excess(v) = inflow(v) - outflow(v)."""
    arr = net.arrays
    vals = np.asarray(values, dtype=np.int64)
    excess = np.zeros(net.n, dtype=np.int64)
    np.add.at(excess, arr["head"], vals)
    np.subtract.at(excess, arr["tail"], vals)
    return excess


def classify(net: Network, flow: FlowAssignment | np.ndarray) -> FlowClass:
    """Classify an assignment as Infeasible / FeasibleOnly / Preflow / Flow."""
    vals = flow.values if isinstance(flow, FlowAssignment) else np.asarray(flow)
    arr = net.arrays
    if np.any(vals < 0) or np.any(vals > arr["cap"]):
        return FlowClass.INFEASIBLE
    excess = compute_excesses(net, vals)
    non_source = ~arr["is_source"]
    if np.any(excess[non_source] < 0):
        return FlowClass.FEASIBLE_ONLY
    if np.any(excess[arr["is_internal"]] != 0):
        return FlowClass.PREFLOW
    return FlowClass.FLOW


def value_of(net: Network, flow: FlowAssignment | np.ndarray) -> int:
    """Value of an assignment: the sum of excesses over the sinks."""
    vals = flow.values if isinstance(flow, FlowAssignment) else np.asarray(flow)
    excess = compute_excesses(net, vals)
    return int(excess[net.arrays["is_sink"]].sum())


def is_saturated(net: Network, flow, e: int) -> bool:
    vals = flow.values if isinstance(flow, FlowAssignment) else flow
    return int(vals[e]) == net.capacity(e)


def is_free(net: Network, flow, e: int) -> bool:
    vals = flow.values if isinstance(flow, FlowAssignment) else flow
    return int(vals[e]) == 0


def is_middle(net: Network, flow, e: int) -> bool:
    vals = flow.values if isinstance(flow, FlowAssignment) else flow
    return 0 < int(vals[e]) < net.capacity(e)


def format_flow(net: Network, flow: FlowAssignment) -> str:
    """Serialize in the flow output format: f-lines, value, class."""
    lines = [f"f {e} {int(flow.values[e])}" for e in range(net.m)]
    lines.append(f"value {value_of(net, flow)}")
    lines.append(f"class {classify(net, flow).value}")
    return "\n".join(lines) + "\n"


def parse_flow(net: Network, text: str) -> FlowAssignment:
    """Parse the flow output format; requires one f-line per edge."""
    values = np.full(net.m, -1, dtype=np.int64)
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "f":
            if len(parts) != 3:
                raise ValueError(f"malformed flow line: {raw!r}")
            e, val = int(parts[1]), int(parts[2])
            if not 0 <= e < net.m:
                raise ValueError(f"flow line references unknown edge {e}")
            if values[e] >= 0:
                raise ValueError(f"duplicate flow line for edge {e}")
            values[e] = val
        elif parts[0] in ("value", "class"):
            continue
        else:
            raise ValueError(f"unrecognized flow line: {raw!r}")
    if np.any(values < 0):
        missing = [e for e in range(net.m) if values[e] < 0]
        raise ValueError(f"missing flow values for edges {missing}")
    return FlowAssignment.from_values(net, values)
