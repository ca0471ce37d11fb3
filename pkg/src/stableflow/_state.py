"""Shared solver-state allocation and run statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import (
    DegenerateCycle,
    IterationGuardExceeded,
    NoPositiveInEdge,
    PartitionViolation,
    SolverError,
    TraceOverflow,
)
from .flow import FlowAssignment, compute_excesses
from .network import Network


@dataclass
class RunStats:
    """Instrumentation collected over one solver run."""

    solver: str
    updates_total: int
    s_events: int
    f_events: int
    m_events: int
    balance_ops: int
    push_ops: int
    sat_events_per_edge: np.ndarray
    free_events_per_edge: np.ndarray
    gamma_additions_per_edge: np.ndarray
    initial_updates: int = 0
    big_iterations: int = 0
    updates_per_big_iteration: np.ndarray = field(
        default_factory=lambda: np.zeros(0, dtype=np.int64))
    updates_max_per_big_iteration: int = 0
    fallback_steps: int = 0
    fallback_updates: int = 0
    trace: np.ndarray | None = None  # rows of (edge, delta, phase)

    @property
    def fallback_fraction(self) -> float:
        if self.updates_total == 0:
            return 0.0
        return self.fallback_updates / self.updates_total

    def stats_json(self) -> dict:
        return {
            "solver": self.solver,
            "big_iterations": int(self.big_iterations),
            "updates_total": int(self.updates_total),
            "updates_max_per_big_iteration": int(self.updates_max_per_big_iteration),
            "s_events": int(self.s_events),
            "f_events": int(self.f_events),
            "m_events": int(self.m_events),
            "fallback_steps": int(self.fallback_steps),
            "fallback_fraction": round(self.fallback_fraction, 6),
        }


class KernelState:
    """Bundle of the flat arrays consumed by the kernels, plus views."""

    def __init__(self, net: Network, trace: bool = False, guard: int | None = None,
                 trace_cap: int | None = None):
        self.network = net
        a = net.arrays
        n, m = net.n, net.m
        self.net_tuple = (
            a["tail"], a["head"], a["cap"], a["is_source"], a["is_internal"],
            a["out_off"], a["out_lst"], a["in_off"], a["in_lst"],
        )
        self.f = np.zeros(m, dtype=np.int64)
        self.excess = np.zeros(n, dtype=np.int64)
        self.act = np.zeros(n, dtype=np.int64)
        self.crit = np.full(n, -1, dtype=np.int64)
        self.closed = np.zeros(m, dtype=np.uint8)
        self.label = np.zeros(m, dtype=np.uint8)
        self.state_tuple = (self.f, self.excess, self.act, self.crit,
                            self.closed, self.label)

        self.ctr = np.zeros(K.NCTR, dtype=np.int64)
        self.sat_cnt = np.zeros(m, dtype=np.int64)
        self.free_cnt = np.zeros(m, dtype=np.int64)
        self.add_cnt = np.zeros(m, dtype=np.int64)
        if guard is None:
            guard = default_guard(net)
        self.ctr[K.C_GUARD] = guard
        if trace:
            # bounded so tracing a huge-capacity instance cannot exhaust
            # memory; overflow surfaces as TraceOverflow
            cap_rows = trace_cap if trace_cap is not None else min(guard + 16, 4_000_000)
            self.trace_buf = np.zeros(3 * cap_rows, dtype=np.int64)
            self.ctr[K.C_TRACE_CAP] = cap_rows
        else:
            self.trace_buf = np.zeros(3, dtype=np.int64)
        self.big_upd = np.zeros(12 * m + 64, dtype=np.int64)
        self.cnt_tuple = (self.ctr, self.sat_cnt, self.free_cnt, self.add_cnt,
                          self.trace_buf, self.big_upd)

        self.qa_buf = np.zeros(n + 1, dtype=np.int64)
        self.qb_buf = np.zeros(n + 1, dtype=np.int64)
        self.qst = np.zeros(4, dtype=np.int64)
        self.in_qa = np.zeros(n, dtype=np.uint8)
        self.in_qb = np.zeros(n, dtype=np.uint8)
        self.queue_tuple = (self.qa_buf, self.qb_buf, self.qst,
                            self.in_qa, self.in_qb)

        self.in_tree = np.zeros(n, dtype=np.uint8)
        self.par_v = np.full(n, -1, dtype=np.int64)
        self.par_e = np.full(n, -1, dtype=np.int64)
        self.par_push = np.zeros(n, dtype=np.uint8)
        self.stamp = np.zeros(n, dtype=np.int64)
        self.wpos = np.zeros(n, dtype=np.int64)
        self.walk_v = np.zeros(n + 2, dtype=np.int64)
        self.walk_e = np.zeros(n + 2, dtype=np.int64)
        self.walk_push = np.zeros(n + 2, dtype=np.uint8)
        self.depth = np.zeros(n, dtype=np.int64)
        self.order = np.zeros(n, dtype=np.int64)
        self.stack = np.zeros(n, dtype=np.int64)
        self.bucket = np.zeros(n + 3, dtype=np.int64)
        self.forest_tuple = (
            self.in_tree, self.par_v, self.par_e, self.par_push,
            self.stamp, self.wpos, self.walk_v, self.walk_e, self.walk_push,
            self.depth, self.order, self.stack, self.bucket,
        )

    # -- queue views -------------------------------------------------------

    def _queue_list(self, base: int, buf: np.ndarray) -> list[int]:
        out = []
        i = int(self.qst[base])
        while i != int(self.qst[base + 1]):
            out.append(int(buf[i]))
            i = (i + 1) % buf.shape[0]
        return out

    @property
    def excess_queue(self) -> list[int]:
        return self._queue_list(0, self.qa_buf)

    @property
    def new_queue(self) -> list[int]:
        return self._queue_list(2, self.qb_buf)

    # -- pointer views -----------------------------------------------------

    def active_edge(self, v: int) -> int | None:
        a = self.network.arrays
        p = int(self.act[v])
        if p >= int(a["out_off"][v + 1]):
            return None
        return int(a["out_lst"][p])

    def critical_edge(self, v: int) -> int | None:
        a = self.network.arrays
        p = int(self.crit[v])
        if p < 0:
            return None
        return int(a["in_lst"][p])

    @property
    def flow(self) -> FlowAssignment:
        return FlowAssignment(self.f.copy(), self.excess.copy())

    # -- checks ------------------------------------------------------------

    def raise_for_status(self) -> None:
        status = int(self.ctr[K.C_STATUS])
        if status == K.ST_OK:
            pass
        elif status == K.ST_GUARD:
            raise IterationGuardExceeded(
                f"exceeded {int(self.ctr[K.C_GUARD])} elementary updates")
        elif status == K.ST_TRACE_OVERFLOW:
            raise TraceOverflow("trace buffer overflow")
        elif status == K.ST_NO_POSITIVE_IN_EDGE:
            raise NoPositiveInEdge("balancing found no positive in-edge")
        elif status == K.ST_DEGENERATE_CYCLE:
            raise DegenerateCycle("proper cycle admitted no positive shift")
        elif status == K.ST_FOREST_CORRUPT:
            raise SolverError("forest state corrupt during drain")
        else:
            raise SolverError(f"unknown kernel status {status}")
        if int(self.ctr[K.C_PVIOL]) > 0:
            raise PartitionViolation(
                f"{int(self.ctr[K.C_PVIOL])} label refreshes saw an edge in "
                f"an inconsistent Gamma position")

    def check_excess_cache(self) -> None:
        # debug assertion: incremental excesses equal a recomputation
        fresh = compute_excesses(self.network, self.f)
        if not np.array_equal(fresh, self.excess):
            raise SolverError("incremental excess table diverged from recomputation")

    def run_stats(self, solver: str, with_trace: bool) -> RunStats:
        c = self.ctr
        big = int(c[K.C_BIG])
        trace = None
        if with_trace:
            rows = int(c[K.C_TRACE_LEN])
            trace = self.trace_buf[:3 * rows].reshape(rows, 3).copy()
        return RunStats(
            solver=solver,
            updates_total=int(c[K.C_UPDATES]),
            s_events=int(c[K.C_S]),
            f_events=int(c[K.C_F]),
            m_events=int(c[K.C_M]),
            balance_ops=int(c[K.C_BAL]),
            push_ops=int(c[K.C_PUSHV]),
            sat_events_per_edge=self.sat_cnt.copy(),
            free_events_per_edge=self.free_cnt.copy(),
            gamma_additions_per_edge=self.add_cnt.copy(),
            initial_updates=int(c[K.C_INIT_UPD]),
            big_iterations=big,
            updates_per_big_iteration=self.big_upd[:big].copy(),
            updates_max_per_big_iteration=int(c[K.C_MAXBIG]),
            fallback_steps=int(c[K.C_FALLBACK]),
            fallback_updates=int(c[K.C_FALLBACK_UPD]),
            trace=trace,
        )


def default_guard(net: Network) -> int:
    """Generous elementary-update bound: 4 * sum of capacities covers the
    basic solver on integers; the O(nm) term covers the fast solver even on
    huge capacities."""
    return 64 + 4 * net.arrays["cap_sum"] + 16 * net.n + 120 * net.n * max(net.m, 1)
