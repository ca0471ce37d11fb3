"""Basic stable-flow solver.

Starts from the trivial blocking preflow that saturates every source
out-edge, then alternates two phases until no internal vertex keeps excess:
balancing (drain one excess vertex backward along its least-preferred
positive in-edges, closing the decreased suffix) and pushing (forward the
newly created excesses along most-preferred open out-edges).  Finite on
integer capacities; the result is an integral stable flow.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from ._state import KernelState, RunStats
from .errors import SolverError
from .flow import FlowAssignment
from .network import Network


class SolverState(KernelState):
    """White-box basic-solver state; exposes queues, pointers, and counters."""


def initial_iteration(net: Network, trace: bool = False) -> SolverState:
    """Run the initial iteration and return the resulting solver state.

    Afterward the flow is a stable, fully blocking preflow: for every
    internal vertex the out-edges left of the active edge are saturated and
    the ones right of it are free, and exactly the excess vertices sit in
    the excess queue with an empty active edge.
    """
    st = SolverState(net, trace=trace)
    K._init_iteration(st.net_tuple, st.state_tuple, st.cnt_tuple, st.queue_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    return st


def balance(st: SolverState, v: int | None = None) -> SolverState:
    """Balance one vertex drawn FIFO from the excess queue.

    ``v``, when given, must match the queue front; the argument exists so
    call sites can document which vertex they expect to be balanced.
    """
    queue = st.excess_queue
    if not queue:
        raise SolverError("excess queue is empty")
    front = queue[0]
    if v is not None and v != front:
        raise SolverError(f"vertex {v} is not the excess-queue front {front}")
    v = K._q_pop(st.qa_buf, st.qst, 0, st.in_qa)
    if st.excess[v] <= 0:
        raise SolverError(f"vertex {v} has no excess")
    st.ctr[K.C_BAL] += 1
    K._full_balance(v, True, st.net_tuple, st.state_tuple, st.cnt_tuple,
                    st.queue_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    return st


def push(st: SolverState) -> SolverState:
    """Run one push phase: process the New queue FIFO until it is empty."""
    K._drain_new(st.net_tuple, st.state_tuple, st.cnt_tuple, st.queue_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    return st


def run_basic(net: Network, trace: bool = False) -> tuple[FlowAssignment, RunStats]:
    """Solve ``net`` with the basic algorithm; returns the integral stable
    flow and the run statistics."""
    st = SolverState(net, trace=trace)
    K._run_basic(st.net_tuple, st.state_tuple, st.cnt_tuple, st.queue_tuple)
    st.raise_for_status()
    st.check_excess_cache()
    internal = net.arrays["is_internal"]
    if np.any(st.excess[internal] != 0):
        raise SolverError("basic solver terminated with internal excess")
    return st.flow, st.run_stats("basic", trace)
