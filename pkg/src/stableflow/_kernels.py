"""Solver kernels shared by the basic and fast solvers.

Everything here operates on flat int64/uint8 arrays and is compiled with
numba when enabled (see :mod:`stableflow.accel`).  The pure path runs the
identical source.  State layout:

net tuple:   (tail, head, cap, is_source, is_internal,
              out_off, out_lst, in_off, in_lst)
state tuple: (f, excess, act, crit, closed, label)
    act[v]   absolute position of the active edge in out_lst,
             out_off[v+1] when empty
    crit[v]  absolute position of the critical edge in in_lst, -1 when none
    label[e] 0 outside Gamma, 1 in E+, 2 in E-
cnt tuple:   (ctr, sat_cnt, free_cnt, add_cnt, trace, big_upd)
queues:      (qa_buf, qb_buf, qst, in_qa, in_qb)
    ring buffers; basic uses qa=Excess qb=New, fast uses qa as the pool
forest:      (in_tree, par_v, par_e, par_push, stamp, wpos,
              walk_v, walk_e, walk_push, depth, order, stack, bucket)

Every flow update goes through _apply, which maintains excesses, the
saturation/freeing event counters, the elementary-update trace, and the
iteration guard.  Label refreshes happen at operation boundaries with the
active/critical pointers already settled, so the Gamma membership counters
see only consistent states.
"""

import numpy as np

from .accel import jit_kernel

# counter slots
C_UPDATES = 0      # total elementary flow updates
C_S = 1            # saturation events
C_F = 2            # freeing events
C_M = 3            # Gamma / (E+, E-) change events
C_GUARD = 4        # update guard limit
C_STATUS = 5       # see ST_* codes
C_TRACE_LEN = 6
C_TRACE_CAP = 7
C_BAL = 8          # full balance operations
C_PUSHV = 9        # push-phase vertex processings
C_BIG = 10         # big iterations
C_FALLBACK = 11    # full balance ops taken inside fast walks
C_INIT_UPD = 12    # updates spent in the initial iteration
C_MAXBIG = 13      # max updates within one big iteration
C_WALKID = 14      # monotone walk stamp
C_FALLBACK_UPD = 15
C_PVIOL = 16       # partition violations seen by label refresh
NCTR = 17

# status codes
ST_OK = 0
ST_GUARD = 1
ST_TRACE_OVERFLOW = 2
ST_NO_POSITIVE_IN_EDGE = 3
ST_DEGENERATE_CYCLE = 4
ST_FOREST_CORRUPT = 5

# trace phase codes
PH_INIT = 0
PH_BAL = 1
PH_PUSH = 2
PH_CANCEL = 3
PH_DRAIN = 4

# big-iteration outcomes
OUT_SOLVED = 0
OUT_CYCLE = 1
OUT_DRAINED = 2
OUT_EVENT = 3


@jit_kernel
def _q_push(buf, qst, base, inq, v):
    inq[v] = 1
    buf[qst[base + 1]] = v
    qst[base + 1] = (qst[base + 1] + 1) % buf.shape[0]


@jit_kernel
def _q_pop(buf, qst, base, inq):
    v = buf[qst[base]]
    qst[base] = (qst[base] + 1) % buf.shape[0]
    inq[v] = 0
    return v


@jit_kernel
def _q_empty(qst, base):
    return qst[base] == qst[base + 1]


@jit_kernel
def _apply(e, delta, phase, net, state, cnt):
    """One elementary flow update; returns -1 on abort, else 0/1/2 for
    no event / saturation / freeing."""
    tail, head, cap = net[0], net[1], net[2]
    f, excess = state[0], state[1]
    ctr, sat_cnt, free_cnt, trace = cnt[0], cnt[1], cnt[2], cnt[4]

    f[e] += delta
    excess[head[e]] += delta
    excess[tail[e]] -= delta
    ctr[C_UPDATES] += 1
    if ctr[C_UPDATES] > ctr[C_GUARD]:
        ctr[C_STATUS] = ST_GUARD
        return -1
    if ctr[C_TRACE_CAP] > 0:
        r = ctr[C_TRACE_LEN]
        if r < ctr[C_TRACE_CAP]:
            trace[3 * r] = e
            trace[3 * r + 1] = delta
            trace[3 * r + 2] = phase
            ctr[C_TRACE_LEN] = r + 1
        else:
            ctr[C_STATUS] = ST_TRACE_OVERFLOW
            return -1
    if delta > 0 and f[e] == cap[e]:
        ctr[C_S] += 1
        sat_cnt[e] += 1
        return 1
    if delta < 0 and f[e] == 0:
        ctr[C_F] += 1
        free_cnt[e] += 1
        return 2
    return 0


@jit_kernel
def _refresh(e, net, state, cnt):
    """Recompute the Gamma label of edge e; count membership changes."""
    tail, head, cap = net[0], net[1], net[2]
    is_internal = net[4]
    out_off, out_lst, in_lst = net[5], net[6], net[8]
    f, act, crit, label = state[0], state[2], state[3], state[5]
    ctr, add_cnt = cnt[0], cnt[3]

    t = tail[e]
    h = head[e]
    is_act = is_internal[t] and act[t] < out_off[t + 1] and out_lst[act[t]] == e
    is_crit = is_internal[h] and crit[h] >= 0 and in_lst[crit[h]] == e
    member = (0 < f[e] and f[e] < cap[e]) or (is_act and f[e] < cap[e])
    new = np.uint8(0)
    if member:
        if is_crit:
            new = np.uint8(2)
            if is_act:
                ctr[C_PVIOL] += 1
        elif is_act:
            new = np.uint8(1)
        else:
            # middle edge that is neither active nor critical: corrupt state
            ctr[C_PVIOL] += 1
            new = np.uint8(1)
    old = label[e]
    if old != new:
        ctr[C_M] += 1
        if old == 0 and new != 0:
            add_cnt[e] += 1
        label[e] = new


@jit_kernel
def _advance_active(u, net, state, cnt):
    """Move u's active pointer to the next unclosed unsaturated out-edge and
    refresh labels over the skipped range (u internal)."""
    cap = net[2]
    out_off, out_lst = net[5], net[6]
    f, act, closed = state[0], state[2], state[4]

    end = out_off[u + 1]
    old = act[u]
    p = old
    while p < end:
        e = out_lst[p]
        if closed[e] == 0 and f[e] < cap[e]:
            break
        p += 1
    act[u] = p
    q = old
    while q <= p and q < end:
        _refresh(out_lst[q], net, state, cnt)
        q += 1


@jit_kernel
def _full_balance(v, enqueue, net, state, cnt, queues):
    """Balance vertex v: drain its excess by decreasing its least-preferred
    positive in-edges, set the critical edge, close the critical suffix, and
    (optionally) enqueue tails that gained excess into the New queue."""
    tail = net[0]
    is_internal = net[4]
    out_off, out_lst, in_off, in_lst = net[5], net[6], net[7], net[8]
    f, excess, act, crit, closed = state[0], state[1], state[2], state[3], state[4]
    ctr = cnt[0]
    qb_buf, qst, in_qa, in_qb = queues[1], queues[2], queues[3], queues[4]

    delta = excess[v]
    if delta <= 0:
        return
    leftmost = np.int64(-1)
    p = in_off[v + 1] - 1
    while delta > 0 and p >= in_off[v]:
        e = in_lst[p]
        if f[e] > 0:
            d = f[e]
            if d > delta:
                d = delta
            if _apply(e, -d, PH_BAL, net, state, cnt) < 0:
                return
            delta -= d
            leftmost = p
            u = tail[e]
            if enqueue and is_internal[u] and in_qa[u] == 0 and in_qb[u] == 0:
                _q_push(qb_buf, qst, 2, in_qb, u)
        p -= 1
    if delta > 0:
        ctr[C_STATUS] = ST_NO_POSITIVE_IN_EDGE
        return
    old_crit = crit[v]
    crit[v] = leftmost
    # close the critical edge and everything after it; advance active
    # pointers that sat on a newly closed edge
    p = leftmost
    while p < in_off[v + 1]:
        e = in_lst[p]
        if closed[e] == 0:
            closed[e] = 1
            u = tail[e]
            if is_internal[u] and act[u] < out_off[u + 1] and out_lst[act[u]] == e:
                _advance_active(u, net, state, cnt)
        p += 1
    p = leftmost
    while p < in_off[v + 1]:
        _refresh(in_lst[p], net, state, cnt)
        p += 1
    if 0 <= old_crit < leftmost:
        _refresh(in_lst[old_crit], net, state, cnt)


@jit_kernel
def _push_vertex(u, enqueue, net, state, cnt, queues):
    """Push at vertex u: raise unclosed out-edges from the active edge
    rightward until the excess is gone or the edges are exhausted."""
    head, cap = net[1], net[2]
    is_internal = net[4]
    out_off, out_lst = net[5], net[6]
    f, excess, act, closed = state[0], state[1], state[2], state[4]
    ctr = cnt[0]
    qb_buf, qst, in_qa, in_qb = queues[1], queues[2], queues[3], queues[4]

    end = out_off[u + 1]
    old = act[u]
    if old >= end:
        return
    delta = excess[u]
    p = old
    while delta > 0 and p < end:
        e = out_lst[p]
        if closed[e] == 1 or f[e] >= cap[e]:
            p += 1
            continue
        d = cap[e] - f[e]
        if d > delta:
            d = delta
        if _apply(e, d, PH_PUSH, net, state, cnt) < 0:
            return
        delta -= d
        w = head[e]
        if enqueue and is_internal[w] and in_qa[w] == 0 and in_qb[w] == 0 and excess[w] > 0:
            _q_push(qb_buf, qst, 2, in_qb, w)
        if f[e] == cap[e]:
            p += 1
        else:
            break
    act[u] = p
    _advance_active(u, net, state, cnt)
    q = old
    while q <= act[u] and q < end:
        _refresh(out_lst[q], net, state, cnt)
        q += 1


@jit_kernel
def _drain_new(net, state, cnt, queues):
    """Push phase: process the New queue FIFO until empty, moving vertices
    that cannot push (or keep leftover excess) into the Excess queue."""
    is_internal = net[4]
    out_off = net[5]
    excess, act = state[1], state[2]
    ctr = cnt[0]
    qa_buf, qb_buf, qst, in_qa, in_qb = queues

    while not _q_empty(qst, 2):
        u = _q_pop(qb_buf, qst, 2, in_qb)
        ctr[C_PUSHV] += 1
        if excess[u] <= 0:
            continue
        if act[u] >= out_off[u + 1]:
            if in_qa[u] == 0:
                _q_push(qa_buf, qst, 0, in_qa, u)
            continue
        _push_vertex(u, True, net, state, cnt, queues)
        if ctr[C_STATUS] != ST_OK:
            return
        if excess[u] > 0 and in_qa[u] == 0:
            _q_push(qa_buf, qst, 0, in_qa, u)


@jit_kernel
def _init_iteration(net, state, cnt, queues):
    """Initial iteration: saturate all source out-edges, then push until the
    New queue drains.  Leaves the excess queue holding the excess vertices."""
    head, cap = net[1], net[2]
    is_source, is_internal = net[3], net[4]
    out_off, out_lst = net[5], net[6]
    excess, act, crit = state[1], state[2], state[3]
    ctr = cnt[0]
    qb_buf, qst, in_qa, in_qb = queues[1], queues[2], queues[3], queues[4]

    n = out_off.shape[0] - 1
    for v in range(n):
        act[v] = out_off[v]
        crit[v] = -1
    for s in range(n):
        if is_source[s]:
            p = out_off[s]
            while p < out_off[s + 1]:
                e = out_lst[p]
                if cap[e] > 0:
                    if _apply(e, cap[e], PH_INIT, net, state, cnt) < 0:
                        return
                    w = head[e]
                    if is_internal[w] and in_qa[w] == 0 and in_qb[w] == 0 and excess[w] > 0:
                        _q_push(qb_buf, qst, 2, in_qb, w)
                p += 1
    for v in range(n):
        if is_internal[v]:
            _advance_active(v, net, state, cnt)
    _drain_new(net, state, cnt, queues)
    ctr[C_INIT_UPD] = ctr[C_UPDATES]


@jit_kernel
def _run_basic(net, state, cnt, queues):
    """Basic solver: initial iteration, then alternate balancing (FIFO from
    the excess queue) with push phases until no internal excess remains."""
    excess = state[1]
    ctr = cnt[0]
    qa_buf, qst, in_qa = queues[0], queues[2], queues[3]

    _init_iteration(net, state, cnt, queues)
    if ctr[C_STATUS] != ST_OK:
        return
    while not _q_empty(qst, 0):
        v = _q_pop(qa_buf, qst, 0, in_qa)
        if excess[v] <= 0:
            continue
        ctr[C_BAL] += 1
        _full_balance(v, True, net, state, cnt, queues)
        if ctr[C_STATUS] != ST_OK:
            return
        _drain_new(net, state, cnt, queues)
        if ctr[C_STATUS] != ST_OK:
            return


@jit_kernel
def _resume_basic(net, state, cnt, queues):
    """Basic solver loop without the initial iteration, for states
    reconstructed around an externally supplied preflow."""
    excess = state[1]
    ctr = cnt[0]
    qa_buf, qst, in_qa = queues[0], queues[2], queues[3]

    _drain_new(net, state, cnt, queues)
    if ctr[C_STATUS] != ST_OK:
        return
    while not _q_empty(qst, 0):
        v = _q_pop(qa_buf, qst, 0, in_qa)
        if excess[v] <= 0:
            continue
        ctr[C_BAL] += 1
        _full_balance(v, True, net, state, cnt, queues)
        if ctr[C_STATUS] != ST_OK:
            return
        _drain_new(net, state, cnt, queues)
        if ctr[C_STATUS] != ST_OK:
            return


@jit_kernel
def _freeze_walk(wlen, forest):
    in_tree, par_v, par_e, par_push = forest[0], forest[1], forest[2], forest[3]
    walk_v, walk_e, walk_push = forest[6], forest[7], forest[8]
    for i in range(wlen):
        v = walk_v[i]
        in_tree[v] = 1
        par_v[v] = walk_v[i + 1]
        par_e[v] = walk_e[i]
        par_push[v] = walk_push[i]


@jit_kernel
def _cancel_span(k0, k1, net, state, cnt, forest):
    """Cancel the proper cycle recorded in walk positions [k0, k1)."""
    tail, cap = net[0], net[2]
    is_internal = net[4]
    out_off, out_lst = net[5], net[6]
    f, act = state[0], state[2]
    ctr = cnt[0]
    walk_e, walk_push = forest[7], forest[8]

    delta = np.int64(2) ** 62
    for j in range(k0, k1):
        e = walk_e[j]
        r = cap[e] - f[e] if walk_push[j] == 1 else f[e]
        if r < delta:
            delta = r
    if delta <= 0:
        ctr[C_STATUS] = ST_DEGENERATE_CYCLE
        return
    for j in range(k0, k1):
        e = walk_e[j]
        d = delta if walk_push[j] == 1 else -delta
        if _apply(e, d, PH_CANCEL, net, state, cnt) < 0:
            return
    for j in range(k0, k1):
        e = walk_e[j]
        u = tail[e]
        if (walk_push[j] == 1 and f[e] == cap[e] and is_internal[u]
                and act[u] < out_off[u + 1] and out_lst[act[u]] == e):
            _advance_active(u, net, state, cnt)
        _refresh(e, net, state, cnt)


@jit_kernel
def _walk(v0, net, state, cnt, queues, forest):
    """One proper walk from excess vertex v0.

    Returns 0 when the walk froze into the forest (terminal reached or an
    existing tree grafted), 1 on an S/F/M event, 2 on a cancelled cycle.
    The walk moves the whole excess packet one edge per step; any step that
    would saturate, free, or close an edge ends the big iteration.
    """
    tail, head, cap = net[0], net[1], net[2]
    is_internal = net[4]
    out_off, out_lst, in_lst = net[5], net[6], net[8]
    f, excess, act, crit = state[0], state[1], state[2], state[3]
    ctr = cnt[0]
    in_tree = forest[0]
    stamp, wpos = forest[4], forest[5]
    walk_v, walk_e, walk_push = forest[6], forest[7], forest[8]

    ctr[C_WALKID] += 1
    wid = ctr[C_WALKID]
    wlen = 0
    cur = v0
    while True:
        stamp[cur] = wid
        wpos[cur] = wlen
        walk_v[wlen] = cur
        if act[cur] < out_off[cur + 1]:
            # push step along the active edge
            e = out_lst[act[cur]]
            w = head[e]
            delta = excess[cur]
            d = cap[e] - f[e]
            if d > delta:
                d = delta
            if _apply(e, d, PH_PUSH, net, state, cnt) < 0:
                return 1
            sat = f[e] == cap[e]
            if sat:
                _advance_active(cur, net, state, cnt)
            else:
                _refresh(e, net, state, cnt)
            walk_e[wlen] = e
            walk_push[wlen] = 1
            wlen += 1
            if sat:
                return 1
            if not is_internal[w] or in_tree[w] == 1:
                walk_v[wlen] = w
                _freeze_walk(wlen, forest)
                return 0
            if stamp[w] == wid:
                _cancel_span(wpos[w], wlen, net, state, cnt, forest)
                return 2
            cur = w
        else:
            cp = crit[cur]
            if cp >= 0 and f[in_lst[cp]] > 0:
                # balance step along the standing critical edge
                e = in_lst[cp]
                u = tail[e]
                delta = excess[cur]
                d = f[e]
                if d > delta:
                    d = delta
                if _apply(e, -d, PH_BAL, net, state, cnt) < 0:
                    return 1
                _refresh(e, net, state, cnt)
                walk_e[wlen] = e
                walk_push[wlen] = 0
                wlen += 1
                if f[e] == 0:
                    return 1
                if not is_internal[u] or in_tree[u] == 1:
                    walk_v[wlen] = u
                    _freeze_walk(wlen, forest)
                    return 0
                if stamp[u] == wid:
                    _cancel_span(wpos[u], wlen, net, state, cnt, forest)
                    return 2
                cur = u
            else:
                # no reusable critical edge: one full basic balancing,
                # which closes edges and changes Gamma (M event)
                upd0 = ctr[C_UPDATES]
                ctr[C_FALLBACK] += 1
                _full_balance(cur, False, net, state, cnt, queues)
                ctr[C_FALLBACK_UPD] += ctr[C_UPDATES] - upd0
                return 1


@jit_kernel
def _drain_forest(net, state, cnt, forest):
    """Move all excess concentrated in the forest toward the tree roots,
    processing vertices by decreasing depth (topological toward the root).
    Returns 1 if an intermediate edge saturated or freed, else 0."""
    cap = net[2]
    out_off, out_lst, in_lst = net[5], net[6], net[8]
    f, excess, act, crit, closed = state[0], state[1], state[2], state[3], state[4]
    ctr = cnt[0]
    in_tree, par_v, par_e, par_push = forest[0], forest[1], forest[2], forest[3]
    depth, order, stack, bucket = forest[9], forest[10], forest[11], forest[12]

    n = out_off.shape[0] - 1
    for v in range(n):
        depth[v] = -1
    for v in range(n):
        if in_tree[v] == 1 and depth[v] < 0:
            sl = 0
            x = v
            while in_tree[x] == 1 and depth[x] < 0:
                stack[sl] = x
                sl += 1
                x = par_v[x]
            base = depth[x] if in_tree[x] == 1 else 0
            while sl > 0:
                sl -= 1
                base += 1
                depth[stack[sl]] = base

    # counting sort, deepest first
    for d in range(n + 2):
        bucket[d] = 0
    total = 0
    for v in range(n):
        if in_tree[v] == 1:
            bucket[depth[v]] += 1
            total += 1
    acc = 0
    for d in range(n + 1, -1, -1):
        c = bucket[d]
        bucket[d] = acc
        acc += c
    for v in range(n):
        if in_tree[v] == 1:
            order[bucket[depth[v]]] = v
            bucket[depth[v]] += 1

    for i in range(total):
        u = order[i]
        a = excess[u]
        if a <= 0:
            continue
        e = par_e[u]
        if par_push[u] == 1:
            if not (act[u] < out_off[u + 1] and out_lst[act[u]] == e and closed[e] == 0):
                ctr[C_STATUS] = ST_FOREST_CORRUPT
                return 1
            d = cap[e] - f[e]
            if d > a:
                d = a
            if _apply(e, d, PH_DRAIN, net, state, cnt) < 0:
                return 1
            if f[e] == cap[e]:
                _advance_active(u, net, state, cnt)
                return 1
            _refresh(e, net, state, cnt)
        else:
            if not (crit[u] >= 0 and in_lst[crit[u]] == e):
                ctr[C_STATUS] = ST_FOREST_CORRUPT
                return 1
            d = f[e]
            if d > a:
                d = a
            if d <= 0:
                ctr[C_STATUS] = ST_FOREST_CORRUPT
                return 1
            if _apply(e, -d, PH_DRAIN, net, state, cnt) < 0:
                return 1
            _refresh(e, net, state, cnt)
            if f[e] == 0:
                return 1
    return 0


@jit_kernel
def _big_iteration(net, state, cnt, queues, forest):
    """One big iteration: walks from excess vertices until every packet is
    frozen into the forest, then a drain; any S/F/M event ends it early.
    Returns the OUT_* outcome code."""
    is_internal = net[4]
    out_off = net[5]
    excess = state[1]
    ctr, big_upd = cnt[0], cnt[5]
    qa_buf, qst, in_qa = queues[0], queues[2], queues[3]
    in_tree = forest[0]

    n = out_off.shape[0] - 1
    has_excess = False
    for v in range(n):
        if is_internal[v] and excess[v] > 0:
            has_excess = True
            break
    if not has_excess:
        return OUT_SOLVED

    # make the pool authoritative, reset the forest
    for v in range(n):
        in_tree[v] = 0
        if is_internal[v] and excess[v] > 0 and in_qa[v] == 0:
            _q_push(qa_buf, qst, 0, in_qa, v)

    ctr[C_BIG] += 1
    upd0 = ctr[C_UPDATES]
    outcome = -1
    while outcome < 0:
        v0 = np.int64(-1)
        while not _q_empty(qst, 0):
            cand = _q_pop(qa_buf, qst, 0, in_qa)
            if in_tree[cand] == 0 and excess[cand] > 0 and is_internal[cand]:
                v0 = cand
                break
        if v0 >= 0:
            r = _walk(v0, net, state, cnt, queues, forest)
            if ctr[C_STATUS] != ST_OK:
                outcome = OUT_EVENT
            elif r == 1:
                outcome = OUT_EVENT
            elif r == 2:
                outcome = OUT_CYCLE
        else:
            r = _drain_forest(net, state, cnt, forest)
            outcome = OUT_EVENT if r == 1 else OUT_DRAINED

    du = ctr[C_UPDATES] - upd0
    if du > ctr[C_MAXBIG]:
        ctr[C_MAXBIG] = du
    idx = ctr[C_BIG] - 1
    if idx < big_upd.shape[0]:
        big_upd[idx] = du
    elif ctr[C_STATUS] == ST_OK:
        ctr[C_STATUS] = ST_GUARD
    # re-pool whatever excess remains for the next big iteration
    for v in range(n):
        if is_internal[v] and excess[v] > 0 and in_qa[v] == 0:
            _q_push(qa_buf, qst, 0, in_qa, v)
    return outcome


@jit_kernel
def _run_fast(net, state, cnt, queues, forest):
    """Fast solver: initial iteration, then big iterations until solved."""
    ctr = cnt[0]
    _init_iteration(net, state, cnt, queues)
    if ctr[C_STATUS] != ST_OK:
        return
    while ctr[C_STATUS] == ST_OK:
        oc = _big_iteration(net, state, cnt, queues, forest)
        if oc == OUT_SOLVED:
            break
