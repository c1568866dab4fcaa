"""Network-simplex transport solver on a dense bipartite cost matrix.

Solves min <C, X> subject to row sums a, column sums b, X >= 0, for balanced
positive a, b and arbitrary nonnegative float costs.  This is a primal
network simplex specialized to the uncapacitated transportation problem:

* the arc set is the implicit complete bipartite graph (arc id = i*t + j),
  so no arc arrays are materialized; only the spanning-tree basis is stored,
  one record per node (parent, orientation, flow and cost of the parent arc);
* the initial basis is a star through an artificial root node at a cost
  exceeding any shortest real path, which makes the start strongly feasible;
* entering arcs are found by Dantzig's rule inside sqrt(e)-sized blocks with
  Bland's rule across blocks; the leaving arc is the last blocking arc in
  cycle direction, which preserves strong feasibility and rules out cycling;
* the depth-first thread (next/prev/last/size) follows Kiraly-Kovacs, and
  potentials are patched per pivot on the re-hung subtree only.

Float costs drift potentials by rounding over many pivots; the entering
tolerance stays well above that drift, and the caller certifies the final
flow against the returned potentials via weak duality.
"""

import numpy as np
from numba import njit

_OK = 0
_INFEASIBLE = 1
_ITER_LIMIT = 2


@njit(cache=True)
def solve_dense(C, a, b, stop_mass, max_pivots):
    """Return (rows, cols, flows, potentials, status) for the transportation
    problem; potentials satisfy C[i,j] - pi[i] + pi[s+j] >= -eps at optimum."""
    s, t = C.shape
    root = s + t
    nn = s + t + 1
    e = s * t

    parent = np.empty(nn, np.int64)
    dirn = np.empty(nn, np.int64)  # +1: parent arc points child->parent
    flow = np.zeros(nn)
    acost = np.zeros(nn)
    size = np.ones(nn, np.int64)
    nxt = np.empty(nn, np.int64)
    prv = np.empty(nn, np.int64)
    last = np.empty(nn, np.int64)
    pi = np.empty(nn)

    cmax = 0.0
    for i in range(s):
        for j in range(t):
            if C[i, j] > cmax:
                cmax = C[i, j]
    big = 2.0 * cmax + 1.0
    eps = 1e-12 * (1.0 + cmax)

    # Star basis: every source ships its supply to the root, the root ships
    # every demand onward.  rc == 0 on the star arcs fixes the potentials.
    for v in range(s):
        parent[v] = root
        dirn[v] = 1
        flow[v] = a[v]
        acost[v] = big
        pi[v] = big
    for j in range(t):
        v = s + j
        parent[v] = root
        dirn[v] = -1
        flow[v] = b[j]
        acost[v] = big
        pi[v] = -big
    parent[root] = -1
    dirn[root] = 0
    pi[root] = 0.0
    size[root] = nn
    for v in range(nn - 1):
        nxt[v] = v + 1
        prv[v] = v - 1
        last[v] = v
    nxt[root] = 0
    nxt[nn - 2] = root
    prv[0] = root
    prv[root] = nn - 2
    last[root] = nn - 2

    # scratch arrays for cycle tracing
    pside = np.empty(nn, np.int64)  # child nodes of arcs on the p-side path
    qside = np.empty(nn, np.int64)

    block = int(np.ceil(np.sqrt(e)))
    nblocks = (e + block - 1) // block
    scan_from = 0
    empty_blocks = 0
    pivots = 0

    while empty_blocks < nblocks:
        # ---- entering arc: best reduced cost within the next block
        best_rc = -eps
        enter_i = -1
        enter_j = -1
        k = scan_from
        ii = k // t
        jj = k - ii * t
        for _ in range(block):
            rc = C[ii, jj] - pi[ii] + pi[s + jj]
            if rc < best_rc:
                w = s + jj
                # skip the (rare) tree arc surfaced by potential drift
                if not (parent[ii] == w and dirn[ii] == 1) and not (
                    parent[w] == ii and dirn[w] == -1
                ):
                    best_rc = rc
                    enter_i = ii
                    enter_j = jj
            k += 1
            jj += 1
            if jj == t:
                jj = 0
                ii += 1
                if ii == s:
                    ii = 0
                    k = 0
        scan_from = k
        if enter_i < 0:
            empty_blocks += 1
            continue
        empty_blocks = 0
        pivots += 1
        if pivots > max_pivots:
            rows, cols, flows = _extract(parent, dirn, flow, s, t)
            return rows, cols, flows, pi, _ITER_LIMIT

        p = enter_i
        q = s + enter_j

        # ---- apex (lowest common ancestor) via subtree sizes
        x = p
        y = q
        sx = size[x]
        sy = size[y]
        while True:
            while sx < sy:
                x = parent[x]
                sx = size[x]
            while sx > sy:
                y = parent[y]
                sy = size[y]
            if sx == sy:
                if x != y:
                    x = parent[x]
                    sx = size[x]
                    y = parent[y]
                    sy = size[y]
                else:
                    break
        apex = x

        # ---- collect the cycle and the bottleneck
        np_len = 0
        v = p
        while v != apex:
            pside[np_len] = v
            np_len += 1
            v = parent[v]
        nq_len = 0
        v = q
        while v != apex:
            qside[nq_len] = v
            nq_len += 1
            v = parent[v]

        # cycle order: apex -> p (downward), entering arc, q -> apex (upward);
        # ties on the bottleneck pick the last arc in cycle order, which keeps
        # the basis strongly feasible.
        delta = np.inf
        leave = -1  # index: 0..np_len-1 on p side, np_len+1+idx on q side
        for z in range(np_len - 1, -1, -1):
            v = pside[z]
            if dirn[v] == 1:  # arc points up, cycle goes down: opposing
                if flow[v] <= delta:
                    delta = flow[v]
                    leave = np_len - 1 - z
        for z in range(nq_len):
            v = qside[z]
            if dirn[v] == -1:  # arc points down, cycle goes up: opposing
                if flow[v] <= delta:
                    delta = flow[v]
                    leave = np_len + 1 + z
        if leave < 0:
            rows, cols, flows = _extract(parent, dirn, flow, s, t)
            return rows, cols, flows, pi, _INFEASIBLE

        # ---- augment around the cycle
        if delta > 0.0:
            for z in range(np_len):
                v = pside[z]
                if dirn[v] == 1:
                    flow[v] -= delta
                else:
                    flow[v] += delta
            for z in range(nq_len):
                v = qside[z]
                if dirn[v] == 1:
                    flow[v] += delta
                else:
                    flow[v] -= delta

        # ---- basis exchange
        if leave < np_len:
            tv = pside[np_len - 1 - leave]
            x_in = p
            y_out = q
        else:
            tv = qside[leave - np_len - 1]
            x_in = q
            y_out = p
        su = parent[tv]

        # remove (su, tv): detach the subtree rooted at tv
        size_t = size[tv]
        prev_t = prv[tv]
        last_t = last[tv]
        next_last_t = nxt[last_t]
        parent[tv] = -1
        nxt[prev_t] = next_last_t
        prv[next_last_t] = prev_t
        nxt[last_t] = tv
        prv[tv] = last_t
        w = su
        while w != -1:
            size[w] -= size_t
            if last[w] == last_t:
                last[w] = prev_t
            w = parent[w]

        # re-root the detached subtree at x_in (reverse the parent chain)
        depth = 0
        v = x_in
        while v != -1:
            pside[depth] = v  # reuse scratch for the ancestor list
            depth += 1
            v = parent[v]
        for z in range(depth - 1, 0, -1):
            pp = pside[z]
            qq = pside[z - 1]
            size_p = size[pp]
            last_p = last[pp]
            prev_q = prv[qq]
            last_q = last[qq]
            next_last_q = nxt[last_q]
            parent[pp] = qq
            parent[qq] = -1
            dirn[pp] = -dirn[qq]
            flow[pp] = flow[qq]
            acost[pp] = acost[qq]
            size[pp] = size_p - size[qq]
            size[qq] = size_p
            nxt[prev_q] = next_last_q
            prv[next_last_q] = prev_q
            nxt[last_q] = qq
            prv[qq] = last_q
            if last_p == last_q:
                last[pp] = prev_q
                last_p = prev_q
            prv[pp] = last_q
            nxt[last_q] = pp
            nxt[last_p] = qq
            prv[qq] = last_p
            last[qq] = last_p

        # attach the subtree under y_out with the entering arc
        parent[x_in] = y_out
        dirn[x_in] = 1 if x_in == p else -1
        flow[x_in] = delta
        acost[x_in] = C[enter_i, enter_j]
        last_p = last[y_out]
        next_last_p = nxt[last_p]
        size_q = size[x_in]
        last_q = last[x_in]
        nxt[last_p] = x_in
        prv[x_in] = last_p
        prv[next_last_p] = last_q
        nxt[last_q] = next_last_p
        w = y_out
        while w != -1:
            size[w] += size_q
            if last[w] == last_p:
                last[w] = last_q
            w = parent[w]

        # patch potentials on the re-hung subtree so the entering arc is tight
        if x_in == q:
            d = pi[y_out] - C[enter_i, enter_j] - pi[x_in]
        else:
            d = pi[y_out] + C[enter_i, enter_j] - pi[x_in]
        v = x_in
        pi[v] += d
        stop = last[x_in]
        while v != stop:
            v = nxt[v]
            pi[v] += d

    # feasibility: artificial arcs must end up empty
    for v in range(nn - 1):
        if parent[v] == root and flow[v] > stop_mass:
            rows, cols, flows = _extract(parent, dirn, flow, s, t)
            return rows, cols, flows, pi, _INFEASIBLE

    rows, cols, flows = _extract(parent, dirn, flow, s, t)
    return rows, cols, flows, pi, _OK


@njit(cache=True)
def _extract(parent, dirn, flow, s, t):
    nn = s + t + 1
    count = 0
    for v in range(nn - 1):
        u = parent[v]
        if u != nn - 1 and u >= 0 and flow[v] > 0.0:
            count += 1
    rows = np.empty(count, np.int64)
    cols = np.empty(count, np.int64)
    flows = np.empty(count)
    k = 0
    for v in range(nn - 1):
        u = parent[v]
        if u != nn - 1 and u >= 0 and flow[v] > 0.0:
            if v < s:
                rows[k] = v
                cols[k] = u - s
            else:
                rows[k] = u
                cols[k] = v - s
            flows[k] = flow[v]
            k += 1
    return rows, cols, flows
