"""Compiled kernels for the long step chains of the eating construction.

The kernels only ever see the tree ``H[U + t]`` through parent pointers.
During a leaf absorption every step set ``S`` is a tree path ending at the
new vertex ``t``.  All other edges of ``H`` inside ``S`` belong to
``MST(G[U])``, so every chord of ``S`` not touching ``t`` is the heaviest
edge of a cycle closed by the path and cannot enter ``MST(G[S])``.  The
local MST is therefore computed over the path edges plus the edges from
``t``, and only the parent pointers of ``S`` change.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _lin(u, v):
    if u > v:
        u, v = v, u
    return (v - 1) * (v - 2) // 2 + (u - 1)


@njit(cache=True)
def _less(wa, ia, wb, ib):
    return wa < wb or (wa == wb and ia < ib)


@njit(cache=True)
def _find(uf, x):
    root = x
    while uf[root] != root:
        root = uf[root]
    while uf[x] != root:
        nxt = uf[x]
        uf[x] = root
        x = nxt
    return root


@njit(cache=True)
def eat_leaves(Wm, parent0, active0, root0, order, attach, record, nearest):
    """Absorb ``order[s]`` (a leaf hanging off ``attach[s]``) one at a time.

    ``parent0`` encodes ``H[U0]`` rooted at ``root0``.  Targets are visited
    by increasing label, or with ``nearest`` by increasing weighted distance
    from the attachment vertex in ``H[U]`` (label breaks ties).  Returns step
    weights, the flattened step sets with their offsets (empty unless
    ``record``), and the final parent array and active mask.
    """
    n = Wm.shape[0] - 1
    parent = parent0.copy()
    active = active0.copy()
    size = 0
    for v in range(1, n + 1):
        if active[v]:
            size += 1
    total = 0
    for s in range(order.shape[0]):
        total += size + s
    weights = np.empty(total, dtype=np.float64)
    offsets = np.zeros(total + 1 if record else 1, dtype=np.int64)
    cap = 16 if not record else max(16, 4 * total)
    flat = np.empty(cap, dtype=np.int64)
    used = 0

    path = np.empty(n + 1, dtype=np.int64)
    cu = np.empty(2 * n + 2, dtype=np.int64)
    cv = np.empty(2 * n + 2, dtype=np.int64)
    cw = np.empty(2 * n + 2, dtype=np.float64)
    ci = np.empty(2 * n + 2, dtype=np.int64)
    uf = np.empty(n + 1, dtype=np.int64)
    au = np.empty(n + 1, dtype=np.int64)
    av = np.empty(n + 1, dtype=np.int64)
    deg = np.zeros(n + 2, dtype=np.int64)
    start = np.zeros(n + 2, dtype=np.int64)
    nbr = np.empty(2 * n + 2, dtype=np.int64)
    queue = np.empty(n + 1, dtype=np.int64)
    seen = np.zeros(n + 1, dtype=np.bool_)
    targets = np.empty(n + 1, dtype=np.int64)
    tdist = np.empty(n + 1, dtype=np.float64)
    gdist = np.full(n + 1, -1.0)
    gdeg = np.zeros(n + 2, dtype=np.int64)
    gstart = np.zeros(n + 2, dtype=np.int64)
    gnbr = np.empty(2 * n + 2, dtype=np.int64)

    step = 0
    for s in range(order.shape[0]):
        t = order[s]
        a = attach[s]
        # re-root the tree at a, then hang it below t
        prev = 0
        x = a
        while x != 0:
            nxt = parent[x]
            parent[x] = prev
            prev = x
            x = nxt
        nt = 0
        for i in range(1, n + 1):
            if active[i]:
                targets[nt] = i
                nt += 1
        if nearest and nt > 1:
            # weighted distances from a in H[U], before t is attached
            for v in range(n + 2):
                gdeg[v] = 0
            for q in range(nt):
                v = targets[q]
                if parent[v] != 0:
                    gdeg[v] += 1
                    gdeg[parent[v]] += 1
            gstart[0] = 0
            for v in range(n + 1):
                gstart[v + 1] = gstart[v] + gdeg[v]
                gdeg[v] = 0
            for q in range(nt):
                v = targets[q]
                p = parent[v]
                if p != 0:
                    gnbr[gstart[v] + gdeg[v]] = p
                    gdeg[v] += 1
                    gnbr[gstart[p] + gdeg[p]] = v
                    gdeg[p] += 1
            for q in range(nt):
                gdist[targets[q]] = -1.0
            gdist[a] = 0.0
            queue[0] = a
            top = 1
            while top > 0:
                top -= 1
                y = queue[top]
                for p in range(gstart[y], gstart[y + 1]):
                    z = gnbr[p]
                    if gdist[z] < 0:
                        gdist[z] = gdist[y] + Wm[y, z]
                        queue[top] = z
                        top += 1
            for q in range(nt):
                tdist[q] = gdist[targets[q]]
            perm = np.argsort(tdist[:nt], kind="mergesort")
            sorted_targets = targets[:nt][perm]
            targets[:nt] = sorted_targets
        parent[a] = t
        parent[t] = 0
        active[t] = True
        for q in range(nt):
            i = targets[q]
            k = 0
            x = i
            while x != 0:
                path[k] = x
                k += 1
                x = parent[x]
            wsum = 0.0
            for j in range(k - 1):
                wsum += Wm[path[j], path[j + 1]]
            weights[step] = wsum
            if record:
                while used + k > flat.shape[0]:
                    grown = np.empty(2 * flat.shape[0], dtype=np.int64)
                    grown[:used] = flat[:used]
                    flat = grown
                for j in range(k):
                    flat[used + j] = path[j]
                used += k
                offsets[step + 1] = used
            step += 1
            if k <= 2:
                continue
            # candidate edges in local indices; t is local k-1
            m = 0
            for j in range(k - 1):
                cu[m] = j
                cv[m] = j + 1
                cw[m] = Wm[path[j], path[j + 1]]
                ci[m] = _lin(path[j], path[j + 1])
                m += 1
            for j in range(k - 2):
                cu[m] = j
                cv[m] = k - 1
                cw[m] = Wm[path[j], t]
                ci[m] = _lin(path[j], t)
                m += 1
            for p in range(1, m):
                xu = cu[p]
                xv = cv[p]
                xw = cw[p]
                xi = ci[p]
                q = p - 1
                while q >= 0 and _less(xw, xi, cw[q], ci[q]):
                    cu[q + 1] = cu[q]
                    cv[q + 1] = cv[q]
                    cw[q + 1] = cw[q]
                    ci[q + 1] = ci[q]
                    q -= 1
                cu[q + 1] = xu
                cv[q + 1] = xv
                cw[q + 1] = xw
                ci[q + 1] = xi
            for j in range(k):
                uf[j] = j
            na = 0
            for p in range(m):
                ru = _find(uf, cu[p])
                rv = _find(uf, cv[p])
                if ru != rv:
                    uf[ru] = rv
                    au[na] = cu[p]
                    av[na] = cv[p]
                    na += 1
                    if na == k - 1:
                        break
            # re-derive parents of the path vertices from the new local tree
            for j in range(k + 1):
                deg[j] = 0
            for p in range(na):
                deg[au[p]] += 1
                deg[av[p]] += 1
            start[0] = 0
            for j in range(k):
                start[j + 1] = start[j] + deg[j]
                deg[j] = 0
            for p in range(na):
                nbr[start[au[p]] + deg[au[p]]] = av[p]
                deg[au[p]] += 1
                nbr[start[av[p]] + deg[av[p]]] = au[p]
                deg[av[p]] += 1
            for j in range(k):
                seen[j] = False
            head = 0
            tail = 1
            queue[0] = k - 1
            seen[k - 1] = True
            while head < tail:
                y = queue[head]
                head += 1
                for p in range(start[y], start[y + 1]):
                    z = nbr[p]
                    if not seen[z]:
                        seen[z] = True
                        parent[path[z]] = path[y]
                        queue[tail] = z
                        tail += 1
    return weights, flat[:used], offsets, parent, active


@njit(cache=True)
def tree_all_pairs(n, eu, ev, Wm):
    """Weighted and hop distances between all vertices of a forest."""
    deg = np.zeros(n + 2, dtype=np.int64)
    for p in range(eu.shape[0]):
        deg[eu[p]] += 1
        deg[ev[p]] += 1
    start = np.zeros(n + 2, dtype=np.int64)
    for v in range(n + 1):
        start[v + 1] = start[v] + deg[v]
    fill = np.zeros(n + 1, dtype=np.int64)
    nbr = np.empty(2 * eu.shape[0] + 1, dtype=np.int64)
    for p in range(eu.shape[0]):
        a = eu[p]
        b = ev[p]
        nbr[start[a] + fill[a]] = b
        fill[a] += 1
        nbr[start[b] + fill[b]] = a
        fill[b] += 1
    dist = np.full((n + 1, n + 1), np.inf)
    hops = np.full((n + 1, n + 1), -1, dtype=np.int64)
    stack = np.empty(n + 1, dtype=np.int64)
    for s in range(1, n + 1):
        if deg[s] == 0:
            continue
        dist[s, s] = 0.0
        hops[s, s] = 0
        top = 1
        stack[0] = s
        while top > 0:
            top -= 1
            x = stack[top]
            for p in range(start[x], start[x + 1]):
                y = nbr[p]
                if hops[s, y] < 0:
                    hops[s, y] = hops[s, x] + 1
                    dist[s, y] = dist[s, x] + Wm[x, y]
                    stack[top] = y
                    top += 1
    return dist, hops


def parents_from_edges(n: int, pairs, root: int) -> tuple[np.ndarray, np.ndarray]:
    """Parent pointers and active mask of the tree spanned by ``pairs`` rooted at ``root``."""
    adj: dict[int, list[int]] = {root: []}
    for u, v in pairs:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    parent = np.zeros(n + 1, dtype=np.int64)
    active = np.zeros(n + 1, dtype=np.bool_)
    active[root] = True
    stack = [root]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not active[y]:
                active[y] = True
                parent[y] = x
                stack.append(y)
    return parent, active


def edges_from_parents(parent: np.ndarray, active: np.ndarray) -> list[tuple[int, int]]:
    vs = np.flatnonzero(active & (parent > 0))
    ps = parent[vs]
    return [(int(min(a, b)), int(max(a, b))) for a, b in zip(vs.tolist(), ps.tolist())]


@njit(cache=True)
def _kruskal_subset(Wm, us, vs, m, keep_u, keep_v, uf):
    """Kruskal over the first ``m`` candidate pairs; accepted pairs go to ``keep_*``."""
    w = np.empty(m, dtype=np.float64)
    idx = np.empty(m, dtype=np.int64)
    for p in range(m):
        w[p] = Wm[us[p], vs[p]]
        idx[p] = _lin(us[p], vs[p])
    o1 = np.argsort(idx)
    o2 = np.argsort(w[o1], kind="mergesort")
    na = 0
    for q in range(m):
        p = o1[o2[q]]
        ru = _find(uf, us[p])
        rv = _find(uf, vs[p])
        if ru != rv:
            uf[ru] = rv
            keep_u[na] = us[p]
            keep_v[na] = vs[p]
            na += 1
    return na


@njit(cache=True)
def _tree_wdiam(Wm, n, tu, tv, m, first):
    if m == 0:
        return 0.0
    deg = np.zeros(n + 2, dtype=np.int64)
    for p in range(m):
        deg[tu[p]] += 1
        deg[tv[p]] += 1
    start = np.zeros(n + 2, dtype=np.int64)
    for v in range(n + 1):
        start[v + 1] = start[v] + deg[v]
    fill = np.zeros(n + 1, dtype=np.int64)
    nbr = np.empty(2 * m, dtype=np.int64)
    for p in range(m):
        nbr[start[tu[p]] + fill[tu[p]]] = tv[p]
        fill[tu[p]] += 1
        nbr[start[tv[p]] + fill[tv[p]]] = tu[p]
        fill[tv[p]] += 1
    dist = np.full(n + 1, -1.0)
    stack = np.empty(n + 1, dtype=np.int64)
    best = 0.0
    src = first
    for sweep in range(2):
        for v in range(n + 1):
            dist[v] = -1.0
        dist[src] = 0.0
        stack[0] = src
        top = 1
        far = src
        best = 0.0
        while top > 0:
            top -= 1
            x = stack[top]
            if dist[x] > best:
                best = dist[x]
                far = x
            for p in range(start[x], start[x + 1]):
                y = nbr[p]
                if dist[y] < 0:
                    dist[y] = dist[x] + Wm[x, y]
                    stack[top] = y
                    top += 1
        src = far
    return best


@njit(cache=True)
def incremental_mst_wdiam(Wm, U0, incs):
    """``wdiam(MST(G[U_i]))`` for ``U_0 = U0`` and ``U_{i+1} = U_i + incs[i]``.

    Adding a vertex only needs the old tree plus the new vertex's edges.
    """
    n = Wm.shape[0] - 1
    total = U0.shape[0] + incs.shape[0]
    out = np.empty(incs.shape[0] + 1, dtype=np.float64)
    m0 = U0.shape[0]
    cap = max(m0 * (m0 - 1) // 2, 2 * total)
    us = np.empty(cap, dtype=np.int64)
    vs = np.empty(cap, dtype=np.int64)
    tu = np.empty(total, dtype=np.int64)
    tv = np.empty(total, dtype=np.int64)
    uf = np.empty(n + 1, dtype=np.int64)
    members = np.empty(total, dtype=np.int64)
    m = 0
    for a in range(m0):
        members[a] = U0[a]
        for b in range(a + 1, m0):
            us[m] = U0[a]
            vs[m] = U0[b]
            m += 1
    for v in range(n + 1):
        uf[v] = v
    nt = _kruskal_subset(Wm, us, vs, m, tu, tv, uf)
    out[0] = _tree_wdiam(Wm, n, tu, tv, nt, U0[0])
    size = m0
    for s in range(incs.shape[0]):
        t = incs[s]
        m = 0
        for p in range(nt):
            us[m] = tu[p]
            vs[m] = tv[p]
            m += 1
        for a in range(size):
            us[m] = members[a]
            vs[m] = t
            m += 1
        members[size] = t
        size += 1
        for a in range(size):
            uf[members[a]] = members[a]
        nt = _kruskal_subset(Wm, us, vs, m, tu, tv, uf)
        out[s + 1] = _tree_wdiam(Wm, n, tu, tv, nt, U0[0])
    return out
