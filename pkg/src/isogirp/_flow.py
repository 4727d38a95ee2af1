"""Max-flow/min-cut kernels for the closure (project-selection) problem.

Arcs are stored in pairs: arc ``2k`` and its reverse ``2k+1`` (so the reverse
of arc ``a`` is ``a ^ 1``).  ``adj_start``/``adj_arc`` give, for each node,
the arc ids leaving it; ``arc_to[a]`` is the head of arc ``a`` and
``arc_cap[a]`` its residual capacity, mutated in place by the flow solver.
An arc is residual when its capacity exceeds ``eps``.

All kernels are numba-compiled unless ISO_GIRP_NUMBA disables it; the Python
bodies are identical either way.
"""

import numpy as np

from ._accel import njit_or_python

EPS_FLOW = 1e-10


@njit_or_python
def dinic(adj_start, adj_arc, arc_to, arc_cap, s, t, eps):
    """Maximum s-t flow; arc_cap is updated to the residual capacities."""
    n = adj_start.shape[0] - 1
    level = np.empty(n, dtype=np.int64)
    it = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    path = np.empty(n + 1, dtype=np.int64)
    total = 0.0
    while True:
        for v in range(n):
            level[v] = -1
        level[s] = 0
        queue[0] = s
        qh, qt = 0, 1
        while qh < qt:
            v = queue[qh]
            qh += 1
            for k in range(adj_start[v], adj_start[v + 1]):
                a = adj_arc[k]
                if arc_cap[a] > eps:
                    u = arc_to[a]
                    if level[u] < 0:
                        level[u] = level[v] + 1
                        queue[qt] = u
                        qt += 1
        if level[t] < 0:
            return total
        for v in range(n):
            it[v] = adj_start[v]
        depth = 0
        v = s
        while True:
            if v == t:
                bottleneck = np.inf
                for d in range(depth):
                    c = arc_cap[path[d]]
                    if c < bottleneck:
                        bottleneck = c
                for d in range(depth):
                    a = path[d]
                    arc_cap[a] -= bottleneck
                    arc_cap[a ^ 1] += bottleneck
                total += bottleneck
                # retreat to the first saturated arc on the path
                nd = 0
                while nd < depth and arc_cap[path[nd]] > eps:
                    nd += 1
                depth = nd
                v = s if depth == 0 else arc_to[path[depth - 1]]
                continue
            advanced = False
            while it[v] < adj_start[v + 1]:
                a = adj_arc[it[v]]
                u = arc_to[a]
                if arc_cap[a] > eps and level[u] == level[v] + 1:
                    path[depth] = a
                    depth += 1
                    v = u
                    advanced = True
                    break
                it[v] += 1
            if not advanced:
                if v == s:
                    break
                level[v] = -1  # dead end in this phase
                depth -= 1
                v = arc_to[path[depth] ^ 1]
                it[v] += 1


@njit_or_python
def reach_from(adj_start, adj_arc, arc_to, arc_cap, start, eps):
    """Nodes reachable from ``start`` along residual arcs."""
    n = adj_start.shape[0] - 1
    seen = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    seen[start] = True
    queue[0] = start
    qh, qt = 0, 1
    while qh < qt:
        v = queue[qh]
        qh += 1
        for k in range(adj_start[v], adj_start[v + 1]):
            a = adj_arc[k]
            if arc_cap[a] > eps:
                u = arc_to[a]
                if not seen[u]:
                    seen[u] = True
                    queue[qt] = u
                    qt += 1
    return seen


@njit_or_python
def reach_to(adj_start, adj_arc, arc_to, arc_cap, target, eps):
    """Nodes with a residual path into ``target``.

    Uses the pairing: the residual arc u -> v is the pair of some arc v -> u
    in v's adjacency, so incoming residual arcs of v are found locally.
    """
    n = adj_start.shape[0] - 1
    seen = np.zeros(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    seen[target] = True
    queue[0] = target
    qh, qt = 0, 1
    while qh < qt:
        v = queue[qh]
        qh += 1
        for k in range(adj_start[v], adj_start[v + 1]):
            a = adj_arc[k]
            if arc_cap[a ^ 1] > eps:
                u = arc_to[a]
                if not seen[u]:
                    seen[u] = True
                    queue[qt] = u
                    qt += 1
    return seen


@njit_or_python
def scc_free(adj_start, adj_arc, arc_to, arc_cap, free, eps):
    """Strongly connected components of the residual graph on free nodes.

    Tarjan's algorithm, iterative.  Components are numbered in completion
    order, which is reverse-topological for the condensation: every residual
    arc between components points from a higher to a lower component id.
    Returns (comp, n_comp) with comp[v] = -1 for non-free nodes.
    """
    n = adj_start.shape[0] - 1
    comp = np.full(n, -1, dtype=np.int64)
    index = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=np.bool_)
    stack = np.empty(n, dtype=np.int64)
    sp = 0
    work_v = np.empty(n + 1, dtype=np.int64)
    work_k = np.empty(n + 1, dtype=np.int64)
    counter = 0
    n_comp = 0
    for root in range(n):
        if not free[root] or index[root] >= 0:
            continue
        wp = 0
        work_v[0] = root
        work_k[0] = adj_start[root]
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        on_stack[root] = True
        while wp >= 0:
            v = work_v[wp]
            k = work_k[wp]
            if k < adj_start[v + 1]:
                work_k[wp] = k + 1
                a = adj_arc[k]
                if arc_cap[a] <= eps:
                    continue
                u = arc_to[a]
                if not free[u]:
                    continue
                if index[u] < 0:
                    index[u] = counter
                    low[u] = counter
                    counter += 1
                    stack[sp] = u
                    sp += 1
                    on_stack[u] = True
                    wp += 1
                    work_v[wp] = u
                    work_k[wp] = adj_start[u]
                elif on_stack[u]:
                    if index[u] < low[v]:
                        low[v] = index[u]
            else:
                wp -= 1
                if wp >= 0:
                    p = work_v[wp]
                    if low[v] < low[p]:
                        low[p] = low[v]
                if low[v] == index[v]:
                    while True:
                        w = stack[sp - 1]
                        sp -= 1
                        on_stack[w] = False
                        comp[w] = n_comp
                        if w == v:
                            break
                    n_comp += 1
    return comp, n_comp


@njit_or_python
def refine_components(adj_start, adj_arc, arc_to, arc_cap, free, comp, n_comp,
                      secondary, eps, tie_tol):
    """Greedy selection of free residual components, sinks first.

    Every selection of free components that is closed under residual-graph
    successors extends the forced-in set to an optimal closure set, so the
    choice among them is free.  Components are taken in ascending id order
    (reverse topological); a component is included iff all of its free
    successors are included and its summed secondary weight is >= -tie_tol.
    Also returns the in-degree of each component in the condensation, used to
    identify source components.
    """
    n = adj_start.shape[0] - 1
    sec_sum = np.zeros(n_comp, dtype=np.float64)
    include = np.zeros(n_comp, dtype=np.bool_)
    indeg = np.zeros(n_comp, dtype=np.int64)
    size = np.zeros(n_comp, dtype=np.int64)
    for v in range(n):
        c = comp[v]
        if c >= 0:
            sec_sum[c] += secondary[v]
            size[c] += 1
    # counting sort: members[start[c]:start[c+1]] lists the nodes of comp c
    start = np.zeros(n_comp + 1, dtype=np.int64)
    for c in range(n_comp):
        start[c + 1] = start[c] + size[c]
    cursor = start[:n_comp].copy()
    members = np.empty(start[n_comp], dtype=np.int64)
    for v in range(n):
        c = comp[v]
        if c >= 0:
            members[cursor[c]] = v
            cursor[c] += 1
    for c in range(n_comp):
        ok = sec_sum[c] >= -tie_tol
        for j in range(start[c], start[c + 1]):
            v = members[j]
            for k in range(adj_start[v], adj_start[v + 1]):
                a = adj_arc[k]
                if arc_cap[a] <= eps:
                    continue
                cu = comp[arc_to[a]]
                if cu < 0 or cu == c:
                    continue
                indeg[cu] += 1
                if not include[cu]:
                    ok = False
        include[c] = ok
    return include, indeg
