"""Partial orders as DAGs: upper/lower sets, isotonicity, induced subgraphs.

Only the given edges are stored.  Upper-set and isotonicity checks over the
edge list are equivalent to checks over the transitive closure, so the closure
is never materialized.  Node ids are dense integers ``0..n-1``; external labels
are mapped at ingestion by the CLI.
"""

import numpy as np

from .errors import CycleError, DuplicatePointError, EmptySubsetError

__all__ = [
    "PartialOrderDag",
    "validate",
    "is_upper_set",
    "is_lower_set",
    "is_isotonic",
    "induced_subgraph",
    "dominance_order",
]


class PartialOrderDag:
    """Finite node set 0..n-1 with directed edges (x, y) meaning x precedes y.

    Duplicate edges are collapsed; edges are stored as an (m, 2) int64 array
    sorted lexicographically.  The instance is immutable after construction.
    """

    __slots__ = ("n", "edges", "_topo")

    def __init__(self, n, edges, _trusted=False):
        self.n = int(n)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if not _trusted and edges.shape[0] > 0:
            if edges.min() < 0 or edges.max() >= self.n:
                raise ValueError("edge endpoint outside 0..%d" % (self.n - 1))
            edges = np.unique(edges, axis=0)
        self.edges = edges
        self.edges.setflags(write=False)
        self._topo = None

    @property
    def m(self):
        return self.edges.shape[0]

    def topo_order(self):
        """A topological order of the nodes; raises CycleError if none exists."""
        if self._topo is None:
            self._topo = _kahn(self.n, self.edges)
        return self._topo

    def __repr__(self):
        return "PartialOrderDag(n=%d, m=%d)" % (self.n, self.m)


def _kahn(n, edges):
    indeg = np.bincount(edges[:, 1], minlength=n)
    succ_order = np.argsort(edges[:, 0], kind="stable")
    src_sorted = edges[succ_order, 0]
    dst_sorted = edges[succ_order, 1]
    start = np.searchsorted(src_sorted, np.arange(n + 1))
    order = np.empty(n, dtype=np.int64)
    queue = list(np.flatnonzero(indeg == 0))
    k = 0
    while queue:
        v = queue.pop()
        order[k] = v
        k += 1
        for w in dst_sorted[start[v]:start[v + 1]]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(int(w))
    if k < n:
        raise CycleError(_extract_cycle(n, src_sorted, dst_sorted, start, indeg))
    return order


def _extract_cycle(n, src_sorted, dst_sorted, start, indeg):
    # every remaining node (indeg > 0) sits on or downstream of a cycle;
    # walk within the remaining set until a node repeats
    remaining = indeg > 0
    v = int(np.flatnonzero(remaining)[0])
    seen = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        nxt = dst_sorted[start[v]:start[v + 1]]
        nxt = nxt[remaining[nxt]]
        v = int(nxt[0])
    return path[seen[v]:]


def validate(dag):
    """Check that the edges form a DAG (no self-loops, no cycles)."""
    e = dag.edges
    loops = e[:, 0] == e[:, 1]
    if loops.any():
        raise CycleError([int(e[loops][0, 0])])
    dag.topo_order()
    return True


def _as_mask(dag, subset):
    subset = np.asarray(subset)
    if subset.dtype == np.bool_:
        if subset.shape != (dag.n,):
            raise ValueError("mask length %d, expected %d" % (subset.shape[0], dag.n))
        return subset
    mask = np.zeros(dag.n, dtype=np.bool_)
    mask[subset.astype(np.int64)] = True
    return mask


def is_upper_set(dag, subset):
    """True iff membership propagates along every edge (x in S implies y in S)."""
    mask = _as_mask(dag, subset)
    if dag.m == 0:
        return True
    return not np.any(mask[dag.edges[:, 0]] & ~mask[dag.edges[:, 1]])


def is_lower_set(dag, subset):
    """True iff membership propagates against every edge (y in S implies x in S)."""
    mask = _as_mask(dag, subset)
    if dag.m == 0:
        return True
    return not np.any(mask[dag.edges[:, 1]] & ~mask[dag.edges[:, 0]])


def is_isotonic(dag, f):
    """Whether f(x) <= f(y) holds on every edge (x, y).

    Returns (ok, violations) where violations is the exhaustive (k, 2) array
    of edges at which the inequality fails.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (dag.n,):
        raise ValueError("function must assign a value to every node")
    if dag.m == 0:
        return True, np.empty((0, 2), dtype=np.int64)
    bad = f[dag.edges[:, 0]] > f[dag.edges[:, 1]]
    violations = dag.edges[bad]
    return violations.shape[0] == 0, violations


def induced_subgraph(dag, subset):
    """Restrict the order to ``subset``.

    Returns (sub, node_map): ``sub`` uses dense ids 0..k-1 and ``node_map[i]``
    is the original id of new node i, in ascending original order.
    """
    mask = _as_mask(dag, subset)
    node_map = np.flatnonzero(mask)
    if node_map.size == 0:
        raise EmptySubsetError("induced subgraph of the empty set")
    remap = np.full(dag.n, -1, dtype=np.int64)
    remap[node_map] = np.arange(node_map.size)
    keep = mask[dag.edges[:, 0]] & mask[dag.edges[:, 1]]
    sub_edges = remap[dag.edges[keep]]
    return PartialOrderDag(node_map.size, sub_edges, _trusted=True), node_map


def dominance_order(points, chunk=2048):
    """Componentwise dominance order of d-dimensional points.

    Edge (i, j) iff points[i] <= points[j] in every coordinate and i != j.
    Identical vectors are rejected with DuplicatePointError since they would
    break antisymmetry.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] < 1:
        raise ValueError("points must be an (n, d) array with d >= 1")
    n = pts.shape[0]
    srcs = []
    dsts = []
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        block = pts[lo:hi, None, :]  # (b, 1, d)
        le = np.all(block <= pts[None, :, :], axis=2)
        eq = np.all(block == pts[None, :, :], axis=2)
        dup = np.argwhere(eq)
        for bi, j in dup:
            i = lo + int(bi)
            if i < j:
                raise DuplicatePointError(i, int(j))
        ii, jj = np.nonzero(le & ~eq)
        srcs.append(ii + lo)
        dsts.append(jj)
    if srcs:
        edges = np.stack((np.concatenate(srcs), np.concatenate(dsts)), axis=1)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return PartialOrderDag(n, edges, _trusted=True)
