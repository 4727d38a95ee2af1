"""Optimal upper and lower sets for the split step, solved as closure problems.

At a level b every node x carries the subgradient interval [l_x, u_x] of its
coordinate loss, and a subset S gets the certificate interval
``sigma(S) = [-sum u_x, -sum l_x]``.  The split step needs an upper set
maximizing the lower end and a lower set maximizing node weights l_x; both are
max-weight closure problems (selecting a node forces its order successors on
the upper side, its predecessors on the lower side) and reduce to a minimum
s-t cut on a project-selection graph whose order arcs carry a capacity that
can never saturate.

After the cut the optimal selections form a lattice readable off residual
reachability: nodes reachable from s are in every optimal selection, nodes
reaching t in none, and the remaining free nodes come and go in strongly
connected residual components, any choice closed under residual successors
being optimal.  Every choice is exactly optimal, so the tie among them is
broken by context.  A subset being split came either from the upper or the
lower part of its parent's split, and its free components resolve toward
that inherited side (``tie_side='upper'`` takes the inclusion-maximal upper
set and the inclusion-minimal lower set, ``'lower'`` the reverse), keeping
nodes on the side they already occupy.  At the root there is no inherited
side and ``'auto'`` refines instead: components are swept in reverse
topological order and one is included exactly when all its free successors
are included and its summed response offset against b (sign-flipped on the
lower side) is nonnegative at tolerance, biasing the upper part toward
nodes with larger responses.
"""

from dataclasses import dataclass

import numpy as np

from ._flow import EPS_FLOW, dinic, reach_from, reach_to, refine_components, scc_free
from .errors import DomainError
from .losses import Interval

__all__ = [
    "CutWeights",
    "ClosureAnalysis",
    "PartitionResult",
    "sigma",
    "cut_weights",
    "max_closure",
    "analyze_closure",
    "find_partition",
    "partition_with_analyses",
    "shrink_full_selection",
]

# include/exclude ties on the secondary sweep are called at this tolerance
SEC_TIE_TOL = 1e-9


def sigma(loss, values, b):
    """Certificate interval -sum_x dl(g(x), b) over responses ``values``.

    The empty subset gives [0, 0].
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return Interval(0.0, 0.0)
    b = np.float64(b)
    f_lo = float(loss.grad_lo(values, b).sum())
    f_hi = float(loss.grad_hi(values, b).sum())
    return Interval(-f_hi, -f_lo)


@dataclass(frozen=True)
class CutWeights:
    """Per-node subgradient interval endpoints at a fixed level, l <= u."""

    u: np.ndarray
    l: np.ndarray


def cut_weights(loss, values, b):
    values = np.asarray(values, dtype=np.float64)
    b = np.float64(b)
    return CutWeights(u=loss.grad_hi(values, b), l=loss.grad_lo(values, b))


@dataclass(frozen=True)
class ClosureAnalysis:
    """One closure solve: the optimal-selection lattice and its refinement.

    ``minimal``/``maximal`` are the extreme optimal selections, ``selected``
    the tie-refined one, all ascending node-id arrays.  ``comp`` maps each
    free node to its residual component (-1 elsewhere); ``include`` is the
    refinement verdict and ``indeg`` the cross-arc in-degree per component.
    """

    value: float
    minimal: np.ndarray
    maximal: np.ndarray
    selected: np.ndarray
    comp: np.ndarray
    n_comp: int
    include: np.ndarray
    indeg: np.ndarray


def _closure_graph(n, edges, w, lower_side):
    """Paired-arc CSR graph for the project-selection cut; s = n, t = n + 1."""
    pos = np.flatnonzero(w > 0.0)
    neg = np.flatnonzero(w < 0.0)
    if lower_side:
        e_tail, e_head = edges[:, 1], edges[:, 0]
    else:
        e_tail, e_head = edges[:, 0], edges[:, 1]
    # strictly exceeds any possible flow, so order arcs never saturate
    inf_cap = 1.0 + float(np.abs(w).sum())
    s, t = n, n + 1
    m = pos.size + neg.size + e_tail.size
    tails = np.empty(2 * m, dtype=np.int64)
    heads = np.empty(2 * m, dtype=np.int64)
    caps = np.zeros(2 * m, dtype=np.float64)
    a = 2 * pos.size
    tails[0:a:2] = s
    heads[0:a:2] = pos
    caps[0:a:2] = w[pos]
    tails[1:a:2] = pos
    heads[1:a:2] = s
    b = a + 2 * neg.size
    tails[a:b:2] = neg
    heads[a:b:2] = t
    caps[a:b:2] = -w[neg]
    tails[a + 1:b:2] = t
    heads[a + 1:b:2] = neg
    tails[b::2] = e_tail
    heads[b::2] = e_head
    caps[b::2] = inf_cap
    tails[b + 1::2] = e_head
    heads[b + 1::2] = e_tail
    adj_arc = np.argsort(tails, kind="stable").astype(np.int64)
    adj_start = np.zeros(n + 3, dtype=np.int64)
    np.cumsum(np.bincount(tails, minlength=n + 2), out=adj_start[1:])
    return adj_start, adj_arc, heads, caps, s, t


def _is_lower_side(side):
    key = str(side).strip().lower()
    if key in ("upper", "upperset", "upper_set"):
        return False
    if key in ("lower", "lowerset", "lower_set"):
        return True
    raise ValueError("side must be 'upper' or 'lower', got %r" % (side,))


def analyze_closure(dag, w, side, secondary=None):
    """Solve one max-weight closure problem and classify every node.

    ``side`` picks the closure direction: an upper selection is closed under
    order successors, a lower one under predecessors.  ``secondary`` feeds the
    tie-refinement sweep; zeros make ``selected`` equal ``maximal``.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (dag.n,):
        raise ValueError("need one weight per node, got shape %r" % (w.shape,))
    if not np.all(np.isfinite(w)):
        raise DomainError("closure weights must be finite")
    lower_side = _is_lower_side(side)
    adj_start, adj_arc, arc_to, caps, s, t = _closure_graph(dag.n, dag.edges, w, lower_side)
    flow = dinic(adj_start, adj_arc, arc_to, caps, s, t, EPS_FLOW)
    src = reach_from(adj_start, adj_arc, arc_to, caps, s, EPS_FLOW)
    snk = reach_to(adj_start, adj_arc, arc_to, caps, t, EPS_FLOW)
    free = ~src & ~snk
    comp, n_comp = scc_free(adj_start, adj_arc, arc_to, caps, free, EPS_FLOW)
    sec = np.zeros(dag.n + 2, dtype=np.float64)
    if secondary is not None:
        sec[:dag.n] = np.asarray(secondary, dtype=np.float64)
    include, indeg = refine_components(
        adj_start, adj_arc, arc_to, caps, free, comp, n_comp, sec, EPS_FLOW, SEC_TIE_TOL
    )
    in_mask = src[:dag.n]
    free_mask = free[:dag.n]
    sel_mask = in_mask.copy()
    chosen = free_mask & (comp[:dag.n] >= 0)
    sel_mask[chosen] = sel_mask[chosen] | include[comp[:dag.n][chosen]]
    return ClosureAnalysis(
        value=float(np.maximum(w, 0.0).sum() - flow),
        minimal=np.flatnonzero(in_mask),
        maximal=np.flatnonzero(in_mask | free_mask),
        selected=np.flatnonzero(sel_mask),
        comp=comp[:dag.n].copy(),
        n_comp=int(n_comp),
        include=include,
        indeg=indeg,
    )


def max_closure(dag, w, side, extreme="maximal"):
    """Max-weight selection closed under successors (upper) or predecessors (lower).

    Among optimal selections, ``extreme`` picks the inclusion-minimal or the
    inclusion-maximal one; both are canonical, independent of the flow found.
    Returns an ascending array of node ids.
    """
    analysis = analyze_closure(dag, w, side)
    if extreme == "minimal":
        return analysis.minimal
    if extreme == "maximal":
        return analysis.maximal
    raise ValueError("extreme must be 'minimal' or 'maximal', got %r" % (extreme,))


@dataclass(frozen=True)
class PartitionResult:
    """Upper/lower witness pair at a level b, always disjoint.

    ``min_sigma_U`` is the lower certificate end summed over U, ``max_sigma_L``
    the upper end over L, and ``objective = min_sigma_U - max_sigma_L`` their
    gap, zero exactly when b is a constant fit of the subset.
    """

    U: np.ndarray
    L: np.ndarray
    min_sigma_U: float
    max_sigma_L: float
    objective: float


def partition_with_analyses(dag, values, loss, b, tie_side="auto"):
    """find_partition plus the raw closure analyses of both sides.

    ``tie_side`` names the parent-split side the subset came from ("upper" or
    "lower"), which decides where zero-marginal free components land; "auto"
    is for subsets with no parent and applies the secondary refinement.
    """
    values = np.asarray(values, dtype=np.float64)
    cw = cut_weights(loss, values, b)
    upper = analyze_closure(dag, -cw.u, "upper", secondary=values - b)
    lower = analyze_closure(dag, cw.l, "lower", secondary=b - values)
    if tie_side == "auto":
        U = upper.selected
        L = lower.selected
    elif tie_side == "upper":
        U = upper.maximal
        L = lower.minimal
    elif tie_side == "lower":
        U = upper.minimal
        L = lower.maximal
    else:
        raise ValueError("tie_side must be 'auto', 'upper' or 'lower', got %r"
                         % (tie_side,))
    n = dag.n
    u_mask = np.zeros(n, dtype=np.bool_)
    u_mask[U] = True
    # with a single-valued subdifferential the lower problem is the exact
    # complement of the upper one, so the complement of U is itself optimal;
    # taking it keeps the pair disjoint by construction.  Otherwise the
    # complement is only substituted when the refined selections overlap,
    # which preserves optimality as well.
    if np.array_equal(cw.u, cw.l) and 0 < U.size < n:
        L = np.flatnonzero(~u_mask)
    elif L.size and bool(np.any(u_mask[L])):
        L = np.flatnonzero(~u_mask)
    min_sigma_u = float(-cw.u[U].sum()) if U.size else 0.0
    max_sigma_l = float(-cw.l[L].sum()) if L.size else 0.0
    result = PartitionResult(
        U=U,
        L=L,
        min_sigma_U=min_sigma_u,
        max_sigma_L=max_sigma_l,
        objective=min_sigma_u - max_sigma_l,
    )
    return result, upper, lower


def find_partition(dag, values, loss, b, tie_side="auto"):
    """Jointly optimal (U, L) witness pair at level b.

    U maximizes the lower certificate end over upper sets, L independently
    maximizes summed l_x over lower sets, and the pair is made disjoint
    without losing optimality of either side.
    """
    return partition_with_analyses(dag, values, loss, b, tie_side=tie_side)[0]


def shrink_full_selection(analysis, n):
    """Drop one source component of the free condensation from ``maximal``.

    Used when the maximal selection covers the whole subset but a proper one
    is required.  A source component has no residual arc entering it from
    another free component, and no order arc can enter it from the forced-in
    part either, so removing it keeps the selection closed.  The source
    component containing the smallest node id is dropped, a deterministic
    choice.  Returns the reduced ascending id array, or None when there is no
    free component to drop.
    """
    if analysis.n_comp == 0:
        return None
    sources = np.flatnonzero(analysis.indeg == 0)
    if sources.size == 0:
        return None
    first = np.full(analysis.n_comp, np.iinfo(np.int64).max, dtype=np.int64)
    ids = np.flatnonzero(analysis.comp >= 0)
    np.minimum.at(first, analysis.comp[ids], ids)
    drop = sources[np.argmin(first[sources])]
    keep = np.zeros(n, dtype=np.bool_)
    keep[analysis.maximal] = True
    keep[analysis.comp == drop] = False
    return np.flatnonzero(keep)
