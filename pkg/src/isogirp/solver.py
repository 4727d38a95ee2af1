"""Recursive partitioning driver for isotonic regression on a finite order.

The modified procedure fits a constant to the current subset, asks the cut
module for an optimal upper/lower witness pair at that level, and stops when
both certificate optima vanish; otherwise it recurses on the complementary
pair, each child choosing the point of its own constant-fit interval closest
to the parent level.  The result is isotonic by construction and optimal for
the summed coordinate loss.

The original mode reproduces the older flawed scheme for comparison: every
node independently fits the upper endpoint of its constant-fit interval, no
parent coupling, and a node whose certificate optima vanish still splits when
its constant-fit interval has positive width and a proper nonempty optimal
selection exists.  Its output can violate the order, which is what the
baseline is for.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .cut import partition_with_analyses, shrink_full_selection
from .errors import DomainError, NoMinimizerError
from .fitting import closest_fit, constant_fit_interval, root_fit
from .order import induced_subgraph, is_isotonic, validate

__all__ = [
    "TOL_TERM",
    "Mode",
    "TreeNode",
    "FitResult",
    "fit",
    "truncate",
    "objective",
    "tree_to_dict",
    "tree_to_dot",
]

TOL_TERM = 1e-9


class Mode(enum.Enum):
    MODIFIED = "modified"
    ORIGINAL = "original"


@dataclass
class TreeNode:
    """One subset of the partition tree with its constant fit.

    ``subset`` holds original node ids in ascending order.  ``children`` is
    None for leaves, otherwise the pair (lower part, upper part); the upper
    part is an upper set of the induced suborder.
    """

    subset: np.ndarray
    fit_b: float
    depth: int
    children: Optional[Tuple["TreeNode", "TreeNode"]] = None

    @property
    def is_leaf(self):
        return self.children is None


@dataclass(frozen=True)
class FitResult:
    """Fitted function plus the tree that produced it.

    ``objective`` is the summed coordinate loss of ``g_hat``; ``isotonic``
    reports whether ``g_hat`` respects every order edge.  The inputs are
    carried along so the tree can be re-evaluated, e.g. by ``truncate``.
    """

    g_hat: np.ndarray
    tree: TreeNode
    mode: Mode
    objective: float
    isotonic: bool
    values: np.ndarray = field(repr=False)
    dag: object = field(repr=False)
    loss: object = field(repr=False)


def _zero_width_pair(upper_an, lower_an, n):
    """Proper nonempty split for a node whose certificate optima vanish.

    Tries the inclusion-maximal optimal upper selection first, shrinking it
    by one source component when it covers the whole subset, then mirrors to
    the lower side.  Returns (lower part, upper part) in local ids, or None
    when no proper nonempty optimal selection exists on either side.
    """
    for analysis, is_lower in ((upper_an, False), (lower_an, True)):
        sel = analysis.maximal
        if sel.size == n:
            shrunk = shrink_full_selection(analysis, n)
            sel = shrunk if shrunk is not None else np.empty(0, dtype=np.int64)
        if 0 < sel.size < n:
            mask = np.zeros(n, dtype=np.bool_)
            mask[sel] = True
            rest = np.flatnonzero(~mask)
            return (sel, rest) if is_lower else (rest, sel)
    return None


def fit(values, dag, loss, mode=Mode.MODIFIED, root="mid", max_depth=None,
        tol=TOL_TERM):
    """Isotonic regression of ``values`` over ``dag`` under ``loss``.

    Parameters
    ----------
    values : responses, one per node of ``dag``.
    dag : PartialOrderDag encoding the constraints g_hat[x] <= g_hat[y].
    loss : Loss instance giving the coordinate loss.
    mode : Mode or its string value.  MODIFIED couples each child fit to its
        parent and always returns an isotonic function; ORIGINAL reproduces
        the uncoupled baseline, whose output may violate the order.
    root : policy for picking the root fit inside its constant-fit interval
        ("mid", "lo" or "hi"); modified mode only.
    max_depth : stop a branch unconditionally at this depth (root is 0);
        None means no limit.
    tol : zero tolerance for the two certificate optima in the stop test.

    Returns
    -------
    FitResult.  ``mode=MODIFIED`` guarantees ``isotonic=True``.

    Raises
    ------
    NoMinimizerError
        when some subset's constant fit does not attain its infimum (the
        logistic loss on single-signed labels); the offending original node
        ids are on the exception.
    DomainError, CycleError
        for invalid responses or an order relation with a cycle.
    """
    mode = Mode(mode)
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (dag.n,):
        raise DomainError("expected %d responses, got shape %r"
                          % (dag.n, values.shape))
    if not np.all(np.isfinite(values)):
        raise DomainError("responses must be finite")
    loss.validate_responses(values)
    validate(dag)
    limit = math.inf if max_depth is None else int(max_depth)
    if limit < 0:
        raise ValueError("max_depth must be nonnegative")
    modified = mode is Mode.MODIFIED

    def node_fit(cf, subset, parent_b):
        if not cf.attained:
            raise NoMinimizerError(subset=subset)
        if not modified:
            return float(root_fit(cf, policy="hi"))
        if parent_b is None:
            return float(root_fit(cf, policy=root))
        return float(closest_fit(parent_b, cf))

    all_nodes = np.arange(dag.n, dtype=np.int64)
    cf0 = constant_fit_interval(values, loss)
    tree = TreeNode(subset=all_nodes, fit_b=node_fit(cf0, all_nodes, None),
                    depth=0)
    stack = [(tree, dag, values, cf0, "auto")]
    while stack:
        node, sub_dag, sub_values, cf, side = stack.pop()
        n_s = sub_dag.n
        part, upper_an, lower_an = partition_with_analyses(
            sub_dag, sub_values, loss, node.fit_b, tie_side=side)
        pair = None
        if abs(part.min_sigma_U) <= tol and abs(part.max_sigma_L) <= tol:
            # certificate optima vanish: the modified mode stops here, the
            # original one still splits a constant-fit interval of positive
            # width when a proper nonempty optimal selection exists
            if (not modified and node.depth < limit
                    and cf.interval.width > tol):
                pair = _zero_width_pair(upper_an, lower_an, n_s)
            if pair is None:
                continue
        elif node.depth >= limit:
            continue
        else:
            if 0 < part.U.size < n_s:
                mask = np.zeros(n_s, dtype=np.bool_)
                mask[part.U] = True
                pair = (np.flatnonzero(~mask), part.U)
            elif 0 < part.L.size < n_s:
                mask = np.zeros(n_s, dtype=np.bool_)
                mask[part.L] = True
                pair = (part.L, np.flatnonzero(~mask))
            else:
                # unreachable when the fit lies in its interval; kept so a
                # degenerate witness degrades to a leaf instead of looping
                continue
        entries = []
        for rel, child_side in zip(pair, ("lower", "upper")):
            child_dag, rel_map = induced_subgraph(sub_dag, rel)
            child_subset = node.subset[rel_map]
            child_values = sub_values[rel_map]
            child_cf = constant_fit_interval(child_values, loss)
            child = TreeNode(
                subset=child_subset,
                fit_b=node_fit(child_cf, child_subset, node.fit_b),
                depth=node.depth + 1,
            )
            entries.append((child, child_dag, child_values, child_cf,
                            child_side))
        node.children = (entries[0][0], entries[1][0])
        stack.extend(entries)
    return _assemble(tree, mode, values, dag, loss)


def _assemble(tree, mode, values, dag, loss):
    g_hat = np.empty(dag.n, dtype=np.float64)
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.is_leaf:
            g_hat[node.subset] = node.fit_b
        else:
            stack.extend(node.children)
    ok, _ = is_isotonic(dag, g_hat)
    return FitResult(
        g_hat=g_hat,
        tree=tree,
        mode=mode,
        objective=objective(values, loss, g_hat),
        isotonic=bool(ok),
        values=values,
        dag=dag,
        loss=loss,
    )


def truncate(fit_result, depth):
    """Cut the partition tree at ``depth`` and re-evaluate.

    Every node at ``depth`` becomes a leaf carrying its own fit; a tree from
    the modified mode stays isotonic for every choice of ``depth``.  The tree
    of ``fit_result`` is not modified.
    """
    depth = int(depth)
    if depth < 0:
        raise ValueError("depth must be nonnegative")

    def copy(node):
        out = TreeNode(subset=node.subset, fit_b=node.fit_b, depth=node.depth)
        if node.children is not None and node.depth < depth:
            out.children = (copy(node.children[0]), copy(node.children[1]))
        return out

    return _assemble(copy(fit_result.tree), fit_result.mode,
                     fit_result.values, fit_result.dag, fit_result.loss)


def objective(values, loss, g_hat):
    """Summed coordinate loss of ``g_hat`` against the responses."""
    values = np.asarray(values, dtype=np.float64)
    g_hat = np.asarray(g_hat, dtype=np.float64)
    return float(np.sum(loss.value(values, g_hat)))


def _labels_for(tree, labels):
    if labels is None:
        return lambda i: i
    seq = list(labels)
    return lambda i: seq[i]


def tree_to_dict(tree, labels=None):
    """Nested plain-python record of the tree: subset, fit, children.

    ``labels`` optionally maps internal node ids to external ones; subsets
    are emitted in ascending internal order.
    """
    lab = _labels_for(tree, labels)

    def rec(node):
        children = None
        if node.children is not None:
            children = [rec(node.children[0]), rec(node.children[1])]
        return {
            "subset": [lab(int(i)) for i in node.subset],
            "fit": float(node.fit_b),
            "children": children,
        }

    return rec(tree)


def tree_to_dot(tree, labels=None):
    """GraphViz rendering of the tree; node label = subset, plus its fit."""
    lab = _labels_for(tree, labels)
    lines = ["digraph partition {", '  node [shape=box, fontname="monospace"];']
    counter = [0]

    def rec(node):
        my_id = counter[0]
        counter[0] += 1
        members = ",".join(str(lab(int(i))) for i in node.subset)
        lines.append('  n%d [label="{%s}\\nb = %.12g"];'
                     % (my_id, members, node.fit_b))
        if node.children is not None:
            for child in node.children:
                child_id = rec(child)
                lines.append("  n%d -> n%d;" % (my_id, child_id))
        return my_id

    rec(tree)
    lines.append("}")
    return "\n".join(lines)
