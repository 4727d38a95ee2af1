"""Isotonic regression over finite partial orders by recursive partitioning.

The solver fits a piecewise-constant function that respects a given order
relation, minimizing a separable convex loss.  Each recursion step solves a
maximum-weight closure problem on the order DAG to find the subset whose
fitted value can move, then splits and recurses.  Two modes are provided:
``modified`` (parent-coupled fitted values; always returns an isotonic fit)
and ``original`` (each block refitted independently; may violate the order,
which :func:`isogirp.order.is_isotonic` then reports).

Quick start::

    import numpy as np
    from isogirp import PartialOrderDag, HuberLoss, fit

    dag = PartialOrderDag(3, np.array([[0, 1], [1, 2]]))
    result = fit(np.array([3.0, 1.0, 2.0]), dag, HuberLoss(0.9))
    result.g_hat
"""

from .errors import (CycleError, DomainError, DuplicatePointError,
                     EmptySubsetError, IsoGirpError, NoMinimizerError,
                     NotAChainError, TooLargeError)
from .losses import (EpsInsensitiveLoss, HingeLoss, HuberLoss, Interval,
                     LogisticLoss, Loss, SquaredLoss, make_loss,
                     subdifferential)
from .order import (PartialOrderDag, dominance_order, is_isotonic,
                    induced_subgraph, validate)
from .fitting import (ConstantFitResult, closest_fit, constant_fit_interval,
                      root_fit)
from .cut import PartitionResult, find_partition, sigma
from .solver import FitResult, Mode, TreeNode, fit, objective, truncate
from .oracle import GridSpec, default_grid, grid_optimum, pava

__version__ = "0.1.0"

__all__ = [
    "CycleError", "DomainError", "DuplicatePointError", "EmptySubsetError",
    "IsoGirpError", "NoMinimizerError", "NotAChainError", "TooLargeError",
    "EpsInsensitiveLoss", "HingeLoss", "HuberLoss", "Interval",
    "LogisticLoss", "Loss", "SquaredLoss", "make_loss", "subdifferential",
    "PartialOrderDag", "dominance_order", "is_isotonic", "induced_subgraph",
    "validate",
    "ConstantFitResult", "closest_fit", "constant_fit_interval", "root_fit",
    "PartitionResult", "find_partition", "sigma",
    "FitResult", "Mode", "TreeNode", "fit", "objective", "truncate",
    "GridSpec", "default_grid", "grid_optimum", "pava",
    "warmup",
    "__version__",
]


def warmup():
    """Compile the accelerated kernels on a small instance.

    Importing the package does not trigger compilation; the first fit pays
    for it instead.  Call this once up front when timing matters.
    """
    import numpy as np

    from .losses import SquaredLoss
    from .oracle import GridSpec, grid_optimum
    from .order import PartialOrderDag
    from .solver import fit as _fit

    dag = PartialOrderDag(3, np.array([[0, 1], [1, 2]], dtype=np.int64))
    values = np.array([2.0, 1.0, 3.0])
    _fit(values, dag, SquaredLoss(), mode=Mode.ORIGINAL)
    _fit(values, dag, SquaredLoss(), mode=Mode.MODIFIED)
    grid_optimum(values, dag, SquaredLoss(), GridSpec(0.0, 3.0, 0.5))
