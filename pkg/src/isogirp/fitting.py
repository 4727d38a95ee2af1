"""Constant fits: the argmin interval of y -> sum_x l(g(x), y) over a subset.

The summed subgradient F(y) = [F_lo(y), F_hi(y)] is monotone in y, so the
argmin set {y : F_lo(y) <= 0 <= F_hi(y)} is a closed (possibly half-infinite)
interval.  For losses with piecewise-linear or piecewise-constant subgradients
the endpoints are found exactly by scanning the sorted kink locations; the
smooth logistic loss is handled by bisection.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptySubsetError, NoMinimizerError
from .losses import INF, Interval

# |F| below TOL_ZERO at a kink is treated as exactly zero, so interval
# endpoints land on kink locations instead of float-dust neighbors
TOL_ZERO = 1e-9

TOL_BISECT = 1e-10
B_MAX = 1e6

# values per slab when evaluating F at many candidate points, bounds memory
_SLAB = 512


@dataclass(frozen=True)
class ConstantFitResult:
    """Argmin interval of the summed loss; ``interval`` is None iff not attained."""

    interval: Optional[Interval]
    attained: bool


def _sum_grads(loss, values, ys):
    """F_lo and F_hi of the summed subgradient at each candidate in ys."""
    f_lo = np.empty(ys.size, dtype=np.float64)
    f_hi = np.empty(ys.size, dtype=np.float64)
    for s in range(0, ys.size, _SLAB):
        block = ys[s:s + _SLAB, None]
        f_lo[s:s + _SLAB] = loss.grad_lo(values, block).sum(axis=1)
        f_hi[s:s + _SLAB] = loss.grad_hi(values, block).sum(axis=1)
    return f_lo, f_hi


def _scan_lo(loss, values, bps, f_hi):
    """Smallest y with F_hi(y) >= 0, or -inf when F_hi is never negative."""
    above = np.flatnonzero(f_hi >= -TOL_ZERO)
    if above.size == 0:
        return INF
    i = int(above[0])
    if i == 0:
        left = float(loss.grad_hi(values, bps[0] - 1.0).sum())
        if left >= -TOL_ZERO:
            return -INF
        # for a linear piece the crossing would be left of every kink, which
        # cannot happen: linear-gradient losses are strictly negative there
        return float(bps[0])
    if f_hi[i] <= TOL_ZERO:
        return float(bps[i])
    if loss.grad_is_linear:
        rise = f_hi[i] - f_hi[i - 1]
        return float(bps[i - 1] - f_hi[i - 1] * (bps[i] - bps[i - 1]) / rise)
    return float(bps[i])


def _scan_hi(loss, values, bps, f_lo):
    """Largest y with F_lo(y) <= 0, or +inf when F_lo is never positive."""
    below = np.flatnonzero(f_lo <= TOL_ZERO)
    if below.size == 0:
        return -INF
    j = int(below[-1])
    if j == bps.size - 1:
        right = float(loss.grad_lo(values, bps[-1] + 1.0).sum())
        if right <= TOL_ZERO:
            return INF
        return float(bps[-1])
    if f_lo[j] >= -TOL_ZERO:
        return float(bps[j])
    if loss.grad_is_linear:
        rise = f_lo[j + 1] - f_lo[j]
        return float(bps[j] - f_lo[j] * (bps[j + 1] - bps[j]) / rise)
    return float(bps[j])


def _logistic_interval(loss, values):
    # single-signed labels make the summed loss strictly monotone with an
    # unattained infimum; test the labels, not the gradient, whose tails
    # underflow to an exact float zero long before B_MAX
    if values.min() > 0.0 or values.max() < 0.0:
        return ConstantFitResult(None, False)
    f = lambda y: float(loss.grad_lo(values, np.float64(y)).sum())
    lo, hi = -B_MAX, B_MAX
    while hi - lo > TOL_BISECT:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return ConstantFitResult(Interval(root, root), True)


def constant_fit_interval(values, loss):
    """The full argmin interval of the summed coordinate loss on a subset.

    Parameters
    ----------
    values : array of responses g(x) for x in the subset (nonempty).
    loss : Loss instance.

    Returns
    -------
    ConstantFitResult with the exact argmin interval, or ``attained=False``
    when the infimum is not attained (logistic loss, single-signed labels).
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptySubsetError("constant fit of the empty set")
    if loss.smooth:
        return _logistic_interval(loss, values)
    bps = np.unique(loss.breakpoints(values))
    if bps.size == 0:
        # globally linear gradient: unique root at the mean
        m = float(values.mean())
        return ConstantFitResult(Interval(m, m), True)
    f_lo, f_hi = _sum_grads(loss, values, bps)
    lo = _scan_lo(loss, values, bps, f_hi)
    hi = _scan_hi(loss, values, bps, f_lo)
    if lo > hi:
        # only float dust can produce a crossing; collapse to the midpoint
        lo = hi = 0.5 * (lo + hi)
    return ConstantFitResult(Interval(lo, hi), True)


def closest_fit(parent_b, cf):
    """Point of the constant-fit interval closest to the parent fit.

    Clamps ``parent_b`` into the interval.  When the clamped value differs
    from the parent by no more than 1e-12 the parent value itself is returned,
    so descendants sharing the parent level cannot pick up float dust that
    would later read as an order violation.
    """
    if not cf.attained:
        raise NoMinimizerError()
    iv = cf.interval
    b = min(max(parent_b, iv.lo), iv.hi)
    if abs(b - parent_b) <= 1e-12:
        return float(parent_b)
    return float(b)


def root_fit(cf, policy="mid"):
    """Pick the starting fit from a constant-fit interval.

    policy "mid": midpoint when both endpoints are finite; "lo"/"hi": the
    respective endpoint.  An infinite choice falls back to the finite side,
    and 0 when both endpoints are infinite.
    """
    if not cf.attained:
        raise NoMinimizerError()
    lo, hi = cf.interval.lo, cf.interval.hi
    lo_ok = np.isfinite(lo)
    hi_ok = np.isfinite(hi)
    if not lo_ok and not hi_ok:
        return 0.0
    if policy == "mid":
        if lo_ok and hi_ok:
            return 0.5 * (lo + hi)
        return float(lo) if lo_ok else float(hi)
    if policy == "lo":
        return float(lo) if lo_ok else float(hi)
    if policy == "hi":
        return float(hi) if hi_ok else float(lo)
    raise ValueError("unknown root policy %r" % (policy,))
