"""Coordinate losses, their subdifferentials, and interval arithmetic.

Each loss ``l(a, y)`` is convex in the fitted value ``y`` for every response
``a``.  Its subdifferential with respect to ``y`` is a closed interval whose
endpoints are returned elementwise by ``grad_lo`` / ``grad_hi``; the endpoint
functions are monotone in ``y``, with ``grad_lo`` left-continuous and
``grad_hi`` right-continuous at kinks.  Sums of subdifferentials are Minkowski
sums, so interval endpoints simply add.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

INF = float("inf")


@dataclass(frozen=True)
class Interval:
    """Closed real interval; endpoints may be infinite, never empty."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError("interval endpoints out of order: [%r, %r]" % (self.lo, self.hi))

    @property
    def width(self):
        return self.hi - self.lo

    def __contains__(self, y):
        return self.lo <= y <= self.hi


def _checked_endpoint_sum(a, b):
    # opposite infinities never arise from subdifferentials of proper losses
    if np.isinf(a) and np.isinf(b) and (a > 0) != (b > 0):
        raise ValueError("cannot add opposite infinities")
    return a + b


def interval_add(p, q):
    """Minkowski sum of two intervals: endpoints add in extended-real arithmetic."""
    return Interval(_checked_endpoint_sum(p.lo, q.lo), _checked_endpoint_sum(p.hi, q.hi))


def interval_negate(p):
    """Reflection -p = {-v : v in p}."""
    return Interval(-p.hi, -p.lo)


def _as_float_array(a):
    return np.asarray(a, dtype=np.float64)


class Loss:
    """Common interface of all coordinate losses.

    Subclasses implement vectorized ``value``, ``grad_lo``, ``grad_hi`` (with
    ``a`` an array of responses and ``y`` a scalar or broadcastable array) and
    ``breakpoints`` returning every kink location of the subgradient.  The
    ``grad_is_linear`` flag tells the constant-fit scanner whether the summed
    subgradient varies linearly between kinks (allowing interpolation) or is
    piecewise constant with jumps at the kinks.
    """

    name = ""
    grad_is_linear = False
    smooth = False
    signed_labels = False

    def value(self, a, y):
        raise NotImplementedError

    def grad_lo(self, a, y):
        raise NotImplementedError

    def grad_hi(self, a, y):
        raise NotImplementedError

    def breakpoints(self, a):
        """Kink locations of y -> dl(a, y); empty when the gradient is globally linear."""
        return np.empty(0, dtype=np.float64)

    def validate_responses(self, a):
        """Raise DomainError when a response is outside the loss domain."""

    def __repr__(self):
        return "%s(%s)" % (type(self).__name__, self._params())

    def _params(self):
        return ""


class SquaredLoss(Loss):
    """l(a, y) = (y - a)^2 / 2 with derivative y - a."""

    name = "squared"
    grad_is_linear = True

    def value(self, a, y):
        r = _as_float_array(y) - _as_float_array(a)
        return 0.5 * r * r

    def grad_lo(self, a, y):
        return _as_float_array(y) - _as_float_array(a)

    grad_hi = grad_lo


class HuberLoss(Loss):
    """Quadratic within +-delta of the response, linear with slope delta outside."""

    name = "huber"
    grad_is_linear = True

    def __init__(self, delta):
        if not delta > 0:
            raise DomainError("huber delta must be positive, got %r" % (delta,))
        self.delta = float(delta)

    def value(self, a, y):
        d = self.delta
        r = _as_float_array(y) - _as_float_array(a)
        ar = np.abs(r)
        return np.where(ar <= d, 0.5 * r * r, d * (ar - 0.5 * d))

    def grad_lo(self, a, y):
        r = _as_float_array(y) - _as_float_array(a)
        return np.clip(r, -self.delta, self.delta)

    grad_hi = grad_lo

    def breakpoints(self, a):
        a = _as_float_array(a)
        return np.concatenate((a - self.delta, a + self.delta))

    def _params(self):
        return "delta=%g" % self.delta


class EpsInsensitiveLoss(Loss):
    """l(a, y) = max(0, |y - a| - epsilon); epsilon = 0 recovers the absolute loss."""

    name = "eps"

    def __init__(self, epsilon):
        if not epsilon >= 0:
            raise DomainError("epsilon must be nonnegative, got %r" % (epsilon,))
        self.epsilon = float(epsilon)

    def value(self, a, y):
        r = np.abs(_as_float_array(y) - _as_float_array(a)) - self.epsilon
        return np.maximum(r, 0.0)

    # subgradient is -1 / 0 / +1 away from the kinks a -+ epsilon, and the
    # intervals [-1,0] / [0,1] exactly at them ([-1,1] at a when epsilon = 0)
    def grad_lo(self, a, y):
        a = _as_float_array(a)
        y = _as_float_array(y)
        lo = np.where(y <= a - self.epsilon, -1.0, 0.0)
        return np.where(y > a + self.epsilon, 1.0, lo)

    def grad_hi(self, a, y):
        a = _as_float_array(a)
        y = _as_float_array(y)
        hi = np.where(y < a - self.epsilon, -1.0, 0.0)
        return np.where(y >= a + self.epsilon, 1.0, hi)

    def breakpoints(self, a):
        a = _as_float_array(a)
        return np.concatenate((a - self.epsilon, a + self.epsilon))

    def _params(self):
        return "epsilon=%g" % self.epsilon


class LogisticLoss(Loss):
    """l(a, y) = log(1 + exp(-a y)) for labels a in {-1, +1}; smooth, never flat."""

    name = "logistic"
    grad_is_linear = True
    smooth = True
    signed_labels = True

    def value(self, a, y):
        m = _as_float_array(a) * _as_float_array(y)
        return np.logaddexp(0.0, -m)

    def grad_lo(self, a, y):
        a = _as_float_array(a)
        return -a * _sigmoid(-a * _as_float_array(y))

    grad_hi = grad_lo

    def validate_responses(self, a):
        _require_unit_labels(self.name, a)


class HingeLoss(Loss):
    """l(a, y) = max(0, 1 - a y) for labels a in {-1, +1}."""

    name = "hinge"
    signed_labels = True

    def value(self, a, y):
        m = _as_float_array(a) * _as_float_array(y)
        return np.maximum(0.0, 1.0 - m)

    def grad_lo(self, a, y):
        a = _as_float_array(a)
        m = a * _as_float_array(y)
        at_kink = np.minimum(-a, 0.0)
        return np.where(m < 1.0, -a, np.where(m > 1.0, 0.0, at_kink))

    def grad_hi(self, a, y):
        a = _as_float_array(a)
        m = a * _as_float_array(y)
        at_kink = np.maximum(-a, 0.0)
        return np.where(m < 1.0, -a, np.where(m > 1.0, 0.0, at_kink))

    def breakpoints(self, a):
        # the margin a*y = 1 turns at y = 1/a
        return 1.0 / _as_float_array(a)

    def validate_responses(self, a):
        _require_unit_labels(self.name, a)


def _sigmoid(t):
    t = _as_float_array(t)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _require_unit_labels(name, a):
    a = _as_float_array(a)
    if not np.all(np.abs(a) == 1.0):
        bad = a[np.abs(a) != 1.0]
        raise DomainError(
            "%s loss requires responses in {-1, +1}; got %r" % (name, bad[:5].tolist())
        )


def loss_value(loss, a, y):
    """Scalar loss l(a, y)."""
    return float(loss.value(np.float64(a), np.float64(y)))


def subdifferential(loss, a, y):
    """The closed interval of subgradients of y -> l(a, y) at y."""
    a = np.float64(a)
    y = np.float64(y)
    return Interval(float(loss.grad_lo(a, y)), float(loss.grad_hi(a, y)))


_SIMPLE_LOSSES = {
    "squared": SquaredLoss,
    "logistic": LogisticLoss,
    "hinge": HingeLoss,
}

_PARAM_LOSSES = {
    "huber": ("delta", HuberLoss),
    "eps": ("epsilon", EpsInsensitiveLoss),
}


def make_loss(text):
    """Parse a loss specification string.

    Grammar: ``squared`` | ``huber:<delta>`` | ``eps:<epsilon>`` |
    ``logistic`` | ``hinge``.
    """
    text = text.strip()
    kind, sep, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind in _SIMPLE_LOSSES:
        if sep:
            raise DomainError("loss %r takes no parameter" % (kind,))
        return _SIMPLE_LOSSES[kind]()
    if kind in _PARAM_LOSSES:
        pname, cls = _PARAM_LOSSES[kind]
        if not sep or not arg.strip():
            raise DomainError("loss %r requires a parameter, e.g. %s:0.9" % (kind, kind))
        try:
            param = float(arg)
        except ValueError:
            raise DomainError("cannot parse %s %r" % (pname, arg)) from None
        return cls(param)
    raise DomainError(
        "unknown loss %r; expected squared, huber:<delta>, eps:<epsilon>, logistic, or hinge"
        % (text,)
    )
