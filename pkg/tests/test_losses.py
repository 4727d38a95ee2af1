import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isogirp.errors import DomainError
from isogirp.losses import (EpsInsensitiveLoss, HingeLoss, HuberLoss,
                            Interval, LogisticLoss, SquaredLoss,
                            interval_add, interval_negate, loss_value,
                            make_loss, subdifferential)

ALL_LOSSES = [SquaredLoss(), HuberLoss(0.9), EpsInsensitiveLoss(0.5),
              LogisticLoss(), HingeLoss()]

finite = st.floats(min_value=-50.0, max_value=50.0,
                   allow_nan=False, allow_infinity=False)
label = st.sampled_from([-1.0, 1.0])


def _response_strategy(loss):
    return label if getattr(loss, "signed_labels", False) else finite


# ------------------------------------------------------------ interval type

def test_interval_basics():
    iv = Interval(-1.0, 2.5)
    assert iv.width == 3.5
    assert 0.0 in iv and -1.0 in iv and 2.5 in iv
    assert 2.6 not in iv
    with pytest.raises(Exception):
        Interval(1.0, 0.0)


def test_interval_arithmetic():
    s = interval_add(Interval(-1.0, 0.0), Interval(-1.0, 0.0))
    assert (s.lo, s.hi) == (-2.0, 0.0)
    n = interval_negate(Interval(-2.0, 0.0))
    assert (n.lo, n.hi) == (0.0, 2.0)
    u = interval_add(Interval(0.0, np.inf), Interval(-1.0, 1.0))
    assert u.lo == -1.0 and u.hi == np.inf


# ---------------------------------------------------------- explicit values

def test_squared_values():
    sq = SquaredLoss()
    assert loss_value(sq, 3.0, 1.0) == 2.0
    assert float(sq.grad_lo(np.float64(3.0), np.float64(1.0))) == -2.0


def test_huber_values():
    hb = HuberLoss(0.9)
    # inside the quadratic zone
    assert loss_value(hb, 4.0, 4.5) == pytest.approx(0.125)
    # outside: delta * (|r| - delta / 2)
    assert loss_value(hb, 4.0, 6.0) == pytest.approx(0.9 * (2.0 - 0.45))
    assert float(hb.grad_lo(np.float64(4.0), np.float64(6.0))) == 0.9
    assert float(hb.grad_lo(np.float64(4.0), np.float64(3.0))) == -0.9
    bp = hb.breakpoints(np.array([4.0]))
    assert sorted(bp.tolist()) == [3.1, 4.9]
    with pytest.raises(DomainError):
        HuberLoss(0.0)


def test_eps_values():
    ev = EpsInsensitiveLoss(0.5)
    assert loss_value(ev, 1.0, 1.3) == 0.0
    assert loss_value(ev, 1.0, 2.0) == pytest.approx(0.5)
    # subgradient interval at the upper kink is [0, 1]
    iv = subdifferential(ev, 1.0, 1.5)
    assert (iv.lo, iv.hi) == (0.0, 1.0)
    iv = subdifferential(ev, 1.0, 0.5)
    assert (iv.lo, iv.hi) == (-1.0, 0.0)
    # epsilon = 0 is the absolute loss, interval [-1, 1] at the response
    av = EpsInsensitiveLoss(0.0)
    iv = subdifferential(av, 1.0, 1.0)
    assert (iv.lo, iv.hi) == (-1.0, 1.0)


def test_logistic_values():
    lg = LogisticLoss()
    assert loss_value(lg, 1.0, 0.0) == pytest.approx(np.log(2.0))
    # gradient at the margin midpoint: -a * sigmoid(-a y)
    assert float(lg.grad_lo(np.float64(1.0), np.float64(0.0))) == -0.5
    # large arguments stay finite
    assert np.isfinite(loss_value(lg, 1.0, -1000.0))
    assert loss_value(lg, 1.0, 1000.0) == 0.0
    with pytest.raises(DomainError):
        lg.validate_responses(np.array([1.0, 0.5]))


def test_hinge_values():
    hi = HingeLoss()
    assert loss_value(hi, 1.0, 1.0) == 0.0
    assert loss_value(hi, 1.0, -1.0) == 2.0
    assert loss_value(hi, -1.0, 1.0) == 2.0
    # subdifferential at the kink y = 1/a
    iv = subdifferential(hi, 1.0, 1.0)
    assert (iv.lo, iv.hi) == (-1.0, 0.0)
    iv = subdifferential(hi, -1.0, -1.0)
    assert (iv.lo, iv.hi) == (0.0, 1.0)
    # away from the kink the subdifferential is a point
    iv = subdifferential(hi, -1.0, 1.0)
    assert (iv.lo, iv.hi) == (1.0, 1.0)
    with pytest.raises(DomainError):
        hi.validate_responses(np.array([2.0]))


# ----------------------------------------------------------------- parsing

def test_make_loss_grammar():
    assert isinstance(make_loss("squared"), SquaredLoss)
    assert isinstance(make_loss("logistic"), LogisticLoss)
    assert isinstance(make_loss("hinge"), HingeLoss)
    assert make_loss("huber:0.9").delta == 0.9
    assert make_loss("eps:0.5").epsilon == 0.5
    assert make_loss(" HUBER:2 ").delta == 2.0
    for bad in ["", "absolute", "huber", "huber:", "huber:x", "squared:1"]:
        with pytest.raises(DomainError):
            make_loss(bad)


def test_repr_roundtrips_params():
    assert "0.9" in repr(HuberLoss(0.9))
    assert "squared" in repr(SquaredLoss()).lower()


# --------------------------------------------------------------- properties

@pytest.mark.parametrize("loss", ALL_LOSSES, ids=lambda l: l.name)
@settings(max_examples=60, deadline=None)
@given(data=st.data(), y1=finite, y2=finite)
def test_midpoint_convexity(loss, data, y1, y2):
    a = data.draw(_response_strategy(loss))
    mid = 0.5 * (y1 + y2)
    lhs = loss_value(loss, a, mid)
    rhs = 0.5 * (loss_value(loss, a, y1) + loss_value(loss, a, y2))
    assert lhs <= rhs + 1e-9 * max(1.0, abs(rhs))


@pytest.mark.parametrize("loss", ALL_LOSSES, ids=lambda l: l.name)
@settings(max_examples=60, deadline=None)
@given(data=st.data(), y1=finite, y2=finite)
def test_subgradient_monotone(loss, data, y1, y2):
    """grad_lo <= grad_hi at any point, nondecreasing across points."""
    a = data.draw(_response_strategy(loss))
    lo, hi = sorted((y1, y2))
    at_lo = subdifferential(loss, a, lo)
    at_hi = subdifferential(loss, a, hi)
    assert at_lo.lo <= at_lo.hi + 1e-12
    if hi > lo:
        assert at_lo.hi <= at_hi.lo + 1e-9


@pytest.mark.parametrize("loss", ALL_LOSSES, ids=lambda l: l.name)
@settings(max_examples=40, deadline=None)
@given(data=st.data(), y=finite)
def test_subgradient_supports_value(loss, data, y):
    """l(a, z) >= l(a, y) + s (z - y) for s in the subdifferential."""
    a = data.draw(_response_strategy(loss))
    iv = subdifferential(loss, a, y)
    base = loss_value(loss, a, y)
    for z in (y - 0.7, y + 0.7):
        val = loss_value(loss, a, z)
        for s in (iv.lo, iv.hi):
            assert val >= base + s * (z - y) - 1e-9 * max(1.0, abs(val))


@pytest.mark.parametrize("loss", ALL_LOSSES, ids=lambda l: l.name)
def test_vectorized_matches_scalar(loss):
    rng = np.random.default_rng(7)
    if getattr(loss, "signed_labels", False):
        a = rng.integers(0, 2, 20) * 2.0 - 1.0
    else:
        a = rng.normal(0.0, 3.0, 20)
    y = np.float64(0.37)
    vec = loss.value(a, y)
    for i in range(a.size):
        assert vec[i] == pytest.approx(loss_value(loss, a[i], y), abs=1e-12)


@pytest.mark.parametrize("loss", [HuberLoss(0.9), EpsInsensitiveLoss(0.5),
                                  HingeLoss()], ids=lambda l: l.name)
def test_breakpoints_cover_kinks(loss):
    """Away from the breakpoints the subdifferential is a single point."""
    rng = np.random.default_rng(3)
    a = (rng.integers(0, 2, 8) * 2.0 - 1.0
         if getattr(loss, "signed_labels", False)
         else rng.normal(0.0, 2.0, 8))
    bps = np.sort(loss.breakpoints(a))
    for y in np.linspace(bps[0] - 1.0, bps[-1] + 1.0, 101):
        if np.min(np.abs(bps - y)) < 1e-6:
            continue
        glo = loss.grad_lo(a, np.float64(y))
        ghi = loss.grad_hi(a, np.float64(y))
        np.testing.assert_allclose(glo, ghi, atol=1e-12)
