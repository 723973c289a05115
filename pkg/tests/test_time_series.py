import random
from fractions import Fraction

import pytest

from todatau.errors import PreconditionError
from todatau.scalars import EPS, ONE, Scalar
from todatau.shift_algebra import LambdaSeries
from todatau.time_series import (TimeSeries, TimeVars, bilinear_pair, eth_slots,
                                 miwa_displacement)

V = TimeVars(eth_slots(2), degree=2, y_degree=2)


def q(slot):
    return TimeSeries.variable(V, slot, ONE)


def rand_ts(rng, vars=V):
    terms = {}
    width = len(vars.slots)
    for _ in range(rng.randrange(4)):
        alpha = [0] * width
        for _ in range(rng.randrange(vars.degree + 1)):
            alpha[rng.randrange(width)] += 1
        if sum(alpha) > vars.degree:
            continue
        terms[tuple(alpha)] = Scalar.of(Fraction(rng.randrange(-3, 4)))
    return TimeSeries(vars, terms)


def test_slots_order():
    assert eth_slots(2) == ((0, 1), (1, 0), (1, 1), (2, 0), (2, 1))


def test_mul_truncates_total_degree():
    a = q((0, 1))
    b = q((1, 0))
    prod = a * b
    assert prod.coeff((1, 1, 0, 0, 0)) == ONE
    cube = a * a * a       # degree 3 > cap
    assert cube.is_zero()


def test_add():
    one = TimeSeries.const(V, ONE)
    f = (one + q((0, 1))) + (one - q((0, 1)))
    assert f == TimeSeries.const(V, Scalar.of(2))


def test_exp_series():
    e = q((0, 1)).exp(ONE)
    assert e.coeff((0, 0, 0, 0, 0)) == ONE
    assert e.coeff((1, 0, 0, 0, 0)) == ONE
    assert e.coeff((2, 0, 0, 0, 0)) == Scalar.of(Fraction(1, 2))


def test_log_series():
    l = q((1, 1)).log1p()
    assert l.coeff((0, 0, 1, 0, 0)) == ONE
    assert l.coeff((0, 0, 2, 0, 0)) == Scalar.of(Fraction(-1, 2))


def test_exp_log_round_trip():
    rng = random.Random(8)
    for _ in range(25):
        f = rand_ts(rng)
        f = f - TimeSeries.const(V, f.constant_coeff() or Scalar.of(0))
        assert (f.exp(ONE) - TimeSeries.const(V, ONE)).log1p() == f


def test_inverse():
    f = TimeSeries.const(V, ONE) + q((0, 1)).scale(3)
    g = f.inverse(eps_hi=6)
    assert f * g == TimeSeries.const(V, ONE)


# -- Miwa shifts -----------------------------------------------------------------

def test_miwa_on_q01():
    shifted = q((0, 1)).miwa_shift(-1, miwa_displacement(V.slots))
    assert shifted.coeff(0) == q((0, 1))
    assert shifted.coeff(-1) == TimeSeries.const(V, -EPS)


def test_miwa_leaves_q20_alone():
    for sign in (+1, -1):
        shifted = q((2, 0)).miwa_shift(sign, miwa_displacement(V.slots))
        assert shifted.coeff(0) == q((2, 0))
        assert shifted.s_lo == 0 and shifted.s_hi == 0


def test_miwa_on_square():
    f = q((1, 1)) * q((1, 1))
    shifted = f.miwa_shift(+1, miwa_displacement(V.slots))
    # (q + eps lam^{-2})^2 = q^2 + 2 eps lam^{-2} q + eps^2 lam^{-4}
    assert shifted.coeff(0) == f
    assert shifted.coeff(-2) == q((1, 1)).scale(EPS * 2)
    assert shifted.coeff(-4) == TimeSeries.const(V, EPS * EPS)


def test_miwa_shift_inverse_law():
    rng = random.Random(13)
    disp = miwa_displacement(V.slots)
    for _ in range(20):
        f = rand_ts(rng)
        plus = f.miwa_shift(+1, disp)
        back = plus.map_coeffs(lambda ts: ts.miwa_shift(-1, disp)).flatten()
        want = LambdaSeries.of(f, 0) if not f.is_zero() else LambdaSeries.zero()
        assert (back - want).is_zero() if not back.is_zero() else want.is_zero()


# -- bilinear doubling ---------------------------------------------------------------

def test_bilinear_of_one():
    one = TimeSeries.const(V, ONE)
    assert bilinear_pair(one, one) == TimeSeries.const(V, ONE, mode="bilinear")


def test_bilinear_single_variable():
    f = q((0, 1)).bilinear(+1)
    nv = len(V.slots)
    mean = (1,) + (0,) * (2 * nv - 1)
    diff = (0,) * nv + (1,) + (0,) * (nv - 1)
    assert f.coeff(mean) == ONE
    assert f.coeff(diff) == ONE


def test_bilinear_square_difference():
    f = bilinear_pair(q((0, 1)), q((0, 1)))
    nv = len(V.slots)
    mean2 = (2,) + (0,) * (2 * nv - 1)
    diff2 = (0,) * nv + (2,) + (0,) * (nv - 1)
    assert f.coeff(mean2) == ONE
    assert f.coeff(diff2) == -ONE


def test_bilinear_respects_products():
    # compare at matched total degree: the single-mode product truncates at
    # total degree D while the bilinear product caps mean and diff separately
    rng = random.Random(77)
    for _ in range(15):
        f1, f2 = rand_ts(rng), rand_ts(rng)
        g1, g2 = rand_ts(rng), rand_ts(rng)
        lhs = bilinear_pair(f1 * f2, g1 * g2).restrict_degree(V.degree)
        rhs = (bilinear_pair(f1, g1) * bilinear_pair(f2, g2)).restrict_degree(V.degree)
        assert lhs == rhs


# -- partials --------------------------------------------------------------------------

def test_partial_derivative():
    f = q((0, 1)) * q((1, 0)) + q((0, 1)).scale(5)
    df = f.partial((0, 1))
    assert df == q((1, 0)) + TimeSeries.const(V, Scalar.of(5))


def test_partials_commute():
    rng = random.Random(31)
    for _ in range(20):
        f = rand_ts(rng)
        a, b = (0, 1), (1, 1)
        assert f.partial(a).partial(b) == f.partial(b).partial(a)


def test_incompatible_vars_rejected():
    other = TimeVars(eth_slots(1), degree=2)
    with pytest.raises(PreconditionError):
        _ = q((0, 1)) + TimeSeries.const(other, ONE)
