from fractions import Fraction

import pytest

from todatau.errors import PreconditionError
from todatau.eth_core import (LaxOperator, dress_left, dress_right,
                              flow_generator, harmonic, lax_rhs, log_lax)
from todatau.scalars import EPS, LOG_Q, Q, Scalar
from todatau.shift_algebra import ShiftSeries
from todatau.weyl import DiffOp, XPoly

X = XPoly.x()
DEPTH = 6
EPS_HI = 6

VACUUM = LaxOperator(u=XPoly.zero(), v=XPoly.zero())
CONST_U = LaxOperator(u=XPoly.of(2), v=XPoly.zero())


def unit():
    return DiffOp.of(1)


def test_harmonic_numbers():
    assert harmonic(0) == LOG_Q * Fraction(1, 2)
    assert harmonic(1) == LOG_Q * Fraction(1, 2) + Scalar.of(1)
    assert harmonic(3) == LOG_Q * Fraction(1, 2) + Scalar.of(Fraction(11, 6))


def test_realize_vacuum():
    L = VACUUM.realize(EPS_HI)
    assert L.coeff(1) == DiffOp.of(1)
    assert L.coeff(-1) == DiffOp.of(Q)
    assert L.coeff(0) is None
    assert L.support == (-1, 1)


def test_rejects_eps_order_zero_v():
    with pytest.raises(PreconditionError):
        LaxOperator(u=XPoly.zero(), v=X)


def test_vacuum_left_dressing_closed_form():
    pl = dress_left(VACUUM, DEPTH, EPS_HI)
    assert pl.coeff(0) == DiffOp.of(1)
    assert pl.coeff(-1) is None                       # w_1 = 0
    assert pl.coeff(-2) == DiffOp.of(X * (-(Q * Scalar.eps(-1))))  # w_2 = -Qx/eps
    assert pl.coeff(-3) is None                       # w_3 = 0


def test_vacuum_left_dressing_residual():
    L = VACUUM.realize(EPS_HI)
    pl = dress_left(VACUUM, DEPTH, EPS_HI)
    resid = L * pl - pl.mul_lambda_right(1)
    assert resid.is_zero()
    assert resid.v_lo <= -(DEPTH - 1)


def test_constant_u_left_dressing():
    pl = dress_left(CONST_U, DEPTH, EPS_HI)
    # w_1(x) - w_1(x+eps) = u  =>  w_1 = -u x / eps
    assert pl.coeff(-1) == DiffOp.of(X * (Scalar.eps(-1) * (-2)))
    L = CONST_U.realize(EPS_HI)
    assert (L * pl - pl.mul_lambda_right(1)).is_zero()


def test_left_dressing_gauge():
    for lax in (VACUUM, CONST_U):
        pl = dress_left(lax, DEPTH, EPS_HI)
        for k, c in pl.items():
            if k == 0:
                continue
            assert c.coeff(0).constant_term().is_zero()


def test_vacuum_right_dressing_closed_form():
    pr = dress_right(VACUUM, DEPTH, EPS_HI)
    assert pr.coeff(0) == DiffOp.of(1)                # wtilde_0 = 1
    assert pr.coeff(-1) is None                       # wtilde_1 = 0
    # stored is left-normal: p_2(x) = wtilde_2(x - 2 eps), wtilde_2 = Qx/eps
    want = (X * (Q * Scalar.eps(-1))).shift_x(-2)
    assert pr.coeff(-2) == DiffOp.of(want)


def test_right_dressing_residual():
    for lax in (VACUUM, CONST_U):
        L = lax.realize(EPS_HI)
        pr = dress_right(lax, DEPTH, EPS_HI)
        lam = ShiftSeries.of(unit(), 1)
        resid = pr * L.sharp() - lam * pr
        assert resid.is_zero()


def test_right_dressing_conjugation_consistency():
    L = VACUUM.realize(EPS_HI)
    pr = dress_right(VACUUM, DEPTH, EPS_HI)
    lam = ShiftSeries.of(unit(), 1)
    got = (pr.invert(DEPTH, EPS_HI) * lam * pr).sharp()
    assert (got - L).is_zero()


def test_right_dressing_gauge():
    pr = dress_right(CONST_U, DEPTH, EPS_HI)
    for k, c in pr.items():
        if k == 0:
            continue
        # wtilde_k(x) = p_k(x + k eps) has zero constant term
        assert c.coeff(0).shift_x(-k).constant_term().is_zero()


def test_log_lax_vacuum():
    L = VACUUM.realize(EPS_HI)
    pl = dress_left(VACUUM, DEPTH, EPS_HI)
    pr = dress_right(VACUUM, DEPTH, EPS_HI)
    ll = log_lax(pl, pr, unit(), DEPTH, EPS_HI)
    half = Fraction(1, 2)
    assert ll.coeff(0) == DiffOp.of(LOG_Q * half)
    assert ll.coeff(2) == DiffOp.of(Scalar.q_half_power(-2) * half)
    assert ll.coeff(-2) == DiffOp.of(Q * half)
    assert ll.coeff(1) is None and ll.coeff(-1) is None
    comm = ll * L - L * ll
    assert comm.is_zero()
    assert comm.v_lo <= -3 and comm.v_hi >= 3


def test_log_lax_commutes_constant_u():
    L = CONST_U.realize(EPS_HI)
    pl = dress_left(CONST_U, DEPTH, EPS_HI)
    pr = dress_right(CONST_U, DEPTH, EPS_HI)
    ll = log_lax(pl, pr, unit(), DEPTH, EPS_HI)
    assert (ll * L - L * ll).is_zero()


def test_unit_q_mode_kills_log_part():
    # with Q -> 1, log Q -> 0 the Lambda^0 part of log L vanishes for vacuum
    pl = dress_left(VACUUM, DEPTH, EPS_HI)
    pr = dress_right(VACUUM, DEPTH, EPS_HI)
    ll = log_lax(pl, pr, unit(), DEPTH, EPS_HI)
    c0 = ll.coeff(0)
    sub = c0.map_xpolys(lambda p: p.map_scalars(lambda s: s.subst_unit_q()))
    assert sub.is_zero()


def test_flow_generators_vacuum():
    L = VACUUM.realize(EPS_HI)
    pl = dress_left(VACUUM, DEPTH, EPS_HI)
    pr = dress_right(VACUUM, DEPTH, EPS_HI)
    ll = log_lax(pl, pr, unit(), DEPTH, EPS_HI)
    g01 = flow_generator((0, 1), L, ll, unit())
    assert g01 == ShiftSeries.of(DiffOp.of(Scalar.eps(-1)), 1)
    g11 = flow_generator((1, 1), L, ll, unit())
    assert g11.coeff(2) == DiffOp.of(Scalar.eps(-1) * Fraction(1, 2))
    assert g11.coeff(0) == DiffOp.of(Q * Scalar.eps(-1))
    g00 = flow_generator((0, 0), L, ll, unit())
    assert g00.coeff(0) is None           # C_0 cancels the log Q
    assert g00.coeff(2) == DiffOp.of(Scalar.q_half_power(-2) * Scalar.eps(-1))


def test_lax_rhs_vacuum_stationary():
    L = VACUUM.realize(EPS_HI)
    pl = dress_left(VACUUM, DEPTH, EPS_HI)
    pr = dress_right(VACUUM, DEPTH, EPS_HI)
    ll = log_lax(pl, pr, unit(), DEPTH, EPS_HI)
    for slot in ((0, 1), (1, 1), (0, 0), (1, 0), (2, 1)):
        assert lax_rhs(slot, L, ll, unit()).is_zero()


def test_lax_rhs_preserves_class_for_x_dependent_u():
    lax = LaxOperator(u=X, v=XPoly.zero())
    L = lax.realize(EPS_HI)
    pl = dress_left(lax, DEPTH, EPS_HI)
    pr = dress_right(lax, DEPTH, EPS_HI)
    ll = log_lax(pl, pr, unit(), DEPTH, EPS_HI)
    for slot in ((0, 1), (1, 1), (1, 0)):
        rhs = lax_rhs(slot, L, ll, unit())   # raises on support violation
        c1 = rhs.coeff(1)
        assert c1 is None or c1.is_zero()
