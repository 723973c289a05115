from fractions import Fraction

import pytest

from todatau.errors import PreconditionError
from todatau.kdv import (KdvTau, double_factorial_odd, kdv_displacement,
                         kdv_hirota_residual, kdv_vars, kdv_wave_from_tau)
from todatau.scalars import EPS, ONE, Scalar
from todatau.time_series import TimeSeries

V = kdv_vars(n_max=2, degree=4, y_degree=3)


def tau_one():
    return KdvTau(vars=V, logtau=TimeSeries.zero(V))


def tau_exponential(c=Fraction(2, 3)):
    lt = TimeSeries.variable(V, 0, Scalar.of(c) * Scalar.eps(-1))
    return KdvTau(vars=V, logtau=lt)


def tau_one_plus_q0():
    # exp of the degree-truncated log(1 + q0): an exact non-tau function
    # that agrees with 1 + q0 through the working degree
    q0 = TimeSeries.variable(V, 0, ONE)
    return KdvTau(vars=V, logtau=q0.log1p())


def test_double_factorials():
    assert [double_factorial_odd(n) for n in range(5)] == [1, 1, 3, 15, 105]


def test_displacement_components():
    disp = kdv_displacement(V.slots)
    assert disp[0] == (-1, EPS)
    assert disp[1] == (-3, EPS)            # (2*1-1)!! = 1
    assert disp[2] == (-5, EPS * 3)        # 3!! = 3


def test_wave_from_trivial_tau():
    w = kdv_wave_from_tau(tau_one())
    assert w.coeff(0) == TimeSeries.const(V, ONE)
    assert all(k == 0 for k in w.coeffs)


def test_wave_from_exponential_tau():
    c = Fraction(2, 3)
    w = kdv_wave_from_tau(tau_exponential(c), depth=5)
    # e^{-c/mu} = 1 - c/mu + c^2/(2 mu^2) - ...
    assert w.coeff(0).constant_coeff() == ONE
    assert w.coeff(-1).constant_coeff() == Scalar.of(-c)
    assert w.coeff(-2).constant_coeff() == Scalar.of(c * c / 2)
    assert w.coeff(-3).constant_coeff() == Scalar.of(-(c ** 3) / 6)


def test_wave_leading_term_is_one():
    for tau in (tau_one(), tau_exponential(), tau_one_plus_q0()):
        w = kdv_wave_from_tau(tau, depth=4)
        assert w.coeff(0).constant_coeff() == ONE


def test_trivial_tau_passes():
    rep = kdv_hirota_residual(tau_one())
    assert rep.parity_ok and rep.passed(), rep.fails


def test_exponential_tau_passes():
    rep = kdv_hirota_residual(tau_exponential())
    assert rep.parity_ok and rep.passed(), rep.fails


def test_one_plus_q0_fails():
    rep = kdv_hirota_residual(tau_one_plus_q0())
    assert not rep.passed()
    assert any(k < 0 for k, _ in rep.fails)


def test_verdicts_stable_under_scaling():
    for build, want in ((tau_one, True), (tau_exponential, True),
                        (tau_one_plus_q0, False)):
        tau = build()
        scaled = KdvTau(vars=tau.vars, logtau=tau.logtau,
                        prefactor=Scalar.of(5),
                        complete_degree=tau.complete_degree)
        assert kdv_hirota_residual(scaled).passed() == want


def test_zero_prefactor_rejected():
    with pytest.raises(PreconditionError):
        KdvTau(vars=V, logtau=TimeSeries.zero(V), prefactor=Scalar.of(0))
