"""The KdV model as a calibration target.

The same tau/vertex machinery in the half-integer variable
mu = (2 lambda)^(1/2): the wave series from tau-ratios, parity tracking
(odd mu-powers must cancel for the expression to be single-valued in
lambda), and the regularity verdict.
"""

from fractions import Fraction

from todatau.kdv import (KdvTau, kdv_hirota_residual, kdv_vars,
                         kdv_wave_from_tau)
from todatau.scalars import ONE, Scalar
from todatau.time_series import TimeSeries

V = kdv_vars(n_max=2, degree=4, y_degree=3)

print("tau = 1:")
one = KdvTau(vars=V, logtau=TimeSeries.zero(V))
print("  wave series:", kdv_wave_from_tau(one).render("mu"))
rep = kdv_hirota_residual(one)
print("  parity ok:", rep.parity_ok, " verdict:", rep.verdict)

print()
c = Fraction(2, 3)
print("tau = exp(c q0 / eps) with c = %s:" % c)
expo = KdvTau(vars=V, logtau=TimeSeries.variable(
    V, 0, Scalar.of(c) * Scalar.eps(-1)))
w = kdv_wave_from_tau(expo, depth=4)
print("  wave series (q = 0 slice): 1 %+s/mu %+s/mu^2 ..." % (
    w.coeff(-1).constant_coeff().render(),
    w.coeff(-2).constant_coeff().render()))
rep = kdv_hirota_residual(expo)
print("  parity ok:", rep.parity_ok, " verdict:", rep.verdict)

print()
print("tau agreeing with 1 + q0 through the working order:")
pert = KdvTau(vars=V, logtau=TimeSeries.variable(V, 0, ONE).log1p())
rep = kdv_hirota_residual(pert)
print("  verdict:", rep.verdict)
print("  first witnesses:", rep.fails[:2])

print()
print("projective gauge: verdicts under tau -> 5 tau:")
for tau, name in ((one, "tau=1"), (pert, "1+q0")):
    scaled = KdvTau(vars=V, logtau=tau.logtau, prefactor=Scalar.of(5),
                    complete_degree=tau.complete_degree)
    print("  %-6s -> %s" % (name, kdv_hirota_residual(scaled).verdict))
