"""A tour of the exact ground ring and the operator algebra.

Everything in this package is computed over exact rationals extended by
the symbols Q^(1/2), log Q and the expansion parameter eps.  This script
walks through the generators and the antiinvolution.
"""

from fractions import Fraction

from todatau.scalars import EPS, LOG_Q, Q, SQRT_Q, Scalar
from todatau.shift_algebra import ShiftSeries
from todatau.weyl import DiffOp, XPoly

print("== ground ring ==")
s = Scalar.of(Fraction(-1, 2)) * Scalar.q_half_power(3) * LOG_Q * Scalar.eps(-1)
print("a typical coefficient:", s.render())
print("sqrt(Q)^2 == Q:", SQRT_Q * SQRT_Q == Q)
print("eps * eps^-1 == 1:", EPS * Scalar.eps(-1) == Scalar.of(1))

print()
print("== the Weyl relation D a(x) = a(x) D + eps a'(x) ==")
X = XPoly.x()
D = DiffOp.d()
print("D * x       =", (D * DiffOp.of(X)).render())
print("D * x^2     =", (D * DiffOp.of(X * X)).render())
print("(xD)^2      =", (DiffOp({1: X}) * DiffOp({1: X})).render())

print()
print("== the antiinvolution: D -> -D + logQ, x -> x, S -> Q/S ==")
print("D^#         =", D.sharp().render())
print("(xD)^#      =", DiffOp({1: X}).sharp().render())
print("(D^#)^#     =", D.sharp().sharp().render())
lam = ShiftSeries.of(DiffOp.of(1), 1)
xlam = ShiftSeries.of(DiffOp.of(X), 1)
print("S^#         =", lam.sharp().render("S"))
print("(x S)^#     =", xlam.sharp().render("S"))

print()
print("== discrete antiderivative and the Bernoulli operator ==")
f = X.discrete_antiderivative()
print("f with f(x) - f(x+eps) = x:   f =", f.render())
print("check:", (f - f.shift_x(1)).render())
g = (X * X).bernoulli_apply()
print("Bernoulli operator on x^2:   ", g.render())
