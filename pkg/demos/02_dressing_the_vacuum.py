"""Dressing the stationary Lax operator.

L = S + u + Q e^v / S with u = v = 0 has closed-form dressing operators:
w_2 = -Qx/eps on the left and wtilde_2 = Qx/eps on the right.  The script
solves the dressing recursions, verifies the residuals exactly, and prints
the two-sided operator logarithm.
"""

from todatau.eth_core import (LaxOperator, dress_left, dress_right,
                              dress_right_paired, log_lax)
from todatau.shift_algebra import ShiftSeries
from todatau.weyl import DiffOp, XPoly

DEPTH, EPS_HI = 8, 6

vacuum = LaxOperator(u=XPoly.zero(), v=XPoly.zero())
L = vacuum.realize(EPS_HI)
print("L =", L.render("S"))

pl = dress_left(vacuum, DEPTH, EPS_HI)
print()
print("P_L =", pl.render("S"))
residual = L * pl - pl.mul_lambda_right(1)
print("L P_L - P_L S == 0:", residual.is_zero(), "|", residual.window_note())

pr = dress_right(vacuum, DEPTH, EPS_HI)
print()
print("P_R (zero-constant gauge) =", pr.render("S"))
lam = ShiftSeries.of(DiffOp.of(1), 1)
print("P_R L^# - S P_R == 0:", (pr * L.sharp() - lam * pr).is_zero())

pr2 = dress_right_paired(pl, vacuum, DEPTH, EPS_HI)
print()
print("P_R (pair-aligned gauge P_L^{-1} w0) =", pr2.render("S"))
print("still a dressing operator:", (pr2 * L.sharp() - lam * pr2).is_zero())
print("P_L P_R is now fixed by #:",
      ((pl * pr2) - (pl * pr2).sharp()).is_zero())

ll = log_lax(pl, pr2, DiffOp.of(1), DEPTH, EPS_HI)
print()
print("log L =", ll.render("S"))
print("[log L, L] == 0:", (ll * L - L * ll).is_zero())
