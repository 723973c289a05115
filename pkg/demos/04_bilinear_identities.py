"""The bilinear equivalence battery.

For a wave pair, the kernel product W_L(x, q', S) S^r W_R(x, q'', S) is
fixed by the antiinvolution combined with swapping the two copies of the
times; reading coefficients turns this into residue cells indexed by
(m, r).  Both forms are checked, their correspondence is verified cell by
cell, and the trivial pair P_L = P_R = 1 shows the expected failure.
"""

from todatau.eth_core import (LaxOperator, dress_left, dress_right_paired,
                              evolve_waves, prop2_operator_residual,
                              prop2_residue_residual)
from todatau.scalars import Scalar
from todatau.shift_algebra import ShiftSeries
from todatau.time_series import TimeSeries, TimeVars, eth_slots
from todatau.weyl import DiffOp, XPoly

DEPTH, EPS_HI, N_MAX = 14, 8, 2
VARS = TimeVars(eth_slots(N_MAX), degree=2, y_degree=2)

vacuum = LaxOperator(u=XPoly.zero(), v=XPoly.zero())
pl0 = dress_left(vacuum, DEPTH, EPS_HI)
pr0 = dress_right_paired(pl0, vacuum, DEPTH, EPS_HI)
w = evolve_waves(pl0, pr0, VARS, 2, DEPTH, EPS_HI)

print("operator form, r = 0..3:")
for r in range(4):
    res = prop2_operator_residual(r, w.pl, w.pr, VARS, N_MAX)
    print("  r=%d zero: %s   valid %s" % (r, res.is_zero(), res.valid))

print()
print("residue form, |m| <= 2, r <= 2:")
cache = {}
for m in range(-2, 3):
    row = []
    for r in range(3):
        cell = prop2_residue_residual(m, r, w.pl, w.pr, VARS, N_MAX,
                                      _cache=cache)
        row.append("0" if cell.is_zero() and cell.certified else "?")
    print("  m=%+d:" % m, " ".join(row))

print()
print("the trivial pair P_L = P_R = 1 is NOT a wave pair:")
one = ShiftSeries.of(TimeSeries.const(VARS, DiffOp.of(1)))
cell = prop2_residue_residual(-1, 1, one, one, VARS, N_MAX)
print("  residue cell (m, r) = (-1, 1):",
      cell.value.constant_coeff().render())
res = prop2_operator_residual(1, one, one, VARS, N_MAX)
parts = {k: ts.constant_coeff().render() for k, ts in res.coeffs.items()
         if ts.constant_coeff() is not None}
print("  operator residual at r = 1, q = 0:", parts)
