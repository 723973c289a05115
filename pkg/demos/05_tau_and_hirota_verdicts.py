"""From wave operators to tau and back, and the bilinear verdicts.

log tau is integrated from the triangular system of symbol logarithms;
the Miwa-shifted ratios of tau then reproduce the wave operators, and the
bilinear regularity verdicts certify (within explicit windows) that tau
solves the hierarchy.  tau = 1 and a perturbed tau show the failure mode
with exact symbolic witnesses.
"""

from todatau.eth_core import (LaxOperator, dress_left, dress_right_paired,
                              evolve_waves)
from todatau.hqe import hqe_regularity, hqe_residual, toda_regularity
from todatau.scalars import Scalar
from todatau.tau import TauSeries, build_tau, fay_residual, tau_de1_residual
from todatau.time_series import TimeSeries, TimeVars, eth_slots
from todatau.weyl import XPoly

DEPTH, EPS_HI = 14, 8
VARS = TimeVars(eth_slots(2), degree=3, y_degree=2)

vacuum = LaxOperator(u=XPoly.zero(), v=XPoly.zero())
pl0 = dress_left(vacuum, DEPTH, EPS_HI)
pr0 = dress_right_paired(pl0, vacuum, DEPTH, EPS_HI)
print("evolving to degree 3 and integrating log tau ...")
w = evolve_waves(pl0, pr0, VARS, 3, DEPTH, EPS_HI)
tau = build_tau(w)
print("log tau =", tau.logtau.render()[:110], "...")

print()
print("shift identities on the wave-operator symbols:")
for which in ("id1", "id2", "id4", "identity-a", "identity-b"):
    print("  %-11s zero: %s" % (which, fay_residual(which, w).is_zero()))

print()
print("the excluded tau equation (checked, not imposed):")
for n, r in tau_de1_residual(tau, w).items():
    print("  N=%d zero: %s" % (n, r.is_zero()))

print()
print("bilinear verdicts for the vacuum tau, m = -1..1, r = 0..1:")
for m in (-1, 0, 1):
    cells = hqe_regularity(tau, m, r_max=1)
    print("  m=%+d:" % m, [c.verdict for c in cells])

print()
print("negative controls:")
tv = TimeVars(eth_slots(2), degree=2, y_degree=2)
one = TauSeries(vars=tv, logtau=TimeSeries.zero(tv), n_max=2, eps_hi=EPS_HI)
rep = hqe_residual(one, -1, 1)
print("  tau = 1 at (m, r) = (-1, 1):", rep.verdict, "witness", rep.witness)
pert = TauSeries(vars=tv, logtau=TimeSeries.variable(
    tv, (0, 1), XPoly.x() * Scalar.eps(-1)), n_max=2, eps_hi=EPS_HI)
rep = hqe_residual(pert, 0, 0)
print("  perturbed tau at (0, 0):", rep.verdict, "witness", rep.witness)

print()
print("the restricted (lattice) verdict for tau = 1:")
slots = tuple(s for s in eth_slots(2) if s[1] == 1)
tv1 = TimeVars(slots, degree=2, y_degree=2)
one1 = TauSeries(vars=tv1, logtau=TimeSeries.zero(tv1), n_max=2, eps_hi=EPS_HI)
print("  m=0:", [c.verdict for c in toda_regularity(one1, 0, r_max=3, depth=12)])
cells = toda_regularity(one1, 1, r_max=3, depth=12)
print("  m=1:", [(c.r, c.verdict) for c in cells if c.verdict == "fail"],
      "witness", [c.witness for c in cells if c.verdict == "fail"][:1])
