"""Tau-function layer.

log tau is a truncated time-series with x-polynomial coefficients.  It is
built from an evolved wave pair by integrating the triangular system

    d/dq_{n,1} log tau = beta_n          (from a_N log tau = b_N)
    eps d/dx log tau   = Bern(btilde_0)  (the Bernoulli line)
    d/dq_{0,0}         = d/dx            (structural: q_{0,0} is never stored)

where b_N, btilde_N are the lambda-expansion coefficients of the logarithms
of the wave-operator symbols and a_N are the Schur-type differential
polynomials generated by the Miwa displacement.  The equation family
a_N(-d) log tau = btilde_N(x - eps) is deliberately not imposed; it is
re-checked on the result, as are the full compatibility residuals.

The gauge: coefficients of monomials in the q_{n,0} variables alone are
seeded (zero by default), matching the uniqueness statement that tau is
determined up to a factor independent of q_{0,0} and all q_{n,1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, factorial, inf

from .errors import IntegrabilityError, PreconditionError
from .scalars import Scalar
from .shift_algebra import LambdaSeries, ShiftSeries
from .time_series import TimeSeries, TimeVars, miwa_displacement
from .weyl import DiffOp, XPoly

__all__ = ["SchurOp", "schur_coefficient", "wave_log_coeffs", "TauSeries",
           "build_tau", "tau_de1_residual", "fay_residual", "tau_to_waves",
           "symbol_of", "ts_to_diffop", "ts_to_xpoly"]


# ---------------------------------------------------------------------------
# Schur-type differential polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchurOp:
    """a_N as a polynomial in the symbols eps*d/dq_{n,1}; monomials are
    sorted tuples of n-values, each carrying one factor of eps."""

    n: int
    monomials: dict

    def weight(self):
        return self.n

    def apply(self, ts, sign=+1):
        """a_N(sign * d) applied to a time series."""
        out = TimeSeries.zero(ts.vars, ts.mode)
        for mono, c in self.monomials.items():
            if any((nvar, 1) not in ts.vars.slots for nvar in mono):
                raise PreconditionError(
                    "a_%d involves d/dq_{%d,1} outside the variable set"
                    % (self.n, max(mono)))
            term = ts
            for nvar in mono:
                term = term.partial((nvar, 1))
            coeff = Scalar.eps(len(mono)) * (c * Fraction(sign ** len(mono)))
            out = out + term.scale(coeff)
        return out

    def render(self):
        parts = []
        for mono in sorted(self.monomials):
            c = self.monomials[mono]
            names = "*".join("d%d" % n for n in mono)
            parts.append("%s*eps^%d*%s" % (c, len(mono), names))
        return " + ".join(parts) if parts else "0"


_SCHUR_CACHE = {}


def schur_coefficient(n):
    """Coefficient of lambda^{-n} in exp(-sum_k k! lambda^{-k-1} d_k) - 1."""
    if n < 1:
        raise ValueError("need n >= 1")
    if n in _SCHUR_CACHE:
        return _SCHUR_CACHE[n]
    # collect partitions of n into parts (k+1), each part contributing a
    # factor -k! d_k, with the 1/m! symmetry factor for m parts
    monos = {}
    for m in range(1, n + 1):
        for combo in combinations_with_replacement(range(n), m):
            if sum(k + 1 for k in combo) != n:
                continue
            coeff = Fraction(1, factorial(m))
            # number of orderings of the multiset
            counts = {}
            for k in combo:
                counts[k] = counts.get(k, 0) + 1
            orderings = factorial(m)
            for c in counts.values():
                orderings //= factorial(c)
            for k in combo:
                coeff *= -factorial(k)
            monos[combo] = monos.get(combo, Fraction(0)) + coeff * orderings
    out = SchurOp(n, {k: v for k, v in monos.items() if v != 0})
    _SCHUR_CACHE[n] = out
    return out


# ---------------------------------------------------------------------------
# wave-operator symbols and their logarithms
# ---------------------------------------------------------------------------

def ts_to_xpoly(ts):
    """Convert a TimeSeries of order-0 DiffOps to one of XPolys."""
    def conv(op):
        if op.order > 0:
            raise PreconditionError("operator coefficient has positive order")
        return op.coeff(0)
    return ts.map_coeffs(conv)


def ts_to_diffop(ts):
    return ts.map_coeffs(DiffOp.of)


def symbol_of(ss, side, var="lam"):
    """lambda-symbol of a wave operator with scalar-function coefficients:
    the left symbol for the P_L side, the right symbol for the P_R side."""
    sym = ss.left_symbol(var) if side == "L" else ss.right_symbol(var)
    return sym.map_coeffs(ts_to_xpoly)


def _log_symbol(sym, unit, depth):
    """log of a symbol series 1*unit + (strictly lower lambda order)."""
    rest = sym + LambdaSeries.of(-unit, 0, var=sym.var)
    rest = rest.restrict_valid(-depth, 0)
    out = LambdaSeries.zero(sym.var)
    power = None
    for m in range(1, depth + 2):
        power = rest if power is None else (power * rest).restrict_valid(-depth, 0)
        if power.is_zero():
            break
        out = out + power.scale(Fraction((-1) ** (m + 1), m))
    return out


def wave_log_coeffs(pair):
    """b_N from log P_L, btilde_N from log P_R, and btilde_0 = log wtilde_0.

    Returns (b, btilde, b0) with b, btilde dicts N -> TimeSeries of XPolys.
    """
    vars = pair.vars
    depth = int(pair.depth)
    unit = TimeSeries.const(vars, XPoly.of(1))
    psym_l = symbol_of(pair.pl, "L")
    log_l = _log_symbol(psym_l, unit, depth)
    psym_r = symbol_of(pair.pr, "R")
    w0 = psym_r.coeff(0)
    if w0 is None:
        raise PreconditionError("wtilde_0 vanishes")
    c0 = w0.constant_coeff()
    if c0 is None or not (c0 - 1).is_zero():
        raise PreconditionError(
            "wtilde_0 constant term is not 1; its logarithm leaves the ring")
    w0_inv = w0.inverse(pair.eps_hi)
    normalized = psym_r.scale_left(w0_inv)
    log_r = _log_symbol(normalized, unit, depth)
    b0 = (w0 - unit).log1p()
    b = {-k: ts for k, ts in log_l.items()}
    btilde = {-k: ts for k, ts in log_r.items()}
    return b, btilde, b0


# ---------------------------------------------------------------------------
# building log tau
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TauSeries:
    """log tau plus the data needed to check and export it.

    ``complete_degree`` records to which total time-degree the stored
    log tau agrees with the true one.  A Miwa shift converts time-degree
    into lambda-depth, so everything derived from tau is certified only on
    cells whose time-degree plus lambda-budget stays within this bound;
    hand-built exact taus use ``inf``.
    """

    vars: TimeVars
    logtau: TimeSeries          # coefficients are XPolys in x
    seeds: dict = field(default_factory=dict)
    n_max: int = 0
    eps_hi: int = 8
    complete_degree: float = inf

    def tau_factor(self, mode="single"):
        """exp(log tau), usable as a multiplier (q_{0,0} absorbed in x)."""
        lt = self.logtau if mode == "single" else self.logtau.bilinear(+1)
        return lt.exp(XPoly.of(1))

    def shifted(self, k):
        return TauSeries(self.vars, self.logtau.shift_x(k), self.seeds,
                         self.n_max, self.eps_hi, self.complete_degree)


def _beta_chain(b, vars, n_top):
    """Solve the triangular system a_N log tau = b_N for the individual
    derivatives beta_n = d/dq_{n,1} log tau, n = 0..n_top."""
    beta = {}
    for n_idx in range(1, n_top + 2):
        a = schur_coefficient(n_idx)
        lead = Fraction(-1) * factorial(n_idx - 1)
        acc = b.get(n_idx, TimeSeries.zero(vars))
        for mono, c in a.monomials.items():
            if len(mono) == 1:
                continue
            # peel the last factor: (eps d)^mono log tau =
            # eps^{|mono|} d^{mono'} beta_{last}
            term = beta[mono[-1]]
            for nvar in mono[:-1]:
                term = term.partial((nvar, 1))
            acc = acc - term.scale(Scalar.eps(len(mono)) * c)
        beta[n_idx - 1] = acc.scale(Scalar.eps(-1) * Fraction(1, lead))
    return beta


def _all_indices(vars, degree):
    def rec(i, left):
        if i == len(vars.slots):
            yield ()
            return
        for e in range(left + 1):
            for rest in rec(i + 1, left - e):
                yield (e,) + rest
    return list(rec(0, degree))


def build_tau(pair, seeds=None, tau_degree=None):
    """Integrate log tau from an evolved wave pair.

    The q_{n,1} directions come from the beta chain, the x direction from
    the Bernoulli line, and the coefficients of pure q_{n,0} monomials are
    gauge seeds (zero unless supplied).  All remaining equations are then
    verified; a nonzero residual raises IntegrabilityError.

    Solving the beta chain costs one order of time-degree completeness per
    level (beta_n is complete to pair-degree minus n), so log tau is built
    to ``tau_degree`` = pair degree - (n_top - 1) by default; the pipeline
    evolves correspondingly deeper than the tau order it reports.
    """
    vars = pair.vars
    seeds = dict(seeds or {})
    n_top = max((s[0] for s in vars.slots if s[1] == 1), default=-1)
    if tau_degree is None:
        tau_degree = vars.degree - max(n_top - 1, 0)
    if tau_degree < 1:
        raise PreconditionError("pair degree too low for a tau order >= 1")
    tvars = TimeVars(vars.slots, degree=tau_degree, y_degree=vars.y_degree)
    b, btilde, b0 = wave_log_coeffs(pair)
    beta = _beta_chain(b, vars, n_top)
    bern = b0.map_coeffs(lambda p: p.bernoulli_apply())
    slot_pos = {s: i for i, s in enumerate(vars.slots)}

    terms = {}
    for alpha in sorted(_all_indices(vars, tau_degree), key=sum):
        chosen = None
        for slot in vars.slots:
            if slot[1] == 1 and alpha[slot_pos[slot]] > 0:
                chosen = slot
                break
        if chosen is not None:
            i = slot_pos[chosen]
            src = beta[chosen[0]]
            below = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
            c = src.coeff(below)
            if c is not None:
                terms[alpha] = c * Fraction(1, alpha[i])
        else:
            # pure q_{n,0} monomial (or the constant): x-dependence from the
            # Bernoulli line, x-constant from the gauge seed
            c = bern.coeff(alpha)
            val = XPoly.zero() if c is None else \
                (c * Scalar.eps(-1)).x_antiderivative()
            seed = seeds.get(alpha)
            if seed is not None:
                val = val + XPoly.of(seed)
            if not val.is_zero():
                terms[alpha] = val
    logtau = TimeSeries(tvars, terms)

    # compatibility: every equation of the system must hold on the result
    deg = tau_degree - 1
    for n in range(n_top + 1):
        want = TimeSeries(tvars, beta[n].terms)
        resid = (logtau.partial((n, 1)) - want).restrict_degree(deg)
        if not resid.is_zero():
            raise IntegrabilityError(
                "q_{%d,1} compatibility residual nonzero: %s"
                % (n, resid.render()[:200]))
    x_resid = logtau.derivative().scale(Scalar.eps(1)) - TimeSeries(tvars, bern.terms)
    if not x_resid.is_zero():
        raise IntegrabilityError("Bernoulli-line residual nonzero: %s"
                                 % x_resid.render()[:200])
    return TauSeries(vars=tvars, logtau=logtau, seeds=seeds, n_max=n_top,
                     eps_hi=pair.eps_hi, complete_degree=tau_degree)


def tau_de1_residual(tau, pair, n_check=None):
    """The excluded equation: a_N(-d) log tau - btilde_N(x - eps), N >= 1.

    The N-th relation differentiates N orders deep, so it is verified to
    time-degree tau_degree - N (skipped when that is negative).  N is also
    capped at n_top + 1: beyond that a_N involves derivative slots outside
    the variable set."""
    _, btilde, _ = wave_log_coeffs(pair)
    if n_check is None:
        n_check = min(int(pair.depth) - 2, 6, tau.n_max + 1)
    out = {}
    for n_idx in range(1, n_check + 1):
        deg = tau.vars.degree - n_idx
        if deg < 0:
            continue
        lhs = schur_coefficient(n_idx).apply(tau.logtau, sign=-1)
        src = btilde.get(n_idx)
        rhs = TimeSeries(tau.vars, src.terms if src is not None else {}).shift_x(-1)
        out[n_idx] = (lhs - rhs).restrict_degree(deg)
    return out


# ---------------------------------------------------------------------------
# Fay-type identity residuals
# ---------------------------------------------------------------------------

def _transpose_nested(ls, inner_var):
    """Swap the two grading layers of a nested series; the inner layers must
    be fully valid (exact), the outer window migrates inward."""
    out = {}
    s_lo, s_hi = inf, -inf
    for k, inner in ls.items():
        if not (inner.v_lo == -inf and inner.v_hi == inf):
            raise PreconditionError("transpose needs exact inner layers")
        s_lo = min(s_lo, inner.s_lo)
        s_hi = max(s_hi, inner.s_hi)
        for t, c in inner.items():
            out.setdefault(t, {})[k] = c
    if not out:
        return LambdaSeries.zero(inner_var)
    coeffs = {t: LambdaSeries(row, (ls.s_lo, ls.s_hi), (ls.v_lo, ls.v_hi),
                              var=ls.var)
              for t, row in out.items()}
    return LambdaSeries(coeffs, (s_lo, s_hi), var=inner_var)


def _lift_outer(ls, var):
    """View a series as the degree-0 coefficient of a new outer variable."""
    return LambdaSeries({0: ls}, (0, 0), var=var)


def _miwa_once(ts_series, sign, disp, var):
    """Miwa-shift every TimeSeries coefficient of a lambda-series whose own
    variable differs from ``var``, then flatten if the vars coincide."""
    return ts_series.map_coeffs(lambda ts: ts.miwa_shift(sign, disp, var))


def _degree_vs_depth_restrict(res, budget, nested=False):
    """Keep only trustworthy cells of a Miwa-shifted residual: a lambda
    depth of k consumed k orders of time-degree completeness, so the cell
    at lambda^{-k} is kept to time-degree budget - k (doubly so for nested
    two-slot series)."""
    def cut(ls, used):
        out = {}
        for k, c in ls.items():
            room = budget - used - max(-k, 0)
            if room < 0:
                continue
            if nested and isinstance(c, LambdaSeries):
                inner = cut(c, used + max(-k, 0))
                if not inner.is_zero():
                    out[k] = inner
            else:
                t = c.restrict_degree(room)
                if not t.is_zero():
                    out[k] = t
        return LambdaSeries(out, (ls.s_lo, ls.s_hi), (ls.v_lo, ls.v_hi),
                            var=ls.var)
    return cut(res, 0)


def fay_residual(which, pair):
    """LHS - RHS of the named identity on the wave-operator symbols.

    id1:  P_L(x,q,l) P_R(x-e, q-[1/l], l) - w0(x-e, q-[1/l])
    id4:  P_L(x,q,l) P_R(x,   q-[1/l], l) - w0(x, q)
    idb:  w0(x, q-[1/l]) P_L(x,q,l) - w0(x,q) P_L(x+e,q,l)
    id2:  two-slot symmetry of P_L(x,q,l_i) P_R(x-e, q-[1/l_1]-[1/l_2], l_i)
    ida:  P_L(x,q,l_1) P_L(x,q-[1/l_1],l_2) - P_L(x,q,l_2) P_L(x,q-[1/l_2],l_1)

    One-slot identities return a lambda-series over time series; two-slot
    identities a nested series (outer slot 1, inner slot 2).  Cells are
    restricted to the trustworthy region: the Miwa substitution converts
    lambda-depth into time-degree, so the lambda^{-k} cell is only complete
    to time-degree (pair degree - k).
    """
    vars = pair.vars
    disp = miwa_displacement(vars.slots)
    unit = TimeSeries.const(vars, XPoly.of(1))

    budget = vars.degree

    if which in ("id1", "id4", "identity-b"):
        psym_l = symbol_of(pair.pl, "L")
        psym_r = symbol_of(pair.pr, "R")
        w0 = psym_r.coeff(0)
        if which == "id1":
            pr_arg = psym_r.map_coeffs(lambda ts: ts.shift_x(-1))
            pr_shift = _miwa_once(pr_arg, -1, disp, psym_r.var).flatten()
            w0_shift = w0.shift_x(-1).miwa_shift(-1, disp, psym_r.var)
            res = psym_l * pr_shift - w0_shift
        elif which == "id4":
            pr_shift = _miwa_once(psym_r, -1, disp, psym_r.var).flatten()
            res = psym_l * pr_shift - LambdaSeries.of(w0, 0, var=psym_l.var)
        else:
            w0_shift = w0.miwa_shift(-1, disp, psym_l.var)
            pl_up = psym_l.map_coeffs(lambda ts: ts.shift_x(1))
            res = w0_shift * psym_l - LambdaSeries.of(w0, 0) * pl_up
        return _degree_vs_depth_restrict(res, budget)

    if which == "identity-a":
        sym1 = symbol_of(pair.pl, "L", var="lam1")
        sym2 = symbol_of(pair.pl, "L", var="lam2")
        lhs_first = sym1.map_coeffs(lambda ts: LambdaSeries.of(ts, 0, var="lam2"))
        second = _transpose_nested(_miwa_once(sym2, -1, disp, "lam1"), "lam1")
        lhs = lhs_first * second
        rhs_first = _lift_outer(sym2, "lam1")
        rhs_second = _miwa_once(sym1, -1, disp, "lam2")
        res = lhs - rhs_first * rhs_second
        return _degree_vs_depth_restrict(res, budget, nested=True)

    if which == "id2":
        out = []
        for var_main, var_other in (("lam1", "lam2"), ("lam2", "lam1")):
            psym_l = symbol_of(pair.pl, "L", var=var_main)
            psym_r = symbol_of(pair.pr, "R", var=var_main)
            pr_arg = psym_r.map_coeffs(lambda ts: ts.shift_x(-1))
            shifted = pr_arg.map_coeffs(
                lambda ts: ts.miwa_shift(-1, disp, var_main).map_coeffs(
                    lambda t2: t2.miwa_shift(-1, disp, var_other))
            )
            # layers: main{ main{ other{TS} } } -> flatten main, keep other inner
            flat = shifted.flatten()
            pl_lift = psym_l.map_coeffs(
                lambda ts: LambdaSeries.of(ts, 0, var=var_other))
            out.append(pl_lift * flat)
        lhs, rhs = out
        # bring both to lam1-outer form
        rhs_t = _transpose_nested(rhs, "lam1")
        res = lhs - rhs_t
        return _degree_vs_depth_restrict(res, budget, nested=True)

    raise ValueError("unknown identity %r" % which)


# ---------------------------------------------------------------------------
# recovering the wave operators from tau
# ---------------------------------------------------------------------------

def tau_to_waves(tau, depth, eps_hi):
    """P_L(x,q,l) = tau(x, q-[1/l]) / tau(x,q) and
    P_R(x,q,l) = tau(x+e, q+[1/l]) / tau(x,q), exported as shift series.

    Both ratios are computed as exponentials of log-tau differences, so no
    series division is needed.  Exact finite data; the ``depth`` parameter
    only truncates the lambda expansion of the exponential.
    """
    vars = tau.vars
    disp = miwa_displacement(vars.slots)
    unit = TimeSeries.const(vars, XPoly.of(1))
    lt = tau.logtau

    def ratio_exp(shift_x_amount, sign):
        moved = lt.shift_x(shift_x_amount).miwa_shift(sign, disp, "lam")
        delta = moved - LambdaSeries.of(lt, 0)
        delta = delta.restrict_valid(-depth, inf)
        return delta.exp_nilpotent(4 * depth + 16, unit, trunc=(-depth, 0))

    pl_sym = ratio_exp(0, -1)
    pr_sym = ratio_exp(1, +1)
    pl_ss = ShiftSeries(
        {k: ts_to_diffop(ts) for k, ts in pl_sym.items()},
        (pl_sym.s_lo, pl_sym.s_hi), (pl_sym.v_lo, pl_sym.v_hi))
    # right-normal data b~_k becomes the left coefficient b~_k(x + k eps)
    pr_ss = ShiftSeries(
        {k: ts_to_diffop(ts.shift_x(k)) for k, ts in pr_sym.items()},
        (pr_sym.s_lo, pr_sym.s_hi), (pr_sym.v_lo, pr_sym.v_hi))
    return pl_ss, pr_ss
