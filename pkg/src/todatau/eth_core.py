"""The hierarchy proper: Lax operators, dressing solvers, the operator
logarithm, flow generators, Cauchy evolution of the wave operators in the
times, and the bilinear equivalence residuals (operator form and residue
form).

Conventions fixed here:

* A Lax operator is L = Lambda + u + Q e^v Lambda^{-1} with u, v polynomial
  eps-series in x and v of strictly positive eps-order.
* Dressing pair: L P_L = P_L Lambda and P_R L^# = Lambda P_R, with the
  integration-constant gauge: every dressing coefficient (w_k, and the
  right-normal wtilde_k) has zero constant term; wtilde_0 = 1 when v = 0.
* Flow variables are the slots of :func:`todatau.time_series.eth_slots`;
  the (0,0) direction is the x-translation and is never a stored variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, inf

from .errors import (InternalConsistencyError, PreconditionError,
                     TruncationExhausted)
from .scalars import LOG_Q, Scalar
from .shift_algebra import LambdaSeries, ShiftSeries
from .time_series import TimeSeries, TimeVars, eth_slots
from .weyl import DiffOp, XPoly

__all__ = ["harmonic", "LaxOperator", "dress_left", "dress_right",
           "dress_right_paired", "log_lax", "flow_generator",
           "flow_minus_part", "lax_rhs", "WavePair", "make_wave_pair",
           "evolve_waves", "wave_equation_residuals", "dressing_residuals",
           "zs_residual", "wave_exponent_pair", "prop2_operator_residual",
           "prop2_residue_residual", "ResidueCell"]

_HARMONIC = []


def harmonic(n):
    """C_0 = (1/2) log Q, C_n = C_{n-1} + 1/n."""
    if not _HARMONIC:
        _HARMONIC.append(Scalar.log_q() * Fraction(1, 2))
    while len(_HARMONIC) <= n:
        k = len(_HARMONIC)
        _HARMONIC.append(_HARMONIC[k - 1] + Scalar.of(Fraction(1, k)))
    return _HARMONIC[n]


@dataclass(frozen=True)
class LaxOperator:
    """Initial data (u, v) at q = 0 and its realization as a shift series."""

    u: XPoly
    v: XPoly

    def __post_init__(self):
        if not self.v.is_zero() and self.v.eps_supp_min() < 1:
            raise PreconditionError("v must have strictly positive eps-order")

    def realize(self, eps_hi):
        """Lambda + u + Q e^v Lambda^{-1} as an exact finite series."""
        ev = self.v.exp(eps_hi) if not self.v.is_zero() else XPoly.of(1, self.u.cap)
        coeffs = {1: DiffOp.of(XPoly.of(1, self.u.cap)),
                  -1: DiffOp.of(ev * Scalar.q_half_power(2))}
        if not self.u.is_zero():
            coeffs[0] = DiffOp.of(self.u)
        return ShiftSeries(coeffs, support=(-1, 1))


# ---------------------------------------------------------------------------
# dressing at q = 0
# ---------------------------------------------------------------------------

def dress_left(lax, depth, eps_hi):
    """P_L = 1 + w_1 Lambda^{-1} + ... with L P_L = P_L Lambda.

    Matching the coefficient of Lambda^{1-k} gives the difference equation
    w_k(x) - w_k(x+eps) = u w_{k-1} + Q e^v w_{k-2}(x-eps), solved by the
    discrete antiderivative with zero integration constants.
    """
    cap = lax.u.cap
    exact = lax.v.is_zero()
    ev = XPoly.of(1, cap) if exact else lax.v.exp(eps_hi)
    qev = ev * Scalar.q_half_power(2)
    w = {0: XPoly.of(1, cap)}
    for k in range(1, depth + 1):
        g = XPoly.zero(cap)
        if not lax.u.is_zero() and k - 1 in w:
            g = g + lax.u * w[k - 1]
        if k - 2 in w:
            g = g + qev * w[k - 2].shift_x(-1)
        wk = g.discrete_antiderivative()
        if not exact:
            # v brings genuinely infinite eps-series: cut at the declared
            # window (the zero-v recursion is exact and stays unwindowed)
            wk = wk.truncate_eps(eps_hi)
        if not wk.is_zero():
            w[k] = wk
    return ShiftSeries({-k: DiffOp.of(p) for k, p in w.items()},
                       support=(-inf, 0), valid=(-depth, inf))


def _w0_right(v, eps_hi):
    """wtilde_0 solving e^{v(x)} = w0(x)/w0(x-eps), gauge w0 = exp of the
    zero-constant discrete antiderivative."""
    if v.is_zero():
        return XPoly.of(1, v.cap)
    logw0 = (-(v.shift_x(1))).discrete_antiderivative()
    if logw0.eps_supp_min() < 1:
        raise PreconditionError(
            "wtilde_0 is not a polynomial eps-series for this v; "
            "need v of eps-order >= 2")
    return logw0.exp(eps_hi)


def dress_right(lax, depth, eps_hi):
    """P_R = wtilde_0 + Lambda^{-1} wtilde_1 + ... with P_R L^# = Lambda P_R.

    In left normal form P_R = sum p_k Lambda^{-k} with p_k(x) =
    wtilde_k(x - k eps); matching Lambda^{1-k} gives

        p_k(x+eps) - p_k(x) e^{v(x+(1-k)eps)} =
            p_{k-1}(x) u(x+(1-k)eps) + Q p_{k-2}(x).

    The gauge zeroes the constant term of every wtilde_k, k >= 1.
    """
    cap = lax.u.cap
    p = {0: _w0_right(lax.v, eps_hi)}
    for k in range(1, depth + 1):
        rhs = XPoly.zero(cap)
        if k - 1 in p and not lax.u.is_zero():
            rhs = rhs + p[k - 1] * lax.u.shift_x(1 - k)
        if k - 2 in p:
            rhs = rhs + p[k - 2] * Scalar.q_half_power(2)
        if lax.v.is_zero():
            pk = (-rhs).discrete_antiderivative()
            # re-gauge: wtilde_k(x) = p_k(x + k eps) gets zero constant term
            # (constants solve the homogeneous equation only when v = 0)
            c = pk.shift_x(k).constant_term()
            if not c.is_zero():
                pk = pk - XPoly.of(c, cap)
        else:
            h = lax.v.shift_x(1 - k).exp(eps_hi) - 1
            pk = (-rhs).discrete_antiderivative().truncate_eps(eps_hi)
            for _ in range(2 * eps_hi + 6):
                nxt = (-(rhs + pk * h)).discrete_antiderivative()
                nxt = nxt.truncate_eps(eps_hi)
                if (nxt - pk).is_zero():
                    pk = nxt
                    break
                pk = nxt
            else:
                raise TruncationExhausted("right dressing recursion did not settle")
        if not pk.is_zero():
            p[k] = pk
    return ShiftSeries({-k: DiffOp.of(q) for k, q in p.items()},
                       support=(-inf, 0), valid=(-depth, inf))


# ---------------------------------------------------------------------------
# the operator logarithm and the flows
# ---------------------------------------------------------------------------

def dress_right_paired(pl, lax, depth, eps_hi):
    """The right dressing operator gauge-aligned to a given left one:
    P_R := P_L^{-1} wtilde_0.

    Any zero-constant-gauge right operator differs from this one by a
    constant-coefficient left factor K, and the bilinear pair identities
    (the r = 0 operator identity in particular) hold exactly when K is a
    scalar: P_L P_R = wtilde_0 is fixed by the antiinvolution, while a
    nontrivial K contributes sum a_i L^{-i} whose lower and upper expansion
    branches the antiinvolution swaps.  The evolution pipeline therefore
    starts from this gauge; :func:`dress_right` keeps the plain
    zero-integration-constant gauge.
    """
    w0 = _w0_right(lax.v, eps_hi)
    out = pl.invert(depth, eps_hi)
    if not (w0 - 1).is_zero():
        out = out * ShiftSeries.of(DiffOp.of(w0))
    return out


def log_lax(pl, pr, unit, depth, eps_hi):
    """log L = (1/2)(log Q + eps (P_R^{-1} dP_R/dx)^# - eps (dP_L/dx) P_L^{-1}),
    a two-sided series with an explicit validity window."""
    left = pl.derivative_x() * pl.invert(depth, eps_hi)
    right = (pr.invert(depth, eps_hi) * pr.derivative_x()).sharp()
    half_eps = Scalar.eps(1) * Fraction(1, 2)
    out = ShiftSeries.of(unit * (LOG_Q * Fraction(1, 2)))
    return out + right.scale(half_eps) - left.scale(half_eps)


def _lax_power(lax_ss, n, cache):
    if n not in cache:
        if n == 0:
            raise ValueError("use the unit directly for L^0")
        cache[n] = lax_ss if n == 1 else _lax_power(lax_ss, n - 1, cache) * lax_ss
    return cache[n]


def _flow_full(slot, lax_ss, loglax, unit, cache):
    """The unprojected generator of the (n, alpha) flow."""
    n, alpha = slot
    if alpha == 1:
        core = _lax_power(lax_ss, n + 1, cache)
        return core.scale(Scalar.eps(-1) * Fraction(1, factorial(n + 1)))
    shifted_log = loglax + ShiftSeries.of(unit * (-harmonic(n)))
    if n == 0:
        core = shifted_log
    else:
        core = _lax_power(lax_ss, n, cache) * shifted_log
    return core.scale(Scalar.eps(-1) * Fraction(2, factorial(n)))


def flow_generator(slot, lax_ss, loglax, unit, cache=None):
    """Plus-projected generator of the (n, alpha) flow."""
    return _flow_full(slot, lax_ss, loglax, unit,
                      cache if cache is not None else {}).plus_part()


def flow_minus_part(slot, lax_ss, loglax, unit, cache=None):
    return _flow_full(slot, lax_ss, loglax, unit,
                      cache if cache is not None else {}).minus_part()


def lax_rhs(slot, lax_ss, loglax, unit, cache=None):
    """eps^{-1} [A_slot, L]; its support must stay inside {-1, 0, 1}."""
    gen = flow_generator(slot, lax_ss, loglax, unit, cache)
    comm = gen * lax_ss - lax_ss * gen
    out = comm.scale(Scalar.eps(-1))
    lo = max(out.v_lo, out.s_lo)
    hi = min(out.v_hi, out.s_hi)
    for k in out.keys_sorted():
        if (k < -1 or k > 1) and lo <= k <= hi:
            raise InternalConsistencyError(
                "flow would leave the Lax class: nonzero coefficient at "
                "Lambda^%d: %s" % (k, out.coeffs[k].render()))
    return out


# ---------------------------------------------------------------------------
# evolution of the wave operators in the times
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WavePair:
    """q-dependent wave operators (shift series with time-series
    coefficients), plus the reconstructed Lax data at the evolved degree."""

    vars: TimeVars
    pl: ShiftSeries
    pr: ShiftSeries
    lax: ShiftSeries
    loglax: ShiftSeries
    degree: int
    depth: int
    eps_hi: int

    @property
    def unit(self):
        return TimeSeries.const(self.vars, DiffOp.of(1))

    def pr_sharp(self):
        return self.pr.sharp()


def _lift(ss, vars):
    return ss.map_coeffs(lambda c: TimeSeries.const(vars, c))


def _reconstruct_lax(pl, depth, eps_hi):
    """L = P_L Lambda P_L^{-1}; verified to live on support {-1,0,1} and
    tightened accordingly (turning the checked identity into a window)."""
    raw = pl.mul_lambda_right(1) * pl.invert(depth, eps_hi)
    return raw.restrict_support(-1, 1)


def _first_active_slot(vars, alpha):
    for i, s in enumerate(vars.slots):
        if alpha[i] > 0:
            return i, s
    raise ValueError("zero multi-index has no active slot")


def _integrate_degree(rhs_by_slot, vars, new_degree):
    """Coefficients of total degree ``new_degree`` from the degree-(d) right
    hand sides: the first active variable of each target monomial supplies
    its value (cross-directions are verified separately by the
    Zakharov-Shabat residuals)."""
    slot_pos = {s: i for i, s in enumerate(vars.slots)}
    out = {}
    sup_lo, sup_hi = inf, -inf
    v_lo, v_hi = -inf, inf
    for rhs in rhs_by_slot.values():
        sup_lo = min(sup_lo, rhs.s_lo)
        sup_hi = max(sup_hi, rhs.s_hi)
        v_lo = max(v_lo, rhs.v_lo)
        v_hi = min(v_hi, rhs.v_hi)
    for slot, rhs in rhs_by_slot.items():
        i = slot_pos[slot]
        for k, ts in rhs.items():
            for beta, c in ts.terms.items():
                if sum(beta) != new_degree - 1:
                    continue
                alpha = beta[:i] + (beta[i] + 1,) + beta[i + 1:]
                j, first = _first_active_slot(vars, alpha)
                if first != slot:
                    continue
                bucket = out.setdefault(k, {})
                term = c * Fraction(1, alpha[i])
                cur = bucket.get(alpha)
                bucket[alpha] = term if cur is None else cur + term
    coeffs = {k: TimeSeries(vars, t) for k, t in out.items()}
    return ShiftSeries({k: t for k, t in coeffs.items() if not t.is_zero()},
                       support=(sup_lo, sup_hi), valid=(v_lo, v_hi))


def make_wave_pair(pl, pr, vars, depth, eps_hi, degree=0, strict=True):
    """Package explicit operators as a WavePair.  With ``strict`` the
    reconstructed Lax operator must verify its support; negative controls
    pass ``strict=False`` to truncate instead (their reconstruction is not
    expected to close)."""
    if pl.coeffs and not isinstance(next(iter(pl.coeffs.values())), TimeSeries):
        pl = _lift(pl, vars)
    if pr.coeffs and not isinstance(next(iter(pr.coeffs.values())), TimeSeries):
        pr = _lift(pr, vars)
    unit = TimeSeries.const(vars, DiffOp.of(1))
    raw = pl.mul_lambda_right(1) * pl.invert(depth, eps_hi)
    if strict:
        lax = raw.restrict_support(-1, 1)
    else:
        # negative controls: the [-1, 1] slice *defines* the control's Lax
        # operator, making downstream residuals a definite computation
        lax = ShiftSeries({k: c for k, c in raw.coeffs.items() if -1 <= k <= 1},
                          support=(-1, 1))
    loglax = log_lax(pl, pr, unit, depth, eps_hi)
    return WavePair(vars=vars, pl=pl, pr=pr, lax=lax, loglax=loglax,
                    degree=degree, depth=depth, eps_hi=eps_hi)


def evolve_waves(pl0, pr0, vars, degree, depth, eps_hi):
    """Formal power-series solution of the wave-operator equations to total
    time-degree ``degree``, built degree by degree from the initial
    dressing pair (Cauchy data at q = 0).

    The step computing the degree-(d+1) increment only needs products of
    degree-d data, so each step runs under a temporary degree-(d) cap; the
    quadratic cost in stored monomials then grows with the step instead of
    being paid at the full order from the start.
    """
    pl = _lift(pl0, vars)
    prs = _lift(pr0.sharp(), vars)
    for d in range(degree):
        step_vars = TimeVars(vars.slots, degree=max(d, 1), y_degree=vars.y_degree)
        unit = TimeSeries.const(step_vars, DiffOp.of(1))
        pl_d = pl.map_coeffs(lambda ts: TimeSeries(step_vars, ts.terms))
        prs_d = prs.map_coeffs(lambda ts: TimeSeries(step_vars, ts.terms))
        lax = _reconstruct_lax(pl_d, depth, eps_hi)
        loglax = log_lax(pl_d, prs_d.sharp(), unit, depth, eps_hi)
        cache = {}
        rhs_l = {}
        rhs_rs = {}
        for slot in vars.slots:
            gm = flow_minus_part(slot, lax, loglax, unit, cache)
            gp = flow_generator(slot, lax, loglax, unit, cache)
            rhs_l[slot] = (-gm) * pl_d
            rhs_rs[slot] = gp * prs_d
        pl = pl + _integrate_degree(rhs_l, vars, d + 1)
        prs = prs + _integrate_degree(rhs_rs, vars, d + 1)
    unit = TimeSeries.const(vars, DiffOp.of(1))
    lax = _reconstruct_lax(pl, depth, eps_hi)
    loglax = log_lax(pl, prs.sharp(), unit, depth, eps_hi)
    return WavePair(vars=vars, pl=pl, pr=prs.sharp(), lax=lax, loglax=loglax,
                    degree=degree, depth=depth, eps_hi=eps_hi)


# ---------------------------------------------------------------------------
# residual checks
# ---------------------------------------------------------------------------

def _restrict_q(ss, d):
    return ss.map_coeffs(lambda ts: ts.restrict_degree(d))


def dressing_residuals(w):
    """L P_L - P_L Lambda,  P_R L^# - Lambda P_R,  and the two-sided
    conjugation mismatch P_L Lambda P_L^{-1} - (P_R^{-1} Lambda P_R)^#."""
    lam = ShiftSeries.of(w.unit, 1)
    left = w.lax * w.pl - w.pl * lam
    right = w.pr * w.lax.sharp() - lam * w.pr
    pr_side = (w.pr.invert(w.depth, w.eps_hi) * lam * w.pr).sharp()
    pl_side = w.pl * lam * w.pl.invert(w.depth, w.eps_hi)
    return {"left": left, "right": right, "conjugation": pl_side - pr_side}


def wave_equation_residuals(w):
    """d/dq_slot P_L + (G_slot)_- P_L and d/dq_slot P_R^# - (G_slot)_+ P_R^#,
    both restricted to time-degree ``degree - 1``."""
    prs = w.pr_sharp()
    cache = {}
    out = {}
    d = w.degree - 1
    for slot in w.vars.slots:
        gm = flow_minus_part(slot, w.lax, w.loglax, w.unit, cache)
        gp = flow_generator(slot, w.lax, w.loglax, w.unit, cache)
        dl = w.pl.map_coeffs(lambda ts, s=slot: ts.partial(s))
        dr = prs.map_coeffs(lambda ts, s=slot: ts.partial(s))
        out[slot] = (_restrict_q(dl + gm * w.pl, d),
                     _restrict_q(dr - gp * prs, d))
    return out


def zs_residual(slot_a, slot_b, w):
    """d_a A_b - d_b A_a - [A_a, A_b] to time-degree ``degree - 1``."""
    cache = {}
    ga = flow_generator(slot_a, w.lax, w.loglax, w.unit, cache)
    gb = flow_generator(slot_b, w.lax, w.loglax, w.unit, cache)
    da_gb = gb.map_coeffs(lambda ts: ts.partial(slot_a))
    db_ga = ga.map_coeffs(lambda ts: ts.partial(slot_b))
    comm = ga * gb - gb * ga
    return _restrict_q(da_gb - db_ga - comm, w.degree - 1)


# ---------------------------------------------------------------------------
# the bilinear equivalence battery
# ---------------------------------------------------------------------------

_EXP_PAIR_CACHE = {}


def wave_exponent_pair(vars, n_max, sign=+1):
    """The combined exponential factor exp(sign * 2 E(y)) that the paired
    wave kernels produce after the primed/double-primed exponentials merge:

        2 E(y) = sum_{n>=0} Lambda^{n+1} y_{n,1} / (eps (n+1)!)
               + sum_{n>0} Lambda^n 2 (D - C_n) y_{n,0} / (eps n!)

    Every coefficient is x-independent, so the same object serves as the
    Lambda-form factor and (via its symbol) the lambda-form factor.
    """
    memo_key = (vars.slots, vars.degree, vars.y_degree, n_max, sign)
    hit = _EXP_PAIR_CACHE.get(memo_key)
    if hit is not None:
        return hit
    nv = len(vars.slots)
    coeffs = {}
    for slot in vars.slots:
        n, alpha = slot
        i = vars.index(slot)
        e = [0] * (2 * nv)
        e[nv + i] = 1
        e = tuple(e)
        if alpha == 1:
            power = n + 1
            op = DiffOp.of(Scalar.eps(-1) * Fraction(1, factorial(n + 1)))
        else:
            power = n
            op = (DiffOp.d() - DiffOp.of(harmonic(n))).scale(
                Scalar.eps(-1) * Fraction(2, factorial(n)))
        ts = TimeSeries(vars, {e: op.scale(Fraction(sign))}, "bilinear")
        cur = coeffs.get(power)
        coeffs[power] = ts if cur is None else cur + ts
    expo = ShiftSeries(coeffs, support=(1, n_max + 1))
    unit = TimeSeries.const(vars, DiffOp.of(1), "bilinear")
    out = expo.exp_nilpotent(vars.y_degree + 2, unit)
    _EXP_PAIR_CACHE[memo_key] = out
    return out


def _bilinear_side(ss, side):
    return ss.map_coeffs(lambda ts: ts.bilinear(side))


def prop2_operator_residual(r, pl, pr, vars, n_max):
    """W_L(x, q', Lambda) Lambda^r W_R(x, q'', Lambda)
       - {W_L(x, q'', Lambda) Lambda^r W_R(x, q', Lambda)}^#
    in doubled variables (the first-slot/second-slot times are mean +- diff,
    with equal (0,0) components)."""
    pl_p, pl_m = _bilinear_side(pl, +1), _bilinear_side(pl, -1)
    pr_p, pr_m = _bilinear_side(pr, +1), _bilinear_side(pr, -1)
    e_plus = wave_exponent_pair(vars, n_max, +1)
    e_minus = wave_exponent_pair(vars, n_max, -1)
    lhs = pl_p.mul_lambda_right(r) * (e_plus * pr_m)
    rhs = pl_m.mul_lambda_right(r) * (e_minus * pr_p)
    return lhs - rhs.sharp()


@dataclass(frozen=True)
class ResidueCell:
    """One (m, r) cell of the residue-form identity."""

    m: int
    r: int
    value: TimeSeries
    certified: bool

    def is_zero(self):
        return self.value.is_zero()

    def witness(self):
        if self.value.is_zero():
            return None
        alpha = sorted(self.value.terms)[0]
        return self.value.terms[alpha].render()


def _symbol_products(pl, pr, vars, n_max, m, var="lam"):
    """The two lambda-symbol products entering the residue form at shift m."""
    pl_p = _bilinear_side(pl, +1)
    pl_m = _bilinear_side(pl, -1).map_coeffs(lambda ts: ts.shift_x(-m))
    pr_p = _bilinear_side(pr, +1)
    pr_m = _bilinear_side(pr, -1).map_coeffs(lambda ts: ts.shift_x(-m))
    e_plus = wave_exponent_pair(vars, n_max, +1).left_symbol(var)
    e_minus = wave_exponent_pair(vars, n_max, -1).left_symbol(var)
    direct = pl_p.left_symbol(var) * e_plus * pr_m.right_symbol(var)
    sharped = (pr_p.right_symbol(var).map_coeffs(lambda ts: ts.sharp())
               * e_minus.map_coeffs(lambda ts: ts.sharp())
               * pl_m.left_symbol(var).map_coeffs(lambda ts: ts.sharp()))
    return direct, sharped


def prop2_residue_residual(m, r, pl, pr, vars, n_max,
                           _cache=None):
    """Res_{lam=inf} lam^r (lam/sqrt(Q))^m W_L(x,q',lam) W_R(x-m eps,q'',lam)
    minus the sharped mirror at power -m, both residues read as the
    coefficient of lam^0 of the braced series."""
    if _cache is not None and m in _cache:
        direct, sharped = _cache[m]
    else:
        direct, sharped = _symbol_products(pl, pr, vars, n_max, m)
        if _cache is not None:
            _cache[m] = (direct, sharped)
    zero = TimeSeries.zero(vars, "bilinear")
    lhs_k, rhs_k = -r - m, -r + m
    lhs = direct.coeff(lhs_k)
    rhs = sharped.coeff(rhs_k)
    lhs = (lhs if lhs is not None else zero).scale(Scalar.q_half_power(-m))
    rhs = (rhs if rhs is not None else zero).scale(Scalar.q_half_power(m))
    certified = direct.cell_certified(lhs_k) and sharped.cell_certified(rhs_k)
    return ResidueCell(m=m, r=r, value=lhs - rhs, certified=certified)
