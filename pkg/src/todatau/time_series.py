"""Truncated multivariate power series in the flow times.

Variables are a fixed ordered tuple of slots.  For the hierarchy these are
pairs (n, alpha) with alpha in {0, 1}; the (0, 0) slot is deliberately
never a variable: every object depends on q_{0,0} only through x + q_{0,0},
so d/dq_{0,0} is the x-derivative and evaluation at q'_{0,0} - q''_{0,0} =
m*eps becomes an explicit x-shift.  The same class with integer slots
serves the KdV model.

Two modes:

* ``single``  -- exponents over the slots, total degree <= degree.
* ``bilinear``-- doubled variables (mean, difference) = ((q'+q'')/2,
  (q'-q'')/2); exponent tuples are the concatenation mean+diff.  The
  *total* degree (mean plus difference) is capped by ``degree`` and the
  difference degree additionally by ``y_degree``: a bilinear cell of total
  degree d is only faithful when every contributing single-mode
  coefficient of degree <= d is known, so the doubled series inherits the
  single-mode cap.

Coefficients are generic: Scalar, XPoly, DiffOp or a windowed series.
Products preserve coefficient order, so operator-valued series are safe.
"""

from __future__ import annotations

from fractions import Fraction
from math import inf

from .errors import PreconditionError, TruncationExhausted
from .scalars import Scalar
from .shift_algebra import LambdaSeries

__all__ = ["TimeVars", "TimeSeries", "eth_slots", "miwa_displacement"]


def eth_slots(n_max):
    """Canonical slot order (0,1), (1,0), (1,1), ..., (n_max,0), (n_max,1)."""
    slots = [(0, 1)]
    for n in range(1, n_max + 1):
        slots.append((n, 0))
        slots.append((n, 1))
    return tuple(slots)


def miwa_displacement(slots, var="lam"):
    """The special time displacement: slot (n,1) moves by n! lam^{-n-1} eps,
    slot (n,0) does not move.  Returns {slot: (lam_exponent, Scalar step)}."""
    from math import factorial

    out = {}
    for slot in slots:
        n, alpha = slot
        if alpha == 1:
            out[slot] = (-n - 1, Scalar.eps(1) * factorial(n))
    return out


class TimeVars:
    """Variable set and truncation orders."""

    __slots__ = ("slots", "degree", "y_degree")

    def __init__(self, slots, degree, y_degree=None):
        if degree < 1:
            raise ValueError("degree cap must be >= 1")
        self.slots = tuple(slots)
        self.degree = int(degree)
        self.y_degree = int(y_degree) if y_degree is not None else int(degree)

    def __setattr__(self, name, value):
        if name in self.__slots__ and not hasattr(self, name):
            object.__setattr__(self, name, value)
        else:
            raise AttributeError("TimeVars is immutable")

    def __getstate__(self):
        return (self.slots, self.degree, self.y_degree)

    def __setstate__(self, state):
        for s, v in zip(self.__slots__, state):
            object.__setattr__(self, s, v)


    def __eq__(self, other):
        return (isinstance(other, TimeVars) and self.slots == other.slots
                and self.degree == other.degree and self.y_degree == other.y_degree)

    __hash__ = None

    def index(self, slot):
        return self.slots.index(slot)

    def __repr__(self):
        return "TimeVars(%r, degree=%d, y_degree=%d)" % (
            list(self.slots), self.degree, self.y_degree)


def _zero_exp(n):
    return (0,) * n


class TimeSeries:
    __slots__ = ("vars", "mode", "terms")

    def __init__(self, vars, terms, mode="single"):
        if mode not in ("single", "bilinear"):
            raise ValueError("bad mode %r" % mode)
        nv = len(vars.slots)
        width = nv if mode == "single" else 2 * nv
        clean = {}
        for alpha, c in terms.items():
            if len(alpha) != width:
                raise ValueError("exponent width %d != %d" % (len(alpha), width))
            if c is None or c.is_zero():
                continue
            if mode == "single":
                if sum(alpha) > vars.degree:
                    continue
            else:
                if sum(alpha) > vars.degree or sum(alpha[nv:]) > vars.y_degree:
                    continue
            clean[tuple(alpha)] = c
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("TimeSeries is immutable")

    def __getstate__(self):
        return (self.vars, self.mode, self.terms)

    def __setstate__(self, state):
        for s, v in zip(self.__slots__, state):
            object.__setattr__(self, s, v)


    # -- constructors ---------------------------------------------------------

    @classmethod
    def const(cls, vars, c, mode="single"):
        width = len(vars.slots) if mode == "single" else 2 * len(vars.slots)
        return cls(vars, {_zero_exp(width): c}, mode)

    @classmethod
    def zero(cls, vars, mode="single"):
        return cls(vars, {}, mode)

    @classmethod
    def variable(cls, vars, slot, c):
        """c * q_slot in single mode (c is the coefficient-level unit times
        whatever factor is wanted)."""
        e = [0] * len(vars.slots)
        e[vars.index(slot)] = 1
        return cls(vars, {tuple(e): c}, "single")

    # -- structure ---------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def coeff(self, alpha):
        return self.terms.get(tuple(alpha))

    def constant_coeff(self):
        width = len(self.vars.slots) if self.mode == "single" else 2 * len(self.vars.slots)
        return self.terms.get(_zero_exp(width))

    def _check_compatible(self, other):
        if self.vars != other.vars or self.mode != other.mode:
            raise PreconditionError("incompatible variable sets or modes")

    def max_degree(self):
        return max((sum(a) for a in self.terms), default=-1)

    # -- linear structure -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        self._check_compatible(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            cur = out.get(a)
            out[a] = c if cur is None else cur + c
        return TimeSeries(self.vars, out, self.mode)

    def __neg__(self):
        return TimeSeries(self.vars, {a: -c for a, c in self.terms.items()}, self.mode)

    def __sub__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, s):
        if isinstance(s, (int, Fraction)):
            s = Scalar.of(s)
        return TimeSeries(self.vars, {a: c * s for a, c in self.terms.items()},
                          self.mode)

    # -- products ----------------------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, TimeSeries):
            return NotImplemented
        self._check_compatible(other)
        nv = len(self.vars.slots)
        dcap = self.vars.degree
        ycap = self.vars.y_degree
        single = self.mode == "single"
        out = {}
        for a, ca in self.terms.items():
            da = sum(a)
            for b, cb in other.terms.items():
                if da + sum(b) > dcap:
                    continue
                key = tuple(x + y for x, y in zip(a, b))
                if not single and sum(key[nv:]) > ycap:
                    continue
                term = ca * cb
                cur = out.get(key)
                out[key] = term if cur is None else cur + term
        return TimeSeries(self.vars, out, self.mode)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- coefficient maps ------------------------------------------------------------------

    def map_coeffs(self, fn):
        return TimeSeries(self.vars, {a: fn(c) for a, c in self.terms.items()},
                          self.mode)

    def shift_x(self, k):
        if k == 0:
            return self
        return self.map_coeffs(lambda c: c.shift_x(k))

    def sharp(self):
        return self.map_coeffs(lambda c: c.sharp())

    def derivative(self):
        return self.map_coeffs(lambda c: c.derivative())

    # -- calculus in the times ----------------------------------------------------------------

    def partial(self, slot):
        """Formal d/dq_slot (single mode)."""
        if self.mode != "single":
            raise PreconditionError("partial derivatives only in single mode")
        i = self.vars.index(slot)
        out = {}
        for a, c in self.terms.items():
            if a[i] == 0:
                continue
            key = a[:i] + (a[i] - 1,) + a[i + 1:]
            term = c * a[i]
            cur = out.get(key)
            out[key] = term if cur is None else cur + term
        return TimeSeries(self.vars, out, self.mode)

    def restrict_degree(self, d):
        return TimeSeries(self.vars,
                          {a: c for a, c in self.terms.items() if sum(a) <= d},
                          self.mode)

    def degree_part(self, d):
        return TimeSeries(self.vars,
                          {a: c for a, c in self.terms.items() if sum(a) == d},
                          self.mode)

    # -- exp / log -----------------------------------------------------------------------------

    def exp(self, unit, max_iter=None):
        """exp of a series that is nilpotent modulo truncation (positive
        degree, or coefficients dying in the eps window)."""
        if max_iter is None:
            max_iter = 4 * (self.vars.degree + self.vars.y_degree) + 16
        out = TimeSeries.const(self.vars, unit, self.mode)
        power = out
        for m in range(1, max_iter + 1):
            power = (power * self).scale(Fraction(1, m))
            if power.is_zero():
                return out
            out = out + power
        raise TruncationExhausted("time-series exp did not terminate; "
                                  "constant term is not nilpotent mod truncation")

    def log1p(self, max_iter=None):
        """log(1 + self) under the same nilpotency requirement."""
        if max_iter is None:
            max_iter = 4 * (self.vars.degree + self.vars.y_degree) + 16
        out = TimeSeries.zero(self.vars, self.mode)
        power = None
        for m in range(1, max_iter + 1):
            power = self if power is None else power * self
            if power.is_zero():
                return out
            out = out + power.scale(Fraction((-1) ** (m + 1), m))
        raise TruncationExhausted("time-series log did not terminate")

    def inverse(self, eps_hi, max_iter=None):
        """Inverse of c0 + nilpotent, with c0 invertible at coefficient level."""
        c0 = self.constant_coeff()
        if c0 is None:
            raise PreconditionError("constant term is zero; not invertible")
        c0_inv = c0.inverse(eps_hi)
        n = self.map_coeffs(lambda c: c0_inv * c) - TimeSeries.const(
            self.vars, c0_inv * c0, self.mode)
        if max_iter is None:
            max_iter = 4 * (self.vars.degree + self.vars.y_degree) + 16
        out = TimeSeries.const(self.vars, c0_inv * c0, self.mode)
        power = out
        for m in range(1, max_iter + 1):
            power = (-n) * power
            if power.is_zero():
                break
            out = out + power
        else:
            raise TruncationExhausted("time-series inverse did not terminate")
        return out.map_coeffs(lambda c: c * c0_inv)

    # -- substitutions ------------------------------------------------------------------------------

    def bilinear(self, side):
        """Substitute q -> mean + side*diff (side = +1 for the first copy
        of the times, -1 for the second)."""
        if self.mode != "single":
            raise PreconditionError("bilinear substitution needs single mode")
        from math import comb

        nv = len(self.vars.slots)
        out = {}
        for a, c in self.terms.items():
            # expand prod_i (mean_i + side*diff_i)^{a_i}
            expansions = [(_zero_exp(2 * nv), 1)]
            for i, ai in enumerate(a):
                if ai == 0:
                    continue
                new = []
                for base, mult in expansions:
                    for j in range(ai + 1):
                        e = list(base)
                        e[i] += ai - j
                        e[nv + i] += j
                        new.append((tuple(e), mult * comb(ai, j) * (side ** j)))
                expansions = new
            for e, mult in expansions:
                if sum(e[:nv]) > self.vars.degree or sum(e[nv:]) > self.vars.y_degree:
                    continue
                term = c * mult
                cur = out.get(e)
                out[e] = term if cur is None else cur + term
        return TimeSeries(self.vars, out, "bilinear")

    def miwa_shift(self, sign, displacement, var="lam"):
        """Substitute q_slot -> q_slot + sign * step * var^exp for every slot
        in ``displacement``; returns the result graded by var-degree, as a
        LambdaSeries whose coefficients are TimeSeries.

        The substitution of a polynomial is exact: each monomial produces a
        finite Laurent polynomial in var.
        """
        if self.mode != "single":
            raise PreconditionError("miwa shift needs single mode")
        from math import comb

        out = {}  # var exponent -> {alpha: coeff}
        for a, c in self.terms.items():
            expansions = [(a, 0, Scalar.of(1))]  # (exponents, var power, scalar)
            for slot, (lam_e, step) in displacement.items():
                i = self.vars.index(slot)
                new = []
                for exps, lam_p, sc in expansions:
                    ai = exps[i]
                    if ai == 0:
                        new.append((exps, lam_p, sc))
                        continue
                    for j in range(ai + 1):
                        e = exps[:i] + (ai - j,) + exps[i + 1:]
                        fac = (step ** j) * (comb(ai, j) * Fraction(sign ** j))
                        new.append((e, lam_p + lam_e * j, sc * fac))
                expansions = new
            for exps, lam_p, sc in expansions:
                if sc.is_zero():
                    continue
                bucket = out.setdefault(lam_p, {})
                term = c * sc
                cur = bucket.get(exps)
                bucket[exps] = term if cur is None else cur + term
        coeffs = {p: TimeSeries(self.vars, t, "single") for p, t in out.items()}
        coeffs = {p: t for p, t in coeffs.items() if not t.is_zero()}
        if not coeffs:
            return LambdaSeries.zero(var)
        return LambdaSeries(coeffs, (min(coeffs), max(coeffs)), var=var)

    # -- rendering ------------------------------------------------------------------------------------

    def _monomial_name(self, alpha):
        nv = len(self.vars.slots)
        names = []
        halves = [("q", alpha)] if self.mode == "single" else \
            [("qm", alpha[:nv]), ("qd", alpha[nv:])]
        for prefix, exps in halves:
            for slot, e in zip(self.vars.slots, exps):
                if e == 0:
                    continue
                tag = "_".join(str(s) for s in (slot if isinstance(slot, tuple) else (slot,)))
                names.append("%s%s" % (prefix, tag) + ("" if e == 1 else "^%d" % e))
        return "*".join(names) if names else "1"

    def render(self):
        if not self.terms:
            return "0"
        parts = []
        for alpha in sorted(self.terms):
            body = self.terms[alpha].render()
            if "+" in body or "-" in body[1:] or "*" in body:
                body = "(%s)" % body
            name = self._monomial_name(alpha)
            if name == "1":
                parts.append(body)
            else:
                parts.append(name if body == "1" else body + "*" + name)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return "<TimeSeries[%s] %s>" % (self.mode, self.render())


def bilinear_pair(f, g):
    """f(mean + diff) * g(mean - diff)."""
    return f.bilinear(+1) * g.bilinear(-1)
