"""Window-truncated Laurent series in the shift operator and in symbols.

Two series classes share the same window bookkeeping:

* :class:`ShiftSeries` -- series sum_k a_k * Lambda^k in left normal form,
  where Lambda is the shift x -> x + eps, so Lambda^i a(x) = a(x + i*eps)
  Lambda^i.  Coefficients are any objects with ``+``, ``*``, ``-`` (unary),
  ``is_zero()`` and ``shift_x(k)``; in practice DiffOp or a TimeSeries of
  DiffOps.

* :class:`LambdaSeries` -- series in a commuting indeterminate (lambda, or
  mu for the half-integer KdV variable); coefficient order is preserved in
  products, so noncommutative coefficients are fine.

Windows.  Each series carries certified support bounds [s_lo, s_hi]
(true coefficients vanish outside) and a validity interval [v_lo, v_hi]
(stored coefficients equal the true ones there; outside validity but
inside support nothing is claimed).  Products and sums propagate both,
and every downstream check asserts only inside validity.  Validity is
normalized to +-inf whenever it covers the support on that side, because
coefficients beyond certified support are exactly zero.
"""

from __future__ import annotations

from fractions import Fraction
from math import inf

from .errors import InternalConsistencyError, PreconditionError, TruncationExhausted
from .scalars import Scalar

__all__ = ["ShiftSeries", "LambdaSeries"]


def _norm_windows(coeffs, s_lo, s_hi, v_lo, v_hi):
    """Drop zero/out-of-window keys and normalize window edges."""
    clean = {}
    for k, c in coeffs.items():
        if c is None or (hasattr(c, "is_zero") and c.is_zero()):
            continue
        if k < s_lo or k > s_hi:
            raise InternalConsistencyError(
                "stored coefficient at %d outside certified support [%s, %s]"
                % (k, s_lo, s_hi))
        if v_lo <= k <= v_hi:
            clean[k] = c
    if s_lo > s_hi:
        # empty support: canonical zero, valid everywhere
        return {}, inf, -inf, -inf, inf
    if v_lo <= s_lo:
        v_lo = -inf
    if v_hi >= s_hi:
        v_hi = inf
    if v_lo > v_hi:
        raise TruncationExhausted(
            "valid window collapsed: support [%s, %s], validity [%s, %s]"
            % (s_lo, s_hi, v_lo, v_hi))
    return clean, s_lo, s_hi, v_lo, v_hi


def _mul_windows(a, b):
    s_lo = a.s_lo + b.s_lo
    s_hi = a.s_hi + b.s_hi
    v_lo, v_hi = -inf, inf
    if a.v_lo > a.s_lo:
        v_lo = max(v_lo, a.v_lo + b.s_hi)
    if b.v_lo > b.s_lo:
        v_lo = max(v_lo, b.v_lo + a.s_hi)
    if a.v_hi < a.s_hi:
        v_hi = min(v_hi, a.v_hi + b.s_lo)
    if b.v_hi < b.s_hi:
        v_hi = min(v_hi, b.v_hi + a.s_lo)
    return s_lo, s_hi, v_lo, v_hi


class _LaurentBase:
    __slots__ = ("coeffs", "s_lo", "s_hi", "v_lo", "v_hi")

    def __init__(self, coeffs, support=(-inf, inf), valid=(-inf, inf)):
        s_lo, s_hi = support
        v_lo, v_hi = valid
        clean, s_lo, s_hi, v_lo, v_hi = _norm_windows(dict(coeffs), s_lo, s_hi, v_lo, v_hi)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "s_lo", s_lo)
        object.__setattr__(self, "s_hi", s_hi)
        object.__setattr__(self, "v_lo", v_lo)
        object.__setattr__(self, "v_hi", v_hi)

    def __setattr__(self, *a):
        raise AttributeError("%s is immutable" % type(self).__name__)

    def __getstate__(self):
        cls = type(self)
        slots = []
        for klass in cls.__mro__:
            slots.extend(getattr(klass, "__slots__", ()))
        return tuple(getattr(self, s) for s in slots)

    def __setstate__(self, state):
        cls = type(self)
        slots = []
        for klass in cls.__mro__:
            slots.extend(getattr(klass, "__slots__", ()))
        for s, v in zip(slots, state):
            object.__setattr__(self, s, v)


    # -- structure ----------------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def coeff(self, k):
        return self.coeffs.get(k)

    def cell_certified(self, k):
        """True when the coefficient at k is exactly known (stored or zero)."""
        return (self.v_lo <= k <= self.v_hi) or k < self.s_lo or k > self.s_hi

    @property
    def support(self):
        return (self.s_lo, self.s_hi)

    @property
    def valid(self):
        return (self.v_lo, self.v_hi)

    def _like(self, coeffs, support, valid):
        return type(self)(coeffs, support, valid)

    # -- linear structure -----------------------------------------------------

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        s_lo = min(self.s_lo, other.s_lo)
        s_hi = max(self.s_hi, other.s_hi)
        v_lo = max(self.v_lo, other.v_lo)
        v_hi = min(self.v_hi, other.v_hi)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            cur = out.get(k)
            out[k] = c if cur is None else cur + c
        return self._like(out, (s_lo, s_hi), (v_lo, v_hi))

    def __neg__(self):
        return self._like({k: -c for k, c in self.coeffs.items()},
                          self.support, self.valid)

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self + (-other)

    def __eq__(self, other):
        """Mathematical equality on the common validity window."""
        if type(other) is not type(self):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def scale(self, s):
        """Multiply every coefficient by a central scalar (int/Fraction/Scalar)."""
        if isinstance(s, (int, Fraction)):
            s = Scalar.of(s)
        return self._like({k: c * s for k, c in self.coeffs.items()},
                          self.support, self.valid)

    def map_coeffs(self, fn):
        """Apply a window-preserving coefficient map (shift, sharp, lift...)."""
        return self._like({k: fn(c) for k, c in self.coeffs.items()},
                          self.support, self.valid)

    # -- window surgery --------------------------------------------------------

    def restrict_valid(self, lo, hi):
        return self._like({k: c for k, c in self.coeffs.items() if lo <= k <= hi},
                          self.support, (max(self.v_lo, lo), min(self.v_hi, hi)))

    def restrict_support(self, lo, hi):
        """Assert coefficients outside [lo, hi] vanish, then tighten support.

        Used after structural identities (e.g. a conjugated Lax operator)
        to upgrade 'verified zero within validity' into a support bound.
        """
        for k, c in self.coeffs.items():
            if not lo <= k <= hi:
                raise InternalConsistencyError(
                    "nonzero coefficient at %d outside claimed support [%d, %d]: %s"
                    % (k, lo, hi, c))
        return self._like({k: c for k, c in self.coeffs.items() if lo <= k <= hi},
                          (lo, hi), self.valid)

    def truncated(self, lo, hi):
        """Forget data outside [lo, hi], recording the truncation in validity."""
        return self._like({k: c for k, c in self.coeffs.items() if lo <= k <= hi},
                          self.support,
                          (max(self.v_lo, lo if self.s_lo < lo else -inf),
                           min(self.v_hi, hi if self.s_hi > hi else inf)))

    def _mul_range(self, other):
        if self.is_zero() or other.is_zero():
            return None
        s_lo, s_hi, v_lo, v_hi = _mul_windows(self, other)
        lo_k = max(s_lo, v_lo)
        hi_k = min(s_hi, v_hi)
        if lo_k == -inf or hi_k == inf:
            raise InternalConsistencyError(
                "product would need unbounded coefficient range; "
                "truncate the factors first")
        return s_lo, s_hi, v_lo, v_hi, lo_k, hi_k

    # -- iteration helpers -------------------------------------------------------

    def items(self):
        return self.coeffs.items()

    def keys_sorted(self):
        return sorted(self.coeffs)

    def render(self, sym="T"):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            body = self.coeffs[k].render()
            if "+" in body or "-" in body[1:] or "*" in body:
                body = "(%s)" % body
            if k == 0:
                parts.append(body)
            else:
                ts = sym if k == 1 else "%s^%d" % (sym, k)
                parts.append(ts if body == "1" else body + "*" + ts)
        return " + ".join(parts).replace("+ -", "- ")

    def window_note(self):
        return "support [%s, %s], valid [%s, %s]" % (self.s_lo, self.s_hi,
                                                     self.v_lo, self.v_hi)


class ShiftSeries(_LaurentBase):
    """Laurent series in the shift operator, left normal form."""

    # -- constructors -------------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls({}, (inf, -inf))

    @classmethod
    def of(cls, c, k=0):
        """c * Lambda^k as an exact finite series."""
        if c.is_zero():
            return cls.zero()
        return cls({k: c}, (k, k))

    @classmethod
    def from_coeffs(cls, coeffs):
        """Exact finite series from stored coefficients."""
        keys = [k for k, c in coeffs.items() if not c.is_zero()]
        if not keys:
            return cls.zero()
        return cls(coeffs, (min(keys), max(keys)))

    # -- multiplicative structure ---------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, ShiftSeries):
            return NotImplemented
        rng = self._mul_range(other)
        if rng is None:
            return ShiftSeries.zero()
        s_lo, s_hi, v_lo, v_hi, lo_k, hi_k = rng
        out = {}
        for i, a in self.coeffs.items():
            shifted = {j: c.shift_x(i) for j, c in other.coeffs.items()
                       if lo_k <= i + j <= hi_k} if i != 0 else other.coeffs
            for j, b in shifted.items():
                k = i + j
                if not lo_k <= k <= hi_k:
                    continue
                term = a * b
                cur = out.get(k)
                out[k] = term if cur is None else cur + term
        return ShiftSeries(out, (s_lo, s_hi), (v_lo, v_hi))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return NotImplemented

    def mul_lambda_right(self, r):
        """self * Lambda^r (pure re-indexing)."""
        if r == 0:
            return self
        return ShiftSeries({k + r: c for k, c in self.coeffs.items()},
                           (self.s_lo + r, self.s_hi + r),
                           (self.v_lo + r, self.v_hi + r))

    def mul_lambda_left(self, r):
        """Lambda^r * self (re-index and shift coefficients)."""
        if r == 0:
            return self
        return ShiftSeries({k + r: c.shift_x(r) for k, c in self.coeffs.items()},
                           (self.s_lo + r, self.s_hi + r),
                           (self.v_lo + r, self.v_hi + r))

    # -- projections -----------------------------------------------------------------

    def plus_part(self):
        return ShiftSeries({k: c for k, c in self.coeffs.items() if k >= 0},
                           (max(self.s_lo, 0), self.s_hi), self.valid)

    def minus_part(self):
        return ShiftSeries({k: c for k, c in self.coeffs.items() if k < 0},
                           (self.s_lo, min(self.s_hi, -1)), self.valid)

    # -- the antiinvolution -------------------------------------------------------------

    def sharp(self):
        """Antihomomorphism with Lambda^# = Q Lambda^{-1} on top of the
        coefficient-level involution."""
        out = {}
        for k, c in self.coeffs.items():
            qk = Scalar.q_half_power(2 * k)
            out[-k] = (c.sharp().shift_x(-k)) * qk
        return ShiftSeries(out, (-self.s_hi, -self.s_lo), (-self.v_hi, -self.v_lo))

    # -- inversion ---------------------------------------------------------------------

    def invert(self, depth, eps_hi):
        """Inverse of A = C*Lambda^j + lower order, certified to
        Lambda-depth ``depth`` below the leading exponent -j of the result.

        The leading coefficient C must be invertible at the coefficient
        level (an order-0 operator with invertible constant part)."""
        if self.is_zero():
            raise PreconditionError("cannot invert zero series")
        if self.s_hi == inf or self.v_hi < self.s_hi:
            raise PreconditionError("leading coefficient is not certified")
        j = self.s_hi
        lead = self.coeffs.get(j)
        if lead is None:
            raise PreconditionError("no stored leading coefficient at top support")
        lead_inv = lead.inverse(eps_hi)
        if self.v_lo > self.s_lo:
            depth = min(depth, j - self.v_lo)
        depth = int(depth)
        # A * Lambda^{-j} = lead * (1 + N) with N strictly lower order
        n_coeffs = {}
        for k, c in self.coeffs.items():
            if k != j:
                n_coeffs[k - j] = lead_inv * c
        n = ShiftSeries(n_coeffs,
                        (self.s_lo - j if self.s_lo > -inf else -inf, -1),
                        (max(-depth, self.v_lo - j), inf))
        # (1 + N)^{-1} lead^{-1} = sum_m (-N)^m lead^{-1}
        total = ShiftSeries.of(lead_inv)
        term = ShiftSeries.of(lead_inv)
        for _ in range(depth):
            term = ((-n) * term).truncated(-depth, 0)
            if term.is_zero():
                break
            total = total + term
        out = total.mul_lambda_left(-j)
        return ShiftSeries(out.coeffs, (-inf, -j),
                           (max(out.v_lo, -j - depth), inf))

    # -- calculus -----------------------------------------------------------------------

    def derivative_x(self):
        return self.map_coeffs(lambda c: c.derivative())

    def exp_nilpotent(self, max_iter, unit):
        """exp of a series whose coefficient nilpotency (in q or y degree)
        terminates the expansion.  ``unit`` is the coefficient-level 1."""
        out = ShiftSeries.of(unit)
        if self.is_zero():
            return out
        power = ShiftSeries.of(unit)
        for m in range(1, max_iter + 1):
            power = power * self
            power = power.scale(Fraction(1, m))
            if power.is_zero():
                return out
            out = out + power
        raise TruncationExhausted("exp did not terminate in %d steps" % max_iter)

    # -- symbols ------------------------------------------------------------------------

    def left_symbol(self, var="lam"):
        return LambdaSeries(dict(self.coeffs), self.support, self.valid, var=var)

    def right_symbol(self, var="lam"):
        return LambdaSeries({k: c.shift_x(-k) for k, c in self.coeffs.items()},
                            self.support, self.valid, var=var)

    def __repr__(self):
        return "<ShiftSeries %s | %s>" % (self.render("L"), self.window_note())


class LambdaSeries(_LaurentBase):
    """Laurent series in a commuting symbol; coefficient order preserved."""

    __slots__ = ("var",)

    def __init__(self, coeffs, support=(-inf, inf), valid=(-inf, inf), var="lam"):
        super().__init__(coeffs, support, valid)
        object.__setattr__(self, "var", var)

    def _like(self, coeffs, support, valid):
        return LambdaSeries(coeffs, support, valid, var=self.var)

    @classmethod
    def zero(cls, var="lam"):
        return cls({}, (inf, -inf), var=var)

    @classmethod
    def of(cls, c, k=0, var="lam"):
        if c.is_zero():
            return cls.zero(var)
        return cls({k: c}, (k, k), var=var)

    def __add__(self, other):
        if isinstance(other, LambdaSeries) and other.var != self.var:
            raise PreconditionError("mixing symbol variables %s and %s"
                                    % (self.var, other.var))
        return super().__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if not isinstance(other, LambdaSeries):
            return NotImplemented
        if other.var != self.var:
            raise PreconditionError("mixing symbol variables %s and %s"
                                    % (self.var, other.var))
        rng = self._mul_range(other)
        if rng is None:
            return LambdaSeries.zero(self.var)
        s_lo, s_hi, v_lo, v_hi, lo_k, hi_k = rng
        out = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if not lo_k <= k <= hi_k:
                    continue
                term = a * b
                cur = out.get(k)
                out[k] = term if cur is None else cur + term
        return LambdaSeries(out, (s_lo, s_hi), (v_lo, v_hi), var=self.var)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return NotImplemented

    def shift_exponent(self, r):
        """Multiply by var^r."""
        if r == 0:
            return self
        return LambdaSeries({k + r: c for k, c in self.coeffs.items()},
                            (self.s_lo + r, self.s_hi + r),
                            (self.v_lo + r, self.v_hi + r), var=self.var)

    def scale_left(self, c):
        """Left-multiply every coefficient by a coefficient-level object."""
        return self._like({k: c * v for k, v in self.coeffs.items()},
                          self.support, self.valid)

    def scale_right(self, c):
        return self._like({k: v * c for k, v in self.coeffs.items()},
                          self.support, self.valid)

    def exp_nilpotent(self, max_iter, unit, trunc=None):
        """exp of a nilpotent-mod-truncation series; ``trunc`` optionally
        truncates each power to an exponent band, which is what makes
        one-sided infinite exponents (Miwa data) terminate."""
        out = LambdaSeries.of(unit, var=self.var)
        if self.is_zero():
            return out
        power = LambdaSeries.of(unit, var=self.var)
        for m in range(1, max_iter + 1):
            power = power * self
            if trunc is not None:
                power = power.truncated(*trunc)
            power = power.scale(Fraction(1, m))
            if power.is_zero():
                return out
            out = out + power
        raise TruncationExhausted("exp did not terminate in %d steps" % max_iter)

    def flatten(self):
        """Collapse a series whose coefficients are series in the same var,
        adding exponents.  Window logic mirrors multiplication: unknown
        outer cells contaminate through the inner supports."""
        inners = []
        for k, inner in self.coeffs.items():
            if not isinstance(inner, LambdaSeries) or inner.var != self.var:
                raise PreconditionError("flatten needs nested series in %s" % self.var)
            if not inner.is_zero():
                inners.append((k, inner))
        if not inners:
            return LambdaSeries.zero(self.var)
        b_s_lo = min(i.s_lo for _, i in inners)
        b_s_hi = max(i.s_hi for _, i in inners)
        out = {}
        v_lo, v_hi = -inf, inf
        s_lo = self.s_lo + b_s_lo
        s_hi = self.s_hi + b_s_hi
        for k, inner in inners:
            if inner.v_lo > inner.s_lo:
                v_lo = max(v_lo, k + inner.v_lo)
            if inner.v_hi < inner.s_hi:
                v_hi = min(v_hi, k + inner.v_hi)
            for t, c in inner.coeffs.items():
                key = k + t
                cur = out.get(key)
                out[key] = c if cur is None else cur + c
        if self.v_lo > self.s_lo:
            v_lo = max(v_lo, self.v_lo + b_s_hi)
        if self.v_hi < self.s_hi:
            v_hi = min(v_hi, self.v_hi + b_s_lo)
        return LambdaSeries(out, (s_lo, s_hi), (v_lo, v_hi), var=self.var)

    def __repr__(self):
        return "<LambdaSeries(%s) %s | %s>" % (self.var, self.render(self.var),
                                               self.window_note())
