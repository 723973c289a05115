"""Exact ground ring for the whole tower.

A :class:`Scalar` is a finite rational combination of monomials

    c * Q^(h/2 integer steps) * (log Q)^b * eps^e

with h a half-integer (stored doubled, as the integer ``h2``), b a
nonnegative integer and e an integer.  Q and log Q are commuting formal
symbols with no relations; eps is the formal expansion parameter.

Truncation semantics.  Every value carries an exactness bound ``hi``: the
stored terms agree with the true value for all eps-exponents e <= hi, and
nothing is claimed above it.  Values built from literals are exact
(``hi = inf``); a finite ``hi`` enters only through operations that expand
genuinely infinite eps-series (exponentials, geometric inverses) and then
propagates through arithmetic:

    add:  hi = min(hi_a, hi_b)
    mul:  hi = min(hi_a + supp_min(b), hi_b + supp_min(a))

where ``supp_min`` is the lowest stored eps-exponent (+inf for zero).  The
low side is never truncated: dropping known low-order Laurent terms would
contaminate every higher exponent of any later product, so the support is
kept exact instead and ``supp_min`` is the honest lower edge of the
validity window.
"""

from __future__ import annotations

from fractions import Fraction
from math import inf

__all__ = ["Scalar", "EpsWindow", "ZERO", "ONE", "EPS", "LOG_Q", "Q", "SQRT_Q"]


class EpsWindow:
    """Declared eps-window (e_min, e_max).  e_max bounds the depth of
    infinite eps-expansions; e_min is echoed in reports and used as a
    runaway guard for the discrete antiderivative chain."""

    __slots__ = ("e_min", "e_max")

    def __init__(self, e_min, e_max):
        if not (e_min <= 0 <= e_max):
            raise ValueError("eps window must contain 0: got (%s, %s)" % (e_min, e_max))
        self.e_min = int(e_min)
        self.e_max = int(e_max)

    def widen(self, k):
        return EpsWindow(self.e_min - k, self.e_max + k)

    def __repr__(self):
        return "EpsWindow(%d, %d)" % (self.e_min, self.e_max)


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("expected int or Fraction, got %r" % (x,))


class Scalar:
    """Element of the exact ground ring.  Immutable."""

    __slots__ = ("terms", "hi")

    def __init__(self, terms, hi=inf):
        clean = {}
        for key, c in terms.items():
            if c == 0:
                continue
            h2, b, e = key
            if b < 0:
                raise ValueError("negative logQ exponent")
            if e <= hi:
                clean[(int(h2), int(b), int(e))] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, *a):
        raise AttributeError("Scalar is immutable")

    def __getstate__(self):
        return tuple(getattr(self, s) for s in self.__slots__)

    def __setstate__(self, state):
        for s, v in zip(self.__slots__, state):
            object.__setattr__(self, s, v)


    # -- constructors ------------------------------------------------------

    @classmethod
    def of(cls, x):
        if isinstance(x, Scalar):
            return x
        return cls({(0, 0, 0): _as_fraction(x)})

    @classmethod
    def monomial(cls, c, h2=0, b=0, e=0):
        return cls({(h2, b, e): _as_fraction(c)})

    @classmethod
    def eps(cls, e=1):
        return cls({(0, 0, e): Fraction(1)})

    @classmethod
    def q_half_power(cls, h2):
        """Q^(h2/2); h2 = 2 gives Q itself."""
        return cls({(h2, 0, 0): Fraction(1)})

    @classmethod
    def log_q(cls):
        return cls({(0, 1, 0): Fraction(1)})

    # -- structure ---------------------------------------------------------

    @property
    def supp_min(self):
        """Lowest stored eps-exponent; +inf for zero."""
        if not self.terms:
            return inf
        return min(k[2] for k in self.terms)

    def is_zero(self):
        return not self.terms

    def is_rational(self):
        return all(k == (0, 0, 0) for k in self.terms)

    def rational_part(self):
        return self.terms.get((0, 0, 0), Fraction(0))

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.of(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        hi = min(self.hi, other.hi)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k)
            if s is None:
                terms[k] = c
            else:
                s = s + c
                if s == 0:
                    del terms[k]
                else:
                    terms[k] = s
        return Scalar(terms, hi)

    __radd__ = __add__

    def __neg__(self):
        out = Scalar.__new__(Scalar)
        object.__setattr__(out, "terms", {k: -c for k, c in self.terms.items()})
        object.__setattr__(out, "hi", self.hi)
        return out

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.of(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return Scalar.of(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return ZERO
            out = Scalar.__new__(Scalar)
            object.__setattr__(out, "terms", {k: v * c for k, v in self.terms.items()})
            object.__setattr__(out, "hi", self.hi)
            return out
        if not isinstance(other, Scalar):
            return NotImplemented
        hi = min(self.hi + other.supp_min, other.hi + self.supp_min)
        terms = {}
        for (h2a, ba, ea), ca in self.terms.items():
            for (h2b, bb, eb), cb in other.terms.items():
                e = ea + eb
                if e > hi:
                    continue
                k = (h2a + h2b, ba + bb, e)
                s = terms.get(k)
                if s is None:
                    terms[k] = ca * cb
                else:
                    s = s + ca * cb
                    if s == 0:
                        del terms[k]
                    else:
                        terms[k] = s
        return Scalar(terms, hi)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("Scalar powers must be nonnegative integers")
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        """Mathematical equality on the common validity window."""
        if isinstance(other, (int, Fraction)):
            other = Scalar.of(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- windows -----------------------------------------------------------

    def truncate_hi(self, hi):
        if hi >= self.hi:
            return self
        return Scalar(self.terms, hi)

    def restrict(self, lo, hi):
        """Keep only terms with lo <= e <= hi (for window-agreement tests)."""
        return Scalar({k: c for k, c in self.terms.items() if lo <= k[2] <= hi},
                      min(self.hi, hi))

    # -- special maps ------------------------------------------------------

    def inverse(self, eps_hi):
        """Multiplicative inverse, when one exists in the ring.

        Requires the lowest-eps layer to be a single monomial c*Q^(h2/2)
        with no log Q factor; the rest is inverted by a geometric series
        truncated at eps-exponent ``eps_hi``.
        """
        from .errors import PreconditionError

        if self.is_zero():
            raise PreconditionError("cannot invert zero")
        emin = self.supp_min
        lead = [(k, c) for k, c in self.terms.items() if k[2] == emin]
        if len(lead) != 1 or lead[0][0][1] != 0:
            raise PreconditionError(
                "leading eps-layer is not a single Q-monomial: %s" % self.render())
        (h2, _b, e), c = lead[0]
        lead_inv = Scalar.monomial(Fraction(1) / c, -h2, 0, -e)
        rest = (self - Scalar.monomial(c, h2, 0, e)) * lead_inv  # strictly positive eps order
        if rest.is_zero():
            if self.hi < inf:
                return lead_inv.truncate_hi(self.hi - 2 * e)
            return lead_inv
        out = ONE
        power = ONE
        sign = 1
        depth = max(eps_hi - e, 0) + max(-e, 0) + 2
        for _ in range(depth):
            power = (power * rest).truncate_hi(eps_hi - e + max(-emin, 0))
            sign = -sign
            if power.is_zero():
                break
            out = out + power * sign
        else:
            raise PreconditionError("geometric inverse did not terminate")
        return (out * lead_inv).truncate_hi(eps_hi)

    def subst_unit_q(self):
        """Ring homomorphism Q -> 1, log Q -> 0 (degenerate test mode)."""
        terms = {}
        for (h2, b, e), c in self.terms.items():
            if b > 0:
                continue
            k = (0, 0, e)
            terms[k] = terms.get(k, Fraction(0)) + c
        return Scalar(terms, self.hi)

    # -- rendering ---------------------------------------------------------

    def render(self):
        """Canonical string, e.g. '-1/2*Q^{3/2}*logQ*eps^{-1}'."""
        if not self.terms:
            return "0"
        parts = []
        for (h2, b, e) in sorted(self.terms):
            c = self.terms[(h2, b, e)]
            factors = []
            if h2 != 0:
                factors.append("Q" if h2 == 2 else
                               "Q^{%s}" % (Fraction(h2, 2)))
            if b != 0:
                factors.append("logQ" if b == 1 else "logQ^{%d}" % b)
            if e != 0:
                factors.append("eps" if e == 1 else "eps^{%d}" % e)
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(str(c) + "*" + "*".join(factors))
        out = " + ".join(parts).replace("+ -", "- ")
        return out

    def __repr__(self):
        return "<Scalar %s>" % self.render()


ZERO = Scalar({})
ONE = Scalar.of(1)
EPS = Scalar.eps(1)
LOG_Q = Scalar.log_q()
Q = Scalar.q_half_power(2)
SQRT_Q = Scalar.q_half_power(1)
