"""Polynomials in x over the ground ring, and differential operators in
D = eps*d/dx with the commutation rule D a(x) = a(x) D + eps a'(x).

The coefficient class is deliberately restricted to x-polynomials: every
operation the hierarchy needs (shifts x -> x + k*eps, derivatives, the
discrete antiderivative, the Bernoulli operator) maps polynomials to
polynomials, which is what makes fully exact verification possible.

x-degree growth is a correctness signal, not a truncation: exceeding the
cap raises :class:`DegreeOverflow` instead of dropping terms.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, inf

from .errors import DegreeOverflow, PreconditionError
from .scalars import EPS, ONE, ZERO, Scalar

__all__ = ["XPoly", "DiffOp", "bernoulli_number", "DEFAULT_X_CAP"]

DEFAULT_X_CAP = 32

_BERNOULLI = [Fraction(1)]


def bernoulli_number(k):
    """B_k with B_1 = -1/2 (the convention the x-shift calculus uses)."""
    while len(_BERNOULLI) <= k:
        m = len(_BERNOULLI)
        acc = Fraction(0)
        for j in range(m):
            acc += comb(m + 1, j) * _BERNOULLI[j]
        _BERNOULLI.append(-acc / (m + 1))
    return _BERNOULLI[k]


class XPoly:
    """Polynomial in x with Scalar coefficients.  Immutable."""

    __slots__ = ("coeffs", "cap")

    def __init__(self, coeffs, cap=DEFAULT_X_CAP):
        clean = {}
        for d, s in coeffs.items():
            if isinstance(s, (int, Fraction)):
                s = Scalar.of(s)
            if s.is_zero():
                continue
            if d > cap:
                raise DegreeOverflow("x-degree %d exceeds cap %d" % (d, cap))
            if d < 0:
                raise ValueError("negative x-degree")
            clean[int(d)] = s
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "cap", cap)

    def __setattr__(self, *a):
        raise AttributeError("XPoly is immutable")

    def __getstate__(self):
        return tuple(getattr(self, s) for s in self.__slots__)

    def __setstate__(self, state):
        for s, v in zip(self.__slots__, state):
            object.__setattr__(self, s, v)


    # -- constructors ------------------------------------------------------

    @classmethod
    def of(cls, s, cap=DEFAULT_X_CAP):
        if isinstance(s, XPoly):
            return s
        return cls({0: Scalar.of(s)}, cap)

    @classmethod
    def x(cls, cap=DEFAULT_X_CAP):
        return cls({1: ONE}, cap)

    @classmethod
    def zero(cls, cap=DEFAULT_X_CAP):
        return cls({}, cap)

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        return max(self.coeffs) if self.coeffs else -1

    def coeff(self, d):
        return self.coeffs.get(d, ZERO)

    def constant_term(self):
        return self.coeffs.get(0, ZERO)

    def eps_supp_min(self):
        if not self.coeffs:
            return inf
        return min(s.supp_min for s in self.coeffs.values())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = XPoly.of(other, self.cap)
        if not isinstance(other, XPoly):
            return NotImplemented
        cap = min(self.cap, other.cap)
        out = dict(self.coeffs)
        for d, s in other.coeffs.items():
            out[d] = out.get(d, ZERO) + s
        return XPoly(out, cap)

    __radd__ = __add__

    def __neg__(self):
        return XPoly({d: -s for d, s in self.coeffs.items()}, self.cap)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = XPoly.of(other, self.cap)
        return self + (-other)

    def __rsub__(self, other):
        return XPoly.of(other, self.cap) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            s = Scalar.of(other)
            return XPoly({d: c * s for d, c in self.coeffs.items()}, self.cap)
        if not isinstance(other, XPoly):
            return NotImplemented
        cap = min(self.cap, other.cap)
        out = {}
        for da, sa in self.coeffs.items():
            for db, sb in other.coeffs.items():
                d = da + db
                out[d] = out.get(d, ZERO) + sa * sb
        return XPoly(out, cap)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = XPoly.of(1, self.cap)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = XPoly.of(other, self.cap)
        if not isinstance(other, XPoly):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- calculus ----------------------------------------------------------

    def derivative(self):
        return XPoly({d - 1: s * d for d, s in self.coeffs.items() if d > 0}, self.cap)

    def x_antiderivative(self):
        """The x-integral with zero constant term."""
        return XPoly({d + 1: s * Fraction(1, d + 1) for d, s in self.coeffs.items()},
                     self.cap)

    def shift_x(self, k):
        """Exact substitution x -> x + k*eps."""
        if k == 0 or self.is_zero():
            return self
        ke = Scalar.eps(1) * k
        out = {}
        for j, s in self.coeffs.items():
            power = ONE
            for i in range(j, -1, -1):
                term = s * (power * comb(j, i))
                out[i] = out.get(i, ZERO) + term
                power = power * ke
        return XPoly(out, self.cap)

    def discrete_antiderivative(self):
        """f with f(x) - f(x + eps) = self and zero constant term."""
        if self.is_zero():
            return self
        d = self.degree
        f = {}
        for i in range(d, -1, -1):
            acc = self.coeff(i)
            for j in range(i + 2, d + 2):
                if j in f:
                    acc = acc + f[j] * (Scalar.eps(j - i) * comb(j, i))
            coeff = acc * Scalar.eps(-1) * Fraction(-1, i + 1)
            if not coeff.is_zero():
                f[i + 1] = coeff
        return XPoly(f, self.cap)

    def bernoulli_apply(self):
        """Apply eps*d_x / (e^{eps*d_x} - 1); finite on polynomials."""
        out = XPoly.zero(self.cap)
        term = self
        k = 0
        while not term.is_zero():
            out = out + term * bernoulli_number(k)
            term = term.derivative() * (EPS * Fraction(1, k + 1))
            k += 1
        return out

    # -- expansions --------------------------------------------------------

    def exp(self, eps_hi):
        """exp of a polynomial all of whose terms have eps-order >= 1,
        truncated at eps-exponent ``eps_hi``."""
        if self.is_zero():
            return XPoly.of(1, self.cap)
        if self.eps_supp_min() < 1:
            raise PreconditionError(
                "exp needs strictly positive eps-order terms; got %s" % self.render())
        out = XPoly.of(1, self.cap)
        power = XPoly.of(1, self.cap)
        for m in range(1, eps_hi + 2):
            power = (power * self * Fraction(1, m)).truncate_eps(eps_hi)
            if power.is_zero():
                break
            out = out + power
        return out.truncate_eps(eps_hi)

    def log1p_series(self, eps_hi):
        """log(1 + self) for arguments with all eps-orders >= 1."""
        if self.is_zero():
            return self
        if self.eps_supp_min() < 1:
            raise PreconditionError("log1p needs strictly positive eps-order terms")
        out = XPoly.zero(self.cap)
        power = XPoly.of(1, self.cap)
        for m in range(1, eps_hi + 2):
            power = (power * self).truncate_eps(eps_hi)
            if power.is_zero():
                break
            out = out + power * Fraction((-1) ** (m + 1), m)
        return out.truncate_eps(eps_hi)

    def inverse(self, eps_hi):
        """Inverse of s0*(1 + n) with s0 an invertible Scalar constant term
        and n of strictly positive eps-order."""
        s0 = self.constant_term()
        if s0.is_zero():
            raise PreconditionError("constant term is zero; not invertible")
        s0_inv = s0.inverse(eps_hi + 8)
        n = self * s0_inv - 1
        if n.is_zero():
            return XPoly.of(s0_inv, self.cap)
        if n.eps_supp_min() < 1:
            raise PreconditionError(
                "tail has eps-order 0 terms; polynomial inverse does not exist")
        out = XPoly.of(1, self.cap)
        power = XPoly.of(1, self.cap)
        sign = 1
        for _ in range(eps_hi + 2):
            power = (power * n).truncate_eps(eps_hi)
            sign = -sign
            if power.is_zero():
                break
            out = out + power * sign
        else:
            raise PreconditionError("inverse series did not terminate")
        return (out * s0_inv).truncate_eps(eps_hi)

    def truncate_eps(self, hi):
        return XPoly({d: s.truncate_hi(hi) for d, s in self.coeffs.items()}, self.cap)

    # -- maps ----------------------------------------------------------------

    def map_scalars(self, fn):
        return XPoly({d: fn(s) for d, s in self.coeffs.items()}, self.cap)

    def render(self):
        if not self.coeffs:
            return "0"
        parts = []
        for d in sorted(self.coeffs, reverse=True):
            s = self.coeffs[d].render()
            body = "(%s)" % s if ("+" in s or "-" in s[1:]) else s
            if d == 0:
                parts.append(body)
            else:
                xs = "x" if d == 1 else "x^%d" % d
                parts.append(xs if body == "1" else
                             ("-" + xs if body == "-1" else body + "*" + xs))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return "<XPoly %s>" % self.render()


class DiffOp:
    """Finite-order differential operator sum_k a_k(x) D^k, D = eps*d/dx,
    stored in left normal form (coefficients to the left of D powers)."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        clean = {}
        for k, p in terms.items():
            if isinstance(p, (int, Fraction, Scalar)):
                p = XPoly.of(p)
            if p.is_zero():
                continue
            if k < 0:
                raise ValueError("negative D power")
            clean[int(k)] = p
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("DiffOp is immutable")

    def __getstate__(self):
        return tuple(getattr(self, s) for s in self.__slots__)

    def __setstate__(self, state):
        for s, v in zip(self.__slots__, state):
            object.__setattr__(self, s, v)


    # -- constructors ------------------------------------------------------

    @classmethod
    def of(cls, p):
        if isinstance(p, DiffOp):
            return p
        return cls({0: XPoly.of(p)})

    @classmethod
    def d(cls):
        return cls({1: XPoly.of(1)})

    @classmethod
    def zero(cls):
        return cls({})

    # -- structure ---------------------------------------------------------

    def is_zero(self):
        return not self.terms

    @property
    def order(self):
        return max(self.terms) if self.terms else -1

    def coeff(self, k):
        return self.terms.get(k, XPoly.zero())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar, XPoly)):
            other = DiffOp.of(other)
        if not isinstance(other, DiffOp):
            return NotImplemented
        out = dict(self.terms)
        for k, p in other.terms.items():
            out[k] = out.get(k, XPoly.zero()) + p
        return DiffOp(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp({k: -p for k, p in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Scalar, XPoly)):
            other = DiffOp.of(other)
        return self + (-other)

    def __rsub__(self, other):
        return DiffOp.of(other) + (-self)

    def scale(self, s):
        return DiffOp({k: p * s for k, p in self.terms.items()})

    def __mul__(self, other):
        """Noncommutative product under [D, a(x)] = eps a'(x)."""
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if isinstance(other, XPoly):
            other = DiffOp.of(other)
        if not isinstance(other, DiffOp):
            return NotImplemented
        out = {}
        for ka, pa in self.terms.items():
            for kb, pb in other.terms.items():
                # D^ka * pb = sum_j C(ka, j) eps^j pb^{(j)} D^{ka - j}
                deriv = pb
                for j in range(ka + 1):
                    if deriv.is_zero():
                        break
                    part = pa * deriv * (Scalar.eps(j) * comb(ka, j))
                    key = ka - j + kb
                    out[key] = out.get(key, XPoly.zero()) + part
                    deriv = deriv.derivative()
        return DiffOp(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        if isinstance(other, XPoly):
            return DiffOp.of(other) * self
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Scalar, XPoly)):
            other = DiffOp.of(other)
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- the antiinvolution -------------------------------------------------

    def sharp(self):
        """Antihomomorphism with D^# = -D + logQ and x^# = x."""
        from .scalars import LOG_Q
        sharp_d = DiffOp({1: XPoly.of(-1), 0: XPoly.of(LOG_Q)})
        out = DiffOp.zero()
        power = DiffOp.of(1)
        for k in range(self.order + 1):
            if k in self.terms:
                out = out + power * DiffOp.of(self.terms[k])
            power = power * sharp_d
        return out

    # -- coefficient maps ----------------------------------------------------

    def shift_x(self, k):
        if k == 0:
            return self
        return DiffOp({j: p.shift_x(k) for j, p in self.terms.items()})

    def derivative(self):
        """Coefficient-wise d/dx (derivative of the operator family)."""
        return DiffOp({j: p.derivative() for j, p in self.terms.items()})

    def map_xpolys(self, fn):
        return DiffOp({j: fn(p) for j, p in self.terms.items()})

    def inverse(self, eps_hi):
        if self.order > 0:
            raise PreconditionError("can only invert order-0 operators")
        return DiffOp.of(self.coeff(0).inverse(eps_hi))

    # -- action ---------------------------------------------------------------

    def apply(self, p):
        """Apply the operator to a polynomial (independent oracle for mul)."""
        out = XPoly.zero(p.cap)
        for k, a in self.terms.items():
            g = p
            for _ in range(k):
                g = g.derivative() * EPS
            out = out + a * g
        return out

    def render(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, reverse=True):
            body = self.terms[k].render()
            if "+" in body or "-" in body[1:] or "*" in body:
                body = "(%s)" % body
            if k == 0:
                parts.append(body)
            else:
                ds = "D" if k == 1 else "D^%d" % k
                parts.append(ds if body == "1" else body + "*" + ds)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return "<DiffOp %s>" % self.render()
