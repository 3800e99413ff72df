"""Certified real enclosures on top of MPFR directed rounding.

Every quantity the package reports is a :class:`NormInterval`, a closed
interval ``[lo, hi]`` of dyadic rationals (MPFR numbers) guaranteed to contain
the true value.  Lower endpoints are always produced with round-toward-minus
and upper endpoints with round-toward-plus, using per-precision
``gmpy2.context`` objects, so no global floating-point state is touched and
results are safe to compute from several threads.

Precision is escalated by a :class:`PrecisionPolicy`: computations are
retried at 128, 256, ... bits until they are decided or the cap is reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import PrecisionExceeded

_EMAX = gmpy2.get_emax_max()
_EMIN = gmpy2.get_emin_min()
_CONTEXTS: dict[int, tuple] = {}


def contexts(bits):
    """Return the (round-down, round-up) MPFR contexts for ``bits``."""
    pair = _CONTEXTS.get(bits)
    if pair is None:
        pair = (
            gmpy2.context(precision=bits, round=gmpy2.RoundDown, emax=_EMAX, emin=_EMIN),
            gmpy2.context(precision=bits, round=gmpy2.RoundUp, emax=_EMAX, emin=_EMIN),
        )
        _CONTEXTS[bits] = pair
    return pair


@dataclass(frozen=True)
class PrecisionPolicy:
    """Deterministic doubling schedule of working precisions."""

    start: int = 128
    cap: int = 8192

    def __post_init__(self):
        if self.start < 32 or self.cap < self.start:
            raise ValueError("precision policy needs 32 <= start <= cap")

    def levels(self):
        bits = self.start
        while bits <= self.cap:
            yield bits
            bits *= 2


DEFAULT_POLICY = PrecisionPolicy()


def escalate(compute, accept, what, policy=None):
    """Run ``compute(bits)`` at increasing precision until ``accept`` holds.

    Returns the first accepted result; raises :class:`PrecisionExceeded` with
    the last result attached as ``.last`` when the cap is hit.
    """
    policy = policy or DEFAULT_POLICY
    result = None
    bits = policy.start
    for bits in policy.levels():
        result = compute(bits)
        if accept(result):
            return result
    err = PrecisionExceeded(what, bits, getattr(result, "width", None))
    err.last = result
    raise err


def _to_mpq(x):
    if isinstance(x, (int, mpz)):
        return mpq(x)
    if isinstance(x, (Fraction, Rational)):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite float")
        return mpq(*x.as_integer_ratio())
    if isinstance(x, str):
        f = Fraction(x)
        return mpq(f.numerator, f.denominator)
    if type(x).__name__ == "mpq":
        return x
    if type(x).__name__ == "mpfr":
        return mpq(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


@dataclass(frozen=True)
class NormInterval:
    """Certified enclosure ``lo <= value <= hi`` computed at ``bits`` precision.

    ``tag`` carries an optional convention marker (for instance the
    ``"n0-complement"`` flag on the zeroth closest-return norm).
    """

    lo: mpfr
    hi: mpfr
    bits: int
    tag: str | None = None

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    # construction -----------------------------------------------------

    @classmethod
    def exact(cls, x, bits=128):
        """Tightest enclosure of an exactly known real ``x``."""
        if isinstance(x, NormInterval):
            return x
        q = _to_mpq(x)
        down, up = contexts(bits)
        return cls(mpfr(q, bits, down), mpfr(q, bits, up), bits)

    @classmethod
    def from_rationals(cls, a, b, bits, tag=None):
        """Enclosure of the closed hull of two exact rationals."""
        a, b = _to_mpq(a), _to_mpq(b)
        if b < a:
            a, b = b, a
        down, up = contexts(bits)
        return cls(mpfr(a, bits, down), mpfr(b, bits, up), bits, tag)

    # inspection -------------------------------------------------------

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    @property
    def width(self):
        _, up = contexts(self.bits)
        return up.sub(self.hi, self.lo)

    @property
    def rel_width(self):
        """``(hi - lo) / min |endpoint|``; infinite when the interval touches 0."""
        m = min(abs(self.lo), abs(self.hi))
        if m == 0 or (self.lo < 0 < self.hi):
            return mpfr("inf")
        _, up = contexts(self.bits)
        return up.div(self.width, m)

    def rel_width_below(self, target_bits):
        return self.rel_width <= mpfr(2) ** (-target_bits)

    def contains(self, x):
        if isinstance(x, NormInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        q = _to_mpq(x)
        return mpq(self.lo) <= q <= mpq(self.hi)

    def overlaps(self, other):
        other = _coerce(other, self.bits)
        return self.lo <= other.hi and other.lo <= self.hi

    def certainly_lt(self, other):
        other = _coerce(other, self.bits)
        return self.hi < other.lo

    def certainly_gt(self, other):
        other = _coerce(other, self.bits)
        return self.lo > other.hi

    def is_positive(self):
        return self.lo > 0

    def hull(self, other):
        other = _coerce(other, self.bits)
        return NormInterval(
            min(self.lo, other.lo), max(self.hi, other.hi), max(self.bits, other.bits)
        )

    def with_tag(self, tag):
        return NormInterval(self.lo, self.hi, self.bits, tag)

    def fmt(self, digits=17):
        """Endpoints printed outward-rounded to ``digits`` significant digits."""
        return format(self.lo, f".{digits}Dg"), format(self.hi, f".{digits}Ug")

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        lo, hi = self.fmt(12)
        tag = f", {self.tag}" if self.tag else ""
        return f"NormInterval([{lo}, {hi}]{tag})"

    # arithmetic -------------------------------------------------------

    def __neg__(self):
        # plain unary minus would round to the global context precision
        down, up = contexts(self.bits)
        return NormInterval(down.minus(self.hi), up.minus(self.lo), self.bits)

    def __add__(self, other):
        other = _coerce(other, self.bits)
        bits = max(self.bits, other.bits)
        down, up = contexts(bits)
        return NormInterval(down.add(self.lo, other.lo), up.add(self.hi, other.hi), bits)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other, self.bits)
        bits = max(self.bits, other.bits)
        down, up = contexts(bits)
        return NormInterval(down.sub(self.lo, other.hi), up.sub(self.hi, other.lo), bits)

    def __rsub__(self, other):
        return _coerce(other, self.bits) - self

    def __mul__(self, other):
        other = _coerce(other, self.bits)
        bits = max(self.bits, other.bits)
        down, up = contexts(bits)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a >= 0 and c >= 0:
            return NormInterval(down.mul(a, c), up.mul(b, d), bits)
        lo = min(down.mul(a, c), down.mul(a, d), down.mul(b, c), down.mul(b, d))
        hi = max(up.mul(a, c), up.mul(a, d), up.mul(b, c), up.mul(b, d))
        return NormInterval(lo, hi, bits)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other, self.bits)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        bits = max(self.bits, other.bits)
        down, up = contexts(bits)
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        lo = min(down.div(a, c), down.div(a, d), down.div(b, c), down.div(b, d))
        hi = max(up.div(a, c), up.div(a, d), up.div(b, c), up.div(b, d))
        return NormInterval(lo, hi, bits)

    def __rtruediv__(self, other):
        return _coerce(other, self.bits) / self

    def sqr(self):
        down, up = contexts(self.bits)
        a, b = self.lo, self.hi
        if a >= 0:
            return NormInterval(down.square(a), up.square(b), self.bits)
        if b <= 0:
            return NormInterval(down.square(b), up.square(a), self.bits)
        return NormInterval(mpfr(0), max(up.square(a), up.square(b)), self.bits)


def to_fraction(x):
    """Exact Fraction of an mpfr endpoint."""
    if not isinstance(x, type(mpfr(0))):
        x = mpfr(x)
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def floor_exact(x):
    """Exact integer floor of an mpfr (gmpy2.floor rounds to the context precision)."""
    return math.floor(to_fraction(x))


def ceil_exact(x):
    return math.ceil(to_fraction(x))


def _coerce(x, bits):
    if isinstance(x, NormInterval):
        return x
    return NormInterval.exact(x, bits)


def as_interval(x, bits=128):
    """Coerce numbers (int, Fraction, float, str, mpfr) or intervals."""
    return _coerce(x, bits)


def hull(*xs):
    out = xs[0]
    for x in xs[1:]:
        out = out.hull(x)
    return out


def _monotone(x, fname, increasing=True):
    down, up = contexts(x.bits)
    if increasing:
        return NormInterval(getattr(down, fname)(x.lo), getattr(up, fname)(x.hi), x.bits)
    return NormInterval(getattr(down, fname)(x.hi), getattr(up, fname)(x.lo), x.bits)


def sqrt(x):
    x = as_interval(x)
    if x.lo < 0:
        if x.hi < 0:
            raise ValueError("sqrt of a negative interval")
        x = NormInterval(mpfr(0), x.hi, x.bits)
    return _monotone(x, "sqrt")


def exp(x):
    return _monotone(as_interval(x), "exp")


def log(x):
    x = as_interval(x)
    if x.lo <= 0:
        raise ValueError("log of an interval reaching 0")
    return _monotone(x, "log")


def sinh(x):
    return _monotone(as_interval(x), "sinh")


def asinh(x):
    return _monotone(as_interval(x), "asinh")


def cosh(x):
    x = as_interval(x)
    if x.lo >= 0:
        return _monotone(x, "cosh")
    if x.hi <= 0:
        return _monotone(x, "cosh", increasing=False)
    down, up = contexts(x.bits)
    return NormInterval(mpfr(1), max(up.cosh(x.lo), up.cosh(x.hi)), x.bits)


def acosh(x):
    x = as_interval(x)
    if x.lo < 1:
        if x.hi < 1:
            raise ValueError("acosh below 1")
        x = NormInterval(mpfr(1), x.hi, x.bits)
    return _monotone(x, "acosh")


def pi(bits=128):
    down, up = contexts(bits)
    return NormInterval(down.const_pi(), up.const_pi(), bits)


def sin_pi(x):
    """Enclosure of ``sin(pi * x)`` for any interval ``x``.

    The argument is shifted by an even integer (exactly) so that it starts in
    ``[0, 2)``; the enclosure is then the hull of the endpoint values plus any
    extremum at a half-integer contained in ``x``.
    """
    x = as_interval(x)
    bits = x.bits
    down, up = contexts(bits)
    shift = 2 * (floor_exact(x.lo) // 2)
    if shift:
        x = x - shift
    if x.hi - x.lo >= 2:
        return NormInterval(mpfr(-1), mpfr(1), bits)
    p = pi(bits)
    lo, hi = None, None
    for end in (x.lo, x.hi):
        arg = p * NormInterval(end, end, bits)
        s_lo, s_hi = down.sin(arg.lo), up.sin(arg.hi)
        s_lo2, s_hi2 = down.sin(arg.hi), up.sin(arg.lo)
        e_lo = min(s_lo, s_lo2)
        e_hi = max(s_hi, s_hi2)
        lo = e_lo if lo is None else min(lo, e_lo)
        hi = e_hi if hi is None else max(hi, e_hi)
    # extrema sit exactly at x = 1/2 + k; an endpoint whose rounded argument
    # straddles one is also widened to the extremum
    k_first = floor_exact(x.lo) - 2
    k_last = ceil_exact(x.hi) + 1
    eps = mpfr(2) ** (4 - bits)
    window_lo, window_hi = down.sub(x.lo, eps), up.add(x.hi, eps)
    for k in range(k_first, k_last + 1):
        c = mpfr(k) + mpfr(0.5)
        if window_lo <= c <= window_hi:
            if k % 2 == 0:
                hi = mpfr(1)
            else:
                lo = mpfr(-1)
    lo = max(lo, mpfr(-1))
    hi = min(hi, mpfr(1))
    return NormInterval(lo, hi, bits)


def sin_pi_sq(x):
    """Enclosure of ``sin(pi * x) ** 2``."""
    return sin_pi(x).sqr()


def fmt_directed(x, digits=17, upward=False):
    """Decimal string of an mpfr endpoint rounded outward (floor or ceiling) to ``digits``."""
    import decimal

    f = to_fraction(x)
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_CEILING if upward else decimal.ROUND_FLOOR)
    return format(ctx.divide(decimal.Decimal(f.numerator), decimal.Decimal(f.denominator)), "e")
