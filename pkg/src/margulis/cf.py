"""Continued-fraction engine for irrational rotation angles.

An :class:`Angle` is described by its partial quotients ``a_1, a_2, ...``
(never by a decimal value).  Convergents are exact big integers.  The
closest-return norms ``||q_n alpha||`` are enclosed without evaluating alpha
itself: the signed distances ``g_k = |q_k alpha - p_k|`` obey

    g_k = a_{k+2} g_{k+1} + g_{k+2},      g_{-1} = 1,

so running this recurrence backwards from a deep index ``N``, seeded with the
ratio ``g_{N+1}/g_N`` bracketed by ``1/(2q) < ||q_n alpha|| < 1/q``, and then
normalising by the value reached at ``k = -1``, yields every ``g_k`` as a
Moebius function of the seed ratio.  Evaluating at the two bracket endpoints
with exact integer arithmetic therefore gives a rigorous rational hull for any
integer linear combination of the ``g_k``.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpfr

from . import intervals as iv
from .errors import OverflowPolicy, PreconditionViolated, QuotientsExhausted
from .intervals import NormInterval

N0_COMPLEMENT = "n0-complement"

# a_{n+1} ~ exp(q_n)/q_n has about q_n*log10(e) digits; refuse beyond 10^6 digits
LIOUVILLE_Q_CAP = 2_302_585
# lower bounds on refused quotients are clipped to 2**this to keep integers small
LOWER_BOUND_BITS_CAP = 65536


@dataclass(frozen=True)
class PeriodicQuotients:
    prefix: tuple
    period: tuple

    def __post_init__(self):
        if not self.period:
            raise PreconditionViolated("period must be nonempty")
        _check_quotients(self.prefix + self.period)

    def spec(self):
        pre = ",".join(map(str, self.prefix))
        per = ",".join(map(str, self.period))
        return f"periodic:[{pre};{per}]" if self.prefix else f"periodic:[{per}]"


@dataclass(frozen=True)
class ExplicitQuotients:
    """A finite truncation; results are valid up to index ``len - 2``."""

    quotients: tuple

    def __post_init__(self):
        _check_quotients(self.quotients)

    def spec(self):
        return "explicit:[" + ",".join(map(str, self.quotients)) + "]"


@dataclass(frozen=True)
class GrowthRule:
    """A named deterministic rule producing ``a_{n+1}`` from the data so far."""

    name: str
    seed: tuple

    def __post_init__(self):
        if self.name not in _RULES:
            raise PreconditionViolated(f"unknown growth rule {self.name!r}")
        if not self.seed:
            raise PreconditionViolated("growth rule needs a nonempty seed")
        _check_quotients(self.seed)

    def spec(self):
        return f"{self.name}:[" + ",".join(map(str, self.seed)) + "]"


def _check_quotients(qs):
    for a in qs:
        if not isinstance(a, int) or isinstance(a, bool) or a < 1:
            raise PreconditionViolated(f"partial quotients must be integers >= 1, got {a!r}")


@dataclass(frozen=True)
class Convergent:
    n: int
    p: int
    q: int


MIN_EXPLICIT = 40


class Angle:
    """An irrational rotation angle in (0, 1) given by its partial quotients.

    Quotients, convergents and the backward-recurrence tables are cached
    lazily; extension happens under a lock so one instance can be shared by
    concurrent readers.
    """

    def __init__(self, source):
        self.source = source
        self._lock = threading.RLock()
        self._a = [None]  # 1-based
        self._p = [1, 0]  # p_{-1}, p_0
        self._q = [0, 1]  # q_{-1}, q_0
        self._refused = None  # (index, lower bound) once a growth rule refuses
        self._tables = {}
        if isinstance(source, ExplicitQuotients):
            if len(source.quotients) < MIN_EXPLICIT:
                # too short to support any profile: report it as exhaustion
                raise QuotientsExhausted(MIN_EXPLICIT, len(source.quotients) - 2)
            self._extend_with(source.quotients)
        elif isinstance(source, GrowthRule):
            self._extend_with(source.seed)
        elif not isinstance(source, PeriodicQuotients):
            raise TypeError(f"unsupported quotient source {source!r}")

    # construction helpers ----------------------------------------------

    @classmethod
    def periodic(cls, period, prefix=()):
        return cls(PeriodicQuotients(tuple(prefix), tuple(period)))

    @classmethod
    def explicit(cls, quotients):
        return cls(ExplicitQuotients(tuple(quotients)))

    def spec(self):
        return self.source.spec()

    def __repr__(self):
        return f"Angle({self.spec()})"

    def __eq__(self, other):
        return isinstance(other, Angle) and self.source == other.source

    def __hash__(self):
        return hash(self.source)

    # quotients ------------------------------------------------------------

    def _extend_with(self, qs):
        for a in qs:
            self._a.append(a)
            self._p.append(a * self._p[-1] + self._p[-2])
            self._q.append(a * self._q[-1] + self._q[-2])

    def _ensure(self, n):
        if n < len(self._a):
            return
        with self._lock:
            src = self.source
            while len(self._a) <= n:
                k = len(self._a)
                if isinstance(src, PeriodicQuotients):
                    if k <= len(src.prefix):
                        a = src.prefix[k - 1]
                    else:
                        a = src.period[(k - 1 - len(src.prefix)) % len(src.period)]
                elif isinstance(src, ExplicitQuotients):
                    raise QuotientsExhausted(n, self.max_valid_index)
                else:
                    if self._refused is not None:
                        raise OverflowPolicy(self._refused[0], self._q[-1])
                    try:
                        a = _RULES[src.name][0](self._q[-1], self._q[-2])
                    except OverflowPolicy as exc:
                        self._refused = (k, _RULES[src.name][1](self._q[-1], self._q[-2]))
                        raise OverflowPolicy(k, self._q[-1]) from exc
                self._extend_with((a,))

    def quotient(self, n):
        """Partial quotient ``a_n`` (``n >= 1``)."""
        if n < 1:
            raise PreconditionViolated("partial quotients are indexed from 1")
        self._ensure(n)
        return self._a[n]

    def quotients(self, n):
        """``[a_1, ..., a_n]``."""
        self._ensure(n)
        return self._a[1 : n + 1]

    def exact_limit(self):
        """Number of exactly available quotients, or ``None`` if unbounded."""
        src = self.source
        if isinstance(src, PeriodicQuotients):
            return None
        if isinstance(src, ExplicitQuotients):
            return len(src.quotients)
        while self._refused is None:
            try:
                self._ensure(len(self._a))
            except OverflowPolicy:
                break
        return self._refused[0] - 1

    def quotient_lower_bound(self, n):
        """A certified lower bound on ``a_n``, exact where ``a_n`` is available."""
        limit = self.exact_limit()
        if limit is None or n <= limit:
            return self.quotient(n)
        if isinstance(self.source, GrowthRule) and n == limit + 1:
            return self._refused[1]
        return 1

    @property
    def max_valid_index(self):
        """Largest ``n`` for which ``||q_n alpha||`` and friends are available."""
        limit = self.exact_limit()
        if limit is None:
            return None
        if isinstance(self.source, ExplicitQuotients):
            return limit - 2
        return limit

    def check_index(self, n):
        top = self.max_valid_index
        if top is not None and n > top:
            raise QuotientsExhausted(n, top)

    def is_bounded_type(self):
        """True/False where decidable from the source, else ``None``."""
        if isinstance(self.source, PeriodicQuotients):
            return True
        if isinstance(self.source, GrowthRule):
            return False
        return None

    @property
    def large(self):
        """True when ``1/2 < alpha < 1`` (equivalently ``a_1 = 1``)."""
        return self.quotient(1) == 1

    # convergents ----------------------------------------------------------

    def q(self, n):
        if n < -1:
            raise PreconditionViolated("q_n is defined for n >= -1")
        if n >= 1:
            self._ensure(n)
        return self._q[n + 1]

    def p(self, n):
        if n >= 1:
            self._ensure(n)
        return self._p[n + 1]

    def convergent(self, n):
        if n < 0:
            raise PreconditionViolated("convergents are indexed from 0")
        return Convergent(n, self.p(n), self.q(n))

    # backward-recurrence tables -----------------------------------------

    def _table(self, N):
        """Integer vectors ``(X_lo, X_hi)`` indexed by ``k + 1`` for ``k = -1..N+1``.

        ``g_k`` lies in the hull of ``X[k]/X[-1]`` over the two vectors.
        """
        tab = self._tables.get(N)
        if tab is not None:
            return tab
        limit = self.exact_limit()
        self._ensure(N + 1)
        q_n, q_n1 = self.q(N), self.q(N + 1)
        if limit is None or N + 2 <= limit:
            q_n2 = self.q(N + 2)
            seeds = (Fraction(q_n1, 2 * q_n2), Fraction(2 * q_n1, q_n2))
        else:
            q_n2_min = self.quotient_lower_bound(N + 2) * q_n1 + q_n
            seeds = (Fraction(0), Fraction(2 * q_n1, q_n2_min))
        a = self._a
        vectors = []
        for rho in seeds:
            x = [0] * (N + 3)
            x[N + 1] = rho.denominator  # g_N
            x[N + 2] = rho.numerator  # g_{N+1}
            for k in range(N - 1, -2, -1):
                x[k + 1] = a[k + 2] * x[k + 2] + x[k + 3]
            vectors.append(x)
        tab = tuple(vectors)
        with self._lock:
            self._tables[N] = tab
        return tab

    def seed_index(self, top, bits):
        """Deep index ``N`` used to enclose quantities up to index ``top``.

        At least ``top + 8``; deeper until ``(q_N / q_{top+1})**2`` exceeds
        ``2**bits``, which is roughly the relative width that the seed bracket
        leaves on ``g_top``.
        """
        limit = self.exact_limit()
        N = top + 8
        need = bits + 8
        while limit is None or N < limit - 1:
            self._ensure(N)
            if 2 * (self.q(N).bit_length() - self.q(top + 1).bit_length()) >= need:
                break
            N += 1
        if limit is not None:
            N = min(N, limit - 1)
        if N < max(top - 1, 1):
            raise QuotientsExhausted(top, self.max_valid_index)
        return N

    def gamma_combo_bounds(self, coeffs, bits, const=0):
        """Exact rational hull of ``const + sum c_k g_k``."""
        top = max(coeffs) if coeffs else 0
        N = self.seed_index(top, bits)
        if top > N + 1:
            raise QuotientsExhausted(top, N + 1)
        ends = []
        for x in self._table(N):
            num = const * x[0] + sum(c * x[k + 1] for k, c in coeffs.items())
            ends.append(Fraction(num, x[0]))
        return min(ends), max(ends)

    def gamma_combo(self, coeffs, bits, const=0):
        lo, hi = self.gamma_combo_bounds(coeffs, bits, const)
        return NormInterval.from_rationals(lo, hi, bits)

    def gamma_ratio(self, n, m, bits):
        """Exact-hull enclosure of ``g_n / g_m`` (a Moebius function of the seed)."""
        N = self.seed_index(max(n, m), bits)
        ends = [Fraction(x[n + 1], x[m + 1]) for x in self._table(N)]
        return NormInterval.from_rationals(min(ends), max(ends), bits)

    def gamma(self, k, bits):
        """Enclosure of ``|q_k alpha - p_k|`` (equal to ``||q_k alpha||`` unless k=0, a_1=1)."""
        return self.gamma_combo({k: 1}, bits)

    def alpha(self, bits):
        """Enclosure of alpha itself (``g_0 = alpha``)."""
        return self.gamma(0, bits)


# ---------------------------------------------------------------------------
# growth rules


def _liouville_next(q_n, q_prev):
    if q_n > LIOUVILLE_Q_CAP:
        raise OverflowPolicy(0, q_n)
    # a = ceil(exp(q)/q); escalate until the enclosure does not straddle an integer
    bits = int(q_n * 1.4427) + 96
    while True:
        val = iv.exp(NormInterval.exact(q_n, bits)) / q_n
        lo, hi = iv.floor_exact(val.lo), iv.floor_exact(val.hi)
        if lo == hi and val.lo != lo:
            return int(lo) + 1
        bits *= 2


def _liouville_lower_bound(q_n, q_prev):
    # exp(q)/q >= 2**(q*log2(e) - log2(q)) - use a safely smaller power of two
    e = int(q_n * 1.4426) - q_n.bit_length() - 2
    return 1 << max(1, min(e, LOWER_BOUND_BITS_CAP))


_RULES = {"liouville": (_liouville_next, _liouville_lower_bound)}


def liouville_angle(seed_prefix=(1,)):
    """Angle whose quotients follow ``a_{n+1} = ceil(exp(q_n)/q_n)`` after the seed."""
    return Angle(GrowthRule("liouville", tuple(seed_prefix)))


# ---------------------------------------------------------------------------
# spec grammar

_SPEC_RE = re.compile(r"^\s*(periodic|explicit|liouville)\s*:\s*\[([^\]]*)\]\s*$")


def _ints(text):
    text = text.strip()
    if not text:
        return ()
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not re.fullmatch(r"\d+", tok):
            raise PreconditionViolated(f"not a positive integer quotient: {tok!r}")
        out.append(int(tok))
    return tuple(out)


def parse_angle_spec(spec):
    """Parse ``periodic:[pre;per]``, ``periodic:[per]``, ``explicit:[...]``, ``liouville:[seed]``.

    Decimal input is rejected on purpose: it cannot certify deep quotients.
    """
    m = _SPEC_RE.match(spec)
    if not m:
        raise PreconditionViolated(f"invalid angle spec {spec!r}")
    kind, body = m.groups()
    if kind == "periodic":
        if ";" in body:
            pre, per = body.split(";", 1)
            return Angle.periodic(_ints(per), _ints(pre))
        return Angle.periodic(_ints(body))
    if kind == "explicit":
        return Angle.explicit(_ints(body))
    return liouville_angle(_ints(body))


# ---------------------------------------------------------------------------
# operations


def convergent(angle, n):
    return angle.convergent(n)


def _target_reached(target_bits):
    return lambda x: x.rel_width_below(target_bits)


def norm_closest(angle, n, target_bits=53, policy=None):
    """Certified enclosure of ``||q_n alpha||``.

    For ``n = 0`` and ``a_1 = 1`` the true norm is ``1 - alpha``; the result
    is tagged ``"n0-complement"`` and :func:`effective_beta0` returns the value
    the recurrences use instead.
    """
    if n < 0:
        raise PreconditionViolated("n must be >= 0")
    angle.check_index(n)
    if n == 0 and angle.large:
        res = iv.escalate(
            lambda bits: angle.gamma_combo({0: -1}, bits, const=1).with_tag(N0_COMPLEMENT),
            _target_reached(target_bits),
            f"||q_0 alpha|| to 2^-{target_bits}",
            policy,
        )
        return res
    return iv.escalate(
        lambda bits: angle.gamma(n, bits),
        _target_reached(target_bits),
        f"||q_{n} alpha|| to 2^-{target_bits}",
        policy,
    )


def effective_beta0(angle, target_bits=53, policy=None):
    """``1 - ||q_0 alpha||`` when ``a_1 = 1`` (that is, alpha itself), else ``||q_0 alpha||``."""
    return iv.escalate(
        lambda bits: angle.alpha(bits),
        _target_reached(target_bits),
        "effective beta_0",
        policy,
    )


def ostrowski(angle, j):
    """Greedy digits ``{k: b_k}`` with ``j = sum b_k q_k``."""
    if j < 1:
        raise PreconditionViolated("j must be >= 1")
    k = 0
    while angle.q(k + 1) <= j:
        k += 1
    digits = {}
    rest = j
    while rest > 0:
        qk = angle.q(k)
        if qk <= rest:
            digits[k] = rest // qk
            rest -= digits[k] * qk
        k -= 1
    return digits


def _dist_to_int(lo, hi):
    """Exact hull of ``||x||`` for x in [lo, hi], or None if a half-integer is inside."""
    m = round((lo + hi) / 2)
    half = Fraction(1, 2)
    if lo <= m - half or hi >= m + half:
        return None
    a, b = lo - m, hi - m
    if a <= 0 <= b:
        return Fraction(0), max(-a, b)
    return (a, b) if a > 0 else (-b, -a)


def norm_any(angle, j, target_bits=53, policy=None):
    """Certified enclosure of ``||j alpha||`` via the Ostrowski digits of ``j``."""
    digits = ostrowski(angle, j)
    angle.check_index(max(digits))
    coeffs = {k: (-b if k % 2 else b) for k, b in digits.items()}

    def compute(bits):
        lo, hi = angle.gamma_combo_bounds(coeffs, bits)
        d = _dist_to_int(lo, hi)
        if d is None:
            return NormInterval(mpfr(0), mpfr("0.5"), bits)
        return NormInterval.from_rationals(d[0], d[1], bits)

    return iv.escalate(compute, _target_reached(target_bits), f"||{j} alpha||", policy)


@dataclass(frozen=True)
class DiophantineReport:
    nu: object
    n_max: int
    sup_ratio: NormInterval
    argmax: int
    max_quotient: int
    bounded_type_flag: bool


def diophantine_report(angle, nu, n_max, bound=None, bits=128):
    """Max of ``q_{n+1} / q_n^(nu-1)`` over ``1 <= n <= n_max``.

    ``bounded_type_flag`` is decided by the source where possible (periodic:
    true, growth rule: false) and otherwise by ``max a_n <= bound``.
    """
    if nu < 2:
        raise PreconditionViolated("nu must be >= 2")
    if n_max < 1:
        raise PreconditionViolated("n_max must be >= 1")
    angle._ensure(n_max + 1)
    best, arg = None, None
    exact_power = Fraction(nu) - 1 if isinstance(nu, (int, Fraction)) else None
    for n in range(1, n_max + 1):
        qn, qn1 = angle.q(n), angle.q(n + 1)
        if exact_power is not None and exact_power.denominator == 1:
            r = NormInterval.exact(Fraction(qn1, qn ** int(exact_power)), bits)
        else:
            r = qn1 / iv.exp(iv.log(NormInterval.exact(qn, bits)) * (NormInterval.exact(nu, bits) - 1))
        if best is None or r.lo > best.lo:
            best, arg = r if best is None else NormInterval(max(best.lo, r.lo), max(best.hi, r.hi), bits), n
        else:
            best = NormInterval(best.lo, max(best.hi, r.hi), bits)
    amax = max(angle.quotients(n_max + 1))
    flag = angle.is_bounded_type()
    if flag is None:
        flag = amax <= (bound if bound is not None else 1000)
    return DiophantineReport(nu, n_max, best, arg, amax, flag)
