"""Brute-force references, kept independent of the envelope machinery.

Nothing here uses crossing radii, presence tests or the backward recurrence.
The oracle reads only the partial quotients of an angle, rebuilds its own
convergents, brackets alpha between two deep convergents at a fixed high
precision (512 bits by default), and evaluates the closed formulas directly.

Minimisation over ``j`` is done in two stages: a float64 prescreen over a
table of ``||j alpha||`` computed with exact integers (so the table is accurate
to about 1e-15 relatively), followed by certified evaluation of every ``j``
whose prescreened value is within a relative 1e-9 of the smallest one.  The
margin is six orders of magnitude above the float error, so no true minimiser
can be screened out.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from gmpy2 import mpfr

from . import intervals as iv
from .cf import GrowthRule
from .epsilon import DEFAULT_EPSILON
from .errors import PreconditionViolated, ScanBudgetExceeded, UnknownFormula
from .intervals import NormInterval

SCREEN_MARGIN = 1e-9


@dataclass(frozen=True)
class OracleConfig:
    bits: int = 512
    j_cap: int = 2_000_000
    n_cap: int = 12
    search_cap: int = 100_000

    def __post_init__(self):
        if self.bits < 4 * 128:
            raise PreconditionViolated("oracle precision must be at least 4x the main default (512 bits)")


DEFAULT_ORACLE = OracleConfig()


class _Data:
    """Convergents, an alpha bracket and a lazily grown float table of ||j alpha||."""

    def __init__(self, angle, bits):
        self.bits = bits
        self.lock = threading.Lock()
        p, q = [1, 0], [0, 1]  # (p_{-1}, p_0), (q_{-1}, q_0)
        limit = angle.exact_limit()
        n = 0
        while True:
            if limit is not None and n >= limit:
                break
            a = angle.quotient(n + 1)
            p.append(a * p[-1] + p[-2])
            q.append(a * q[-1] + q[-2])
            n += 1
            if limit is None and q[-1] * q[-2] > (1 << (bits + 64)) and n >= 40:
                break
        self.p, self.q = p[1:], q[1:]  # index k holds p_k, q_k
        P1, Q1 = self.p[-1], self.q[-1]
        if isinstance(angle.source, GrowthRule):
            # growth rule: the next quotient is only bounded below
            A = angle.quotient_lower_bound(limit + 1)
            P2, Q2 = A * P1 + self.p[-2], A * Q1 + self.q[-2]
        else:
            P2, Q2 = self.p[-2], self.q[-2]
        down, up = iv.contexts(bits)
        a1, a2 = Fraction(P1, Q1), Fraction(P2, Q2)
        lo, hi = min(a1, a2), max(a1, a2)
        self.alpha = NormInterval.from_rationals(lo, hi, bits)
        # exact-integer approximation used for the float table: |alpha - P/Q| <= 1/(Q Q2)
        self.P, self.Q, self.Q_next = P1, Q1, Q2
        self.table = np.zeros(0)

    def norms(self, J):
        """float64 ||j alpha|| for j = 1..J (index j-1)."""
        with self.lock:
            have = len(self.table)
            if have < J:
                P, Q = self.P, self.Q
                extra = []
                for j in range(have + 1, J + 1):
                    m = (j * P) % Q
                    extra.append(min(m, Q - m) / Q)
                self.table = np.concatenate([self.table, np.array(extra, dtype=np.float64)])
            return self.table[:J]

    def norm_iv(self, j):
        """Certified ||j alpha|| from the alpha bracket."""
        x = self.alpha * j
        m = int(round(x.mid))
        d = x - m
        if d.lo >= 0:
            return d
        if d.hi <= 0:
            return -d
        return NormInterval(mpfr(0), max((-d).hi, d.hi), d.bits)


_CACHE = {}
_CACHE_LOCK = threading.Lock()


def _data(angle, config):
    key = (angle, config.bits)
    with _CACHE_LOCK:
        d = _CACHE.get(key)
        if d is None:
            d = _Data(angle, config.bits)
            _CACHE[key] = d
    return d


def _c(eps, bits):
    # 1/sqrt(2 cosh(eps) - 2); a different route from the main code's sinh form
    if eps.normalized:
        return NormInterval.exact(1, bits)
    return 1 / iv.sqrt(iv.cosh(eps.epsilon(bits)) * 2 - 2)


def _r_rational(r):
    if isinstance(r, NormInterval):
        return r
    return Fraction(r)


def _u(data, j, r, c, bits):
    s = iv.sin_pi(data.norm_iv(j))
    r = iv.as_interval(r, bits)
    return c * iv.sqrt(s.sqr() * r.sqr() * 4 + j * j)


@dataclass(frozen=True)
class OracleResult:
    value: NormInterval
    argmin: int
    ambiguous: bool
    j_max: int
    argmin_is_denominator: bool
    candidates: tuple = field(default=())


def oracle_min(angle, r, eps=DEFAULT_EPSILON, config=None):
    """Dense minimum of u_j(r) over 1 <= j <= J_max with J_max = ceil(best/c) + 1."""
    config = config or DEFAULT_ORACLE
    eps = eps or DEFAULT_EPSILON
    bits = config.bits
    r = _r_rational(r)
    r_iv = iv.as_interval(r, bits)
    if r_iv.lo < 0:
        raise PreconditionViolated("r must be >= 0")
    data = _data(angle, config)
    rf = float(r_iv.mid)
    qs = [q for q in data.q if q >= 1]
    # provisional best over convergent denominators, then the j range it justifies
    best = math.inf
    for q in qs:
        if q > config.j_cap:
            break
        s2 = math.sin(math.pi * _float_norm(data, q)) ** 2
        best = min(best, 4 * s2 * rf * rf + q * q)
        if q * q > best:
            break
    J = int(math.ceil(math.sqrt(best) * (1 + 1e-6))) + 1
    if J > config.j_cap:
        raise ScanBudgetExceeded(f"oracle needs j up to {J} > j_cap {config.j_cap}")
    tab = data.norms(J)
    j = np.arange(1, J + 1, dtype=np.float64)
    f = 4 * np.sin(np.pi * tab) ** 2 * rf * rf + j * j
    fmin = f.min()
    cand = (np.nonzero(f <= fmin * (1 + SCREEN_MARGIN))[0] + 1).tolist()
    c = _c(eps, bits)
    vals = {jj: _u(data, jj, r_iv, c, bits) for jj in cand}
    lo = min(v.lo for v in vals.values())
    arg = min(vals, key=lambda jj: (vals[jj].hi, jj))
    hi = vals[arg].hi
    ambiguous = any(vals[jj].lo <= hi for jj in vals if jj != arg)
    return OracleResult(
        NormInterval(lo, hi, bits), arg, ambiguous, J, arg in set(qs), tuple(sorted(vals))
    )


def _float_norm(data, j):
    m = (j * data.P) % data.Q
    return min(m, data.Q - m) / data.Q


def oracle_inverse(angle, t, eps=DEFAULT_EPSILON, config=None):
    """B^{-1}(t) = max over j < t/c of the closed-form inverse sqrt(((t/c)^2 - j^2)/(4 sin^2(pi j alpha)))."""
    config = config or DEFAULT_ORACLE
    bits = config.bits
    data = _data(angle, config)
    c = _c(eps, bits)
    t = iv.as_interval(t, bits)
    s = t / c
    if not s.certainly_gt(1):
        raise PreconditionViolated("t must exceed c(eps)")
    J = int(math.floor(float(s.hi)))
    if float(s.lo) == J:
        J -= 1
    if J > config.j_cap:
        raise ScanBudgetExceeded(f"inverse needs j up to {J}")
    tab = data.norms(J)
    j = np.arange(1, J + 1, dtype=np.float64)
    sf = float(s.mid)
    g = (sf * sf - j * j) / (4 * np.sin(np.pi * tab) ** 2)
    gmax = g.max()
    cand = (np.nonzero(g >= gmax * (1 - SCREEN_MARGIN))[0] + 1).tolist()
    best = None
    for jj in cand:
        sin2 = iv.sin_pi(data.norm_iv(jj)).sqr() * 4
        v = iv.sqrt((s.sqr() - jj * jj) / sin2)
        best = v if best is None else NormInterval(max(best.lo, v.lo), max(best.hi, v.hi), bits)
    return best


# ---------------------------------------------------------------------------
# direct formula evaluation


def _delta_direct(data, n):
    return iv.sin_pi(data.norm_iv(data.q[n])).sqr() * 4


def _f_constituent(angle, j, r, eps=DEFAULT_EPSILON, config=None):
    config = config or DEFAULT_ORACLE
    data = _data(angle, config)
    return _u(data, j, _r_rational(r), _c(eps, config.bits), config.bits)


def _f_delta(angle, n, config=None):
    config = config or DEFAULT_ORACLE
    return _delta_direct(_data(angle, config), n)


def _f_crossing(angle, n, m, config=None):
    config = config or DEFAULT_ORACLE
    data = _data(angle, config)
    qn, qm = data.q[n], data.q[m]
    if qn == qm:
        return NormInterval.exact(0, config.bits)
    return iv.sqrt((qm * qm - qn * qn) / (_delta_direct(data, n) - _delta_direct(data, m)))


def _cartesian(x, bits):
    r = iv.as_interval(x.r, bits)
    th = iv.as_interval(x.theta, bits) * 2
    return (
        r * iv.sin_pi(th + Fraction(1, 2)),
        r * iv.sin_pi(th),
        iv.as_interval(x.z, bits),
        iv.as_interval(x.t, bits),
    )


def _f_dist(x, y, config=None):
    """Distance in the upper half-space from the Euclidean norm in R^4."""
    config = config or DEFAULT_ORACLE
    bits = config.bits
    a, b = _cartesian(x, bits), _cartesian(y, bits)
    sq = sum(((u - v).sqr() for u, v in zip(a, b)), NormInterval.exact(0, bits))
    return iv.acosh(1 + sq / (a[3] * b[3] * 2))


def _f_inverse(angle, t, eps=DEFAULT_EPSILON, config=None):
    return oracle_inverse(angle, t, eps, config)


def _f_vol(angle, t, eps=DEFAULT_EPSILON, config=None):
    config = config or DEFAULT_ORACLE
    r = oracle_inverse(angle, t, eps, config)
    t = iv.as_interval(t, config.bits)
    return iv.pi(config.bits) * r.sqr() / (t.sqr() * t)


FORMULAS = {
    "UJ": _f_constituent,
    "dn": _f_delta,
    "rr1": _f_crossing,
    "dist": _f_dist,
    "inverse": _f_inverse,
    "vol": _f_vol,
}


def direct_eval(formula_id, *args, **kwargs):
    """Evaluate a registered closed formula once, at the oracle precision."""
    try:
        fn = FORMULAS[formula_id]
    except KeyError:
        raise UnknownFormula(formula_id) from None
    return fn(*args, **kwargs)


# ---------------------------------------------------------------------------
# closest returns


@dataclass(frozen=True)
class ScanReport:
    passed: bool
    n_cap: int
    checked: int
    failures: tuple
    uncertified: tuple


def closest_return_scan(angle, n_cap, config=None, denominators=None):
    """Check ||j alpha|| > ||q_n alpha|| for every 0 < j < q_n, n <= n_cap, exhaustively.

    Uses exact integers: with P/Q a deep convergent and Q' the next
    denominator, ||j alpha|| differs from D_j/Q (D_j the distance of jP to
    QZ) by at most j/(Q Q'), so D_j > D_k is certified once
    (D_j - D_k) Q' > j + k.  ``denominators`` substitutes the list of q_n
    (used for negative controls).
    """
    config = config or DEFAULT_ORACLE
    data = _data(angle, config)
    qs = list(denominators) if denominators is not None else data.q[: n_cap + 1]
    if len(qs) <= n_cap:
        raise ScanBudgetExceeded(f"only {len(qs) - 1} denominators available")
    top = qs[n_cap]
    if top > config.j_cap:
        raise ScanBudgetExceeded(f"q_{n_cap} = {top} exceeds j_cap {config.j_cap}")
    P, Q, Qn = data.P, data.Q, data.Q_next
    D = [0] * (top + 1)
    for j in range(1, top + 1):
        m = (j * P) % Q
        D[j] = min(m, Q - m)
    failures, uncertified, checked = [], [], 0
    best_j = None  # argmin of D over 1..(q_n - 1), refreshed incrementally
    upto = 0
    for n in range(1, n_cap + 1):
        qn = qs[n]
        while upto < qn - 1:
            upto += 1
            if best_j is None or D[upto] < D[best_j]:
                best_j = upto
        if best_j is None:
            continue
        checked += qn - 1
        gap = D[best_j] - D[qn]
        if gap * Qn > best_j + qn:
            continue
        if gap <= 0 and -gap * Qn > best_j + qn:
            failures.append((n, best_j))
        else:
            # also covers gap <= 0 within the approximation error
            uncertified.append((n, best_j))
    return ScanReport(not failures and not uncertified, n_cap, checked, tuple(failures), tuple(uncertified))
