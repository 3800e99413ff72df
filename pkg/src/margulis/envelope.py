"""Constituent functions, crossing radii and the boundary function.

For an angle alpha the constituents are

    u_j(r) = c(eps) * sqrt(4 sin^2(pi j alpha) r^2 + j^2),

and the boundary function is their pointwise minimum over ``j >= 1``.  Only
convergent denominators ``q_n`` can attain the minimum on an interval, so the
whole envelope is described by the crossing radii

    r_{n,m}^2 = (q_m^2 - q_n^2) / (delta_n - delta_m),   delta_n = 4 sin^2(pi ||q_n alpha||),

and the presence test for each ``q_n``.  Every comparison is done on the
squared radii (exact integer numerators over certified denominators) and the
precision is escalated until the comparison is decided.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpfr

from . import intervals as iv
from .cf import Angle
from .epsilon import DEFAULT_EPSILON, EpsilonConfig
from .errors import ContractViolation, OutOfRange, PreconditionViolated, Undetermined
from .intervals import DEFAULT_POLICY, NormInterval


class Presence(str, enum.Enum):
    PRESENT = "Present"
    ABSENT = "Absent"
    UNDETERMINED = "Undetermined"

    def __str__(self):
        return self.value


# ---------------------------------------------------------------------------
# fixed-precision building blocks


def _degenerate(angle, n, m):
    # q_0 = q_1 = 1 when a_1 = 1; the crossing radius is set to 0 by convention
    return n == 0 and m == 1 and angle.q(1) == 1


@lru_cache(maxsize=1 << 16)
def delta_at(angle, n, bits):
    """Enclosure of delta_n = 4 sin^2(pi ||q_n alpha||) at ``bits``."""
    return iv.sin_pi_sq(angle.gamma(n, bits)) * 4


@lru_cache(maxsize=1 << 16)
def delta_diff_at(angle, n, m, bits):
    """delta_n - delta_m as 4 sin(pi(g_n - g_m)) sin(pi(g_n + g_m)), free of cancellation."""
    minus = angle.gamma_combo({n: 1, m: -1}, bits)
    plus = angle.gamma_combo({n: 1, m: 1}, bits)
    return iv.sin_pi(minus) * iv.sin_pi(plus) * 4


@lru_cache(maxsize=1 << 16)
def r2_at(angle, n, m, bits):
    """Enclosure of r_{n,m}^2, or ``None`` if the denominator is not yet positive."""
    if not 0 <= n < m:
        raise PreconditionViolated("crossings need 0 <= n < m")
    if _degenerate(angle, n, m):
        return NormInterval.exact(0, bits)
    dd = delta_diff_at(angle, n, m, bits)
    if not dd.is_positive():
        return None
    num = angle.q(m) ** 2 - angle.q(n) ** 2
    return NormInterval.exact(num, bits) / dd


def u_sq_at(angle, j, r, bits):
    """(u_j(r) / c)^2 = 4 sin^2(pi j alpha) r^2 + j^2 for an interval ``r``."""
    s2 = _sin_sq_j(angle, j, bits)
    r = iv.as_interval(r, bits)
    return s2 * r.sqr() * 4 + NormInterval.exact(j * j, bits)


@lru_cache(maxsize=1 << 16)
def _sin_sq_j(angle, j, bits):
    # sin^2(pi j alpha) = sin^2(pi S) with S = sum b_k (-1)^k g_k over the Ostrowski digits
    from .cf import ostrowski

    digits = ostrowski(angle, j)
    if len(digits) == 1:
        ((k, b),) = digits.items()
        if b == 1:
            return iv.sin_pi_sq(angle.gamma(k, bits))
    coeffs = {k: (-b if k % 2 else b) for k, b in digits.items()}
    return iv.sin_pi_sq(angle.gamma_combo(coeffs, bits))


def u_at(angle, j, r, eps, bits):
    return eps.c(bits) * iv.sqrt(u_sq_at(angle, j, r, bits))


# ---------------------------------------------------------------------------
# certified operations


def _accept(target_bits):
    return lambda x: x.rel_width_below(target_bits)


def u_value(angle, j, r, eps=DEFAULT_EPSILON, target_bits=53, policy=None):
    """Certified enclosure of u_j(r)."""
    if j < 1:
        raise PreconditionViolated("j must be >= 1")
    if isinstance(r, NormInterval):
        if r.lo < 0:
            raise PreconditionViolated("r must be >= 0")
        return u_at(angle, j, r, eps, max(r.bits, (policy or DEFAULT_POLICY).start))
    if r < 0:
        raise PreconditionViolated("r must be >= 0")
    return iv.escalate(
        lambda bits: u_at(angle, j, NormInterval.exact(r, bits), eps, bits),
        _accept(target_bits),
        f"u_{j}({r})",
        policy,
    )


def delta(angle, n, target_bits=53, policy=None):
    """Certified enclosure of delta_n = 4 sin^2(pi q_n alpha)."""
    if n < 0:
        raise PreconditionViolated("n must be >= 0")
    angle.check_index(n)
    return iv.escalate(lambda bits: delta_at(angle, n, bits), _accept(target_bits), f"delta_{n}", policy)


@dataclass(frozen=True)
class Crossing:
    """The crossing radius of u_{q_n} and u_{q_m}.

    ``numerator`` is the exact integer q_m^2 - q_n^2 and ``delta_diff`` the
    enclosure of delta_n - delta_m (``None`` for the degenerate pair (0, 1)).
    """

    n: int
    m: int
    r: NormInterval
    r_squared: NormInterval
    numerator: int
    delta_diff: NormInterval | None
    degenerate: bool = False


def crossing(angle, n, m, eps=None, target_bits=53, policy=None):
    """Certified crossing radius r_{n,m}; it does not depend on eps."""
    if not 0 <= n < m:
        raise PreconditionViolated("crossings need 0 <= n < m")
    angle.check_index(m)
    num = angle.q(m) ** 2 - angle.q(n) ** 2
    if _degenerate(angle, n, m):
        z = NormInterval.exact(0, (policy or DEFAULT_POLICY).start)
        return Crossing(n, m, z, z, 0, None, True)

    def compute(bits):
        r2 = r2_at(angle, n, m, bits)
        if r2 is None:
            return None
        return r2

    def accept(r2):
        return r2 is not None and r2.rel_width_below(target_bits)

    r2 = iv.escalate(compute, accept, f"r_{{{n},{m}}}", policy)
    bits = r2.bits
    return Crossing(n, m, iv.sqrt(r2), r2, num, delta_diff_at(angle, n, m, bits))


@dataclass(frozen=True)
class TripleClass:
    kind: str  # "Fair", "NearMiss" or "Undetermined"
    width: object = None
    bits: int | None = None
    by_convention: bool = False

    @property
    def certified(self):
        return self.kind != "Undetermined"

    def __str__(self):
        if self.kind == "Undetermined":
            return f"Undetermined(width={format(self.width, '.3g')})"
        return self.kind


def classify_triple(angle, k, n, m, policy=None):
    """Fair / NearMiss / Undetermined for the ordered triple (k, n, m).

    A Strike (all three crossings equal) is never reported as certified: it
    surfaces as Undetermined together with the width reached at the cap.
    """
    if not 0 <= k < n < m:
        raise PreconditionViolated("triples need 0 <= k < n < m")
    angle.check_index(m)
    if _degenerate(angle, k, n):
        return TripleClass("Fair", by_convention=True)
    policy = policy or DEFAULT_POLICY
    width, bits = None, policy.start
    for bits in policy.levels():
        a, b, c = r2_at(angle, k, n, bits), r2_at(angle, k, m, bits), r2_at(angle, n, m, bits)
        if a is None or b is None or c is None:
            continue
        if a.certainly_lt(b) and b.certainly_lt(c):
            return TripleClass("Fair", bits=bits)
        if a.certainly_gt(b) and b.certainly_gt(c):
            return TripleClass("NearMiss", bits=bits)
        width = max(a.rel_width, b.rel_width, c.rel_width)
    return TripleClass("Undetermined", width=width, bits=bits)


def is_present(angle, n, policy=None):
    """Presence of q_n: always for n = 0, for a_{n+1} >= 2, else via the triple (n-1, n, n+1)."""
    if n < 0:
        raise PreconditionViolated("n must be >= 0")
    if n == 0:
        return Presence.PRESENT
    if angle.quotient_lower_bound(n + 1) >= 2:
        return Presence.PRESENT
    t = classify_triple(angle, n - 1, n, n + 1, policy)
    if t.kind == "Fair":
        return Presence.PRESENT
    if t.kind == "NearMiss":
        return Presence.ABSENT
    return Presence.UNDETERMINED


def present_by_all_triples(angle, n, k_min=0, m_max=None, policy=None):
    """Presence from the full definition: every triple (k, n, m) in range is fair."""
    if n == 0:
        return Presence.PRESENT
    m_max = m_max if m_max is not None else n + 6
    undecided = False
    for k in range(k_min, n):
        for m in range(n + 1, m_max + 1):
            t = classify_triple(angle, k, n, m, policy)
            if t.kind == "NearMiss":
                return Presence.ABSENT
            if t.kind == "Undetermined":
                undecided = True
    return Presence.UNDETERMINED if undecided else Presence.PRESENT


# ---------------------------------------------------------------------------
# the profile


@dataclass(frozen=True)
class EnvelopeEntry:
    n: int
    q: int
    presence: Presence
    x: NormInterval | None = None
    y: NormInterval | None = None
    prev: int | None = None  # previous present index (None: x = 0)
    next: int | None = None  # next present index, the partner in y = r_{n,next}


@dataclass(frozen=True)
class EnvelopeProfile:
    angle: Angle
    n_max: int
    entries: tuple
    valid_r_max: NormInterval
    undetermined_at: int | None = None
    verified_window: int = 0
    unseparated: tuple = field(default=())

    @property
    def present(self):
        return tuple(e for e in self.entries if e.presence is Presence.PRESENT and e.y is not None)

    def entry(self, n):
        for e in self.entries:
            if e.n == n:
                return e
        raise KeyError(n)

    def presence_map(self):
        return {e.n: e.presence for e in self.entries}


def _certify_lt(angle, pair_a, pair_b, policy):
    """Decide r^2(pair_a) < r^2(pair_b); returns True, False or None."""
    for bits in policy.levels():
        a, b = r2_at(angle, *pair_a, bits), r2_at(angle, *pair_b, bits)
        if a is None or b is None:
            continue
        if a.certainly_lt(b):
            return True
        if a.certainly_gt(b):
            return False
    return None


def build_profile(angle, n_max, eps=None, policy=None, verify_window=6, target_bits=64):
    """Breakpoint profile of the boundary function for q_0 .. q_{n_max}.

    When a_1 = 1 the indices 0 and 1 share the denominator 1 and a single
    entry (n = 1) is recorded.  Consecutive present entries are chained by
    y_n = x_{next} = r_{n,next}.  The chosen breakpoints are then checked
    against every crossing within ``verify_window`` indices.
    """
    if n_max < 2:
        raise PreconditionViolated("n_max must be >= 2")
    policy = policy or DEFAULT_POLICY
    angle.check_index(n_max)
    pres = {}

    def presence(n):
        if n not in pres:
            pres[n] = is_present(angle, n, policy)
        return pres[n]

    start = 1 if angle.q(1) == 1 else 0
    entries, prev, undetermined_at, last_y = [], None, None, None
    for n in range(start, n_max + 1):
        p = presence(n)
        if p is Presence.UNDETERMINED:
            entries.append(EnvelopeEntry(n, angle.q(n), p))
            undetermined_at = n
            break
        if p is Presence.ABSENT:
            if prev is None or prev != n - 1:
                raise ContractViolation(f"two consecutive absent indices at {n}")
            entries.append(EnvelopeEntry(n, angle.q(n), p))
            continue
        x = NormInterval.exact(0, policy.start) if prev is None else last_y
        p1 = presence(n + 1)
        if p1 is Presence.PRESENT:
            nxt = n + 1
        elif p1 is Presence.ABSENT:
            if angle.quotient(n + 2) != 1:
                raise ContractViolation(f"q_{n + 1} absent but a_{n + 2} != 1")
            p2 = presence(n + 2)
            if p2 is Presence.ABSENT:
                raise ContractViolation(f"q_{n + 1} and q_{n + 2} both absent")
            nxt = n + 2 if p2 is Presence.PRESENT else None
        else:
            nxt = None
        if nxt is None:
            entries.append(EnvelopeEntry(n, angle.q(n), p, x, None, prev, None))
            undetermined_at = n + 1 if p1 is Presence.UNDETERMINED else n + 2
            break
        y = crossing(angle, n, nxt, target_bits=target_bits, policy=policy).r
        entries.append(EnvelopeEntry(n, angle.q(n), p, x, y, prev, nxt))
        prev, last_y = n, y
    if last_y is None:
        raise Undetermined("no breakpoint could be certified")
    unseparated = ()
    if verify_window:
        unseparated = _verify(angle, entries, verify_window, policy)
    return EnvelopeProfile(
        angle, n_max, tuple(entries), last_y, undetermined_at, verify_window, unseparated
    )


def _index_cap(angle):
    top = angle.max_valid_index
    return top if top is not None else 10**9


def _verify(angle, entries, window, policy):
    """Check x = max_k r_{k,n} and y = min_m r_{n,m} over the window; collect ties."""
    cap = _index_cap(angle)
    merged = angle.q(1) == 1
    ties = []
    for e in entries:
        if e.presence is not Presence.PRESENT or e.y is None:
            continue
        n = e.n
        for m in range(n + 1, min(n + window, cap) + 1):
            if m == e.next:
                continue
            ok = _certify_lt(angle, (n, e.next), (n, m), policy)
            if ok is False:
                raise ContractViolation(f"r_{{{n},{m}}} undercuts the breakpoint y_{n}")
            if ok is None:
                ties.append((n, m))
        if e.prev is None:
            continue
        for k in range(max(0, n - window), n):
            if k == e.prev or (merged and k == 0 and e.prev == 1):
                continue
            ok = _certify_lt(angle, (k, n), (e.prev, n), policy)
            if ok is False:
                raise ContractViolation(f"r_{{{k},{n}}} exceeds the breakpoint x_{n}")
            if ok is None:
                ties.append((k, n))
    return tuple(ties)


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class BoundaryValue:
    value: NormInterval
    argmin: int  # the constituent denominator q_n
    index: int  # its convergent index n
    at_breakpoint: bool = False


def _candidates(profile, r):
    entries = profile.present
    ys = [e.y.hi for e in entries]
    i = bisect.bisect_left(ys, r.lo)
    out = []
    for e in entries[i:]:
        if e.x.lo > r.hi:
            break
        out.append(e)
    return out


def _eval_at(angle, r, eps, profile, bits):
    r = iv.as_interval(r, bits)
    cands = _candidates(profile, r)
    if not cands:
        raise OutOfRange(f"r = {r} is outside the profile range")
    vals = [u_at(angle, e.q, r, eps, bits) for e in cands]
    value = iv.hull(*vals)
    e = cands[0]
    return BoundaryValue(value, e.q, e.n, len(cands) > 1)


def eval_boundary(angle, r, eps=DEFAULT_EPSILON, profile=None, target_bits=53, policy=None):
    """The boundary function at ``r`` with the constituent attaining it.

    If ``r`` falls inside the uncertainty of a breakpoint, both neighbouring
    constituents are evaluated and their hull returned (argmin is the left one).
    """
    if profile is None:
        raise PreconditionViolated("eval_boundary needs a profile")
    policy = policy or DEFAULT_POLICY
    r0 = iv.as_interval(r, policy.start)
    if r0.lo < 0:
        raise PreconditionViolated("r must be >= 0")
    if r0.lo > profile.valid_r_max.hi:
        raise OutOfRange(f"r beyond the profile range {profile.valid_r_max}")
    if isinstance(r, NormInterval):
        return _eval_at(angle, r, eps, profile, max(r.bits, policy.start))
    return iv.escalate(
        lambda bits: _eval_at(angle, NormInterval.exact(r, bits), eps, profile, bits),
        lambda bv: bv.value.rel_width_below(target_bits),
        f"boundary at r={r}",
        policy,
    )


def boundary_inverse(angle, t, eps=DEFAULT_EPSILON, profile=None, target_bits=53, policy=None):
    """Certified r with B(r) = t, by bisection on the increasing envelope."""
    if profile is None:
        raise PreconditionViolated("boundary_inverse needs a profile")
    policy = policy or DEFAULT_POLICY
    for bits in policy.levels():
        res = _inverse_at(angle, t, eps, profile, bits, target_bits)
        if res is not None:
            return res
    raise Undetermined(f"B^-1({t}) not resolved at the precision cap")


def _inverse_at(angle, t, eps, profile, bits, target_bits):
    t = iv.as_interval(t, bits)
    c = eps.c(bits)
    if not t.certainly_gt(c):
        raise PreconditionViolated("t must exceed c(eps)")
    entries = profile.present
    top = u_at(angle, entries[-1].q, entries[-1].y, eps, bits)
    if t.certainly_gt(top):
        raise OutOfRange("t beyond the range of the profile")
    # locate the constituent: first entry whose value at y reaches t
    chosen = None
    for e in entries:
        uy = u_at(angle, e.q, e.y, eps, bits)
        if t.certainly_lt(uy):
            chosen = e
            break
        if t.overlaps(uy):
            return e.y  # t is the value at a breakpoint, within its enclosure
    if chosen is None:
        raise OutOfRange("t beyond the range of the profile")
    lo, hi = chosen.x.lo, chosen.y.hi
    down, up = iv.contexts(bits)
    tol = mpfr(2) ** (-target_bits)
    for _ in range(4 * bits):
        if hi - lo <= tol * max(lo, mpfr(0)) or (lo == 0 and hi <= tol):
            break
        mid = up.div(up.add(lo, hi), 2) if lo == 0 or hi < 4 * lo else up.sqrt(up.mul(lo, hi))
        if not lo < mid < hi:
            break
        um = u_at(angle, chosen.q, NormInterval(mid, mid, bits), eps, bits)
        if um.certainly_lt(t):
            lo = mid
        elif um.certainly_gt(t):
            hi = mid
        else:
            break
    res = NormInterval(lo, hi, bits)
    if not res.rel_width_below(target_bits) and not (lo == 0 and hi <= tol):
        return None
    return res


# breadth-first convenience used by tests and the CLI


def sample_grid(profile, count, r_min=None):
    """Log-spaced exact rational radii in [r_min, valid_r_max] (r_min defaults to y of the first entry / 100)."""
    import math

    r_max = float(profile.valid_r_max.lo)
    first = profile.present[0]
    r_min = r_min if r_min is not None else max(float(first.y.lo) / 100, 1e-3)
    if count == 1:
        return [Fraction(r_min)]
    a, b = math.log(r_min), math.log(r_max)
    out = []
    for i in range(count):
        v = math.exp(a + (b - a) * i / (count - 1))
        out.append(Fraction(min(max(v, r_min), r_max)))
    out[-1] = min(out[-1], iv.to_fraction(profile.valid_r_max.lo))
    return out


def oracle_min(angle, r, eps=DEFAULT_EPSILON, config=None):
    """Brute-force minimum of u_j(r) over j (see :mod:`margulis.oracle`)."""
    from .oracle import oracle_min as _om

    return _om(angle, r, eps, config)
