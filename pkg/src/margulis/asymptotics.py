"""Certified checks of the growth estimates for crossing radii, delta gaps and the envelope.

Each estimate is checked on a finite index range as ``c_lo <= value/scale <= c_hi``
with the explicit constants; the reported margin is the smallest slack
``min(ratio - c_lo, c_hi - ratio)`` over the range, as an interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import intervals as iv
from .envelope import (
    Presence,
    build_profile,
    delta_at,
    delta_diff_at,
    eval_boundary,
    r2_at,
)
from .epsilon import DEFAULT_EPSILON, NORMALIZED
from .errors import NotBoundedType, PrecisionExceeded, PreconditionViolated, QuotientsExhausted
from .intervals import DEFAULT_POLICY, NormInterval

UNIVERSAL_CONSTANT = 1000


def _pi(bits):
    return iv.pi(bits)


def _sqrt(x, bits):
    return iv.sqrt(iv.as_interval(x, bits))


# explicit constants, as functions of the working precision
def _c_sqrt3_4pi(b):
    return _sqrt(3, b) / (_pi(b) * 4)


def _c_inv_sqrt2(b):
    return 1 / _sqrt(2, b)


CONSTANTS = {
    "sqrt3/(4pi)": _c_sqrt3_4pi,
    "1/sqrt2": _c_inv_sqrt2,
    "sqrt2": lambda b: _sqrt(2, b),
    "2": lambda b: NormInterval.exact(2, b),
    "1": lambda b: NormInterval.exact(1, b),
    "1/2": lambda b: NormInterval.exact(Fraction(1, 2), b),
    "4pi^2": lambda b: _pi(b).sqr() * 4,
    "2pi": lambda b: _pi(b) * 2,
    "8pi^2": lambda b: _pi(b).sqr() * 8,
    "1/(2pi)": lambda b: 1 / (_pi(b) * 2),
    "sqrt3/(sqrt32 pi)": lambda b: _sqrt(3, b) / (_sqrt(32, b) * _pi(b)),
    "1/sqrt(2pi)": lambda b: 1 / iv.sqrt(_pi(b) * 2),
    "1/(sqrt8 pi)": lambda b: 1 / (_sqrt(8, b) * _pi(b)),
    "1/sqrt(pi)": lambda b: 1 / iv.sqrt(_pi(b)),
    "1/(sqrt24 pi)": lambda b: 1 / (_sqrt(24, b) * _pi(b)),
    "sqrt3/sqrt(pi)": lambda b: _sqrt(3, b) / iv.sqrt(_pi(b)),
    "sqrt3/(24pi)": lambda b: _sqrt(3, b) / (_pi(b) * 24),
}


@dataclass(frozen=True)
class InequalityReport:
    name: str
    n_range: tuple  # (first, last) index actually checked, or None
    checked: int
    margin: NormInterval | None
    failures: tuple = ()
    undetermined: tuple = ()
    note: str = ""
    identity: bool = False  # an exact equality: no slack, only failures count

    @property
    def passed(self):
        """Certified strict pass: every case checked with positive slack."""
        if self.identity:
            return self.checked > 0 and not self.failures
        return (
            self.checked > 0
            and not self.failures
            and not self.undetermined
            and self.margin is not None
            and self.margin.lo > 0
        )

    def as_dict(self):
        return {
            "name": self.name,
            "n_range": list(self.n_range) if self.n_range else None,
            "checked": self.checked,
            "margin_lo": None if self.margin is None else float(self.margin.lo),
            "margin_hi": None if self.margin is None else float(self.margin.hi),
            "failures": list(self.failures),
            "undetermined": list(self.undetermined),
            "passed": self.passed,
            "note": self.note,
        }


def _imin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    lo = a.lo if a.lo <= b.lo else b.lo
    hi = a.hi if a.hi <= b.hi else b.hi
    return NormInterval(lo, hi, max(a.bits, b.bits))


def _slack(ratio, lo_name, hi_name, bits):
    s = None
    if lo_name is not None:
        s = ratio - CONSTANTS[lo_name](bits)
    if hi_name is not None:
        s = _imin(s, CONSTANTS[hi_name](bits) - ratio)
    return s


class _Skip(Exception):
    """The case does not apply at this index."""


def _r(angle, n, m, bits):
    r2 = r2_at(angle, n, m, bits)
    if r2 is None:
        return None
    return iv.sqrt(r2)


def _run(name, angle, ns, evaluate, policy, lo_name, hi_name, note=""):
    """Evaluate ``evaluate(n, bits) -> ratio`` on ``ns`` and collect the certified slack.

    Indices needing quotients past the angle's valid range end the scan.
    """
    margin, checked, first, last = None, 0, None, None
    failures, undetermined = [], []
    exhausted = None
    for n in ns:
        try:
            s = None
            for bits in policy.levels():
                ratio = evaluate(n, bits)
                if ratio is None:
                    continue
                s = _slack(ratio, lo_name, hi_name, bits)
                if s.lo > 0 or s.hi < 0:
                    break
        except _Skip:
            continue
        except (QuotientsExhausted, PrecisionExceeded, ZeroDivisionError) as exc:
            # a divisor enclosing zero means the tail quotients are only bounded below
            exhausted = f"stopped at n={n}: {exc}"
            break
        checked += 1
        first = n if first is None else first
        last = n
        if s is None or s.lo <= 0 <= s.hi:
            undetermined.append(n)
        elif s.hi < 0:
            failures.append(n)
        if s is not None:
            margin = _imin(margin, s)
    if exhausted:
        note = f"{note}; {exhausted}" if note else exhausted
    rng = (first, last) if checked else None
    return InequalityReport(name, rng, checked, margin, tuple(failures), tuple(undetermined), note)


# ---------------------------------------------------------------------------
# individual estimates


def _a(angle, k):
    return angle.quotient(k)


def check_skip_crossing(angle, ns, policy):
    def ev(n, bits):
        r = _r(angle, n, n + 2, bits)
        return None if r is None else r / (angle.q(n + 1) * angle.q(n + 2))

    return [_run("tn1", angle, ns, ev, policy, "sqrt3/(4pi)", "1/sqrt2")]


def check_delta_gap(angle, ns, policy):
    def case(big, n_min):
        def ev(n, bits):
            if n < n_min or (_a(angle, n + 2) >= 2) != big:
                raise _Skip
            dd = delta_diff_at(angle, n, n + 1, bits)
            scale = angle.q(n + 1) ** 2 if big else angle.q(n + 1) * angle.q(n + 3)
            return dd * scale

        return ev

    return [
        _run("del-case1", angle, ns, case(True, 1), policy, "2", "4pi^2"),
        _run("del-case2", angle, ns, case(False, 3), policy, "2pi", "8pi^2"),
    ]


_NEXT_CROSSING = {
    # name: (a_{n+2} >= 2, a_{n+1} >= 2, n_min, lower, upper)
    "ttn-case1": (True, True, 1, "sqrt3/(4pi)", "1/sqrt2"),
    "ttn-case2": (True, False, 1, "1/(2pi)", "1"),
    "ttn-case3": (False, True, 3, "sqrt3/(sqrt32 pi)", "1/sqrt(2pi)"),
    "ttn-case4": (False, False, 3, "1/(sqrt8 pi)", "1/sqrt(pi)"),
}


def _next_crossing_scale(angle, n, big2, big1, bits):
    q = angle.q
    if big2 and big1:
        return NormInterval.exact(q(n + 1) ** 2, bits)
    if big2:
        return iv.sqrt(NormInterval.exact(q(n + 1) ** 3 * q(n - 1), bits))
    if big1:
        return iv.sqrt(NormInterval.exact(q(n + 1) ** 3 * q(n + 3), bits))
    return iv.sqrt(NormInterval.exact(q(n + 1) ** 2 * q(n - 1) * q(n + 3), bits))


def check_next_crossing(angle, ns, policy):
    out = []
    for name, (big2, big1, n_min, lo, hi) in _NEXT_CROSSING.items():

        def ev(n, bits, big2=big2, big1=big1, n_min=n_min):
            if n < n_min or (_a(angle, n + 2) >= 2) != big2 or (_a(angle, n + 1) >= 2) != big1:
                raise _Skip
            r = _r(angle, n, n + 1, bits)
            return None if r is None else r / _next_crossing_scale(angle, n, big2, big1, bits)

        out.append(_run(name, angle, ns, ev, policy, lo, hi))
    return out


_ENDPOINTS = {
    # right endpoint of q_n over q_{n+1}^2, split by presence of q_{n+1} and the quotients
    "fund-absent": (None, None, 1, "sqrt3/(4pi)", "sqrt2"),
    "fund-present-1": (True, True, 1, "sqrt3/(4pi)", "1/sqrt2"),
    "fund-present-2": (True, False, 5, "1/(sqrt24 pi)", "1/sqrt2"),
    "fund-present-3": (False, True, 4, "sqrt3/(4pi)", "sqrt3/sqrt(pi)"),
    "fund-present-4": (False, False, 5, "sqrt3/(24pi)", "sqrt2"),
}


def check_endpoints(angle, ns, policy, profile):
    out = []
    pm = profile.presence_map()

    def present(k):
        p = pm.get(k)
        if p is None:
            raise QuotientsExhausted(k, profile.n_max)
        if p is Presence.UNDETERMINED:
            raise _Skip
        return p is Presence.PRESENT

    for name, (big2, big1, n_min, lo, hi) in _ENDPOINTS.items():

        def ev(n, bits, name=name, big2=big2, big1=big1, n_min=n_min):
            if n < n_min or not present(n):
                raise _Skip
            if name == "fund-absent":
                if present(n + 1):
                    raise _Skip
                r = _r(angle, n, n + 2, bits)
            else:
                if not present(n + 1):
                    raise _Skip
                if (_a(angle, n + 2) >= 2) != big2 or (_a(angle, n + 1) >= 2) != big1:
                    raise _Skip
                r = _r(angle, n, n + 1, bits)
            return None if r is None else r / angle.q(n + 1) ** 2

        out.append(_run(name, angle, ns, ev, policy, lo, hi))

    def endpoint(which, n_min):
        def ev(n, bits):
            if n < n_min:
                raise _Skip
            if n > profile.n_max:
                raise QuotientsExhausted(n, profile.n_max)
            e = profile.entry(n)
            if e is None or e.presence is not Presence.PRESENT:
                raise _Skip
            if which == "x":
                if e.prev is None:
                    raise _Skip
                return _r(angle, e.prev, n, bits) / angle.q(n) ** 2
            return _r(angle, n, e.next, bits) / angle.q(n + 1) ** 2

        return ev

    out.append(_run("fund-x", angle, ns, endpoint("x", 6), policy, "sqrt3/(24pi)", "sqrt2"))
    out.append(_run("fund-y", angle, ns, endpoint("y", 5), policy, "sqrt3/(24pi)", "sqrt2"))
    return out


def check_delta_decay(angle, ns, policy):
    def ev_two(n, bits):
        return delta_at(angle, n, bits) / delta_at(angle, n + 2, bits)

    def ev_one(n, bits):
        if _a(angle, n + 2) < 2:
            raise _Skip
        return delta_at(angle, n, bits) / delta_at(angle, n + 1, bits)

    return [
        _run("do-skip", angle, ns, ev_two, policy, "2", None),
        _run("do-next", angle, ns, ev_one, policy, "2", None),
    ]


def check_norm_products(angle, ns, policy):
    def ev_ii(n, bits):
        # the upper slack is of order 1/a_{n+2}, so that quotient must be exact
        angle.check_index(n + 2)
        return angle.gamma(n, bits) * angle.q(n + 1)

    out = [_run("qnp-ii", angle, ns, ev_ii, policy, "1/2", "1")]

    # (iii) is an identity; certify the combination collapses to an exact zero hull
    checked, bad, first, last = 0, [], None, None
    for n in ns:
        try:
            angle.check_index(n + 2)
            lo, hi = angle.gamma_combo_bounds({n: 1, n + 1: -_a(angle, n + 2), n + 2: -1}, 128)
        except (QuotientsExhausted, PrecisionExceeded):
            break
        checked += 1
        first = n if first is None else first
        last = n
        if not lo == hi == 0:
            bad.append(n)
    out.append(
        InequalityReport(
            "qnp-iii",
            (first, last) if checked else None,
            checked,
            None,
            tuple(bad),
            (),
            "exact identity",
            identity=True,
        )
    )
    return out


def inequality_suite(angle, n_min=1, n_max=20, policy=None, profile=None):
    """All explicit-constant estimates on n_min..n_max (each with its own lower index)."""
    if n_min < 1:
        raise PreconditionViolated("the estimates are stated for n >= 1")
    policy = policy or DEFAULT_POLICY
    ns = range(n_min, n_max + 1)
    if profile is None:
        profile = _profile_for(angle, n_max + 2, policy)
    reports = []
    reports += check_skip_crossing(angle, ns, policy)
    reports += check_delta_gap(angle, ns, policy)
    reports += check_next_crossing(angle, ns, policy)
    reports += check_endpoints(angle, ns, policy, profile)
    reports += check_delta_decay(angle, ns, policy)
    reports += check_norm_products(angle, ns, policy)
    return reports


def _profile_for(angle, n_max, policy):
    top = angle.max_valid_index
    if top is not None:
        n_max = min(n_max, _feasible_profile_depth(angle))
    return build_profile(angle, n_max, policy=policy)


def _feasible_profile_depth(angle):
    """Deepest n_max a profile can reach for an angle with finitely many quotients."""
    top = angle.max_valid_index
    for n in range(top, 0, -1):
        try:
            build_profile(angle, n, verify_window=0)
            return n
        except (QuotientsExhausted, PrecisionExceeded):
            continue
    raise QuotientsExhausted(1, top)


# ---------------------------------------------------------------------------
# universal bound


def universal_start(angle, profile):
    """(k, sqrt(2) q_k^2 as a Fraction hull upper end) with k = 7 when feasible.

    For angles whose profile cannot reach sqrt(2) q_7^2, the largest k < 7
    with sqrt(2) q_k^2 below the profile range is used instead.
    """
    top = float(profile.valid_r_max.lo)
    for k in range(7, 0, -1):
        try:
            q = angle.q(k)
        except QuotientsExhausted:
            continue
        r0 = _sqrt(2, 128) * (q * q)
        if float(r0.hi) < top:
            return k, iv.to_fraction(r0.hi)
    raise PreconditionViolated("profile too short for the universal bound")


def universal_bound_check(angle, r_count=100, profile=None, eps=DEFAULT_EPSILON, policy=None, n_max=None):
    """Certify B(r) <= 1000 sqrt(r) at every breakpoint past the start and on a log grid."""
    policy = policy or DEFAULT_POLICY
    if profile is None:
        profile = _profile_for(angle, n_max or 16, policy)
    k, r0 = universal_start(angle, profile)
    points = []
    for e in profile.present:
        for end in (e.x, e.y):
            if end is not None and end.lo >= r0 and end.hi <= profile.valid_r_max.lo:
                points.append(end)
    hi = iv.to_fraction(profile.valid_r_max.lo)
    a, b = math.log(float(r0)), math.log(float(hi))
    for i in range(r_count):
        v = Fraction(math.exp(a + (b - a) * i / max(r_count - 1, 1)))
        points.append(min(max(v, r0), hi))
    margin, bad, und = None, [], []
    for i, r in enumerate(points):
        bv = eval_boundary(angle, r, eps, profile, target_bits=64, policy=policy)
        rr = iv.as_interval(r, bv.value.bits)
        s = UNIVERSAL_CONSTANT - bv.value / iv.sqrt(rr)
        margin = _imin(margin, s)
        if s.hi < 0:
            bad.append(i)
        elif s.lo <= 0:
            und.append(i)
    note = f"start sqrt(2) q_{k}^2" + ("" if k == 7 else " (q_7 out of reach)")
    return InequalityReport("universal-bound", (k, profile.n_max), len(points), margin, tuple(bad), tuple(und), note)


# ---------------------------------------------------------------------------
# slopes


@dataclass(frozen=True)
class SlopeSample:
    r: Fraction
    slope: NormInterval
    probe_index: int | None = None


def _slope_at(angle, r, profile, eps, policy):
    bv = eval_boundary(angle, r, eps, profile, target_bits=64, policy=policy)
    bits = bv.value.bits
    return iv.log(bv.value) / iv.log(iv.as_interval(r, bits))


def slope_profile(angle, r_grid, profile=None, eps=NORMALIZED, policy=None):
    """log B(r) / log r on ``r_grid`` (all r > 1), normalised so that c(eps) = 1 by default."""
    policy = policy or DEFAULT_POLICY
    if profile is None:
        raise PreconditionViolated("slope_profile needs a profile")
    out = []
    for r in r_grid:
        r = Fraction(r)
        if r <= 1:
            raise PreconditionViolated("slopes are sampled at r > 1")
        out.append(SlopeSample(r, _slope_at(angle, r, profile, eps, policy)))
    return out


def z_probes(angle, profile, eps=NORMALIZED, policy=None, min_index=1):
    """Slopes at z = sqrt(x y) for every present constituent with both endpoints known."""
    policy = policy or DEFAULT_POLICY
    out = []
    for e in profile.present:
        if e.n < min_index or e.x is None or e.y is None or e.x.hi <= 1:
            continue
        z = iv.sqrt(e.x * e.y)
        zf = iv.to_fraction(z.lo)
        if zf <= 1:
            continue
        out.append(SlopeSample(zf, _slope_at(angle, zf, profile, eps, policy), e.n))
    return out


def bounded_type_band(angle, r_lo, r_hi, count=200, profile=None, eps=DEFAULT_EPSILON, policy=None):
    """Certified constants c_lo <= B(r)/sqrt(r) <= c_hi on [r_lo, r_hi], and C = max(c_hi, 1/c_lo)."""
    if angle.is_bounded_type() is not True:
        raise NotBoundedType(f"{angle.spec()} is not known to be of bounded type")
    policy = policy or DEFAULT_POLICY
    if profile is None:
        raise PreconditionViolated("bounded_type_band needs a profile")
    r_lo, r_hi = Fraction(r_lo), Fraction(r_hi)
    if not 0 < r_lo < r_hi:
        raise PreconditionViolated("need 0 < r_lo < r_hi")
    if r_hi > iv.to_fraction(profile.valid_r_max.lo):
        raise PreconditionViolated("r_hi beyond the profile range")
    pts = [e.y for e in profile.present if e.y is not None and r_lo <= iv.to_fraction(e.y.lo) <= r_hi]
    a, b = math.log(float(r_lo)), math.log(float(r_hi))
    pts += [Fraction(math.exp(a + (b - a) * i / (count - 1))) for i in range(count)]
    pts[-count:] = [min(max(p, r_lo), r_hi) for p in pts[-count:]]
    lo = hi = None
    for r in pts:
        bv = eval_boundary(angle, r, eps, profile, target_bits=64, policy=policy)
        ratio = bv.value / iv.sqrt(iv.as_interval(r, bv.value.bits))
        lo = ratio.lo if lo is None or ratio.lo < lo else lo
        hi = ratio.hi if hi is None or ratio.hi > hi else hi
    # step one ulp outward so the float constants stay certified
    c_lo, c_hi = math.nextafter(float(lo), 0.0), math.nextafter(float(hi), math.inf)
    return {"c_lo": c_lo, "c_hi": c_hi, "C": max(c_hi, 1 / c_lo), "points": len(pts)}
