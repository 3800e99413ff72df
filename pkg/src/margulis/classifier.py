"""Arithmetic presence test for q_n when a_{n+1} = 1.

With a_{n+1} = 1, q_n is present exactly when

    (delta_n - delta_{n+1}) / (delta_{n-1} - delta_n)  <  X(mu),    mu = q_n / q_{n-1},

and for n >= 5 the left side is squeezed between Z(lambda) and Y(lambda),
lambda = ||q_n alpha|| / ||q_{n+1} alpha||.  Comparing the graphs of X, Y, Z
decides five cells of the (a_n, a_{n+2}) table; the rest depend on further
quotients and are reported as white cells.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from . import intervals as iv
from .envelope import Presence, delta_diff_at
from .errors import ContractViolation, PoleProximity, PreconditionViolated
from .intervals import DEFAULT_POLICY, NormInterval

# the sine bound 0.95 x^2 <= sin^2 x is kept as an exact rational
SINE_LOW = Fraction(19, 20)
SINE_GAP = 1 - SINE_LOW  # 1/20


class TableVerdict(str, enum.Enum):
    PRESENT = "Present"
    ABSENT = "Absent"
    WHITE_CELL = "WhiteCell"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class XYZ:
    X: object
    Y: object
    Z: object


def _x(t):
    return (2 * t + 1) / (t * t - 1)


def _y_den(t):
    return -SINE_GAP * t * t + 2 * SINE_LOW * t + SINE_LOW


def _y(t):
    den = _y_den(t)
    if isinstance(den, NormInterval):
        if den.lo <= 0 <= den.hi:
            raise PoleProximity(f"Y is singular inside {t}")
    elif den == 0:
        raise PoleProximity(f"Y is singular at {t}")
    return (t * t - SINE_LOW) / den


def _z(t):
    return (SINE_LOW * t * t - 1) / (SINE_GAP * t * t + 2 * t + 1)


def _as_t(t, bits):
    if isinstance(t, NormInterval):
        return t
    if isinstance(t, (int, Fraction)):
        return Fraction(t)
    return iv.as_interval(t, bits)


def xyz_eval(t, bits=128):
    """X, Y, Z at t > 1; exact Fractions for rational t, intervals otherwise."""
    t = _as_t(t, bits)
    if isinstance(t, NormInterval):
        if not t.certainly_gt(1):
            raise PreconditionViolated("X, Y, Z need t > 1")
        t2 = t.sqr()
        return XYZ(
            (2 * t + 1) / (t2 - 1),
            _iv_y(t),
            (SINE_LOW * t2 - 1) / (SINE_GAP * t2 + 2 * t + 1),
        )
    if t <= 1:
        raise PreconditionViolated("X, Y, Z need t > 1")
    return XYZ(_x(t), _y(t), _z(t))


def _iv_y(t):
    den = t.sqr() * (-SINE_GAP) + t * (2 * SINE_LOW) + SINE_LOW
    if den.lo <= 0 <= den.hi:
        raise PoleProximity(f"Y is singular inside {t}")
    return (t.sqr() - SINE_LOW) / den


def _lt(a, b, bits=128):
    """Certified a < b for Fractions or intervals; None when undecided."""
    if not isinstance(a, NormInterval) and not isinstance(b, NormInterval):
        return a < b
    a, b = iv.as_interval(a, bits), iv.as_interval(b, bits)
    if a.certainly_lt(b):
        return True
    if a.certainly_gt(b):
        return False
    return None


@dataclass(frozen=True)
class AppendixContext:
    n: int
    mu: Fraction
    lam: NormInterval
    ratio: NormInterval
    brackets: dict = field(default_factory=dict)


def _ratio_at(angle, n, bits):
    return delta_diff_at(angle, n, n + 1, bits) / delta_diff_at(angle, n - 1, n, bits)


def appendix_context(angle, n, policy=None):
    """mu (exact), lambda and the delta-difference ratio, with their brackets checked.

    Bracket values are True (certified), False (certified failure, which
    raises ContractViolation) or None (not applicable).
    """
    if n < 1:
        raise PreconditionViolated("n must be >= 1")
    angle.check_index(n + 1)
    if angle.quotient(n + 1) != 1:
        raise PreconditionViolated(f"a_{n + 1} must be 1")
    if angle.q(n) == angle.q(n - 1):
        raise PreconditionViolated("q_n = q_{n-1}: the delta ratio is 0/0")
    policy = policy or DEFAULT_POLICY
    mu = Fraction(angle.q(n), angle.q(n - 1))
    a_n, a_n2 = angle.quotient(n), angle.quotient_lower_bound(n + 2)
    for bits in policy.levels():
        lam = angle.gamma_ratio(n, n + 1, bits)
        dd_lo = delta_diff_at(angle, n - 1, n, bits)
        if not dd_lo.is_positive():
            continue
        ratio = _ratio_at(angle, n, bits)
        br = {}
        # upper end is attained only when q_{n-2} = q_{n-1}
        br["mu"] = (a_n < mu <= a_n + 1) if n >= 2 else (mu == a_n)
        br["lambda"] = _lt(a_n2, lam, bits) and _lt(lam, a_n2 + 1, bits)
        if n >= 5:
            xyz = xyz_eval(lam, bits)
            lo_ok, hi_ok = _lt(xyz.Z, ratio, bits), _lt(ratio, xyz.Y, bits)
            br["sandwich"] = None if (lo_ok is None or hi_ok is None) else (lo_ok and hi_ok)
        else:
            br["sandwich"] = None
        if br["lambda"] is None or (n >= 5 and br["sandwich"] is None):
            continue
        for name, ok in br.items():
            if ok is False:
                raise ContractViolation(f"{name} bracket fails at n={n} for {angle.spec()}")
        return AppendixContext(n, mu, lam, ratio, br)
    raise iv.PrecisionExceeded(f"appendix brackets at n={n}", bits)


def ratio_decide(angle, n, policy=None):
    """Presence from ratio < X(mu) when decidable, else None."""
    policy = policy or DEFAULT_POLICY
    mu = Fraction(angle.q(n), angle.q(n - 1))
    if mu <= 1:
        return None
    x_mu = _x(mu)
    for bits in policy.levels():
        if not delta_diff_at(angle, n - 1, n, bits).is_positive():
            continue
        c = _lt(_ratio_at(angle, n, bits), x_mu, bits)
        if c is not None:
            return Presence.PRESENT if c else Presence.ABSENT
    return None


def table_decide(angle, n):
    """The five decided cells of the (a_n, a_{n+2}) table; everything else is a white cell."""
    if n < 5:
        raise PreconditionViolated("the table applies for n >= 5")
    if angle.quotient(n + 1) != 1:
        raise PreconditionViolated(f"a_{n + 1} must be 1")
    a, b = angle.quotient(n), angle.quotient_lower_bound(n + 2)
    exact_b = angle.exact_limit() is None or n + 2 <= angle.exact_limit()
    if a >= 3 and b >= 3:
        return TableVerdict.ABSENT
    if a == 2 and b >= 5:
        return TableVerdict.ABSENT
    if exact_b:
        if a >= 5 and b == 2:
            return TableVerdict.ABSENT
        if a == 1 and b <= 2:
            return TableVerdict.PRESENT
        if a == 2 and b == 1:
            return TableVerdict.PRESENT
    return TableVerdict.WHITE_CELL


def table_inequality_chain():
    """The exact rational comparisons behind the five decided cells."""
    X = {t: _x(Fraction(t)) for t in (2, 3, 5)}
    Y = {t: _y(Fraction(t)) for t in (2, 3)}
    Z = {t: _z(Fraction(t)) for t in (2, 3, 5)}
    return {
        "Z(3) > X(3)": Z[3] > X[3],
        "Z(5) > X(2)": Z[5] > X[2],
        "Z(2) > X(5)": Z[2] > X[5],
        "Y(3) < X(2)": Y[3] < X[2],
        "Y(2) < X(3)": Y[2] < X[3],
    }
