"""Upper half-space H^4 in cylindrical coordinates (r, theta, z, t).

theta is measured in full turns (mod 1); the Euclidean chord between two
angular positions is 2 r sin(pi dtheta) when the radii agree, and in general
(r - r')^2 + 4 r r' sin^2(pi dtheta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import intervals as iv
from .cf import norm_any
from .envelope import _sin_sq_j, boundary_inverse, eval_boundary, u_at, u_sq_at
from .epsilon import DEFAULT_EPSILON
from .errors import (
    NotInRegion,
    OutOfRange,
    PreconditionViolated,
    QuotientsExhausted,
    SearchExhausted,
    Undetermined,
)
from .intervals import DEFAULT_POLICY, NormInterval


def _num(x):
    if isinstance(x, NormInterval):
        return x
    return Fraction(x)


def _wrap(theta):
    """Reduce theta mod 1 (exactly for rationals, by an integer shift for intervals)."""
    if isinstance(theta, NormInterval):
        k = iv.floor_exact(theta.lo)
        return theta - k if k else theta
    return theta - math.floor(theta)


@dataclass(frozen=True)
class Point4:
    r: object
    theta: object
    z: object
    t: object

    def __post_init__(self):
        for name in ("r", "theta", "z", "t"):
            object.__setattr__(self, name, _num(getattr(self, name)))
        if _lower(self.t) <= 0:
            raise PreconditionViolated("t must be positive")
        if _lower(self.r) < 0:
            raise PreconditionViolated("r must be nonnegative")
        object.__setattr__(self, "theta", _wrap(self.theta))

    def intervals(self, bits):
        return tuple(iv.as_interval(v, bits) for v in (self.r, self.theta, self.z, self.t))


def _lower(x):
    return x.lo if isinstance(x, NormInterval) else x


@dataclass(frozen=True)
class ScrewTranslation:
    """(r, theta, z, t) -> (r, theta + alpha, z + 1, t)."""

    alpha: object  # Angle

    def power(self, x, j, bits=128):
        if j < 0:
            raise PreconditionViolated("only forward powers are used")
        if j == 0:
            return x
        shift = self.alpha.alpha(bits) * j
        return Point4(x.r, iv.as_interval(x.theta, bits) + shift, x.z + j, x.t)

    def __call__(self, x, bits=128):
        return self.power(x, 1, bits)


def _sq_dist(x, y, bits):
    rx, thx, zx, tx = x.intervals(bits)
    ry, thy, zy, ty = y.intervals(bits)
    chord = (rx - ry).sqr() + rx * ry * iv.sin_pi_sq(thx - thy) * 4
    return chord + (zx - zy).sqr() + (tx - ty).sqr()


def hyp_distance(x, y, bits=128):
    """rho(x, y) from cosh rho = 1 + |x - y|^2 / (2 t t'), as 2 asinh(sqrt(|x-y|^2 / (4 t t')))."""
    d2 = _sq_dist(x, y, bits)
    tt = iv.as_interval(x.t, bits) * iv.as_interval(y.t, bits) * 4
    return iv.asinh(iv.sqrt(d2 / tt)) * 2


def cosh_minus_one(x, y, bits=128):
    d2 = _sq_dist(x, y, bits)
    return d2 / (iv.as_interval(x.t, bits) * iv.as_interval(y.t, bits) * 2)


@dataclass(frozen=True)
class Displacement:
    rho: NormInterval
    in_region: bool
    cosh_minus_one: NormInterval


def displacement(angle, j, x, eps=DEFAULT_EPSILON, bits=128):
    """Translation length of g^j at x and whether x lies in the j-th tube.

    cosh rho - 1 = (4 sin^2(pi j alpha) r^2 + j^2) / (2 t^2); the tube
    condition t > u_j(r) is equivalent to rho < eps.
    """
    if j < 1:
        raise PreconditionViolated("j must be >= 1")
    r = iv.as_interval(x.r, bits)
    t = iv.as_interval(x.t, bits)
    w = u_sq_at(angle, j, r, bits)
    rho = iv.asinh(iv.sqrt(w) / (t * 2)) * 2
    cm1 = w / (t.sqr() * 2)
    u = u_at(angle, j, r, eps, bits)
    if t.certainly_gt(u):
        inside = True
    elif t.certainly_lt(u):
        inside = False
    else:
        raise Undetermined(f"t = {t.fmt(6)} inside u_{j}(r) = {u.fmt(6)}", width=float(u.width))
    return Displacement(rho, inside, cm1)


def core_length(t):
    """Hyperbolic length 1/t of the core curve of the leaf at height t (exact)."""
    t = Fraction(t)
    if t <= 0:
        raise PreconditionViolated("t must be positive")
    return 1 / t


def leaf_volume(angle, t, eps=DEFAULT_EPSILON, profile=None, target_bits=53, policy=None):
    """pi r^2 / t^3 with r = B^{-1}(t)."""
    policy = policy or DEFAULT_POLICY
    r = boundary_inverse(angle, t, eps, profile, target_bits=target_bits, policy=policy)
    return volume_from_radius(r, t)


def volume_from_radius(r, t):
    r = iv.as_interval(r, getattr(r, "bits", 128))
    tt = iv.as_interval(t, r.bits)
    return iv.pi(r.bits) * r.sqr() / (tt.sqr() * tt)


def _in_region(angle, x, profile, eps, policy):
    b = eval_boundary(angle, x.r, eps, profile, target_bits=64, policy=policy).value
    t = iv.as_interval(x.t, b.bits)
    if t.certainly_gt(b):
        return b
    if t.certainly_lt(b):
        raise NotInRegion(f"t = {t.fmt(6)} is below the boundary {b.fmt(6)}")
    raise Undetermined(f"t within the boundary enclosure {b.fmt(6)}", width=float(b.width))


def conjugacy_phi(alpha, beta, x, profiles, eps=DEFAULT_EPSILON, bits=128, policy=None):
    """(r, theta + (beta - alpha) z, z, t + B_beta(r) - B_alpha(r)) for x in the alpha region."""
    pa, pb = profiles
    policy = policy or DEFAULT_POLICY
    r_hi = x.r.hi if isinstance(x.r, NormInterval) else iv.as_interval(x.r, bits).hi
    if r_hi > pa.valid_r_max.lo or r_hi > pb.valid_r_max.lo:
        raise OutOfRange("r outside one of the boundary profiles")
    b_a = _in_region(alpha, x, pa, eps, policy)
    if alpha == beta:
        return x
    b_b = eval_boundary(beta, x.r, eps, pb, target_bits=64, policy=policy).value
    z = iv.as_interval(x.z, bits)
    theta = iv.as_interval(x.theta, bits) + (beta.alpha(bits) - alpha.alpha(bits)) * z
    t = iv.as_interval(x.t, bits) + b_b - b_a
    return Point4(x.r, theta, x.z, t)


# ---------------------------------------------------------------------------
# rigidity witnesses


@dataclass(frozen=True)
class WitnessPair:
    n: int
    norm_alpha: NormInterval
    norm_beta: NormInterval
    radius: int
    alpha_disp: NormInterval  # cosh rho(g_alpha^n x, x) - 1 at x = (R, 0, 0, u_{alpha,1}(R))
    beta_disp: NormInterval  # same for beta
    beta_lower: NormInterval  # 4 sin^2(pi n beta) R^2 / (2 u_{beta,1}(R)^2) <= beta_disp


@dataclass(frozen=True)
class WitnessSequence:
    pairs: tuple
    floor: NormInterval
    beta_below_alpha: bool
    divergence_index: int


def _first_difference(alpha, beta, depth=400):
    for k in range(1, depth + 1):
        if alpha.quotient(k) != beta.quotient(k):
            return k
    return None


def _probe(angle, n, radius, eps, bits):
    """cosh rho(g^n x, x) - 1 and its sine part at x = (R, 0, 0, u_1(R))."""
    u1 = u_at(angle, 1, NormInterval.exact(radius, bits), eps, bits)
    s2 = _sin_sq_j(angle, n, bits)
    r2 = NormInterval.exact(radius * radius, bits)
    den = u1.sqr() * 2
    full = (s2 * r2 * 4 + n * n) / den
    return full, s2 * r2 * 4 / den


def rigidity_witness(alpha, beta, count=10, search_cap=100_000, eps=DEFAULT_EPSILON, bits=128):
    """Indices n (denominators of alpha up to the cap) with ||n alpha|| -> 0 while ||n beta|| stays away from 0.

    The search is bounded; ``floor`` is the smallest ||n beta|| among the
    returned pairs, as far as the cap allows.
    """
    k = _first_difference(alpha, beta)
    if k is None:
        raise PreconditionViolated("the angles agree on every compared quotient")
    # at the first differing index a larger quotient means a smaller angle when k is odd
    beta_below = (beta.quotient(k) > alpha.quotient(k)) == (k % 2 == 1)
    cands, i = [], 1
    while True:
        try:
            q = alpha.q(i)
        except QuotientsExhausted:
            break
        if q > search_cap:
            break
        if not cands or q != cands[-1]:
            cands.append(q)
        i += 1
    scored = []
    for n in cands:
        na = norm_any(alpha, n, target_bits=40)
        nb = norm_any(beta, n, target_bits=40)
        scored.append((n, na, nb))
    good = [s for s in scored if s[2].certainly_gt(s[1])]
    if not good:
        best = max(scored, key=lambda s: float(s[2].lo) - float(s[1].hi), default=None)
        raise SearchExhausted(f"no separating index up to {search_cap}", best=best)
    good = good[-count:]
    pairs = []
    for n, na, nb in good:
        radius = n * n  # n / R -> 0 along the sequence
        a_full, _ = _probe(alpha, n, radius, eps, bits)
        b_full, b_low = _probe(beta, n, radius, eps, bits)
        pairs.append(WitnessPair(n, na, nb, radius, a_full, b_full, b_low))
    floor = min((p.norm_beta for p in pairs), key=lambda v: v.lo)
    return WitnessSequence(tuple(pairs), floor, beta_below, k)
