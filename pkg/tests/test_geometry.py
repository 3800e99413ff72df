"""Upper half-space geometry: distances, displacement, leaves, conjugacy, witnesses."""

import random
from fractions import Fraction

import mpmath
import pytest

from margulis import intervals as iv
from margulis.cf import Angle, norm_any
from margulis.envelope import build_profile, eval_boundary, u_value
from margulis.epsilon import DEFAULT_EPSILON
from margulis.errors import NotInRegion, OutOfRange, PreconditionViolated
from margulis.geometry import (
    Point4,
    ScrewTranslation,
    conjugacy_phi,
    core_length,
    displacement,
    hyp_distance,
    leaf_volume,
    rigidity_witness,
    volume_from_radius,
)
from margulis.intervals import NormInterval
from margulis.oracle import direct_eval

VOL_100 = "0.000126051010774021042769657882090978499191000961562"
INV_100 = "6.33429419058117396213364528460037261858677104512"


def same_point(a, b, bits=128):
    for u, v in ((a.r, b.r), (a.z, b.z), (a.t, b.t)):
        if not iv.as_interval(u, bits).overlaps(iv.as_interval(v, bits)):
            return False
    d = iv.as_interval(a.theta, bits) - iv.as_interval(b.theta, bits)
    return iv.sin_pi(d).contains(0)


def test_vertical_distance_is_one():
    with mpmath.workdps(50):
        e = Fraction(mpmath.nstr(mpmath.e, 45))
    x, y = Point4(0, 0, 0, 1), Point4(0, 0, 0, e)
    assert hyp_distance(x, y).overlaps(NormInterval.from_rationals(1 - Fraction(1, 10**40), 1 + Fraction(1, 10**40), 128))
    assert direct_eval("dist", x, y).overlaps(hyp_distance(x, y))


def test_distance_symmetric_and_zero():
    x = Point4(Fraction(3, 2), Fraction(1, 5), 2, Fraction(7, 3))
    y = Point4(1, Fraction(2, 3), -1, 4)
    assert hyp_distance(x, y).overlaps(hyp_distance(y, x))
    assert hyp_distance(x, x).contains(0)


def test_point_rejects_lower_half():
    with pytest.raises(PreconditionViolated):
        Point4(1, 0, 0, 0)


def test_theta_wraps():
    assert Point4(1, Fraction(7, 4), 0, 1).theta == Fraction(3, 4)


def test_displacement_at_twice_the_boundary(golden):
    r = Fraction(5, 2)
    j = 3
    u = u_value(golden, j, r, target_bits=100)
    x = Point4(r, 0, 0, u * 2)
    d = displacement(golden, j, x)
    assert d.in_region
    assert d.cosh_minus_one.overlaps(DEFAULT_EPSILON.cosh_minus_one(128) / 4)


def test_displacement_at_half_the_boundary(golden):
    r = Fraction(5, 2)
    u = u_value(golden, 2, r, target_bits=100)
    assert not displacement(golden, 2, Point4(r, 0, 0, u / 2)).in_region


@pytest.mark.parametrize("period", [(1,), (2,), (1, 3)])
def test_displacement_matches_distance(period):
    a = Angle.periodic(period)
    g = ScrewTranslation(a)
    rng = random.Random(7)
    for _ in range(100):
        x = Point4(
            Fraction(rng.randint(0, 4000), 100),
            Fraction(rng.randint(0, 999), 1000),
            Fraction(rng.randint(-500, 500), 100),
            Fraction(rng.randint(1, 20000), 100),
        )
        j = rng.randint(1, 40)
        d = displacement(a, j, x, bits=160)
        assert d.rho.overlaps(hyp_distance(g.power(x, j, 160), x, 160))


def test_core_length_exact():
    assert core_length(8) == Fraction(1, 8)
    with pytest.raises(PreconditionViolated):
        core_length(0)


def test_leaf_volume_frozen(golden):
    prof = build_profile(golden, 12)
    v = leaf_volume(golden, 100, profile=prof, target_bits=100)
    ref = Fraction(VOL_100)
    assert v.overlaps(NormInterval.from_rationals(ref * (1 - Fraction(1, 10**30)), ref * (1 + Fraction(1, 10**30)), 256))


def test_leaf_volume_round_trip(golden):
    from margulis.envelope import boundary_inverse

    prof = build_profile(golden, 12)
    r = boundary_inverse(golden, 100, profile=prof, target_bits=100)
    assert abs(iv.to_fraction(r.lo) - Fraction(INV_100)) < Fraction(1, 10**25)
    assert leaf_volume(golden, 100, profile=prof, target_bits=100).overlaps(volume_from_radius(r, 100))
    assert direct_eval("vol", golden, 100).overlaps(volume_from_radius(r, 100))


def test_leaf_volume_grows_linearly(golden):
    prof = build_profile(golden, 30)
    ts = [Fraction(10) ** (2 + k / 8) for k in range(33)]
    ratios = [leaf_volume(golden, t, profile=prof) / t for t in ts]
    assert all(r.lo > 1e-6 for r in ratios)
    assert ratios[-1].hi >= ratios[0].lo


def test_leaf_volume_beyond_profile(golden):
    prof = build_profile(golden, 6)
    with pytest.raises(OutOfRange):
        leaf_volume(golden, 10**6, profile=prof)


@pytest.fixture(scope="module")
def pair_profiles():
    a, b = Angle.periodic((1,)), Angle.periodic((2,))
    return a, b, (build_profile(a, 12), build_profile(b, 12))


def test_phi_identity(pair_profiles):
    a, _, (pa, _) = pair_profiles
    x = Point4(3, Fraction(1, 7), 2, 500)
    assert conjugacy_phi(a, a, x, (pa, pa)) == x


def test_phi_outside_region(pair_profiles):
    a, b, profs = pair_profiles
    with pytest.raises(NotInRegion):
        conjugacy_phi(a, b, Point4(3, 0, 0, 1), profs)


def test_phi_out_of_range(pair_profiles):
    a, b, profs = pair_profiles
    with pytest.raises(OutOfRange):
        conjugacy_phi(a, b, Point4(10**6, 0, 0, 10**9), profs)


def test_phi_conjugates(pair_profiles):
    a, b, profs = pair_profiles
    ga, gb = ScrewTranslation(a), ScrewTranslation(b)
    rng = random.Random(11)
    r_top = float(min(p.valid_r_max.lo for p in profs))
    for _ in range(100):
        r = Fraction(rng.uniform(0, r_top * 0.99)).limit_denominator(10**6)
        base = eval_boundary(a, r, profile=profs[0]).value
        t = iv.to_fraction(base.hi) + Fraction(rng.randint(1, 10**5), 100)
        x = Point4(r, Fraction(rng.randint(0, 999), 1000), Fraction(rng.randint(-50, 50), 7), t)
        lhs = conjugacy_phi(a, b, ga(x), profs)
        img = conjugacy_phi(a, b, x, profs)
        assert same_point(lhs, gb(img))
        # the image lies in the beta region with the same height above its boundary
        tb = eval_boundary(b, r, profile=profs[1]).value
        assert iv.as_interval(img.t).certainly_gt(tb)


def test_witness_golden_silver(golden, silver):
    w = rigidity_witness(golden, silver, count=10)
    assert len(w.pairs) == 10
    fib = [1, 1]
    while fib[-1] < 10**6:
        fib.append(fib[-1] + fib[-2])
    assert all(p.n in fib for p in w.pairs)
    norms_a = [p.norm_alpha for p in w.pairs]
    assert all(x.certainly_gt(y) for x, y in zip(norms_a, norms_a[1:]))
    for p in w.pairs:
        assert p.norm_beta.overlaps(norm_any(silver, p.n, target_bits=40))
        assert p.norm_beta.certainly_gt(p.norm_alpha)
        assert p.beta_lower.hi <= p.beta_disp.hi
    assert w.floor.lo > 0
    assert w.divergence_index == 1


def test_witness_same_angle(golden):
    with pytest.raises(PreconditionViolated):
        rigidity_witness(golden, Angle.periodic((1,)))
