"""Invariants as property tests over randomly drawn periodic angles."""

from fractions import Fraction

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from margulis import intervals as iv
from margulis.cf import Angle, norm_any, norm_closest, ostrowski
from margulis.classifier import xyz_eval
from margulis.envelope import (
    Presence,
    build_profile,
    crossing,
    delta,
    eval_boundary,
    is_present,
    u_value,
)
from margulis.geometry import Point4, hyp_distance
from margulis.oracle import oracle_min

quotient = st.integers(min_value=1, max_value=5)
angles = st.builds(
    lambda period, prefix: Angle.periodic(tuple(period), tuple(prefix)),
    st.lists(quotient, min_size=1, max_size=4),
    st.lists(quotient, min_size=0, max_size=2),
)
rationals = st.fractions(min_value=0, max_value=1, max_denominator=10**4)


@given(angles, st.integers(min_value=1, max_value=40))
def test_determinant(angle, n):
    assert angle.p(n) * angle.q(n - 1) - angle.p(n - 1) * angle.q(n) == (-1) ** (n - 1)


@given(angles, st.integers(min_value=1, max_value=25))
def test_closest_return_bounds(angle, n):
    b = norm_closest(angle, n)
    nxt = norm_closest(angle, n + 1)
    assert nxt.certainly_lt(b)
    assert b.certainly_lt(Fraction(1, angle.q(n + 1)))
    assert b.certainly_gt(Fraction(1, 2 * angle.q(n + 1)))


@given(angles, st.integers(min_value=1, max_value=10**6))
def test_ostrowski_reconstructs(angle, j):
    digits = ostrowski(angle, j)
    assert sum(b * angle.q(k) for k, b in digits.items()) == j
    for k, b in digits.items():
        assert 0 < b <= angle.quotient(k + 1)


@given(angles, st.integers(min_value=2, max_value=12), st.data())
def test_best_approximation(angle, n, data):
    j = data.draw(st.integers(min_value=1, max_value=angle.q(n + 1) - 1))
    assume(j != angle.q(n))
    assert norm_any(angle, j).lo >= norm_closest(angle, n).lo


@given(angles, st.integers(min_value=1, max_value=15))
def test_delta_decay(angle, n):
    d0, d1, d2 = delta(angle, n), delta(angle, n + 1), delta(angle, n + 2)
    assert d0.certainly_gt(d1)
    assert d0.certainly_gt(d2 * 2)


@given(angles, st.integers(min_value=1, max_value=12))
def test_crossings_positive_and_ordered(angle, n):
    assume(angle.q(n) != angle.q(n - 1))
    r1 = crossing(angle, n - 1, n).r
    assert r1.lo > 0 or (n == 1 and angle.q(1) == 1)
    assert crossing(angle, n, n + 1).r.lo > 0


@given(angles)
@settings(max_examples=25)
def test_absentees_isolated(angle):
    pm = [is_present(angle, n) for n in range(0, 16)]
    assert Presence.UNDETERMINED not in pm
    for n in range(1, 15):
        if pm[n] is Presence.ABSENT:
            assert angle.quotient(n + 1) == 1
            assert pm[n + 1] is Presence.PRESENT


@given(angles)
@settings(max_examples=25)
def test_profile_chain(angle):
    prof = build_profile(angle, 10)
    ps = prof.present
    for e in ps:
        assert e.x.hi <= e.y.lo or (e.x.lo == 0 and e.y.lo > 0)
    for a, b in zip(ps, ps[1:]):
        assert a.y.overlaps(b.x)
        assert a.q < b.q


@given(angles, rationals, st.integers(min_value=1, max_value=200))
@settings(max_examples=30)
def test_boundary_below_every_constituent(angle, frac, j):
    prof = build_profile(angle, 8)
    r = frac * iv.to_fraction(prof.valid_r_max.lo)
    b = eval_boundary(angle, r, profile=prof).value
    assert b.lo <= u_value(angle, j, r).hi


@given(angles, rationals)
@settings(max_examples=30)
def test_boundary_matches_oracle(angle, frac):
    prof = build_profile(angle, 8)
    r = frac * iv.to_fraction(prof.valid_r_max.lo)
    b = eval_boundary(angle, r, profile=prof)
    o = oracle_min(angle, r)
    assert b.value.overlaps(o.value)
    if not o.ambiguous and not b.at_breakpoint:
        assert b.argmin == o.argmin


points = st.builds(
    Point4,
    st.fractions(min_value=0, max_value=50, max_denominator=100),
    st.fractions(min_value=-3, max_value=3, max_denominator=100),
    st.fractions(min_value=-20, max_value=20, max_denominator=100),
    st.fractions(min_value=Fraction(1, 100), max_value=50, max_denominator=100),
)


@given(points)
def test_theta_reduced(x):
    assert 0 <= x.theta < 1


@given(points, points, points)
def test_triangle_inequality(x, y, z):
    assert hyp_distance(x, z).lo <= (hyp_distance(x, y) + hyp_distance(y, z)).hi


@given(st.fractions(min_value=Fraction(11, 10), max_value=30, max_denominator=100),
       st.fractions(min_value=Fraction(1, 100), max_value=5, max_denominator=100))
def test_x_decreasing(t, dt):
    assert xyz_eval(t + dt).X < xyz_eval(t).X
