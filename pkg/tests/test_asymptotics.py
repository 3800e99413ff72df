"""Explicit-constant estimates, the universal bound and growth diagnostics."""

from fractions import Fraction

import pytest

from margulis import asymptotics as asy
from margulis.cf import Angle
from margulis.envelope import build_profile
from margulis.errors import NotBoundedType, PreconditionViolated
from margulis.suites import bounded_suite, standard_suite


def _by_name(reports):
    return {r.name: r for r in reports}


@pytest.fixture(scope="module")
def golden_reports():
    return _by_name(asy.inequality_suite(Angle.periodic((1,)), 1, 20))


def test_golden_fund_x(golden_reports):
    rep = golden_reports["fund-x"]
    assert rep.passed
    assert rep.n_range == (6, 20)


def test_silver_next_crossing_large_quotients():
    rep = _by_name(asy.inequality_suite(Angle.periodic((2,)), 5, 20))["ttn-case1"]
    assert rep.passed and rep.n_range == (5, 20) and rep.checked == 16


def test_one_three_del_small_quotient():
    rep = _by_name(asy.inequality_suite(Angle.periodic((1, 3)), 1, 20))["del-case2"]
    assert rep.passed
    # a_{n+2} = 1 exactly when n is odd
    assert rep.checked == len([n for n in range(3, 21) if n % 2])


def test_identity_report(golden_reports):
    rep = golden_reports["qnp-iii"]
    assert rep.identity and rep.passed and rep.margin is None


@pytest.mark.parametrize("angle", bounded_suite(), ids=lambda a: a.spec())
def test_bounded_angles_all_pass(angle):
    for rep in asy.inequality_suite(angle, 1, 20):
        assert not rep.failures and not rep.undetermined, rep.name
        if rep.checked:
            assert rep.passed, rep.name


def test_every_estimate_exercised():
    seen = set()
    for angle in standard_suite():
        for rep in asy.inequality_suite(angle, 1, 20):
            if rep.checked:
                seen.add(rep.name)
    names = {r.name for r in asy.inequality_suite(Angle.periodic((1,)), 1, 3)}
    assert seen == names


def test_liouville_stops_cleanly(liouville):
    for rep in asy.inequality_suite(liouville, 1, 20):
        assert not rep.failures and not rep.undetermined, rep.name


def test_suite_rejects_zero_index(golden):
    with pytest.raises(PreconditionViolated):
        asy.inequality_suite(golden, 0, 5)


@pytest.mark.parametrize("spec", [(1,), (1, 3)])
def test_universal_bound(spec):
    rep = asy.universal_bound_check(Angle.periodic(spec))
    assert rep.passed
    assert rep.n_range[0] == 7


def test_universal_bound_liouville(liouville):
    rep = asy.universal_bound_check(liouville)
    assert rep.passed
    assert "out of reach" in rep.note


@pytest.mark.parametrize("angle", bounded_suite(), ids=lambda a: a.spec())
def test_slopes_near_half(angle):
    prof = build_profile(angle, 24)
    top = prof.valid_r_max.lo
    grid = [Fraction(10**4) * Fraction(11, 10) ** k for k in range(200)]
    grid = [r for r in grid if r < top]
    assert len(grid) > 20
    for s in asy.slope_profile(angle, grid, prof):
        assert s.slope.lo >= 0.4 and s.slope.hi <= 0.6, float(s.r)


@pytest.mark.parametrize("angle", standard_suite(), ids=lambda a: a.spec())
def test_slopes_lie_in_unit_interval(angle):
    prof = asy._profile_for(angle, 12, None)
    grid = [Fraction(11, 10) ** k for k in range(1, 200)]
    grid = [r for r in grid if r < prof.valid_r_max.lo]
    for s in asy.slope_profile(angle, grid, prof):
        assert s.slope.lo > 0
        # near r = 1 the linear part of u_1 dominates and the slope exceeds 1
        if s.r >= 8:
            assert s.slope.hi < 1, float(s.r)


def test_liouville_probes_decrease(liouville):
    prof = asy._profile_for(liouville, 20, None)
    probes = asy.z_probes(liouville, prof)
    assert len(probes) >= 2
    slopes = [p.slope for p in probes]
    assert all(a.certainly_gt(b) for a, b in zip(slopes, slopes[1:]))
    assert slopes[-1].hi < 0.2


def test_band_golden(golden):
    prof = build_profile(golden, 30)
    band = asy.bounded_type_band(golden, 100, 10**8, profile=prof)
    assert 0 < band["c_lo"] <= band["c_hi"] < float("inf")
    assert band["C"] < 100


def test_band_silver(silver):
    prof = build_profile(silver, 24)
    band = asy.bounded_type_band(silver, 100, 10**8, profile=prof)
    assert band["C"] < 100


def test_band_refuses_liouville(liouville):
    with pytest.raises(NotBoundedType):
        asy.bounded_type_band(liouville, 100, 1000, profile=None)
