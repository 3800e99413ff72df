"""Acceptance criteria, one test each, at the stated tolerances.

Every test records a single PASS/FAIL line, collected in the terminal summary.
"""

import random
import time
from fractions import Fraction

import pytest

from margulis import asymptotics as asy
from margulis import intervals as iv
from margulis import verify
from margulis.cf import Angle, liouville_angle
from margulis.envelope import (
    Presence,
    boundary_inverse,
    build_profile,
    eval_boundary,
)
from margulis.geometry import (
    Point4,
    ScrewTranslation,
    conjugacy_phi,
    displacement,
    hyp_distance,
    leaf_volume,
    volume_from_radius,
)
from margulis.oracle import closest_return_scan, direct_eval
from margulis.suites import bounded_suite, oracle_suite, random_periodic, standard_suite, table_suite

from .conftest import ACCEPTANCE


def record(num, title, checks):
    """checks: [(label, ok)]; the line lists the labels that failed."""
    bad = [label for label, ok in checks if not ok]
    status = "FAIL" if bad else "PASS"
    detail = "; ".join(bad) if bad else "; ".join(label for label, _ in checks)
    line = f"[{status}] criterion {num}: {title} ({detail})"
    ACCEPTANCE[num] = line
    print(line)
    assert not bad, line


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_criterion_1_figures():
    golden, t_g = timed(build_profile, Angle.periodic((1,)), 8)
    one_three, t_o = timed(build_profile, Angle.periodic((1, 3)), 7)
    g_map = golden.presence_map()
    o_map = one_three.presence_map()
    record(1, "figure reproduction", [
        ("golden: all 8 present", [n for n, p in g_map.items() if p is Presence.PRESENT] == list(range(1, 9))),
        ("[1,3]: present exactly at odd n <= 7",
         all((p is Presence.PRESENT) == (n % 2 == 1) for n, p in o_map.items()) and sorted(o_map) == list(range(1, 8))),
        (f"runtimes {t_g:.2f}s, {t_o:.2f}s < 5s", t_g < 5 and t_o < 5),
    ])


def test_criterion_2_oracle_equivalence():
    res, dt = timed(verify.oracle_equivalence, oracle_suite(), points=200, n_max=8)
    checked = sum(r["argmin_checked"] for r in res.rows)
    record(2, "oracle equivalence", [
        ("10 angles", len(res.rows) == 10),
        ("200 points each", all(r["points"] == 200 for r in res.rows)),
        ("overlap everywhere", all(not r["overlap_failures"] for r in res.rows)),
        (f"argmin identical at {checked} interior points", all(not r["argmin_failures"] for r in res.rows) and checked > 0),
        (f"runtime {dt:.1f}s < 120s", dt < 120),
    ])


def test_criterion_3_universal_bound():
    reports = [asy.universal_bound_check(a, r_count=100) for a in standard_suite()]
    worst = min(float(r.margin.lo) for r in reports)
    record(3, "universal bound", [
        (f"{len(reports)} angles", len(reports) == len(standard_suite())),
        (f"certified strict pass, smallest margin {worst:.1f}", all(r.passed for r in reports)),
        ("start at sqrt2 q_7^2 for bounded angles", all(r.n_range[0] == 7 for r in reports[:-1])),
    ])


def test_criterion_4_estimates():
    t0 = time.perf_counter()
    bad, exercised, identity_ok = [], set(), True
    for a in standard_suite():
        for rep in asy.inequality_suite(a, 1, 20):
            if rep.failures or rep.undetermined or (rep.checked and not rep.passed):
                bad.append(f"{a.spec()} {rep.name}")
            if rep.checked:
                exercised.add(rep.name)
    dt = time.perf_counter() - t0
    names = {r.name for r in asy.inequality_suite(Angle.periodic((1,)), 1, 2)}
    golden_fund = {r.name: r for r in asy.inequality_suite(Angle.periodic((1,)), 1, 20)}["fund-x"]
    record(4, "explicit-constant estimates", [
        ("positive margin wherever checked" if not bad else f"failed: {bad[:3]}", not bad),
        (f"all {len(names)} estimates exercised", exercised == names),
        ("golden fund-x on n = 6..20", golden_fund.passed and golden_fund.n_range == (6, 20)),
        (f"runtime {dt:.1f}s < 300s", dt < 300),
    ])


def test_criterion_5_absentees():
    angles = random_periodic(50)
    res = verify.absentee_pattern(angles)
    absences = [r for r in res.rows if not r.get("summary")]
    record(5, "no consecutive absentees", [
        (f"{len(angles)} random angles", len(angles) >= 50),
        (f"{len(absences)} absent indices, zero exceptions", res.failures == 0 and res.undetermined == 0),
        ("non-vacuous", len(absences) > 0),
    ])


def _cell(a_n, b):
    if a_n >= 3 and b >= 3:
        return "a>=3,b>=3"
    if a_n == 2 and b >= 5:
        return "a=2,b>=5"
    if a_n >= 5 and b == 2:
        return "a>=5,b=2"
    if a_n == 1 and b <= 2:
        return "a=1,b<=2"
    if a_n == 2 and b == 1:
        return "a=2,b=1"
    return None


def test_criterion_6_table():
    angles = table_suite()
    res = verify.appendix_table(angles, n_max=25)
    cells = {}
    for r in res.rows:
        c = _cell(r["a_n"], r["a_n+2"]) if r["n"] >= 5 else None
        if c:
            cells[c] = cells.get(c, 0) + 1
    sandwich = [r for r in res.rows if r["n"] >= 5]
    by_ratio = [r for r in res.rows if r["ratio_test"] is not None]
    record(6, "sine-table agreement", [
        (f"{len(angles)} angles", len(angles) >= 20),
        (f"decided cells agree, counts {cells}", res.failures == 0 and res.undetermined == 0),
        ("all five decided cells exercised", len(cells) == 5),
        (f"ratio test certified on {len(by_ratio)} rows", len(by_ratio) > 0),
        (f"sandwich on {len(sandwich)} rows with n >= 5", all(r["sandwich"] is True for r in sandwich)),
    ])


def test_criterion_7_growth():
    checks = []
    lo, hi = 1.0, 0.0
    for a in bounded_suite():
        prof = build_profile(a, 24)
        top = iv.to_fraction(prof.valid_r_max.lo)
        grid = [Fraction(10**4) * Fraction(21, 20) ** k for k in range(400)]
        grid = [r for r in grid if r <= top]
        for s in asy.slope_profile(a, grid, prof):
            lo, hi = min(lo, float(s.slope.lo)), max(hi, float(s.slope.hi))
            if not (s.slope.lo >= 0.4 and s.slope.hi <= 0.6):
                checks.append((f"{a.spec()} slope out of band at r={float(s.r):.3g}", False))
    checks.append((f"bounded slopes in [{lo:.3f}, {hi:.3f}] for r >= 1e4", lo >= 0.4 and hi <= 0.6))
    lv = liouville_angle((1,))
    probes = asy.z_probes(lv, asy._profile_for(lv, 20, None))
    vals = [p.slope for p in probes]
    checks.append((f"Liouville probes {[round(float(v.mid), 3) for v in vals]} decreasing",
                   len(vals) >= 2 and all(x.certainly_gt(y) for x, y in zip(vals, vals[1:]))))
    checks.append(("deepest probe below 0.2", vals[-1].hi < 0.2))
    record(7, "growth diagnostics", checks)


def _same_point(a, b, bits=128):
    for u, v in ((a.r, b.r), (a.z, b.z), (a.t, b.t)):
        if not iv.as_interval(u, bits).overlaps(iv.as_interval(v, bits)):
            return False
    return iv.sin_pi(iv.as_interval(a.theta, bits) - iv.as_interval(b.theta, bits)).contains(0)


def test_criterion_8_geometry():
    rng = random.Random(20240611)
    angles = bounded_suite()
    disp_bad = 0
    for _ in range(1000):
        a = rng.choice(angles)
        x = Point4(
            Fraction(rng.randint(0, 10**5), 10**3),
            Fraction(rng.randint(0, 10**4), 10**4),
            Fraction(rng.randint(-10**4, 10**4), 10**2),
            Fraction(rng.randint(1, 10**6), 10**2),
        )
        j = rng.randint(1, 200)
        d = displacement(a, j, x, bits=160)
        if not d.rho.overlaps(hyp_distance(ScrewTranslation(a).power(x, j, 160), x, 160)):
            disp_bad += 1

    alpha, beta = Angle.periodic((1,)), Angle.periodic((2,))
    profs = (build_profile(alpha, 14), build_profile(beta, 14))
    ga, gb = ScrewTranslation(alpha), ScrewTranslation(beta)
    r_top = float(min(p.valid_r_max.lo for p in profs))
    phi_bad = 0
    for _ in range(1000):
        r = Fraction(rng.uniform(0, r_top * 0.999)).limit_denominator(10**6)
        base = eval_boundary(alpha, r, profile=profs[0]).value
        t = iv.to_fraction(base.hi) + Fraction(rng.randint(1, 10**6), 10**3)
        x = Point4(r, Fraction(rng.randint(0, 10**4), 10**4), Fraction(rng.randint(-10**3, 10**3), 10), t)
        if not _same_point(conjugacy_phi(alpha, beta, ga(x), profs), gb(conjugacy_phi(alpha, beta, x, profs))):
            phi_bad += 1

    prof = build_profile(alpha, 24)
    vol_bad = 0
    for t in (50, 100, 1000, 10**4, 10**5):
        r = boundary_inverse(alpha, t, profile=prof, target_bits=80)
        v = leaf_volume(alpha, t, profile=prof, target_bits=80)
        if not (v.overlaps(volume_from_radius(r, t)) and v.overlaps(direct_eval("vol", alpha, t))):
            vol_bad += 1
    record(8, "geometry identities", [
        (f"displacement vs distance, {disp_bad}/1000 mismatches", disp_bad == 0),
        (f"conjugacy, {phi_bad}/1000 mismatches", phi_bad == 0),
        (f"leaf volume round trip, {vol_bad}/5 mismatches", vol_bad == 0),
    ])


def test_criterion_9_closest_returns():
    angles = oracle_suite()
    reports = [closest_return_scan(a, 10) for a in angles]
    g = Angle.periodic((1,))
    qs = [g.q(n) for n in range(11)]
    mutated = list(qs)
    mutated[7] += 1
    control = closest_return_scan(g, 10, denominators=mutated)
    record(9, "closest-return scans", [
        (f"{len(angles)} angles exhaustive to n = 10, {sum(r.checked for r in reports)} comparisons",
         len(angles) == 10 and all(r.passed for r in reports)),
        ("mutated denominators rejected", not control.passed and bool(control.failures)),
    ])
