"""Verification suites: each returns JSON-ready rows and an overall status.

Status is "pass" (everything certified), "fail" (a certified violation) or
"undetermined" (no violation, but something was left unresolved).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import asymptotics as asy
from .classifier import TableVerdict, appendix_context, ratio_decide, table_decide
from .envelope import (
    Presence,
    build_profile,
    classify_triple,
    eval_boundary,
    is_present,
    sample_grid,
)
from .epsilon import DEFAULT_EPSILON
from .errors import ContractViolation, PrecisionExceeded, PreconditionViolated, QuotientsExhausted
from .oracle import DEFAULT_ORACLE, closest_return_scan, oracle_min
from .suites import oracle_suite, random_periodic, standard_suite, table_suite

PASS, FAIL, UNDETERMINED = "pass", "fail", "undetermined"


@dataclass
class SuiteResult:
    name: str
    rows: list = field(default_factory=list)
    failures: int = 0
    undetermined: int = 0

    @property
    def status(self):
        if self.failures:
            return FAIL
        if self.undetermined:
            return UNDETERMINED
        return PASS

    def add(self, row, ok):
        """ok: True, False, or None for unresolved."""
        row = dict(row)
        row["status"] = PASS if ok else (FAIL if ok is False else UNDETERMINED)
        if ok is False:
            self.failures += 1
        elif ok is None:
            self.undetermined += 1
        self.rows.append(row)


def _rep_ok(rep):
    if rep.failures:
        return False
    if rep.undetermined:
        return None
    if rep.checked and rep.margin is not None and rep.margin.lo <= 0:
        return None
    return True


def lemmas(angles=None, n_min=1, n_max=20, only=None):
    res = SuiteResult("lemmas" if only is None else only)
    for a in angles or standard_suite():
        for rep in asy.inequality_suite(a, n_min, n_max):
            if only and not rep.name.startswith(only):
                continue
            res.add({"angle": a.spec(), **rep.as_dict()}, _rep_ok(rep))
    return res


def fund(angles=None, n_max=20):
    return lemmas(angles, 1, n_max, only="fund")


def universal_bound(angles=None, r_count=100):
    res = SuiteResult("universal-bound")
    for a in angles or standard_suite():
        rep = asy.universal_bound_check(a, r_count)
        res.add({"angle": a.spec(), **rep.as_dict()}, _rep_ok(rep))
    return res


def appendix_table(angles=None, n_max=25):
    """Decided table cells and the ratio test against the envelope, plus the Z < ratio < Y sandwich."""
    res = SuiteResult("appendix-table")
    for a in angles or table_suite():
        for n in range(2, n_max + 1):
            if a.quotient(n + 1) != 1 or a.q(n) == a.q(n - 1):
                continue
            truth = is_present(a, n)
            row = {"angle": a.spec(), "n": n, "a_n": a.quotient(n), "a_n+2": a.quotient(n + 2),
                   "presence": str(truth)}
            ok = truth is not Presence.UNDETERMINED or None
            if n >= 5:
                cell = table_decide(a, n)
                row["cell"] = str(cell)
                if cell is not TableVerdict.WHITE_CELL and truth is not Presence.UNDETERMINED:
                    ok = ok and cell.value == truth.value
            by_ratio = ratio_decide(a, n)
            row["ratio_test"] = None if by_ratio is None else str(by_ratio)
            if by_ratio is not None and truth is not Presence.UNDETERMINED:
                ok = ok and by_ratio is truth
            try:
                ctx = appendix_context(a, n)
                row["sandwich"] = ctx.brackets.get("sandwich")
            except PrecisionExceeded:
                row["sandwich"] = None
                ok = None if ok else ok
            except ContractViolation as exc:
                row["error"] = str(exc)
                ok = False
            res.add(row, ok)
    return res


def absentee_pattern(angles=None, n_max=25):
    """Every absent q_{n+1} has a_{n+2} = 1 and q_{n+2} present."""
    res = SuiteResult("absentees")
    for a in angles or random_periodic(50):
        pm = {n: is_present(a, n) for n in range(1, n_max + 2)}
        for n in range(0, n_max):
            if pm.get(n + 1) is not Presence.ABSENT:
                continue
            ok = a.quotient(n + 2) == 1 and pm.get(n + 2) is Presence.PRESENT
            res.add({"angle": a.spec(), "absent": n + 1, "a_next": a.quotient(n + 2),
                     "next": str(pm.get(n + 2))}, ok)
        res.rows.append({"angle": a.spec(), "summary": True,
                         "absent": [n for n, p in pm.items() if p is Presence.ABSENT]})
    return res


def oracle_equivalence(angles=None, points=200, n_max=8, eps=DEFAULT_EPSILON, config=None):
    """Envelope against the brute-force minimum on a log grid over [0, y_{n_max}]."""
    res = SuiteResult("oracle-equivalence")
    config = config or DEFAULT_ORACLE
    for a in angles or oracle_suite():
        prof = build_profile(a, n_max)
        grid = [Fraction(0)] + sample_grid(prof, points - 1)
        overlap_bad, arg_bad, arg_checked = [], [], 0
        for r in grid:
            b = eval_boundary(a, r, eps, prof)
            o = oracle_min(a, r, eps, config)
            if not b.value.overlaps(o.value):
                overlap_bad.append(float(r))
            if not o.ambiguous and not b.at_breakpoint:
                arg_checked += 1
                if b.argmin != o.argmin:
                    arg_bad.append(float(r))
        ok = not overlap_bad and not arg_bad
        res.add({"angle": a.spec(), "points": len(grid), "argmin_checked": arg_checked,
                 "overlap_failures": overlap_bad[:10], "argmin_failures": arg_bad[:10],
                 "r_max": float(prof.valid_r_max.lo)}, ok)
    return res


def closest_returns(angles=None, n_cap=10):
    res = SuiteResult("closest-returns")
    for a in angles or oracle_suite():
        rep = closest_return_scan(a, n_cap)
        res.add({"angle": a.spec(), "checked": rep.checked, "failures": list(rep.failures)[:5],
                 "uncertified": list(rep.uncertified)[:5]},
                True if rep.passed else (None if rep.uncertified and not rep.failures else False))
    return res


def strike_hunt(angles=None, n_max=14, window=4):
    """Classify every triple k < n < m within ``window`` of each other; list the narrowest unresolved."""
    res = SuiteResult("strike-hunt")
    for a in angles or standard_suite():
        top = n_max if a.max_valid_index is None else min(n_max, a.max_valid_index)
        counts = {"Fair": 0, "NearMiss": 0, "Undetermined": 0}
        widths = []
        for n in range(1, top):
            for k in range(max(0, n - window), n):
                for m in range(n + 1, min(top, n + window) + 1):
                    try:
                        tc = classify_triple(a, k, n, m)
                    except (QuotientsExhausted, PrecisionExceeded, PreconditionViolated):
                        continue
                    counts[tc.kind] += 1
                    if tc.kind == "Undetermined":
                        widths.append((float(tc.width or 0), (k, n, m)))
        widths.sort()
        res.add({"angle": a.spec(), **counts, "narrowest": widths[:5]},
                None if counts["Undetermined"] else True)
    return res


SUITES = {
    "lemmas": lemmas,
    "fund": fund,
    "universal-bound": universal_bound,
    "appendix-table": appendix_table,
    "absentees": absentee_pattern,
    "oracle-equivalence": oracle_equivalence,
    "closest-returns": closest_returns,
    "strike-hunt": strike_hunt,
}
