"""The sine-bound table: X/Y/Z, the exact mu/lambda brackets and decided cells."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from margulis.cf import Angle
from margulis.classifier import (
    TableVerdict,
    appendix_context,
    ratio_decide,
    table_decide,
    table_inequality_chain,
    xyz_eval,
)
from margulis.envelope import Presence, is_present
from margulis.errors import PoleProximity, PreconditionViolated
from margulis.intervals import NormInterval


def test_x_at_three():
    assert xyz_eval(3).X == Fraction(7, 8)


def test_z_at_three():
    v = xyz_eval(3)
    assert v.Z == Fraction(151, 149)
    assert v.Z > v.X


def test_y_two_below_x_three():
    assert xyz_eval(2).Y < xyz_eval(3).X


def test_chain_all_hold():
    chain = table_inequality_chain()
    assert len(chain) == 5 and all(chain.values())


def test_y_pole():
    # -t^2/20 + 19t/10 + 19/20 vanishes at t = 19 + sqrt(380)
    root = NormInterval.from_rationals(Fraction(3849, 100), Fraction(3850, 100), 128)
    with pytest.raises(PoleProximity):
        xyz_eval(root)


def test_needs_t_above_one():
    with pytest.raises(PreconditionViolated):
        xyz_eval(1)


@given(st.fractions(min_value=Fraction(101, 100), max_value=38, max_denominator=1000))
def test_interval_matches_exact(t):
    exact = xyz_eval(t)
    enc = xyz_eval(NormInterval.exact(t, 128))
    assert enc.X.contains(exact.X)
    assert enc.Y.contains(exact.Y)
    assert enc.Z.contains(exact.Z)


@given(st.fractions(min_value=Fraction(11, 10), max_value=38, max_denominator=1000))
def test_z_below_y(t):
    v = xyz_eval(t)
    assert v.Z < v.Y


@pytest.mark.parametrize(
    "period,n,want",
    [
        ((1, 1, 2), 7, TableVerdict.PRESENT),  # a_n = 1, a_{n+2} = 2
        ((3, 1), 5, TableVerdict.ABSENT),  # a_n = 3, a_{n+2} = 3
        ((2, 1, 3, 1), 5, TableVerdict.WHITE_CELL),  # a_n = 2, a_{n+2} = 3
        ((2, 1, 5, 1), 5, TableVerdict.ABSENT),  # a_n = 2, a_{n+2} = 5
        ((5, 1, 2, 1), 5, TableVerdict.ABSENT),  # a_n = 5, a_{n+2} = 2
        ((2, 1, 1), 7, TableVerdict.PRESENT),  # a_n = 2, a_{n+2} = 1
        ((1,), 5, TableVerdict.PRESENT),  # a_n = 1, a_{n+2} = 1
    ],
)
def test_decided_cells(period, n, want):
    a = Angle.periodic(period)
    got = table_decide(a, n)
    assert got is want
    if got is not TableVerdict.WHITE_CELL:
        assert is_present(a, n).value == got.value


def test_table_preconditions():
    with pytest.raises(PreconditionViolated):
        table_decide(Angle.periodic((1,)), 4)
    with pytest.raises(PreconditionViolated):
        table_decide(Angle.periodic((2,)), 6)


def test_context_one_three(one_three):
    # a_{n+1} = 1 needs n + 1 odd
    for n in (2, 4, 6, 8):
        ctx = appendix_context(one_three, n)
        assert ctx.mu == Fraction(one_three.q(n), one_three.q(n - 1))
        assert one_three.quotient(n) < ctx.mu <= one_three.quotient(n) + 1
        assert ctx.brackets["lambda"]
        if n >= 5:
            assert ctx.brackets["sandwich"]


def test_context_golden_mu_reaches_upper_end(golden):
    ctx = appendix_context(golden, 2)
    assert ctx.mu == 2 == golden.quotient(2) + 1


def test_context_refuses_equal_denominators(golden):
    with pytest.raises(PreconditionViolated):
        appendix_context(golden, 1)


def test_context_refuses_large_next_quotient(silver):
    with pytest.raises(PreconditionViolated):
        appendix_context(silver, 5)


@pytest.mark.parametrize("period", [(1,), (2, 1), (1, 1, 2), (1, 3), (3, 1), (2, 1, 3, 1)])
def test_ratio_test_matches_presence(period):
    a = Angle.periodic(period)
    for n in range(2, 20):
        if a.quotient(n + 1) != 1 or a.q(n) == a.q(n - 1):
            continue
        d = ratio_decide(a, n)
        if d is not None:
            assert d is is_present(a, n), n


@pytest.mark.parametrize("period", [(1,), (2, 1), (1, 1, 2), (3, 1), (2, 1, 5, 1)])
def test_sandwich_holds(period):
    a = Angle.periodic(period)
    for n in range(5, 22):
        if a.quotient(n + 1) != 1:
            continue
        ctx = appendix_context(a, n)
        assert ctx.brackets["sandwich"] is True
        assert is_present(a, n) is not Presence.UNDETERMINED
