"""Named angle collections shared by the verifiers, the CLI and the tests."""

from __future__ import annotations

import random

from .cf import Angle, liouville_angle

RANDOM_SEED = 20240611


def random_periodic(count, seed=RANDOM_SEED, max_quotient=3, max_period=4, max_prefix=2):
    """Deterministic pseudo-random periodic angles (distinct specs)."""
    rng = random.Random(seed)
    out, seen = [], set()
    while len(out) < count:
        period = tuple(rng.randint(1, max_quotient) for _ in range(rng.randint(1, max_period)))
        prefix = tuple(rng.randint(1, max_quotient) for _ in range(rng.randint(0, max_prefix)))
        a = Angle.periodic(period, prefix)
        if a.spec() in seen:
            continue
        seen.add(a.spec())
        out.append(a)
    return out


def bounded_suite():
    """Golden mean, [2], (1,3), [3], (1,2) and two seeded random bounded angles."""
    fixed = [
        Angle.periodic((1,)),
        Angle.periodic((2,)),
        Angle.periodic((1, 3)),
        Angle.periodic((3,)),
        Angle.periodic((1, 2)),
    ]
    return fixed + random_periodic(2, seed=RANDOM_SEED, max_period=5, max_prefix=0)


def standard_suite():
    """The bounded suite plus the Liouville-generated angle with seed [1]."""
    return bounded_suite() + [liouville_angle((1,))]


def oracle_suite():
    """Ten angles with fully certified deep quotients (no growth rule)."""
    return bounded_suite() + [
        Angle.periodic((1, 1, 2)),
        Angle.periodic((2, 1)),
        Angle.periodic((3,), prefix=(1,)),
    ]


def table_suite():
    """Twenty random periodic angles plus one angle for each decided cell of the sine table.

    Quotients up to 3 never reach the cells with a 5, so those are added by hand.
    """
    cells = [(3, 1), (2, 1, 5, 1), (5, 1, 2, 1), (1, 1, 2), (2, 1, 1), (2, 1, 3, 1)]
    return random_periodic(20) + [Angle.periodic(p) for p in cells]


SUITES = {
    "standard": standard_suite,
    "bounded": bounded_suite,
    "oracle": oracle_suite,
    "table": table_suite,
}
