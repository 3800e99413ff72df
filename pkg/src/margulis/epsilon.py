"""The Margulis constant choice and the derived scale factor c(eps)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import intervals as iv
from .errors import PreconditionViolated
from .intervals import NormInterval


@lru_cache(maxsize=None)
def epsilon_cap(bits=128):
    """Enclosure of sqrt(3)/(9 pi), the largest admissible epsilon."""
    return iv.sqrt(NormInterval.exact(3, bits)) / (iv.pi(bits) * 9)


@dataclass(frozen=True)
class EpsilonConfig:
    """Either an exact rational ``value`` or ``scale`` times the default.

    ``normalized`` replaces c(eps) by 1, the convention used for plotting
    (crossing radii and presence labels do not depend on c(eps)).
    """

    value: Fraction | None = None
    scale: Fraction = Fraction(1)
    normalized: bool = False

    def __post_init__(self):
        if self.value is not None:
            v = Fraction(self.value)
            object.__setattr__(self, "value", v)
            if v <= 0:
                raise PreconditionViolated("epsilon must be positive")
            # the cap is irrational, so a rational value is never equal to it
            if not NormInterval.exact(v, 256).certainly_lt(epsilon_cap(256)):
                raise PreconditionViolated("epsilon must not exceed sqrt(3)/(9 pi)")
        else:
            s = Fraction(self.scale)
            object.__setattr__(self, "scale", s)
            if not 0 < s <= 1:
                raise PreconditionViolated("epsilon scale must lie in (0, 1]")

    @classmethod
    def from_value(cls, value, normalized=False):
        return cls(value=Fraction(value), normalized=normalized)

    def epsilon(self, bits=128):
        if self.value is not None:
            return NormInterval.exact(self.value, bits)
        return epsilon_cap(bits) * NormInterval.exact(self.scale, bits)

    def c(self, bits=128):
        """c(eps) = 1/sqrt(2 cosh(eps) - 2) = 1/(2 sinh(eps/2))."""
        if self.normalized:
            return NormInterval.exact(1, bits)
        return _c_cached(self.value, self.scale, bits)

    def cosh_minus_one(self, bits=128):
        """cosh(eps) - 1 = 2 sinh(eps/2)**2."""
        s = iv.sinh(self.epsilon(bits) / 2)
        return s.sqr() * 2

    def describe(self):
        if self.value is not None:
            return str(self.value)
        return "sqrt(3)/(9*pi)" if self.scale == 1 else f"{self.scale}*sqrt(3)/(9*pi)"


@lru_cache(maxsize=256)
def _c_cached(value, scale, bits):
    cfg = EpsilonConfig(value=value, scale=scale)
    return 1 / (iv.sinh(cfg.epsilon(bits) / 2) * 2)


DEFAULT_EPSILON = EpsilonConfig()
NORMALIZED = EpsilonConfig(normalized=True)
