"""Certified computation of the boundary function of Margulis regions of
irrational screw translations of hyperbolic 4-space."""

from .cf import (
    Angle,
    Convergent,
    DiophantineReport,
    convergent,
    diophantine_report,
    effective_beta0,
    liouville_angle,
    norm_any,
    norm_closest,
    parse_angle_spec,
)
from .intervals import NormInterval, PrecisionPolicy

__version__ = "0.1.0"
