"""Exception hierarchy shared by every module of the package."""


class MargulisError(Exception):
    """Base class for all errors raised by this package."""


class QuotientsExhausted(MargulisError):
    """An angle cannot supply the partial quotients a computation needs."""

    def __init__(self, needed, available):
        self.needed = needed
        self.available = available
        super().__init__(
            f"need index {needed} but the angle is only valid up to index {available}"
        )


class OverflowPolicy(QuotientsExhausted):
    """A growth rule refused to generate a quotient that is too large to store."""

    def __init__(self, index, bound):
        self.index = index
        self.bound = bound
        Exception.__init__(
            self,
            f"partial quotient a_{index} refused: q_{index - 1} = {bound} exceeds the "
            f"big-integer practicality cap",
        )
        self.needed = index
        self.available = index - 1


class PrecisionExceeded(MargulisError):
    """The requested width or separation was not reached within the precision cap."""

    def __init__(self, what, bits, width=None):
        self.what = what
        self.bits = bits
        self.width = width
        msg = f"{what}: not certified at the precision cap ({bits} bits)"
        if width is not None:
            try:
                msg += f", achieved width {format(width, '.3g')}"
            except (TypeError, ValueError):
                msg += f", achieved width {width}"
        super().__init__(msg)


class PreconditionViolated(MargulisError, ValueError):
    """Arguments outside an operation's documented domain."""


class ContractViolation(MargulisError, AssertionError):
    """A certified invariant failed; this indicates a bug, not a math event."""


class OutOfRange(MargulisError, ValueError):
    """A query lies outside the range covered by a boundary profile."""


class PoleProximity(MargulisError, ArithmeticError):
    """A rational function was evaluated on an interval containing its pole."""


class Undetermined(MargulisError):
    """A certified decision could not be made within the precision cap."""

    def __init__(self, msg, width=None):
        self.width = width
        super().__init__(msg)


class NotInRegion(MargulisError, ValueError):
    """A point is not certified to lie in the Margulis region."""


class NotBoundedType(PreconditionViolated):
    """An operation reserved for bounded-type angles received another angle."""


class SearchExhausted(MargulisError):
    """A bounded search finished without producing the requested witnesses."""

    def __init__(self, msg, best=None):
        self.best = best
        super().__init__(msg)


class UnknownFormula(MargulisError, KeyError):
    """The oracle has no registered formula under the given id."""


class ScanBudgetExceeded(MargulisError):
    """An exhaustive scan would exceed its configured budget."""
