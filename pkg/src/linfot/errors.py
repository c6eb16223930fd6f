"""Exception hierarchy.

Everything raised on bad *input* derives from :class:`InputError` so the CLI can
map it to exit status 2; mathematical validation failures are reported, not raised.
"""


class LinfotError(Exception):
    """Base class for all package errors."""


class InputError(LinfotError, ValueError):
    """Malformed or invalid input data."""


class OverlappingPieces(InputError):
    pass


class NegativeDensity(InputError):
    pass


class MassNotOne(InputError):
    def __init__(self, mass: float):
        super().__init__(f"total mass is {mass!r}, expected 1")
        self.mass = mass


class DomainError(InputError):
    pass


class SizeMismatch(InputError):
    pass


class CapExceeded(InputError):
    pass


class BudgetExceeded(InputError):
    pass


class DegenerateCritical(LinfotError):
    """The critical distance is zero (mu == nu); displacement sets are undefined."""


class MassMismatch(LinfotError):
    pass


class BandViolation(LinfotError):
    pass


class MarginalMismatch(LinfotError):
    pass


class Infeasible(LinfotError):
    """No perfect matching exists inside the requested band."""
