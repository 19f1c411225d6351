"""Exception hierarchy shared by all geobeam modules."""


class GeobeamError(Exception):
    """Base class for every error raised by geobeam."""


class DomainError(GeobeamError, ValueError):
    """A closed-form expression was evaluated outside its domain."""


class RegionTooDenseError(GeobeamError, ValueError):
    """Expected PPP point count exceeds the configured hard cap."""


class VectorCapError(GeobeamError, ValueError):
    """Explicit steering vectors requested above the size cap; use the closed-form path."""


class InsufficientUsersError(GeobeamError):
    """Fewer than N users fall inside the selection radius."""

    def __init__(self, available, required):
        super().__init__(f"insufficient users: {available} within R, {required} required")
        self.available = available
        self.required = required


class NumericError(GeobeamError, ArithmeticError):
    """A numerical routine failed to converge."""
