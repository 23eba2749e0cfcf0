from __future__ import annotations


class IcdiagError(Exception): ...


class DomainError(IcdiagError, ValueError):
    """Précondition d'une opération violée ; le message reprend la précondition."""


class DimensionMismatchError(DomainError): ...
class UnsupportedDimensionError(DomainError): ...


class KappaOutOfRangeError(DomainError):
    def __init__(self, message: str, kappa_max: float):
        super().__init__(message)
        self.kappa_max = kappa_max


class InvalidMeasurementError(DomainError):
    def __init__(self, message: str, deviation: float | None = None):
        super().__init__(message)
        self.deviation = deviation
