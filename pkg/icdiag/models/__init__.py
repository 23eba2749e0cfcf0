from .distribution import Distribution
from .quantum import DensityMatrix, Family, MeasurementSet, Povm, SetKind

__all__ = ["Distribution", "DensityMatrix", "Family", "MeasurementSet", "Povm", "SetKind"]
