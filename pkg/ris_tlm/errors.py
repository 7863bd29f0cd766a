"""
Exceptions and warning categories raised by the model.

Errors abort the computation. Warnings flag results that are computed but lie
outside the regime where the homogenized model is trustworthy.

:copyright: (c) 2025 by the ris-tlm contributors.
:license: MPL-2.0, see LICENSE for more details.
"""


class RisModelError(Exception):
    """Base class for all model errors."""


class ParameterRangeError(RisModelError, ValueError):
    """A physical parameter lies outside its admissible interval."""


class GeometryError(RisModelError, ValueError):
    """Invalid link geometry (coincident points, bad indices, bad planes)."""


class DimensionError(RisModelError, ValueError):
    """Matrix dimensions do not match the scenario."""


class ConfigError(RisModelError):
    """Invalid run configuration."""


class SingularityError(RisModelError, ArithmeticError):
    """Degenerate impedance combination at the reported coordinates."""

    def __init__(self, message: str, coordinates: dict | None = None):
        self.coordinates = coordinates or {}
        if self.coordinates:
            coords = ", ".join(f"{k}={v}" for k, v in self.coordinates.items())
            message = f"{message} at ({coords})"
        super().__init__(message)


class ModelValidityWarning(UserWarning):
    """Evaluation outside the single-mode homogenization regime."""


class NumericalWarning(UserWarning):
    """Result is finite but numerically ill-conditioned."""


class FarFieldWarning(UserWarning):
    """Closed-form link budget evaluated outside its far-field regime."""
