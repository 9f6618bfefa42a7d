"""Exception hierarchy shared by every module."""


class OleinikError(Exception):
    """Base class for package errors."""


class ConfigurationError(OleinikError, ValueError):
    """Invalid parameters, grids or configuration files."""


class DomainError(OleinikError, ValueError):
    """Evaluation requested outside the admissible range."""


class NumericalError(OleinikError, RuntimeError):
    """A root solve or quadrature failed to converge."""

    status = "numerical"


class CoverageError(NumericalError):
    """The computational domain misses too much of the shock layer."""

    status = "coverage"


class FitQualityError(NumericalError):
    """A regression did not meet its quality threshold."""

    status = "fit_quality"


class BlowUpError(NumericalError):
    """The evolution produced non-finite values."""

    status = "blow_up"
