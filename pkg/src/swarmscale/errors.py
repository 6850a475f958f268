"""Exception types shared across the package."""


class SwarmError(Exception):
    """Base class for all package-specific errors."""


class DegenerateCurveError(SwarmError, ValueError):
    """A curve operation received an input it is mathematically undefined for
    (e.g. min-max mapping a constant curve onto a non-degenerate range)."""


class UndefinedMetricError(SwarmError, ValueError):
    """A metric is undefined for the given inputs (e.g. the serial-fraction
    denominator vanishes at N1 = 1, or no timestep has positive baseline
    performance)."""


class ConfigError(SwarmError, ValueError):
    """An experiment configuration is malformed or violates an invariant."""


class UsageError(SwarmError, ValueError):
    """Bad command-line usage (unknown subcommand, missing argument...)."""
