"""Exception types shared across the package.

The CLI maps these onto process exit codes, so new failure modes should
reuse one of the classes below rather than raising bare exceptions.
"""


class ConfigError(ValueError):
    """Invalid configuration value or malformed argument."""


class UndefinedStatisticsError(ValueError):
    """Statistics requested from a pixel that has received no samples."""


class ExhaustedMapError(RuntimeError):
    """Raised when samples are drawn from a sampling map with no mass left.

    Exhaustion is the normal end state of adaptive refinement; callers are
    expected to check ``SamplingMap.exhausted`` and stop instead of hitting
    this.
    """


class GenerationError(RuntimeError):
    """A dataset slot failed to produce an acceptable image within its retry budget."""
