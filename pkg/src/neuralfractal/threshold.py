"""Automatic escape-threshold selection from first-pass orbit magnitudes.

Too small a threshold turns the whole image into the escaped class, too
large a one into the bounded class. The tuner grows tau geometrically from a
small starting value until the fraction of observed magnitudes at or above
tau drops to the configured ratio, which keeps both classes populated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# Stand-in magnitude for orbits that overflowed to inf/nan; always counts as
# "above" any realistic threshold without poisoning the mask average.
NONFINITE_MAGNITUDE = 1e30


@dataclass(frozen=True)
class ThresholdConfig:
    """Tuning parameters: start value, growth per step, allowed above-fraction.

    ``above_ratio`` is the maximum fraction of magnitudes that may sit at or
    above the returned threshold; the default 0.6 leaves at least 40% of the
    values below it.
    """

    tau_init: float = 1.0
    growth_factor: float = 1.1
    above_ratio: float = 0.6

    def __post_init__(self) -> None:
        if not (self.tau_init > 0):
            raise ConfigError(f"tau_init must be > 0, got {self.tau_init}")
        if not (self.growth_factor > 1):
            raise ConfigError(f"growth_factor must be > 1, got {self.growth_factor}")
        if not (0 < self.above_ratio < 1):
            raise ConfigError(f"above_ratio must be in (0, 1), got {self.above_ratio}")


def sanitize_magnitudes(magnitudes: np.ndarray) -> np.ndarray:
    """Replace non-finite magnitudes with a large sentinel value.

    Divergent orbits are outside the set at any threshold, so they must keep
    counting as "above" while the tuner grows tau.
    """
    m = np.asarray(magnitudes, dtype=np.float64)
    return np.where(np.isfinite(m), m, NONFINITE_MAGNITUDE)


def adjust_threshold(magnitudes, config: ThresholdConfig = ThresholdConfig()) -> float:
    """Grow tau from ``tau_init`` until at most ``above_ratio`` of the magnitudes are >= tau.

    Returns tau_init * growth_factor**k for the smallest k >= 0 that satisfies
    the ratio, computed by repeated multiplication. Non-finite inputs are
    sanitized on entry (idempotent if the caller already did), which also
    guarantees termination: the loop runs at most
    ceil(log(max(m)/tau_init) / log(growth_factor)) + 1 times.
    """
    m = np.asarray(magnitudes, dtype=np.float64).reshape(-1)
    if m.size == 0:
        raise ConfigError("adjust_threshold requires a non-empty magnitude list")
    if np.any(m < 0):
        raise ConfigError("magnitudes must be non-negative")
    m = sanitize_magnitudes(m)
    tau = config.tau_init
    while np.mean(m >= tau) > config.above_ratio:
        tau *= config.growth_factor
    return float(tau)
