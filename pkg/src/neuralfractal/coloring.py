"""Escape-count to RGB mapping through a randomized palette.

Every sample that escapes at the same iteration gets the same palette entry,
which turns iso-escape-time bands into colored contours. Bounded samples and
samples whose reported count is 0 are mapped to the deepest entry, so the
interior of the set reads as one solid color.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import EscapeResult
from .errors import ConfigError

RGB = np.ndarray  # shape (3,), channels in [0, 1]


@dataclass(frozen=True, eq=False)
class ColorMap:
    """Ordered RGB palette; ``entries`` has shape (size, 3) with channels in [0, 1]."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        e = self.entries
        if e.ndim != 2 or e.shape[1] != 3 or e.shape[0] < 2:
            raise ConfigError(f"palette must have shape (size>=2, 3), got {e.shape}")
        if np.any(e < 0) or np.any(e > 1):
            raise ConfigError("palette channels must lie in [0, 1]")

    @property
    def size(self) -> int:
        return self.entries.shape[0]


def make_colormap(seed: int, size: int = 256, style: str = "uniform") -> ColorMap:
    """Build a palette deterministically from a seed.

    ``uniform`` draws every entry independently from the RGB unit cube.
    ``smooth`` draws a handful of anchor colors and linearly interpolates
    between them, giving banded but gradual ramps.
    """
    if size < 2:
        raise ConfigError(f"palette size must be >= 2, got {size}")
    rng = np.random.default_rng(seed)
    if style == "uniform":
        entries = rng.random((size, 3))
    elif style == "smooth":
        n_anchors = max(2, size // 32)
        anchors = rng.random((n_anchors, 3))
        xs = np.linspace(0.0, 1.0, n_anchors)
        t = np.linspace(0.0, 1.0, size)
        entries = np.stack([np.interp(t, xs, anchors[:, ch]) for ch in range(3)], axis=1)
    else:
        raise ConfigError(f"unknown palette style {style!r}")
    return ColorMap(entries=entries)


def _effective_count(escaped: bool, escape_iter: int, max_iters: int) -> int:
    count = escape_iter if escaped else max_iters
    return max_iters if count == 0 else count


def escape_color(result: EscapeResult, max_iters: int, cmap: ColorMap) -> tuple[RGB, bool]:
    """Map one escape outcome to a palette color.

    The palette index is floor(size * count / max_iters) clamped to the last
    entry, computed in exact integer arithmetic so it is total for any
    combination of count, budget, and palette size. Bounded orbits and
    count-0 escapes share the deepest entry.
    """
    if max_iters < 1:
        raise ConfigError(f"max_iters must be >= 1, got {max_iters}")
    count = _effective_count(result.escaped, result.escape_iter, max_iters)
    idx = min((cmap.size * count) // max_iters, cmap.size - 1)
    return cmap.entries[idx], result.escaped


def escape_colors(
    escaped: np.ndarray, escape_iter: np.ndarray, max_iters: int, cmap: ColorMap
) -> np.ndarray:
    """Vectorized :func:`escape_color`; returns an (n, 3) color array."""
    count = np.where(escaped, escape_iter, max_iters).astype(np.int64)
    count = np.where(count == 0, max_iters, count)
    idx = np.minimum((cmap.size * count) // max_iters, cmap.size - 1)
    return cmap.entries[idx]


def indicator_colors(escaped: np.ndarray) -> np.ndarray:
    """Two-class coloring: bounded -> white, escaped -> black.

    Averaging these per pixel yields the Monte Carlo estimate of the bounded
    area fraction, which is what the classic set-membership rendering shows.
    """
    bounded = (~np.asarray(escaped, dtype=bool)).astype(np.float64)
    return np.repeat(bounded[:, None], 3, axis=1)
