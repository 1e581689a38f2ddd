"""Escape-time iteration of the recurrence z <- g(z) + c from z = 0.

A coordinate c is classified by whether its orbit under the map stays within
a magnitude threshold tau for the whole iteration budget. The loop counter
starts at -1 and is incremented after every update, so the smallest escape
count an orbit can report is 0 and a fully bounded orbit performs
``max_iters + 1`` updates before the budget check stops it. Escape counts
feed the palette lookup in :mod:`neuralfractal.coloring`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class IterationParams:
    """Escape threshold and iteration budget for one render."""

    tau: float
    max_iters: int

    def __post_init__(self) -> None:
        if not (self.tau > 0):
            raise ConfigError(f"tau must be > 0, got {self.tau}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass(frozen=True)
class EscapeResult:
    """Outcome of iterating one coordinate.

    ``escape_iter`` is the 0-based count of completed updates when the
    magnitude first exceeded tau; it is meaningful only when ``escaped`` is
    set (bounded orbits leave it at ``max_iters``). ``final_z`` is the value
    the loop stopped at, either the first escaping iterate or the last
    in-budget one.
    """

    escaped: bool
    escape_iter: int
    final_z: complex


def iterate(g: Callable[[complex], complex], c: complex, params: IterationParams) -> EscapeResult:
    """Iterate z <- g(z) + c from z = 0 until escape or budget exhaustion.

    Pure and deterministic. A non-finite iterate counts as escaped at that
    iteration: nan fails the magnitude test by comparison semantics and inf
    exceeds any threshold.
    """
    tau = params.tau
    max_iters = params.max_iters
    z = 0j
    i = -1
    while abs(z) <= tau and i < max_iters:
        z = complex(g(z)) + c
        i += 1
    escaped = not (abs(z) <= tau)
    return EscapeResult(escaped=escaped, escape_iter=i, final_z=z)


@dataclass(frozen=True, eq=False)
class BatchEscape:
    """Struct-of-arrays result of :func:`iterate_batch`; fields align by index."""

    escaped: np.ndarray
    escape_iter: np.ndarray
    final_z: np.ndarray


def iterate_batch(g, coords: np.ndarray, params: IterationParams) -> BatchEscape:
    """Vectorized :func:`iterate` over an array of coordinates.

    ``g`` is either a batch-callable mapping a complex128 array to one, or an
    object exposing ``forward_batch`` and optionally ``orbit_batch``. An
    ``orbit_batch`` (a fused compiled escape loop) is preferred when it
    applies; otherwise escaped points are dropped from a vectorized update
    loop, so per-point results are identical to the scalar loop either way.
    Arithmetic warnings are suppressed; overflow is handled by the escape
    classification, not treated as an error.
    """
    coords = np.asarray(coords, dtype=np.complex128).reshape(-1)
    fused = getattr(g, "orbit_batch", None)
    if fused is not None:
        out = fused(coords, params.tau, params.max_iters)
        if out is not None:
            escaped, it, z = out
            return BatchEscape(escaped=escaped, escape_iter=it, final_z=z)
    g = getattr(g, "forward_batch", g)
    n = coords.shape[0]
    z = np.zeros(n, dtype=np.complex128)
    it = np.full(n, -1, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for _ in range(params.max_iters + 1):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            z_new = np.asarray(g(z[idx]), dtype=np.complex128) + coords[idx]
            z[idx] = z_new
            it[idx] += 1
            active[idx] = np.abs(z_new) <= params.tau  # nan compares False: drops non-finite
        escaped = ~(np.abs(z) <= params.tau)
    return BatchEscape(escaped=escaped, escape_iter=it, final_z=z)


def indicator(result: EscapeResult) -> int:
    """1 when the orbit stayed bounded, 0 when it escaped."""
    return 0 if result.escaped else 1
