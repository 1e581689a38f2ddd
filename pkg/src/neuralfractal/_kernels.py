"""JIT-compiled hot loops for network orbit iteration.

Orbit iteration dominates render time: every sample pushes a point through
the whole network up to max_iters + 1 times. The kernels below fuse the
layer loops, the tanh activation, and the escape test into one pass over
the sample batch, parallel across samples (each sample's arithmetic is
independent, so results do not depend on the thread count).

When numba is unavailable everything falls back to the vectorized numpy
evaluator in :mod:`neuralfractal.complexnet`. The two implementations agree
to ~1e-13 per network application, but iterated chaotic dynamics amplify
last-ulp differences, so whichever path is active is the canonical one for
an environment; they are never mixed within a run.
"""

from __future__ import annotations

import warnings

import numpy as np

try:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # TBB version probe warns on some builds
        import numba
        from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

if HAVE_NUMBA:
    warnings.filterwarnings(
        "ignore", message=".*TBB.*", module="numba.np.ufunc.parallel"
    )

    # Saturation threshold for the complex tanh: past log(DBL_MAX)/2 the
    # addition formula would overflow cosh.
    _TANH_SAT = 354.891356446692

    @njit(inline="always", cache=True)
    def _ctanh(z):
        # tanh(x+iy) = (t(1+s^2) + i s sech^2(x)) / (1 + (t s)^2) with
        # t = tanh x, s = tan y. Same libm calls and operation order as the
        # stdlib's complex tanh, so scalar spot checks against it agree to
        # the last bit; iterating a chaotic map would amplify anything more.
        x = z.real
        y = z.imag
        if abs(x) > _TANH_SAT:
            return complex(
                1.0 if x > 0.0 else -1.0,
                4.0 * np.sin(y) * np.cos(y) * np.exp(-2.0 * abs(x)),
            )
        tx = np.tanh(x)
        ty = np.tan(y)
        cx = 1.0 / np.cosh(x)
        txty = tx * ty
        denom = 1.0 + txty * txty
        return complex(tx * (1.0 + ty * ty) / denom, ((ty / denom) * cx) * cx)

    @njit(inline="always", cache=True)
    def _net_apply(z, w0, b0, wm, bm, wl, bl, exponent, h, h2):
        # One full network application g(z). h and h2 are caller-provided
        # scratch buffers of width H.
        H = w0.shape[0]
        for k in range(H):
            h[k] = _ctanh(z * w0[k] + b0[k])
        for layer in range(wm.shape[0]):
            for k in range(H):
                acc = bm[layer, k]
                for j in range(H):
                    acc = acc + h[j] * wm[layer, j, k]
                h2[k] = _ctanh(acc)
            tmp = h
            h = h2
            h2 = tmp
        acc = bl
        for j in range(H):
            acc = acc + h[j] * wl[j]
        g = acc
        for _ in range(exponent - 1):
            g = g * acc
        return g

    @njit(parallel=True, cache=True)
    def _forward_kernel(zs, w0, b0, wm, bm, wl, bl, exponent, out):
        H = w0.shape[0]
        for s in prange(zs.shape[0]):
            h = np.empty(H, np.complex128)
            h2 = np.empty(H, np.complex128)
            out[s] = _net_apply(zs[s], w0, b0, wm, bm, wl, bl, exponent, h, h2)

    @njit(parallel=True, cache=True)
    def _orbit_kernel(
        coords, w0, b0, wm, bm, wl, bl, exponent, tau, max_iters, escaped, it, out_z
    ):
        H = w0.shape[0]
        for s in prange(coords.shape[0]):
            h = np.empty(H, np.complex128)
            h2 = np.empty(H, np.complex128)
            c = coords[s]
            z = 0j
            i = -1
            while (abs(z) <= tau) and (i < max_iters):
                z = _net_apply(z, w0, b0, wm, bm, wl, bl, exponent, h, h2) + c
                i += 1
            escaped[s] = not (abs(z) <= tau)
            it[s] = i
            out_z[s] = z

    def forward_batch(zs, pack, exponent):
        out = np.empty(zs.shape[0], np.complex128)
        _forward_kernel(zs, *pack, exponent, out)
        return out

    def orbit_batch(coords, pack, exponent, tau, max_iters):
        n = coords.shape[0]
        escaped = np.empty(n, np.bool_)
        it = np.empty(n, np.int64)
        out_z = np.empty(n, np.complex128)
        _orbit_kernel(coords, *pack, exponent, float(tau), int(max_iters), escaped, it, out_z)
        return escaped, it, out_z

else:  # pragma: no cover - exercised only without numba
    forward_batch = None
    orbit_batch = None


def pack_network(weights, biases) -> tuple | None:
    """Flatten a 1 -> H -> ... -> H -> 1 layer stack into kernel arrays.

    Returns None for layer stacks the fused kernels do not cover (non-uniform
    hidden widths), in which case callers use the generic evaluator.
    """
    h = weights[0].shape[1]
    if weights[0].shape != (1, h) or weights[-1].shape != (h, 1):
        return None
    for w in weights[1:-1]:
        if w.shape != (h, h):
            return None
    w0 = np.ascontiguousarray(weights[0][0, :])
    wl = np.ascontiguousarray(weights[-1][:, 0])
    if len(weights) > 2:
        wm = np.ascontiguousarray(np.stack(weights[1:-1]))
    else:
        wm = np.zeros((0, h, h), np.complex128)
    if biases is not None:
        b0 = np.ascontiguousarray(biases[0])
        bl = complex(biases[-1][0])
        if len(biases) > 2:
            bm = np.ascontiguousarray(np.stack(biases[1:-1]))
        else:
            bm = np.zeros((0, h), np.complex128)
    else:
        b0 = np.zeros(h, np.complex128)
        bm = np.zeros((wm.shape[0], h), np.complex128)
        bl = 0j
    return (w0, b0, wm, bm, wl, bl)
