"""Random complex-valued multilayer perceptrons.

A network here is a small fully connected map from one complex number to one
complex number: an input layer of width 1, ``hidden_layers`` tanh layers of
width ``neurons_per_layer``, and a final linear layer back to width 1 whose
output is raised to an integer power. Weights are random complex numbers and
are never trained; each seed defines a fixed nonlinear map that downstream
code iterates as a dynamical system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError


@dataclass(frozen=True)
class NetworkConfig:
    """Shape and initialization parameters for a random complex MLP.

    ``weight_std`` is the standard deviation of the normal distribution that
    the real and imaginary parts of every weight (and bias, when enabled) are
    drawn from, independently per component.
    """

    hidden_layers: int = 3
    neurons_per_layer: int = 6
    weight_std: float = 1.0
    use_bias: bool = True
    output_exponent: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.hidden_layers < 1:
            raise ConfigError(f"hidden_layers must be >= 1, got {self.hidden_layers}")
        if self.neurons_per_layer < 1:
            raise ConfigError(f"neurons_per_layer must be >= 1, got {self.neurons_per_layer}")
        if not (self.weight_std > 0):
            raise ConfigError(f"weight_std must be > 0, got {self.weight_std}")
        if self.output_exponent < 1:
            raise ConfigError(f"output_exponent must be >= 1, got {self.output_exponent}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")

    def layer_shapes(self) -> list[tuple[int, int]]:
        """Weight matrix shapes, input to output: 1->H, H->H (repeated), H->1."""
        h = self.neurons_per_layer
        return [(1, h)] + [(h, h)] * (self.hidden_layers - 1) + [(h, 1)]


@dataclass(frozen=True, eq=False)
class ComplexMLP:
    """An immutable complex MLP. Safe to share across threads and processes.

    ``weights[k]`` has shape (in_k, out_k); consecutive shapes chain. When
    biases are present, ``biases[k]`` has shape (out_k,).
    """

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...] | None
    output_exponent: int

    def forward(self, z: complex) -> complex:
        """Evaluate the network at a single point.

        Routes through the batch path so scalar and batched evaluation are
        bit-identical.
        """
        return complex(self.forward_batch(np.array([z], dtype=np.complex128))[0])

    __call__ = forward

    def _kernel_pack(self):
        if _kernels.HAVE_NUMBA:
            return _kernels.pack_network(self.weights, self.biases)
        return None

    def forward_batch(self, z: np.ndarray) -> np.ndarray:
        """Evaluate the network at an array of points.

        tanh is the complex-analytic hyperbolic tangent, applied after every
        layer except the last; the last layer's scalar output is raised to
        ``output_exponent`` with no activation in between. Overflow to inf or
        nan is allowed to propagate; callers classify non-finite iterates as
        divergent.
        """
        zs = np.asarray(z, dtype=np.complex128).reshape(-1)
        pack = self._kernel_pack()
        if pack is not None:
            return _kernels.forward_batch(zs, pack, self.output_exponent)
        a = zs.reshape(-1, 1)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            for k, w in enumerate(self.weights[:-1]):
                a = a @ w
                if self.biases is not None:
                    a = a + self.biases[k]
                a = np.tanh(a)
            a = a @ self.weights[-1]
            if self.biases is not None:
                a = a + self.biases[-1]
            base = a[:, 0]
            out = base
            for _ in range(self.output_exponent - 1):
                out = out * base
        return out

    def orbit_batch(self, coords: np.ndarray, tau: float, max_iters: int):
        """Fused escape-loop iteration over a coordinate batch, or None.

        Returns (escaped, escape_iter, final_z) arrays with the exact same
        per-sample semantics as the generic loop in
        :mod:`neuralfractal.dynamics`, computed in one compiled pass. None
        means no fused kernel applies and the caller should use the generic
        path.
        """
        pack = self._kernel_pack()
        if pack is None:
            return None
        coords = np.asarray(coords, dtype=np.complex128).reshape(-1)
        return _kernels.orbit_batch(coords, pack, self.output_exponent, tau, max_iters)


def init_network(config: NetworkConfig) -> ComplexMLP:
    """Draw a network from the given configuration.

    Pure function of the config, seed included: reconstructing with the same
    config yields bit-identical weights. Draw order is fixed per layer as
    weight real parts, weight imaginary parts, then bias real and imaginary
    parts when biases are enabled.
    """
    rng = np.random.default_rng(config.seed)
    std = config.weight_std
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []
    for shape in config.layer_shapes():
        w = rng.normal(0.0, std, size=shape) + 1j * rng.normal(0.0, std, size=shape)
        weights.append(w)
        if config.use_bias:
            n_out = shape[1]
            b = rng.normal(0.0, std, size=n_out) + 1j * rng.normal(0.0, std, size=n_out)
            biases.append(b)
    return ComplexMLP(
        weights=tuple(weights),
        biases=tuple(biases) if config.use_bias else None,
        output_exponent=config.output_exponent,
    )
