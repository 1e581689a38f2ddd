"""Declarative run configuration: one document driving render, diag, and dataset runs.

The file is YAML (JSON parses too) with sections ``network``, ``render``,
``window``, ``dataset`` and a top-level ``seed``. Unknown keys anywhere are
rejected. Component seeds normally derive from the top-level seed; a file
may pin ``network.seed``, ``render.seed``, or ``render.palette_seed``
explicitly, and those survive unless a ``--seed`` flag overrides the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .complexnet import NetworkConfig
from .dataset import DatasetSpec
from .errors import ConfigError
from .render import ImageWindow, RenderConfig
from .seeds import derive_seeds
from .serialize import network_from_dict, render_from_dict, window_from_dict

TOP_LEVEL_KEYS = {"seed", "network", "render", "window", "dataset"}
DATASET_KEYS = {"count", "resolution", "filter_std_min", "max_retries_per_slot", "output_dir"}


@dataclass(frozen=True)
class DatasetOptions:
    count: int = 100
    resolution: tuple[int, int] = (256, 256)
    filter_std_min: float = 0.025
    max_retries_per_slot: int = 20
    output_dir: str | None = None


@dataclass(frozen=True)
class RunConfig:
    """Parsed union of all component configurations plus the master seed."""

    seed: int = 0
    network: NetworkConfig = NetworkConfig()
    render: RenderConfig = RenderConfig()
    window: ImageWindow = ImageWindow()
    dataset: DatasetOptions = DatasetOptions()
    explicit_seeds: frozenset = frozenset()

    def with_seed(self, seed: int) -> "RunConfig":
        """Override the master seed; clears any file-pinned component seeds."""
        return replace(self, seed=seed, explicit_seeds=frozenset())

    def resolve_single_render(self) -> tuple[NetworkConfig, RenderConfig]:
        """Component configs for a one-off render.

        Seeds derive from the master seed exactly like slot 0, retry 0 of a
        dataset run, so a single render reproduces that dataset image.
        """
        network_seed, palette_seed, sampling_seed = derive_seeds(self.seed, 0, 0, count=3)
        network = self.network
        render = self.render
        if "network" not in self.explicit_seeds:
            network = replace(network, seed=network_seed)
        if "sampling" not in self.explicit_seeds:
            render = replace(render, seed=sampling_seed)
        if "palette" not in self.explicit_seeds:
            render = replace(render, palette_seed=palette_seed)
        return network, render

    def to_dataset_spec(self, output_dir, count: int | None = None) -> DatasetSpec:
        out = output_dir or self.dataset.output_dir
        if out is None:
            raise ConfigError("dataset output directory not set (flag --out or dataset.output_dir)")
        return DatasetSpec(
            count=count if count is not None else self.dataset.count,
            output_dir=Path(out),
            resolution=self.dataset.resolution,
            base_seed=self.seed,
            filter_std_min=self.dataset.filter_std_min,
            max_retries_per_slot=self.dataset.max_retries_per_slot,
            network=self.network,
            render=self.render,
            window=self.window,
        )


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError(f"configuration root must be a mapping, got {type(doc).__name__}")
    unknown = set(doc) - TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    explicit = set()
    network_doc = doc.get("network", {}) or {}
    render_doc = doc.get("render", {}) or {}
    if "seed" in network_doc:
        explicit.add("network")
    if "seed" in render_doc:
        explicit.add("sampling")
    if render_doc.get("palette_seed") is not None:
        explicit.add("palette")

    dataset_doc = doc.get("dataset", {}) or {}
    if not isinstance(dataset_doc, dict):
        raise ConfigError("dataset section must be a mapping")
    unknown = set(dataset_doc) - DATASET_KEYS
    if unknown:
        raise ConfigError(f"unknown keys in dataset: {sorted(unknown)}")
    ds_kwargs = dict(dataset_doc)
    if "resolution" in ds_kwargs:
        res = ds_kwargs["resolution"]
        if isinstance(res, int):
            res = [res, res]
        ds_kwargs["resolution"] = (int(res[0]), int(res[1]))

    return RunConfig(
        seed=int(doc.get("seed", 0)),
        network=network_from_dict(network_doc),
        render=render_from_dict(render_doc),
        window=window_from_dict(doc.get("window", {}) or {}),
        dataset=DatasetOptions(**ds_kwargs),
        explicit_seeds=frozenset(explicit),
    )


def load_config(path) -> RunConfig:
    """Parse a YAML or JSON configuration file into a RunConfig."""
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse configuration file {path}: {exc}") from exc
    if doc is None:
        doc = {}
    return config_from_dict(doc)
