import pytest

from neuralfractal import ConfigError, RunConfig, load_config
from neuralfractal.runconfig import config_from_dict
from neuralfractal.serialize import render_from_dict, render_to_dict, window_from_dict


def test_defaults_from_empty_file(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("")
    cfg = load_config(path)
    assert cfg.seed == 0
    assert cfg.network.hidden_layers == 3
    assert cfg.render.max_epochs == 50
    assert cfg.window.resolution == (256, 256)


def test_full_round_trip(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(
        """
seed: 9
network:
  hidden_layers: 2
  neurons_per_layer: 4
  weight_std: 0.8
render:
  tau: 1.5
  max_iters: 24
  max_epochs: 12
  threshold:
    tau_init: 0.5
    growth_factor: 1.2
    above_ratio: 0.5
window:
  center: [-0.5, 0.25]
  width: 3.0
  height: 2.0
  resolution: [64, 48]
dataset:
  count: 7
  resolution: 32
  filter_std_min: 0.05
"""
    )
    cfg = load_config(path)
    assert cfg.seed == 9
    assert cfg.network.neurons_per_layer == 4
    assert cfg.render.iteration.max_iters == 24
    assert cfg.render.threshold.growth_factor == 1.2
    assert cfg.window.center == complex(-0.5, 0.25)
    assert cfg.window.resolution == (64, 48)
    assert cfg.dataset.count == 7
    assert cfg.dataset.resolution == (32, 32)
    assert cfg.dataset.filter_std_min == 0.05


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown top-level"):
        config_from_dict({"sede": 1})
    with pytest.raises(ConfigError, match="network"):
        config_from_dict({"network": {"depth": 3}})
    with pytest.raises(ConfigError, match="render"):
        config_from_dict({"render": {"tau_max": 2}})
    with pytest.raises(ConfigError, match="window"):
        config_from_dict({"window": {"zoom": 2}})
    with pytest.raises(ConfigError, match="dataset"):
        config_from_dict({"dataset": {"size": 5}})


def test_threshold_null_disables_tuning():
    cfg = render_from_dict({"tau": 2.0, "threshold": None})
    assert cfg.threshold is None
    assert cfg.iteration.tau == 2.0


def test_render_dict_round_trip():
    cfg = render_from_dict({"max_epochs": 9, "colormap_size": 32, "seed": 5})
    doc = render_to_dict(cfg)
    assert render_from_dict(doc) == cfg


def test_window_scalar_resolution():
    win = window_from_dict({"resolution": 48})
    assert win.resolution == (48, 48)


def test_component_seed_derivation():
    cfg = config_from_dict({"seed": 7})
    network, render = cfg.resolve_single_render()
    # derivation is stable and all three streams differ
    network2, render2 = cfg.resolve_single_render()
    assert network.seed == network2.seed
    assert render.seed == render2.seed
    assert len({network.seed, render.seed, render.palette_seed}) == 3


def test_explicit_seeds_survive_resolution():
    cfg = config_from_dict({"seed": 7, "network": {"seed": 1234}})
    network, render = cfg.resolve_single_render()
    assert network.seed == 1234
    assert render.seed != 1234  # still derived


def test_seed_flag_clears_explicit_seeds():
    cfg = config_from_dict({"seed": 7, "network": {"seed": 1234}})
    cfg = cfg.with_seed(8)
    network, _ = cfg.resolve_single_render()
    assert network.seed != 1234


def test_dataset_spec_requires_output_dir():
    cfg = RunConfig()
    with pytest.raises(ConfigError, match="output"):
        cfg.to_dataset_spec(output_dir=None)


def test_dataset_spec_wiring(tmp_path):
    cfg = config_from_dict({"seed": 3, "dataset": {"count": 4, "resolution": 16}})
    spec = cfg.to_dataset_spec(output_dir=tmp_path / "out", count=2)
    assert spec.count == 2  # explicit override wins
    assert spec.base_seed == 3
    assert spec.resolution == (16, 16)


def test_yaml_parse_error(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("render: [unclosed")
    with pytest.raises(ConfigError, match="cannot parse"):
        load_config(path)
