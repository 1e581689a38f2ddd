import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from neuralfractal import (
    ConfigError,
    DatasetSpec,
    GenerationError,
    ImageWindow,
    IterationParams,
    NetworkConfig,
    RenderConfig,
    generate_dataset,
    is_featureless,
)
from neuralfractal.dataset import save_image_png, spec_digest, to_uint8
from neuralfractal.seeds import derive_seeds


def quick_spec(tmp_path, **kwargs):
    defaults = dict(
        count=3,
        output_dir=tmp_path / "out",
        resolution=(24, 24),
        base_seed=404,
        render=RenderConfig(
            iteration=IterationParams(tau=1.0, max_iters=12),
            max_epochs=4,
            initial_samples_per_pixel=2,
        ),
    )
    defaults.update(kwargs)
    return DatasetSpec(**defaults)


def tree_bytes(root: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


def test_constant_image_is_featureless():
    img = np.full((16, 16, 3), 0.4)
    assert is_featureless(img, 0.025)
    assert is_featureless(img, 1e-9)


def test_checkerboard_is_not_featureless():
    img = np.zeros((8, 8, 3))
    img[::2, ::2, 0] = 1.0
    img[1::2, 1::2, 0] = 1.0
    # balanced 0/1 field has population std 0.5 on that channel
    assert np.isclose(img[..., 0].std(), 0.5)
    assert not is_featureless(img, 0.025)


def test_zero_threshold_accepts_everything():
    img = np.full((4, 4, 3), 0.123)
    assert not is_featureless(img, 0.0)


def test_uint8_quantization():
    img = np.array([[[0.0, 1.0, 0.5]]])
    assert list(to_uint8(img)[0, 0]) == [0, 255, 128]
    assert to_uint8(np.array([[[2.0, -1.0, 0.999]]])).tolist() == [[[255, 0, 255]]]


def test_png_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    img = rng.random((5, 7, 3))
    path = tmp_path / "x.png"
    save_image_png(img, path)
    decoded = np.asarray(Image.open(path))
    assert decoded.shape == (5, 7, 3)
    assert np.array_equal(decoded, to_uint8(img))


def test_spec_validation(tmp_path):
    with pytest.raises(ConfigError):
        DatasetSpec(count=0, output_dir=tmp_path)
    with pytest.raises(ConfigError):
        DatasetSpec(count=1, output_dir=tmp_path, filter_std_min=-0.1)


def test_generation_is_deterministic(tmp_path):
    spec_a = quick_spec(tmp_path, output_dir=tmp_path / "a")
    spec_b = quick_spec(tmp_path, output_dir=tmp_path / "b")
    generate_dataset(spec_a)
    generate_dataset(spec_b)
    a, b = tree_bytes(tmp_path / "a"), tree_bytes(tmp_path / "b")
    assert set(a) == set(b)
    for name in a:
        assert a[name] == b[name], name


def test_workers_do_not_change_outputs(tmp_path):
    spec_a = quick_spec(tmp_path, count=4, output_dir=tmp_path / "w1")
    spec_b = quick_spec(tmp_path, count=4, output_dir=tmp_path / "w2")
    generate_dataset(spec_a, workers=1)
    generate_dataset(spec_b, workers=3)
    a, b = tree_bytes(tmp_path / "w1"), tree_bytes(tmp_path / "w2")
    assert set(a) == set(b)
    for name in a:
        assert a[name] == b[name], name


def test_impossible_filter_exhausts_retries(tmp_path):
    spec = quick_spec(tmp_path, count=1, filter_std_min=10.0, max_retries_per_slot=3)
    with pytest.raises(GenerationError, match="slot 0"):
        generate_dataset(spec)


def test_manifest_accounting_and_sidecars(tmp_path):
    spec = quick_spec(tmp_path, count=5)
    manifest = generate_dataset(spec)
    doc = json.loads(manifest.path.read_text())
    assert doc["totals"]["accepted"] == 5
    assert doc["totals"]["renders"] == doc["totals"]["accepted"] + doc["totals"]["rejected"]
    assert doc["spec_digest"] == spec_digest(spec)
    assert [r["slot"] for r in doc["images"]] == list(range(5))
    for record in doc["images"]:
        png = spec.output_dir / record["file"]
        sidecar = json.loads((spec.output_dir / record["sidecar"]).read_text())
        assert png.exists()
        assert sidecar["slot"] == record["slot"]
        assert sidecar["network_seed"] == record["network_seed"]
        assert sidecar["config_digest"] == doc["spec_digest"]
        assert sidecar["resolution"] == [24, 24]
        decoded = np.asarray(Image.open(png)).astype(np.float64) / 255.0
        # filter was applied pre-quantization; 8-bit rounding moves each
        # channel std by at most ~0.002
        assert decoded.reshape(-1, 3).std(axis=0).max() > spec.filter_std_min - 0.002


def test_accepted_images_pass_filter_on_floats(tmp_path):
    from neuralfractal.dataset import render_slot

    spec = quick_spec(tmp_path, count=2)
    spec.output_dir.mkdir(parents=True)
    record, rejections = render_slot(spec, 0)
    for rej in rejections:
        assert rej["reason"] == "featureless"
        assert rej["max_channel_std"] < spec.filter_std_min


def test_slot_seeds_are_collision_free():
    seen = set()
    for slot in range(50):
        for retry in range(3):
            seeds = derive_seeds(1234, slot, retry, count=3)
            assert seeds not in seen
            seen.add(seeds)


def test_digest_ignores_output_location(tmp_path):
    a = quick_spec(tmp_path, output_dir=tmp_path / "x")
    b = quick_spec(tmp_path, output_dir=tmp_path / "y")
    assert spec_digest(a) == spec_digest(b)
    c = quick_spec(tmp_path, base_seed=405)
    assert spec_digest(a) != spec_digest(c)


def test_window_resolution_is_overridden(tmp_path):
    spec = quick_spec(
        tmp_path, count=1, window=ImageWindow(resolution=(256, 256)), resolution=(16, 16)
    )
    manifest = generate_dataset(spec)
    png = spec.output_dir / manifest.images[0]["file"]
    assert Image.open(png).size == (16, 16)
