import json
from pathlib import Path

import numpy as np
import pytest

from decoupled_mixup import (
    ParameterError,
    RngStream,
    RunConfig,
    load_manifest,
    pair_items,
    render_grid,
    run_batch,
)
from decoupled_mixup.image_io import read_image, write_image
from decoupled_mixup.pipeline import GRID_SEPARATOR_VALUE, mix_pair

from conftest import random_image, write_dataset


def read_output(out_dir):
    """Parse an output manifest into (header, records)."""
    lines = (Path(out_dir) / "manifest.jsonl").read_text().splitlines()
    return json.loads(lines[0]), [json.loads(line) for line in lines[1:]]


def output_bytes(out_dir):
    """Bytes of every file in a run directory, keyed by name."""
    return {
        p.name: p.read_bytes() for p in sorted(Path(out_dir).iterdir()) if p.is_file()
    }


class TestPairItems:
    def test_fixed_seed_is_reproducible(self):
        a = pair_items(8, RngStream(33, 0))
        b = pair_items(8, RngStream(33, 0))
        assert np.array_equal(a, b)

    def test_single_item_self_pairs(self):
        assert pair_items(1, RngStream(0, 0))[0] == 0

    def test_always_a_bijection(self):
        for seed in range(1000):
            perm = pair_items(16, RngStream(seed, 0))
            assert np.array_equal(np.sort(perm), np.arange(16))

    def test_rejects_empty(self):
        with pytest.raises(ParameterError):
            pair_items(0, RngStream(0, 0))


class TestRunBatch:
    def run(self, manifest, out_dir, **overrides):
        entries, classes = load_manifest(manifest)
        defaults = dict(mode="mixup", output_dir=out_dir, seed=5)
        defaults.update(overrides)
        config = RunConfig(**defaults)
        return run_batch(config, entries, classes)

    def test_two_runs_are_byte_identical(self, tmp_path, make_dataset):
        manifest = make_dataset(n=8)
        for mode in ("mixup", "fd"):
            self.run(manifest, tmp_path / f"{mode}_a", mode=mode)
            self.run(manifest, tmp_path / f"{mode}_b", mode=mode)
            assert output_bytes(tmp_path / f"{mode}_a") == output_bytes(
                tmp_path / f"{mode}_b"
            )

    def test_parallel_equals_serial(self, tmp_path, make_dataset):
        manifest = make_dataset(n=8)
        self.run(manifest, tmp_path / "serial", mode="cd", jobs=1)
        self.run(manifest, tmp_path / "parallel", mode="cd", jobs=4)
        assert output_bytes(tmp_path / "serial") == output_bytes(tmp_path / "parallel")

    def test_one_record_per_item_and_simplex_labels(self, tmp_path, make_dataset):
        manifest = make_dataset(n=6)
        report = self.run(manifest, tmp_path / "out", mode="style")
        assert report.total == 6 and report.failed == 0
        _, records = read_output(tmp_path / "out")
        assert [r["index"] for r in records] == list(range(6))
        for record in records:
            label = np.array(record["label"])
            assert abs(label.sum() - 1.0) < 1e-6
            assert label.min() >= 0.0
            assert record["style_t"] is not None

    def test_cd_without_masks_matches_mixup(self, tmp_path, make_dataset):
        # All-ones fallback plus the cd default alpha=1 label rule make the
        # two modes produce the same images and labels for the same seed.
        manifest = make_dataset(n=8, masks=False)
        self.run(manifest, tmp_path / "cd", mode="cd", seed=9)
        self.run(manifest, tmp_path / "mixup", mode="mixup", seed=9)
        _, cd_records = read_output(tmp_path / "cd")
        _, mix_records = read_output(tmp_path / "mixup")
        for cd_rec, mix_rec in zip(cd_records, mix_records):
            assert cd_rec["pair"] == mix_rec["pair"]
            assert cd_rec["label"] == mix_rec["label"]
            assert cd_rec["lambda_v"] == mix_rec["lambda_v"]
            assert (tmp_path / "cd" / cd_rec["image"]).read_bytes() == (
                tmp_path / "mixup" / mix_rec["image"]
            ).read_bytes()

    def test_cd_fallback_warns_per_maskless_operand(self, tmp_path, make_dataset):
        manifest = make_dataset(n=4, masks=False)
        report = self.run(manifest, tmp_path / "out", mode="cd")
        assert len(report.warnings) == 8  # two operands per item
        assert all("all-ones foreground" in w for w in report.warnings)

    def test_fd_identity_run_reproduces_sources(self, tmp_path, make_dataset):
        manifest = make_dataset(n=6, size=16)
        self.run(
            manifest,
            tmp_path / "out",
            mode="fd",
            fixed_lambda_v=1.0,
            fixed_lambda_delta=1.0,
        )
        entries, _ = load_manifest(manifest)
        _, records = read_output(tmp_path / "out")
        for record in records:
            source = read_image(entries[record["index"]].image_path)
            mixed = read_image(tmp_path / "out" / record["image"])
            assert np.array_equal(mixed, source)

    def test_bad_item_is_skipped_and_reported(self, tmp_path, make_dataset):
        manifest = make_dataset(n=5)
        # One undersized image cannot be mixed with its differently-shaped partner.
        write_image(manifest.parent / "in_2.png", np.zeros((4, 4, 3)))
        report = self.run(manifest, tmp_path / "out", mode="mixup")
        assert report.failed >= 1
        assert report.ok + report.failed == 5
        _, records = read_output(tmp_path / "out")
        failed = {f["index"] for f in report.failures}
        for record in records:
            if record["index"] in failed:
                assert record["status"] == "error" and record["image"] is None
            else:
                assert record["status"] == "ok"
                assert (tmp_path / "out" / record["image"]).is_file()

    def test_cutmix_records_box_consistent_with_label(self, tmp_path, make_dataset):
        manifest = make_dataset(n=8, size=16)
        self.run(manifest, tmp_path / "out", mode="cutmix")
        _, records = read_output(tmp_path / "out")
        entries, _ = load_manifest(manifest)
        for record in records:
            r0, c0, r1, c1 = record["box"]
            area_ratio = (r1 - r0) * (c1 - c0) / (16 * 16)
            assert record["lambda_v"] == 1.0 - area_ratio
            i, j = record["pair"]
            expected = (1.0 - area_ratio) * entries[i].label + area_ratio * entries[
                j
            ].label
            assert np.allclose(record["label"], expected, atol=1e-12)

    def test_ppm_output_format(self, tmp_path, make_dataset):
        manifest = make_dataset(n=2)
        self.run(manifest, tmp_path / "out", image_format="ppm")
        _, records = read_output(tmp_path / "out")
        assert all(r["image"].endswith(".ppm") for r in records)
        mixed = read_image(tmp_path / "out" / records[0]["image"])
        assert mixed.shape == (16, 16, 3)

    def test_rejects_invalid_config(self, tmp_path):
        with pytest.raises(ParameterError):
            RunConfig(mode="nope", output_dir=tmp_path)
        with pytest.raises(ParameterError):
            RunConfig(mode="fd", output_dir=tmp_path, alpha=1.5)
        with pytest.raises(ParameterError):
            RunConfig(mode="fd", output_dir=tmp_path, jobs=0)


class TestMixPair:
    def test_unknown_mode_rejected(self):
        rng = np.random.default_rng(80)
        x = random_image(rng)
        with pytest.raises(ParameterError):
            mix_pair("blur", x, x, [1.0], [1.0], RngStream(0, 0))

    def test_mode_defaults_for_alpha(self):
        rng = np.random.default_rng(81)
        x_i, x_j = random_image(rng), random_image(rng)
        y_i, y_j = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        cd = mix_pair("cd", x_i, x_j, y_i, y_j, RngStream(1, 0))
        fd = mix_pair("fd", x_i, x_j, y_i, y_j, RngStream(1, 0))
        assert cd.alpha == 1.0
        assert fd.alpha == 0.2


class TestRenderGrid:
    def test_dimensions_follow_separator_rule(self):
        rng = np.random.default_rng(82)
        x_i, x_j = random_image(rng, 32, 32), random_image(rng, 32, 32)
        grid = render_grid(x_i, x_j, [0.2, 0.5, 0.8], [0.1, 0.2, 0.4, 0.6], "fd")
        assert grid.shape == (3 * 32 + 4 * 2, 4 * 32 + 5 * 2, 3)

    def test_single_tile_grid(self):
        rng = np.random.default_rng(83)
        x_i, x_j = random_image(rng, 8, 8), random_image(rng, 8, 8)
        grid = render_grid(x_i, x_j, [0.5], [0.2], "mixup")
        assert grid.shape == (12, 12, 3)
        assert np.all(grid[0:2, :, :] == GRID_SEPARATOR_VALUE)
        assert np.all(grid[:, 0:2, :] == GRID_SEPARATOR_VALUE)

    def test_fd_full_lambda_row_reproduces_first_image(self):
        rng = np.random.default_rng(84)
        x_i, x_j = random_image(rng, 16, 16), random_image(rng, 16, 16)
        grid = render_grid(x_i, x_j, [1.0], [0.0, 0.2, 1.0], "fd")
        for c in range(3):
            left = 2 + c * (16 + 2)
            tile = grid[2:18, left : left + 16, :]
            assert np.abs(tile - x_i).max() < 1e-5

    def test_rejects_empty_lists(self):
        rng = np.random.default_rng(85)
        x = random_image(rng, 8, 8)
        with pytest.raises(ParameterError):
            render_grid(x, x, [], [0.2], "mixup")
        with pytest.raises(ParameterError):
            render_grid(x, x, [0.5], [], "mixup")

    def test_cutmix_tiles_are_seed_stable(self):
        rng = np.random.default_rng(86)
        x_i, x_j = random_image(rng, 8, 8), random_image(rng, 8, 8)
        a = render_grid(x_i, x_j, [0.4, 0.6], [0.2], "cutmix", seed=3)
        b = render_grid(x_i, x_j, [0.4, 0.6], [0.2], "cutmix", seed=3)
        assert np.array_equal(a, b)

    def test_cd_grid_sweeps_foreground_ratio(self):
        # Fixed masks, varying lambda: the foreground sweeps from x_j to x_i
        # while the all-background pixels track lambda_delta only.
        rng = np.random.default_rng(87)
        x_i, x_j = random_image(rng, 8, 8), random_image(rng, 8, 8)
        mask = np.zeros((8, 8))
        mask[2:6, 2:6] = 1.0
        grid = render_grid(
            x_i, x_j, [0.0, 1.0], [1.0], "cd", m_i=mask, m_j=mask, lambda_delta=1.0
        )
        top = grid[2:10, 2:10, :]
        bottom = grid[12:20, 2:10, :]
        fg = mask == 1.0
        assert np.abs(top[fg] - x_j[fg]).max() < 1e-12
        assert np.abs(bottom[fg] - x_i[fg]).max() < 1e-12
        assert np.abs(top[~fg] - x_i[~fg]).max() < 1e-12
        assert np.abs(bottom[~fg] - x_i[~fg]).max() < 1e-12
