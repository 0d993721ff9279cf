"""Tests for the ellipse-based test image and its ground-truth pair."""

import numpy as np
import pytest

from fourier_uq.phantom import (
    SHEPP_LOGAN_ELLIPSES,
    EllipseSpec,
    format_ellipse_table,
    ground_truth_pair,
    load_complex,
    load_ellipses,
    rasterize,
    save_complex,
    save_pgm,
    shepp_logan,
)

from _oracles import dense_haar2


class TestEllipseSpec:
    def test_rejects_nonpositive_axes(self):
        with pytest.raises(ValueError):
            EllipseSpec(1.0, (0.0, 0.0), (0.0, 0.5), 0.0)
        with pytest.raises(ValueError):
            EllipseSpec(1.0, (0.0, 0.0), (0.5, -0.1), 0.0)

    def test_default_table_has_ten_entries(self):
        assert len(SHEPP_LOGAN_ELLIPSES) == 10
        assert SHEPP_LOGAN_ELLIPSES[0].intensity == 1.0
        assert SHEPP_LOGAN_ELLIPSES[1].intensity == -0.8


class TestRasterize:
    def test_centered_disk_on_coarse_grid(self):
        # Pixel centers sit at +-0.25 and +-0.75; only the four innermost
        # pixels fall inside a radius-0.5 disk.
        disk = (EllipseSpec(1.0, (0.0, 0.0), (0.5, 0.5), 0.0),)
        img = rasterize(disk, 4, 4)
        expected = np.zeros((4, 4))
        expected[1:3, 1:3] = 1.0
        assert np.array_equal(img.real, expected)
        assert np.all(img.imag == 0)

    def test_intensities_add_where_ellipses_overlap(self):
        shapes = (
            EllipseSpec(1.0, (0.0, 0.0), (0.9, 0.9), 0.0),
            EllipseSpec(-0.5, (0.0, 0.0), (0.3, 0.3), 0.0),
        )
        img = rasterize(shapes, 8, 8).real
        assert img[3, 3] == pytest.approx(0.5)
        assert img[3, 0] == pytest.approx(1.0)

    def test_rotation_by_quarter_turn_swaps_axes(self):
        rotated = rasterize((EllipseSpec(1.0, (0.0, 0.0), (0.3, 0.6), 90.0),), 8, 8)
        swapped = rasterize((EllipseSpec(1.0, (0.0, 0.0), (0.6, 0.3), 0.0),), 8, 8)
        assert np.array_equal(rotated, swapped)

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            rasterize(SHEPP_LOGAN_ELLIPSES, 0, 4)


class TestDefaultImage:
    def test_requires_power_of_two(self):
        with pytest.raises(ValueError):
            shepp_logan(48, 64)

    def test_known_pixel_values(self):
        img = shepp_logan(64, 64).real
        # corners lie outside every ellipse
        assert img[0, 0] == 0.0
        assert img[0, 63] == 0.0
        assert img[63, 0] == 0.0
        # the center sits inside exactly the two large ellipses: 1.0 - 0.8
        assert img[32, 32] == pytest.approx(0.2, abs=1e-14)
        assert img.max() == pytest.approx(1.0)
        # interior regions where intensities cancel sit at float-rounding
        # distance from zero (1.0 - 0.8 - 0.2)
        assert img.min() == pytest.approx(0.0, abs=1e-15)

    def test_wavelet_coefficients_are_sparse(self):
        img = shepp_logan(64, 64)
        _, z0 = ground_truth_pair(img)
        fraction = np.mean(np.abs(z0) > 1e-10 * np.abs(z0).max())
        assert 0.1 < fraction < 0.32

    def test_rectangular_sizes_supported(self):
        img = shepp_logan(32, 64)
        assert img.shape == (32, 64)


class TestGroundTruthPair:
    def test_pair_matches_dense_transform(self):
        img = shepp_logan(8, 8)
        x0, z0 = ground_truth_pair(img)
        assert np.array_equal(x0, img.ravel())
        assert np.allclose(z0, dense_haar2(8, 8) @ x0, atol=1e-12)
        # the transform is unitary, so energies agree
        assert np.linalg.norm(z0) == pytest.approx(np.linalg.norm(x0), rel=1e-12)

    def test_rejects_non_2d_input(self):
        with pytest.raises(ValueError):
            ground_truth_pair(np.ones(16))


class TestEllipseTableIO:
    def test_round_trip_preserves_floats_exactly(self, tmp_path):
        path = tmp_path / "table.txt"
        path.write_text(format_ellipse_table())
        loaded = load_ellipses(str(path))
        assert loaded == SHEPP_LOGAN_ELLIPSES

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = tmp_path / "table.txt"
        path.write_text(
            "# full-width disk\n"
            "\n"
            "1.0 0.0 0.0 0.5 0.5 0.0  # trailing note\n"
        )
        loaded = load_ellipses(str(path))
        assert loaded == (EllipseSpec(1.0, (0.0, 0.0), (0.5, 0.5), 0.0),)

    def test_rejects_malformed_rows(self, tmp_path):
        path = tmp_path / "table.txt"
        path.write_text("1.0 0.0 0.0 0.5\n")
        with pytest.raises(ValueError):
            load_ellipses(str(path))

    def test_rejects_empty_table(self, tmp_path):
        path = tmp_path / "table.txt"
        path.write_text("# nothing here\n")
        with pytest.raises(ValueError):
            load_ellipses(str(path))


class TestImageFiles:
    def test_pgm_scaling_and_header(self, tmp_path):
        img = np.array([[0.0, 1.0], [0.5, 0.25]])
        path = tmp_path / "img.pgm"
        save_pgm(img, str(path))
        tokens = path.read_text().split()
        assert tokens[0] == "P2"
        assert tokens[1:4] == ["2", "2", "255"]
        assert [int(t) for t in tokens[4:]] == [0, 255, 128, 64]

    def test_pgm_keeps_zero_floor_for_negatives(self, tmp_path):
        img = np.array([[-1.0, 1.0], [0.0, 0.5]])
        path = tmp_path / "img.pgm"
        save_pgm(img, str(path))
        values = [int(t) for t in path.read_text().split()[4:]]
        assert values[0] == 0
        assert values[1] == 255
        assert values[2] == 128

    def test_complex_round_trip(self, tmp_path):
        img = shepp_logan(8, 8) + 0.25j
        path = str(tmp_path / "truth.npy")
        save_complex(img, path)
        assert np.array_equal(load_complex(path), img)
        # extension added automatically when missing
        assert np.array_equal(load_complex(str(tmp_path / "truth")), img)

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_complex(str(tmp_path / "absent.npy"))


class TestResolutionConsistency:
    # Pixel centers of a 2Rx2R grid average, two by two, onto the RxR
    # centers, so block-averaging the fine image reproduces the coarse one
    # everywhere except in blocks straddling an ellipse boundary.  Boundary
    # blocks thin out like 1/R: measured fractions are 7.9% at R=64, 3.9%
    # at R=128, and 2.0% at R=256.
    @pytest.mark.parametrize("r, bound", [(64, 0.10), (128, 0.05)])
    def test_block_average_matches_coarse_grid(self, r, bound):
        fine = shepp_logan(2 * r, 2 * r)
        coarse = shepp_logan(r, r)
        block = fine.reshape(r, 2, r, 2).mean(axis=(1, 3))
        differing = np.abs(block - coarse) > 1e-12
        assert float(differing.mean()) < bound
