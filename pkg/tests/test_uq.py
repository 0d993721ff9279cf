"""Tests for confidence radii, coverage scoring, and interval export."""

import csv
import math

import numpy as np
import pytest

from fourier_uq.coherence import local_coherence
from fourier_uq.operators import (
    MeasurementOperator,
    op_adjoint,
    reweighted_operator,
    standard_operator,
)
from fourier_uq.sampling import sample_reweighted, sample_uniform
from fourier_uq.uq import (
    INTERVAL_COLUMNS,
    ConfidenceReport,
    build_report,
    confidence_radii,
    coverage,
    interval_export,
    write_interval_csv,
)

from _oracles import dense_operator


def reweighted_op(shape=(4, 4), m=8, seed=0):
    profile = local_coherence(shape)
    pattern = sample_reweighted(profile.nu, m, seed=seed)
    return reweighted_operator(pattern, shape, profile)


def standard_op(size=16, m=8, seed=0):
    pattern = sample_uniform(size, m, seed=seed)
    return standard_operator(pattern, (size,))


class TestConfidenceRadii:
    def test_rejects_bad_arguments(self):
        op = standard_op()
        with pytest.raises(ValueError):
            confidence_radii(op, sigma=1.0, alpha=0.0)
        with pytest.raises(ValueError):
            confidence_radii(op, sigma=1.0, alpha=1.0)
        with pytest.raises(ValueError):
            confidence_radii(op, sigma=0.0, alpha=0.05)
        with pytest.raises(ValueError):
            confidence_radii(op, sigma=1.0, alpha=0.05, mode="bogus")

    @pytest.mark.parametrize("op_factory", [standard_op, reweighted_op])
    def test_exact_variance_matches_dense(self, op_factory):
        op = op_factory()
        sigma, alpha = 0.7, 0.05
        dense = dense_operator(op)
        w2 = op.row_weights**2
        noise_var = (w2[:, None] * np.abs(dense) ** 2).sum(axis=0) / op.normalization**2
        expected = np.sqrt(sigma**2 * noise_var * math.log(1.0 / alpha))
        got = confidence_radii(op, sigma, alpha, mode="exact_variance")
        assert np.allclose(got, expected, atol=1e-12)

    @pytest.mark.parametrize("op_factory", [standard_op, reweighted_op])
    def test_literal_mode_matches_dense(self, op_factory):
        op = op_factory()
        sigma, alpha = 0.7, 0.05
        dense = dense_operator(op)
        diag = np.einsum("ji,ji->i", dense.conj(), dense).real / op.normalization
        expected = sigma * np.sqrt(diag) / op.normalization * math.sqrt(math.log(1.0 / alpha))
        got = confidence_radii(op, sigma, alpha, mode="paper_literal")
        assert np.allclose(got, expected, atol=1e-12)

    def test_unweighted_modes_differ_by_root_normalization(self):
        # With unit row weights the fourth-power and second-power row sums
        # coincide, so the two modes differ by exactly sqrt(normalization).
        op = standard_op()
        exact = confidence_radii(op, 0.5, 0.1, mode="exact_variance")
        literal = confidence_radii(op, 0.5, 0.1, mode="paper_literal")
        assert np.allclose(literal * math.sqrt(op.normalization), exact, atol=1e-12)

    def test_radii_grow_as_alpha_shrinks(self):
        op = reweighted_op()
        loose = confidence_radii(op, 1.0, 0.2)
        tight = confidence_radii(op, 1.0, 0.01)
        assert np.all(tight > loose)

    def test_exact_variance_invariant_to_fourier_scaling_convention(self):
        # Switching unitary rows to entry-magnitude-one rows multiplies every
        # row by sqrt(size).  The same physical model then carries noise level
        # sqrt(size)*sigma and divisor size*normalization, and the disc radii
        # must come out identical.
        op = reweighted_op(shape=(16,), m=6, seed=3)
        assert op.fourier_scale == "unitary"
        scaled = MeasurementOperator(
            pattern=op.pattern,
            shape=op.shape,
            row_weights=op.row_weights,
            domain=op.domain,
            normalization=op.size * op.normalization,
            fourier_scale="entry_magnitude_one",
        )
        sigma, alpha = 0.8, 0.05
        base = confidence_radii(op, sigma, alpha, mode="exact_variance")
        rescaled = confidence_radii(
            scaled, math.sqrt(op.size) * sigma, alpha, mode="exact_variance"
        )
        assert np.allclose(rescaled, base, rtol=1e-12)


class TestCoverage:
    def test_hand_worked_case(self):
        truth = np.array([1.0, 0.0, 2.0], dtype=complex)
        center = np.array([1.05, 0.1, 2.0 + 0.5j])
        radii = np.array([0.1, 0.05, 0.4])
        overall, support = coverage(truth, center, radii)
        assert overall == pytest.approx(1.0 / 3.0)
        assert support == pytest.approx(0.5)

    def test_boundary_counts_as_covered(self):
        truth = np.array([1.0 + 0.0j])
        center = np.array([1.5 + 0.0j])
        overall, support = coverage(truth, center, np.array([0.5]))
        assert overall == 1.0
        assert support == 1.0

    def test_zero_truth_support_defaults_to_one(self):
        truth = np.zeros(4, dtype=complex)
        center = np.full(4, 10.0 + 0.0j)
        overall, support = coverage(truth, center, np.ones(4))
        assert overall == 0.0
        assert support == 1.0

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            coverage(np.zeros(3), np.zeros(3), np.zeros(2))

    def test_complex_gaussian_disc_calibration(self):
        # For complex Gaussian error with total variance v per coordinate,
        # P(|Z| > sqrt(v log(1/alpha))) = alpha exactly; the empirical
        # coverage over many coordinates must sit within 4 binomial SE.
        rng = np.random.default_rng(2718)
        draws, v, alpha = 200_000, 0.37, 0.05
        z = np.sqrt(v / 2.0) * (rng.standard_normal(draws) + 1j * rng.standard_normal(draws))
        radius = math.sqrt(v * math.log(1.0 / alpha))
        truth = np.ones(draws, dtype=complex)
        overall, _ = coverage(truth, truth + z, np.full(draws, radius))
        se = math.sqrt(alpha * (1 - alpha) / draws)
        assert abs(overall - (1.0 - alpha)) <= 4 * se

    def test_disc_calibration_holds_per_coordinate(self):
        # Radii adapt to each coordinate's own noise variance, so the miss
        # rate must equal alpha coordinate by coordinate, not just pooled.
        size, m, draws, alpha, sigma = 16, 8, 10_000, 0.05, 1.0
        profile = local_coherence((size,))
        pattern = sample_reweighted(profile.nu, m, seed=9)
        op = reweighted_operator(pattern, (size,), profile)
        radii = confidence_radii(op, sigma, alpha)
        rng = np.random.default_rng(22)
        misses = np.zeros(size)
        for _ in range(draws):
            eps = sigma * (
                rng.standard_normal(m) + 1j * rng.standard_normal(m)
            ) / np.sqrt(2.0)
            w = op_adjoint(op, op.row_weights * eps) / op.normalization
            misses += np.abs(w) > radii
        se = math.sqrt(alpha * (1.0 - alpha) / draws)
        assert np.all(np.abs(misses / draws - alpha) <= 4.0 * se)


class TestBuildReport:
    def test_report_fields_consistent(self):
        op = reweighted_op(seed=3)
        rng = np.random.default_rng(4)
        truth = rng.standard_normal(op.size) + 0j
        sigma, alpha = 0.3, 0.05
        radii = confidence_radii(op, sigma, alpha)
        center = truth + 0.5 * radii * np.exp(2j * np.pi * rng.random(op.size))
        report = build_report(op, sigma, alpha, truth, center)
        assert isinstance(report, ConfidenceReport)
        assert report.alpha == alpha
        assert report.mode == "exact_variance"
        assert np.allclose(report.radii, radii, atol=0)
        overall, support = coverage(truth, center, radii)
        assert report.coverage_overall == overall
        assert report.coverage_support == support
        assert report.coverage_overall == 1.0  # centers half a radius away


class TestIntervalExport:
    def test_2d_row_selection(self):
        shape = (3, 4)
        center = np.arange(12, dtype=complex) + 1j
        radii = np.linspace(0.1, 1.2, 12)
        truth = 2.0 * np.arange(12, dtype=complex)
        records = interval_export(center, radii, line=1, shape=shape, truth=truth)
        assert len(records) == 4
        assert [rec["index"] for rec in records] == [4, 5, 6, 7]
        assert records[0]["center_re"] == 4.0
        assert records[0]["center_im"] == 1.0
        assert records[2]["radius"] == pytest.approx(radii[6])
        assert records[3]["truth_re"] == 14.0

    def test_missing_truth_becomes_nan(self):
        records = interval_export(np.ones(4, dtype=complex), np.ones(4), 0, (4,))
        assert len(records) == 4
        assert all(math.isnan(rec["truth_re"]) for rec in records)
        assert all(math.isnan(rec["truth_im"]) for rec in records)

    def test_1d_signal_uses_single_row(self):
        records = interval_export(np.ones(8, dtype=complex), np.ones(8), 0, (8,))
        assert [rec["index"] for rec in records] == list(range(8))
        with pytest.raises(ValueError):
            interval_export(np.ones(8, dtype=complex), np.ones(8), 1, (8,))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            interval_export(np.ones(8, dtype=complex), np.ones(8), 4, (2, 4))
        with pytest.raises(ValueError):
            interval_export(np.ones(7, dtype=complex), np.ones(7), 0, (2, 4))
        with pytest.raises(ValueError):
            interval_export(np.ones(8, dtype=complex), np.ones(8), 0, (2, 4), truth=np.ones(7))

    def test_empty_input_returns_no_records(self):
        assert interval_export(np.zeros(0, dtype=complex), np.zeros(0), 0, (0,)) == []


class TestIntervalCsv:
    def test_round_trip_preserves_values(self, tmp_path):
        center = np.array([1.25 + 0.5j, -0.75 + 2.0j])
        radii = np.array([0.3333333333333333, 0.1])
        truth = np.array([1.0 + 0.0j, -1.0 + 2.0j])
        records = interval_export(center, radii, 0, (2,), truth=truth)
        path = str(tmp_path / "intervals.csv")
        write_interval_csv(records, path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert tuple(rows[0]) == INTERVAL_COLUMNS
        assert len(rows) == 3
        parsed = [float(v) for v in rows[1][1:]]
        assert parsed == [1.25, 0.5, radii[0], 1.0, 0.0]
        assert int(rows[2][0]) == 1
        assert float(rows[2][3]) == 0.1
