"""Confidence-disc radii, coverage evaluation, and interval export.

The Gaussian error term W has independent complex-Gaussian coordinates
with variance Var(W_i) = sigma^2 * noise_gram_diagonal(op)_i, so the
disc of radius sqrt(Var(W_i) * log(1/alpha)) around the debiased value
covers the truth with probability 1 - alpha whenever the remainder is
negligible (P(|Z| > t) = exp(-t^2 / E|Z|^2) for complex Gaussian Z).

Two radius modes ship: ``exact_variance`` uses that tail bound with the
exactly computed covariance diagonal; ``paper_literal`` evaluates
sigma * sqrt(gram_diagonal_i) / normalization * sqrt(log(1/alpha))
instead.  The two differ by a factor close to sqrt(normalization) for
unweighted operators; neither is silently substituted for the other.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .operators import MeasurementOperator, gram_diagonal, noise_gram_diagonal

__all__ = [
    "RADII_MODES",
    "ConfidenceReport",
    "confidence_radii",
    "coverage",
    "build_report",
    "interval_export",
    "write_interval_csv",
    "INTERVAL_COLUMNS",
]

RADII_MODES = ("exact_variance", "paper_literal")

_SUPPORT_TOL = 1e-12

INTERVAL_COLUMNS = ("index", "center_re", "center_im", "radius", "truth_re", "truth_im")


@dataclass(frozen=True)
class ConfidenceReport:
    radii: np.ndarray
    alpha: float
    coverage_overall: float
    coverage_support: float
    mode: str


def confidence_radii(
    op: MeasurementOperator,
    sigma: float,
    alpha: float,
    mode: str = "exact_variance",
) -> np.ndarray:
    """Per-coordinate disc radii at significance alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if mode not in RADII_MODES:
        raise ValueError(f"unknown radii mode {mode!r}")
    tail = math.log(1.0 / alpha)
    if mode == "exact_variance":
        variance = sigma**2 * noise_gram_diagonal(op)
        return np.sqrt(variance * tail)
    diag = gram_diagonal(op).diag
    return sigma * np.sqrt(diag) / op.normalization * math.sqrt(tail)


def coverage(ground_truth, debiased, radii) -> tuple[float, float]:
    """(overall fraction covered, fraction covered on the support)."""
    truth = np.asarray(ground_truth, dtype=complex).ravel()
    center = np.asarray(debiased, dtype=complex).ravel()
    r = np.asarray(radii, dtype=float).ravel()
    if truth.size != center.size or truth.size != r.size:
        raise ValueError("ground truth, debiased, and radii lengths must agree")
    hit = np.abs(center - truth) <= r
    overall = float(np.mean(hit)) if truth.size else 1.0
    support = np.abs(truth) > _SUPPORT_TOL
    on_support = float(np.mean(hit[support])) if np.any(support) else 1.0
    return overall, on_support


def build_report(
    op: MeasurementOperator,
    sigma: float,
    alpha: float,
    ground_truth,
    debiased,
    mode: str = "exact_variance",
) -> ConfidenceReport:
    radii = confidence_radii(op, sigma, alpha, mode)
    overall, support = coverage(ground_truth, debiased, radii)
    return ConfidenceReport(
        radii=radii,
        alpha=alpha,
        coverage_overall=overall,
        coverage_support=support,
        mode=mode,
    )


def interval_export(debiased, radii, line: int, shape, truth=None) -> list[dict]:
    """Per-pixel interval records along one image row, for errorbar plots."""
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    center = np.asarray(debiased, dtype=complex).ravel()
    r = np.asarray(radii, dtype=float).ravel()
    if center.size == 0:
        return []
    if len(shape) == 1:
        rows, cols = 1, shape[0]
    else:
        rows, cols = shape
    if center.size != rows * cols or r.size != center.size:
        raise ValueError("debiased and radii must match the given shape")
    if not 0 <= line < rows:
        raise ValueError(f"row {line} outside image with {rows} rows")
    truth_flat = None
    if truth is not None:
        truth_flat = np.asarray(truth, dtype=complex).ravel()
        if truth_flat.size != center.size:
            raise ValueError("truth length must match debiased length")
    records = []
    for c in range(cols):
        i = line * cols + c
        rec = {
            "index": i,
            "center_re": float(center[i].real),
            "center_im": float(center[i].imag),
            "radius": float(r[i]),
            "truth_re": float(truth_flat[i].real) if truth_flat is not None else float("nan"),
            "truth_im": float(truth_flat[i].imag) if truth_flat is not None else float("nan"),
        }
        records.append(rec)
    return records


def write_interval_csv(records: list[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(INTERVAL_COLUMNS)
        for rec in records:
            writer.writerow([repr(rec[c]) if c != "index" else rec[c] for c in INTERVAL_COLUMNS])
