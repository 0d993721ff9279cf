"""Matrix-free measurement operators: row-subsampled Fourier maps with
optional inverse-Haar sparsity lifting and diagonal row weights.

An operator encodes M = diag(row_weights) * s * F_Omega * H^* where F is
the unitary DFT (1D or 2D per ``shape``), H^* is the inverse Haar
transform (skipped when ``domain == "image"``), Omega comes from a
SamplingPattern, and s = sqrt(N) when ``fourier_scale`` is
``entry_magnitude_one`` (so Fourier entries have modulus one) and s = 1
for ``unitary``.  ``normalization`` is the divisor used by the solver,
debiasing, and gram diagnostics (the number of distinct samples m for
unweighted or preconditioned pipelines, the virtual draw count n for the
reweighted pipeline).

Gram diagnostics never materialize dense matrices: they accumulate the
squared moduli of transformed Fourier rows, using the separable
outer-product structure in 2D.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .coherence import CoherenceProfile
from .sampling import SamplingPattern, expand_to_with_replacement
from .transforms import (
    dft2_adjoint,
    dft2_forward,
    dft_adjoint,
    dft_forward,
    haar2_adjoint,
    haar2_forward,
    haar_adjoint,
    haar_forward,
    haar_forward_batch,
)

__all__ = [
    "MeasurementOperator",
    "GramDiagnostics",
    "standard_operator",
    "preconditioned_operator",
    "reweighted_operator",
    "op_forward",
    "op_adjoint",
    "unweighted_forward",
    "gram_diagonal",
    "noise_gram_diagonal",
    "multiset_gram_identity_check",
]

_DOMAINS = ("image", "haar")
_SCALES = ("unitary", "entry_magnitude_one")

# Dense gram assembly is test/diagnostic machinery; cap the signal size.
_DENSE_LIMIT = 256

_ROW_CHUNK = 64


@dataclass(frozen=True)
class MeasurementOperator:
    """Immutable description of one weighted subsampled-Fourier map."""

    pattern: SamplingPattern
    shape: tuple[int, ...]
    row_weights: np.ndarray
    domain: str
    normalization: int
    fourier_scale: str

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        object.__setattr__(self, "shape", shape)
        weights = np.asarray(self.row_weights, dtype=float)
        object.__setattr__(self, "row_weights", weights)
        if len(shape) not in (1, 2) or any(s < 1 for s in shape):
            raise ValueError(f"unsupported signal shape {shape}")
        if self.domain not in _DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.fourier_scale not in _SCALES:
            raise ValueError(f"unknown fourier_scale {self.fourier_scale!r}")
        if int(self.normalization) < 1:
            raise ValueError("normalization must be a positive integer")
        object.__setattr__(self, "normalization", int(self.normalization))
        if weights.shape != (self.pattern.m,):
            raise ValueError("row_weights must have one entry per sampled row")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("row_weights must be finite and nonnegative")
        if int(self.pattern.omega.max()) >= self.size:
            raise ValueError("pattern indexes rows outside the signal size")

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def m(self) -> int:
        return self.pattern.m

    def with_domain(self, domain: str) -> "MeasurementOperator":
        return dataclasses.replace(self, domain=domain)

    def forward(self, x) -> np.ndarray:
        return op_forward(self, x)

    def adjoint(self, y) -> np.ndarray:
        return op_adjoint(self, y)


@dataclass(frozen=True)
class GramDiagnostics:
    """Diagonal of M*M / normalization."""

    diag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        object.__setattr__(self, "diag", diag)
        if np.any(diag < 0):
            raise ValueError("gram diagonal entries must be nonnegative")


def standard_operator(pattern: SamplingPattern, shape) -> MeasurementOperator:
    """Unit weights, entry-magnitude-one Fourier rows, normalization m."""
    return MeasurementOperator(
        pattern=pattern,
        shape=tuple(shape),
        row_weights=np.ones(pattern.m),
        domain="haar",
        normalization=pattern.m,
        fourier_scale="entry_magnitude_one",
    )


def preconditioned_operator(
    pattern: SamplingPattern, shape, profile: CoherenceProfile
) -> MeasurementOperator:
    """Rows weighted by d_j, unitary Fourier scale, normalization m."""
    return MeasurementOperator(
        pattern=pattern,
        shape=tuple(shape),
        row_weights=profile.d[pattern.omega],
        domain="haar",
        normalization=pattern.m,
        fourier_scale="unitary",
    )


def reweighted_operator(
    pattern: SamplingPattern, shape, profile: CoherenceProfile
) -> MeasurementOperator:
    """Rows weighted by sqrt(gamma_j)*d_j, normalization n (virtual draws)."""
    weights = np.sqrt(pattern.gamma.astype(float)) * profile.d[pattern.omega]
    return MeasurementOperator(
        pattern=pattern,
        shape=tuple(shape),
        row_weights=weights,
        domain="haar",
        normalization=pattern.n,
        fourier_scale="unitary",
    )


def _scale(op: MeasurementOperator) -> float:
    return float(np.sqrt(op.size)) if op.fourier_scale == "entry_magnitude_one" else 1.0


def _as_flat(op: MeasurementOperator, x, what: str) -> np.ndarray:
    arr = np.asarray(x, dtype=complex).ravel()
    if arr.size != op.size:
        raise ValueError(f"{what} has length {arr.size}, expected {op.size}")
    return arr


def op_forward(op: MeasurementOperator, x) -> np.ndarray:
    """Apply M: weight the sampled Fourier coefficients of H^*x (or x)."""
    flat = _as_flat(op, x, "input")
    if len(op.shape) == 1:
        sig = haar_adjoint(flat) if op.domain == "haar" else flat
        freq = dft_forward(sig)
    else:
        img = flat.reshape(op.shape)
        sig = haar2_adjoint(img) if op.domain == "haar" else img
        freq = dft2_forward(sig).ravel()
    return op.row_weights * freq[op.pattern.omega] * _scale(op)


def op_adjoint(op: MeasurementOperator, y) -> np.ndarray:
    """Apply M*: scatter weighted data into frequency bins and transform back."""
    data = np.asarray(y, dtype=complex).ravel()
    if data.size != op.m:
        raise ValueError(f"data has length {data.size}, expected {op.m}")
    freq = np.zeros(op.size, dtype=complex)
    # omega may repeat under the with-replacement scheme
    np.add.at(freq, op.pattern.omega, op.row_weights * data)
    freq *= _scale(op)
    if len(op.shape) == 1:
        sig = dft_adjoint(freq)
        return haar_forward(sig) if op.domain == "haar" else sig
    sig = dft2_adjoint(freq.reshape(op.shape))
    out = haar2_forward(sig) if op.domain == "haar" else sig
    return out.ravel()


def unweighted_forward(op: MeasurementOperator, x) -> np.ndarray:
    """Forward map with unit row weights: the raw measurement model."""
    plain = dataclasses.replace(op, row_weights=np.ones(op.m))
    return op_forward(plain, x)


def _fourier_rows_1d(n: int, indices: np.ndarray) -> np.ndarray:
    grid = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(indices, grid) / n) / np.sqrt(n)


def _transformed_fourier_rows(shape, indices, domain: str) -> np.ndarray:
    """Rows of F H^* (unitary scale) for the given flat frequency indices."""
    indices = np.asarray(indices, dtype=np.int64)
    if len(shape) == 1:
        rows = _fourier_rows_1d(shape[0], indices)
        return haar_forward_batch(rows) if domain == "haar" else rows
    nrows, ncols = shape
    out = np.empty((indices.size, nrows * ncols), dtype=complex)
    for k, j in enumerate(indices):
        p, q = divmod(int(j), ncols)
        img = np.outer(_fourier_rows_1d(nrows, np.array([p]))[0], _fourier_rows_1d(ncols, np.array([q]))[0])
        if domain == "haar":
            img = haar2_forward(img)
        out[k] = img.ravel()
    return out


def _axis_power_table(n: int, domain: str) -> np.ndarray:
    """|T|^2 for every 1D Fourier row, T = Haar(row) or the row itself."""
    rows = _fourier_rows_1d(n, np.arange(n))
    if domain == "haar":
        rows = haar_forward_batch(rows)
    return np.abs(rows) ** 2


def _row_power_sums(op: MeasurementOperator) -> tuple[np.ndarray, np.ndarray]:
    """(sum_j w_j^2 |T_j|^2, sum_j w_j^4 |T_j|^2) at unitary Fourier scale."""
    w2 = op.row_weights**2
    w4 = op.row_weights**4
    omega = op.pattern.omega
    if len(op.shape) == 2:
        nrows, ncols = op.shape
        u = _axis_power_table(nrows, op.domain)
        v = _axis_power_table(ncols, op.domain)
        p_idx, q_idx = np.divmod(omega, ncols)
        up = u[p_idx]
        vq = v[q_idx]
        s2 = (up * w2[:, None]).T @ vq
        s4 = (up * w4[:, None]).T @ vq
        return s2.ravel(), s4.ravel()
    n = op.shape[0]
    s2 = np.zeros(n)
    s4 = np.zeros(n)
    for start in range(0, omega.size, _ROW_CHUNK):
        sel = slice(start, start + _ROW_CHUNK)
        t2 = np.abs(_transformed_fourier_rows(op.shape, omega[sel], op.domain)) ** 2
        s2 += w2[sel] @ t2
        s4 += w4[sel] @ t2
    return s2, s4


def gram_diagonal(op: MeasurementOperator) -> GramDiagnostics:
    """Diagonal of M*M / normalization, computed row by row."""
    s2, _ = _row_power_sums(op)
    return GramDiagnostics(diag=_scale(op) ** 2 / op.normalization * s2)


def noise_gram_diagonal(op: MeasurementOperator) -> np.ndarray:
    """Diagonal of Cov(W)/sigma^2 for W = op_adjoint(weighted noise)/normalization."""
    _, s4 = _row_power_sums(op)
    return _scale(op) ** 2 / op.normalization**2 * s4


def multiset_gram_identity_check(
    pattern: SamplingPattern, profile: CoherenceProfile
) -> float:
    """Max |difference| between the reweighted gram and its expanded twin.

    Left side: rows sqrt(gamma_i) d_i T_i over the distinct atoms.  Right
    side: rows d_i T_i over the expanded multiset (atom i repeated
    gamma_i times).  The two grams agree exactly in exact arithmetic.
    """
    if pattern.scheme != "reweighted":
        raise ValueError("gram identity check requires a reweighted pattern")
    shape = profile.shape
    N = profile.size
    if N > _DENSE_LIMIT:
        raise ValueError(f"dense gram check capped at N <= {_DENSE_LIMIT}")
    rows = _transformed_fourier_rows(shape, pattern.omega, "haar")
    left = (np.sqrt(pattern.gamma.astype(float)) * profile.d[pattern.omega])[:, None] * rows
    expanded = expand_to_with_replacement(pattern)
    rows_exp = _transformed_fourier_rows(shape, expanded, "haar")
    right = profile.d[expanded][:, None] * rows_exp
    gram_left = left.conj().T @ left
    gram_right = right.conj().T @ right
    return float(np.max(np.abs(gram_left - gram_right)))
