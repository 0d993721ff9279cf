"""Unitary DFT and orthonormal Haar wavelet transforms with exact adjoints.

Conventions, fixed once for the whole package:

* DFT: forward kernel ``exp(-2*pi*i*j*k/N)`` scaled by ``1/sqrt(N)``
  (numpy's ``norm="ortho"``), so forward and adjoint are both isometries
  and the adjoint equals the inverse.
* Haar: full-depth cascade.  At each level a pair ``(a, b)`` maps to the
  approximation ``(a + b)/sqrt(2)`` and the detail ``(a - b)/sqrt(2)``;
  the output stores the final approximation first, then details from
  coarsest to finest.
* 2D transforms are separable: the 1D transform is applied to every row,
  then to every column.  For images this matches vectorizing row-major.

Only power-of-two lengths are supported; anything else is an error.
All functions are pure and never mutate their input.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "dft_forward",
    "dft_adjoint",
    "dft2_forward",
    "dft2_adjoint",
    "haar_forward",
    "haar_adjoint",
    "haar2_forward",
    "haar2_adjoint",
    "is_power_of_two",
]

_SQRT2 = np.sqrt(2.0)


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _require_power_of_two(n: int, what: str) -> None:
    if not is_power_of_two(n):
        raise ValueError(f"{what} must be a positive power of two, got {n}")


def _as_complex_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.complex128)
    if a.ndim != 1:
        raise ValueError(f"expected a 1D vector, got shape {a.shape}")
    if a.size == 0:
        raise ValueError("empty input")
    return a


def _as_complex_image(img) -> np.ndarray:
    a = np.asarray(img, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2D image, got shape {a.shape}")
    return a


def dft_forward(v) -> np.ndarray:
    """Unitary DFT of a 1D vector; preserves the l2 norm."""
    a = _as_complex_vector(v)
    _require_power_of_two(a.size, "DFT length")
    return np.fft.fft(a, norm="ortho")


def dft_adjoint(v) -> np.ndarray:
    """Adjoint (= inverse) of :func:`dft_forward`."""
    a = _as_complex_vector(v)
    _require_power_of_two(a.size, "DFT length")
    return np.fft.ifft(a, norm="ortho")


def dft2_forward(img) -> np.ndarray:
    """Unitary 2D DFT (separable over rows and columns)."""
    a = _as_complex_image(img)
    _require_power_of_two(a.shape[0], "image rows")
    _require_power_of_two(a.shape[1], "image cols")
    return np.fft.fft2(a, norm="ortho")


def dft2_adjoint(img) -> np.ndarray:
    a = _as_complex_image(img)
    _require_power_of_two(a.shape[0], "image rows")
    _require_power_of_two(a.shape[1], "image cols")
    return np.fft.ifft2(a, norm="ortho")


def _haar_axis_forward(a: np.ndarray, axis: int) -> np.ndarray:
    """Full-depth Haar cascade along one axis of a copied array."""
    out = np.moveaxis(a.copy(), axis, -1)
    n = out.shape[-1]
    while n > 1:
        half = n // 2
        even = out[..., 0:n:2].copy()
        odd = out[..., 1:n:2].copy()
        out[..., :half] = (even + odd) / _SQRT2
        out[..., half:n] = (even - odd) / _SQRT2
        n = half
    return np.moveaxis(out, -1, axis)


def _haar_axis_adjoint(a: np.ndarray, axis: int) -> np.ndarray:
    """Inverse cascade: undo the levels from coarsest back to finest."""
    out = np.moveaxis(a.copy(), axis, -1)
    total = out.shape[-1]
    n = 2
    while n <= total:
        half = n // 2
        approx = out[..., :half].copy()
        detail = out[..., half:n].copy()
        out[..., 0:n:2] = (approx + detail) / _SQRT2
        out[..., 1:n:2] = (approx - detail) / _SQRT2
        n *= 2
    return np.moveaxis(out, -1, axis)


def haar_forward(v) -> np.ndarray:
    """Orthonormal full-depth Haar transform of a 1D vector.

    Output layout: ``[approximation, coarsest detail, ..., finest details]``.
    """
    a = _as_complex_vector(v)
    _require_power_of_two(a.size, "Haar length")
    return _haar_axis_forward(a, 0)


def haar_adjoint(v) -> np.ndarray:
    """Adjoint (= inverse) of :func:`haar_forward`."""
    a = _as_complex_vector(v)
    _require_power_of_two(a.size, "Haar length")
    return _haar_axis_adjoint(a, 0)


def haar_forward_batch(rows: np.ndarray) -> np.ndarray:
    """Haar transform along the last axis of a 2D batch (one row at a time)."""
    a = np.asarray(rows, dtype=np.complex128)
    _require_power_of_two(a.shape[-1], "Haar length")
    return _haar_axis_forward(a, -1)


def haar2_forward(img) -> np.ndarray:
    """Separable 2D Haar transform: full-depth on rows, then on columns."""
    a = _as_complex_image(img)
    _require_power_of_two(a.shape[0], "image rows")
    _require_power_of_two(a.shape[1], "image cols")
    return _haar_axis_forward(_haar_axis_forward(a, 1), 0)


def haar2_adjoint(img) -> np.ndarray:
    a = _as_complex_image(img)
    _require_power_of_two(a.shape[0], "image rows")
    _require_power_of_two(a.shape[1], "image cols")
    return _haar_axis_adjoint(_haar_axis_adjoint(a, 0), 1)
