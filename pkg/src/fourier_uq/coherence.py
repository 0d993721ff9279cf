"""Local coherence of the Fourier basis against the Haar basis.

For the unitary DFT matrix F and orthonormal Haar matrix H, the local
coherence of row j is ``kappa_j = max_k |(F H*)_{jk}|``.  It induces a
variable-density sampling measure ``nu_j = kappa_j^2 / ||kappa||_2^2``
and preconditioner weights ``d_j = ||kappa||_2 / kappa_j``, which satisfy
``nu_j * d_j^2 = 1`` exactly.

The 2D profile factorizes: a 2D Fourier row is a separable (outer
product) image, so its 2D Haar transform is the outer product of the 1D
transforms and the max modulus is the product of the 1D maxima.  We
exploit that to compute exact 2D profiles at 1D cost.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .transforms import haar_forward_batch, is_power_of_two

__all__ = [
    "CoherenceProfile",
    "local_coherence",
    "nu_measure",
    "precondition_weights",
    "save_profile",
    "load_profile",
    "CONVENTION_TAG",
]

# Identifies the transform conventions the cached values were computed
# under; bumped whenever the DFT or Haar definitions change.
CONVENTION_TAG = "dft-ortho.haar-cascade.v1"

_CHUNK = 256


@dataclass(frozen=True)
class CoherenceProfile:
    """Exact local coherences and the quantities derived from them."""

    shape: tuple[int, ...]
    kappa: np.ndarray
    nu: np.ndarray
    d: np.ndarray
    kappa_norm: float

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))


def nu_measure(kappa) -> np.ndarray:
    """Sampling probabilities proportional to the squared local coherence."""
    k = np.asarray(kappa, dtype=float)
    if np.any(k <= 0):
        raise ValueError("local coherences must be strictly positive")
    return k**2 / np.sum(k**2)


def precondition_weights(kappa) -> np.ndarray:
    """Diagonal weights d_j = ||kappa||_2 / kappa_j."""
    k = np.asarray(kappa, dtype=float)
    if np.any(k <= 0):
        raise ValueError("local coherences must be strictly positive")
    return np.linalg.norm(k) / k


def _kappa_1d(n: int) -> np.ndarray:
    """Max Haar-domain modulus of each unitary Fourier row, length n."""
    if n == 1:
        return np.ones(1)
    kappa = np.empty(n)
    grid = np.arange(n)
    for start in range(0, n, _CHUNK):
        js = grid[start : start + _CHUNK]
        rows = np.exp(-2j * np.pi * np.outer(js, grid) / n) / np.sqrt(n)
        kappa[start : start + _CHUNK] = np.abs(haar_forward_batch(rows)).max(axis=1)
    return kappa


def _profile_from_kappa(shape: tuple[int, ...], kappa: np.ndarray) -> CoherenceProfile:
    norm = float(np.linalg.norm(kappa))
    return CoherenceProfile(
        shape=shape,
        kappa=kappa,
        nu=nu_measure(kappa),
        d=precondition_weights(kappa),
        kappa_norm=norm,
    )


def local_coherence(shape, cache_dir: str | None = None) -> CoherenceProfile:
    """Exact coherence profile for a 1D signal ``(n,)`` or image ``(rows, cols)``.

    When ``cache_dir`` is given, the kappa vector is loaded from disk if a
    cache entry with a matching convention tag exists, otherwise computed
    and written back.
    """
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    if len(shape) not in (1, 2) or not all(is_power_of_two(s) for s in shape):
        raise ValueError(f"unsupported dimensions {shape}: need powers of two, 1D or 2D")

    if cache_dir is not None:
        cached = load_profile(shape, cache_dir)
        if cached is not None:
            return cached

    if len(shape) == 1:
        kappa = _kappa_1d(shape[0])
    else:
        rows, cols = shape
        # row-major frequency index j = p*cols + q, so the 2D profile is
        # the outer product of the 1D profiles
        kappa = np.outer(_kappa_1d(rows), _kappa_1d(cols)).ravel()

    profile = _profile_from_kappa(shape, kappa)
    if cache_dir is not None:
        save_profile(profile, cache_dir)
    return profile


def _cache_path(shape: tuple[int, ...], cache_dir: str) -> str:
    name = "x".join(str(s) for s in shape)
    return os.path.join(cache_dir, f"coherence_{name}.txt")


def save_profile(profile: CoherenceProfile, cache_dir: str) -> str:
    """Write the kappa table as text: a header line, then one value per line."""
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(profile.shape, cache_dir)
    rows = profile.shape[0]
    cols = profile.shape[1] if len(profile.shape) == 2 else 1
    lines = [f"{rows} {cols} {CONVENTION_TAG}"]
    lines.extend(repr(float(k)) for k in profile.kappa)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def load_profile(shape, cache_dir: str) -> CoherenceProfile | None:
    """Load a cached profile; None if absent or written under other conventions."""
    shape = tuple(int(s) for s in np.atleast_1d(shape))
    path = _cache_path(shape, cache_dir)
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[2] != CONVENTION_TAG:
            return None
        rows, cols = int(header[0]), int(header[1])
        expected = (rows,) if len(shape) == 1 else (rows, cols)
        if expected != shape:
            return None
        kappa = np.array([float(line) for line in fh if line.strip()])
    if kappa.size != int(np.prod(shape)):
        return None
    return _profile_from_kappa(shape, kappa)
