"""Piecewise-constant test image built from overlapping ellipses.

The default table is the canonical high-contrast (modified) Shepp-Logan
set of ten ellipses.  Rasterization uses center-of-pixel membership on
the rotated ellipse equation with additive intensities, which keeps the
background exactly zero so support statistics are well defined.

Pixel (r, c) of a rows-by-cols image maps to the point
x = (2c + 1)/cols - 1, y = 1 - (2r + 1)/rows of the [-1, 1]^2 square.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .transforms import haar2_forward, is_power_of_two

__all__ = [
    "EllipseSpec",
    "SHEPP_LOGAN_ELLIPSES",
    "rasterize",
    "shepp_logan",
    "ground_truth_pair",
    "load_ellipses",
    "format_ellipse_table",
    "save_pgm",
    "save_complex",
    "load_complex",
]


@dataclass(frozen=True)
class EllipseSpec:
    intensity: float
    center: tuple[float, float]
    semi_axes: tuple[float, float]
    rotation: float

    def __post_init__(self):
        if self.semi_axes[0] <= 0 or self.semi_axes[1] <= 0:
            raise ValueError("semi-axes must be positive")


SHEPP_LOGAN_ELLIPSES: tuple[EllipseSpec, ...] = (
    EllipseSpec(1.0, (0.0, 0.0), (0.69, 0.92), 0.0),
    EllipseSpec(-0.8, (0.0, -0.0184), (0.6624, 0.874), 0.0),
    EllipseSpec(-0.2, (0.22, 0.0), (0.11, 0.31), -18.0),
    EllipseSpec(-0.2, (-0.22, 0.0), (0.16, 0.41), 18.0),
    EllipseSpec(0.1, (0.0, 0.35), (0.21, 0.25), 0.0),
    EllipseSpec(0.1, (0.0, 0.1), (0.046, 0.046), 0.0),
    EllipseSpec(0.1, (0.0, -0.1), (0.046, 0.046), 0.0),
    EllipseSpec(0.1, (-0.08, -0.605), (0.046, 0.023), 0.0),
    EllipseSpec(0.1, (0.0, -0.606), (0.023, 0.023), 0.0),
    EllipseSpec(0.1, (0.06, -0.605), (0.023, 0.046), 0.0),
)


def rasterize(ellipses, rows: int, cols: int) -> np.ndarray:
    """Sum of ellipse intensities at pixel centers, as a complex image."""
    if rows < 1 or cols < 1:
        raise ValueError("image dimensions must be positive")
    c = np.arange(cols)
    r = np.arange(rows)
    x = (2 * c + 1) / cols - 1.0
    y = 1.0 - (2 * r + 1) / rows
    xg, yg = np.meshgrid(x, y)
    img = np.zeros((rows, cols))
    for e in ellipses:
        theta = np.deg2rad(e.rotation)
        ct, st = np.cos(theta), np.sin(theta)
        dx = xg - e.center[0]
        dy = yg - e.center[1]
        u = dx * ct + dy * st
        v = -dx * st + dy * ct
        inside = (u / e.semi_axes[0]) ** 2 + (v / e.semi_axes[1]) ** 2 <= 1.0
        img[inside] += e.intensity
    return img.astype(complex)


def shepp_logan(rows: int, cols: int) -> np.ndarray:
    """Canonical ten-ellipse image at a power-of-two resolution."""
    if not (is_power_of_two(rows) and is_power_of_two(cols)):
        raise ValueError(f"dimensions must be powers of two, got {rows}x{cols}")
    return rasterize(SHEPP_LOGAN_ELLIPSES, rows, cols)


def ground_truth_pair(img) -> tuple[np.ndarray, np.ndarray]:
    """(vectorized image x0, vectorized 2D Haar coefficients z0)."""
    image = np.asarray(img, dtype=complex)
    if image.ndim != 2:
        raise ValueError("expected a 2D image")
    x0 = image.ravel().copy()
    z0 = haar2_forward(image).ravel()
    return x0, z0


def load_ellipses(path: str) -> tuple[EllipseSpec, ...]:
    """Parse a text table: intensity cx cy a b angle, '#' comments allowed."""
    specs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) != 6:
                raise ValueError(f"{path}:{lineno}: expected 6 numbers, got {len(parts)}")
            inten, cx, cy, a, b, angle = (float(t) for t in parts)
            specs.append(EllipseSpec(inten, (cx, cy), (a, b), angle))
    if not specs:
        raise ValueError(f"{path}: no ellipses found")
    return tuple(specs)


def format_ellipse_table(ellipses=SHEPP_LOGAN_ELLIPSES) -> str:
    lines = ["# intensity cx cy a b angle_deg"]
    for e in ellipses:
        lines.append(
            f"{e.intensity!r} {e.center[0]!r} {e.center[1]!r} "
            f"{e.semi_axes[0]!r} {e.semi_axes[1]!r} {e.rotation!r}"
        )
    return "\n".join(lines) + "\n"


def save_pgm(img, path: str) -> None:
    """8-bit ASCII graymap of the real part, linearly scaled."""
    image = np.asarray(img).real
    lo = min(0.0, float(image.min()))
    hi = float(image.max())
    span = hi - lo if hi > lo else 1.0
    scaled = np.round((image - lo) / span * 255).astype(int)
    rows, cols = image.shape
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"P2\n{cols} {rows}\n255\n")
        for r in range(rows):
            fh.write(" ".join(str(v) for v in scaled[r]) + "\n")


def save_complex(img, path: str) -> None:
    """Exact binary dump of the complex image."""
    np.save(path, np.asarray(img, dtype=complex))


def load_complex(path: str) -> np.ndarray:
    if not path.endswith(".npy"):
        path = path + ".npy"
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    return np.load(path)
