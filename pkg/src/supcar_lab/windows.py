"""Observation windows for integrated-field functionals.

A window is a convex bounded set containing the origin, constrained to
the unit ball so the homothety Delta(T) stays inside B(T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WindowSpec:
    """Origin-centered cube (interval for d = 1) or ball.

    ``scale`` is the side length of the cube or the radius of the ball;
    the base window must fit inside B(1).
    """

    shape: str = "cube"  # "cube" | "ball"
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.shape not in ("cube", "ball"):
            raise ValueError(f"unknown window shape {self.shape!r}")
        if self.scale <= 0.0:
            raise ValueError("scale must be > 0")

    def validate(self, d: int) -> None:
        if self.shape == "cube" and 0.5 * self.scale * math.sqrt(d) > 1.0 + 1e-12:
            raise ValueError("cube window must fit inside the unit ball")
        if self.shape == "ball" and self.scale > 1.0 + 1e-12:
            raise ValueError("ball window must fit inside the unit ball")

    def volume(self, d: int) -> float:
        if self.shape == "cube":
            return self.scale**d
        return self.scale**d * math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)

    def half_extent(self) -> float:
        """Radius of the smallest origin ball containing the window (per axis
        bound for cubes)."""
        if self.shape == "cube":
            return 0.5 * self.scale
        return self.scale

    def contains(self, pts: np.ndarray, homothety: float) -> np.ndarray:
        """Boolean mask of points inside Delta(homothety).

        ``pts`` has shape (n,) for d = 1 or (n, d) otherwise.
        """
        pts = np.asarray(pts)
        if pts.ndim == 1:
            pts = pts[:, None]
        if self.shape == "cube":
            half = 0.5 * self.scale * homothety
            return np.all(np.abs(pts) <= half, axis=-1)
        rad = self.scale * homothety
        return np.einsum("ij,ij->i", pts, pts) <= rad * rad
