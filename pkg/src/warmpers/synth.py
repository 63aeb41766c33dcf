"""Synthetic inputs for experiments: sinusoid images and sampled shapes.

All randomness flows through numpy's Philox generator (64-bit,
counter-based) so outputs reproduce bit-for-bit for a given seed.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sinusoid_2d(n: int = 128) -> np.ndarray:
    """n x n image A[i,j] = sin(10*pi*i/n) + cos(10*pi*j/n)."""
    i = np.arange(n)
    return np.sin(10 * np.pi * i / n)[:, None] + np.cos(10 * np.pi * i / n)[None, :]


def sinusoid_3d(n: int = 32) -> np.ndarray:
    """n^3 volume A[i,j,k] = sin(4*pi*i/n) + cos(4*pi*j/n) + sin(4*pi*k/n)."""
    i = np.arange(n)
    return (np.sin(4 * np.pi * i / n)[:, None, None]
            + np.cos(4 * np.pi * i / n)[None, :, None]
            + np.sin(4 * np.pi * i / n)[None, None, :])


def add_noise(data: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    if sigma == 0:
        return np.array(data, dtype=float)
    gen = rng_for(seed)
    return np.asarray(data, dtype=float) + gen.normal(0.0, sigma, size=np.shape(data))


def circle_points(n: int, sigma: float = 0.0, seed: int = 0) -> np.ndarray:
    gen = rng_for(seed)
    theta = gen.uniform(0.0, 2 * np.pi, size=n)
    pts = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if sigma:
        pts = pts + gen.normal(0.0, sigma, size=pts.shape)
    return pts


def figure_eight_points(n: int, sigma: float = 0.0, seed: int = 0) -> np.ndarray:
    """Two unit circles tangent at the origin, sampled uniformly."""
    gen = rng_for(seed)
    theta = gen.uniform(0.0, 2 * np.pi, size=n)
    side = gen.integers(0, 2, size=n) * 2 - 1
    pts = np.stack([np.cos(theta) + side, np.sin(theta)], axis=1)
    if sigma:
        pts = pts + gen.normal(0.0, sigma, size=pts.shape)
    return pts


def sphere2_points(n: int, sigma: float = 0.0, seed: int = 0) -> np.ndarray:
    gen = rng_for(seed)
    raw = gen.normal(0.0, 1.0, size=(n, 3))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    pts = raw / norms
    if sigma:
        pts = pts + gen.normal(0.0, sigma, size=pts.shape)
    return pts


def uniform_square_points(n: int, seed: int = 0) -> np.ndarray:
    gen = rng_for(seed)
    return gen.uniform(0.0, 1.0, size=(n, 2))


def synth(kind: str, n: int = 0, sigma: float = 0.0, seed: int = 0):
    """Named generators for the CLI; images for s2d/s3d, points otherwise."""
    if kind == "s2d":
        return add_noise(sinusoid_2d(n or 128), sigma, seed)
    if kind == "s3d":
        return add_noise(sinusoid_3d(n or 32), sigma, seed)
    if kind == "circle":
        return circle_points(n or 200, sigma, seed)
    if kind == "eight":
        return figure_eight_points(n or 200, sigma, seed)
    if kind == "sphere2":
        return sphere2_points(n or 200, sigma, seed)
    raise UsageError(f"unknown synthetic kind {kind!r}")
