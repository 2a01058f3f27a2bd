"""Synthetic map-like test images and random clustering instances."""

from __future__ import annotations

import numpy as np

# background, water, park, road, contour, lettering
MAP_COLOURS = np.array([
    [240, 236, 220],
    [40, 100, 210],
    [50, 160, 60],
    [215, 40, 40],
    [140, 90, 30],
    [20, 20, 20],
], dtype=np.int64)


def map_image(size: int = 128, noise: int = 8, seed: int = 0, colours=MAP_COLOURS):
    """Six-class map-like image and its ground-truth class grid.

    Classes are laid out as Voronoi cells of jittered seeds on a coarse grid,
    with two straight "roads" and a block of "lettering" drawn on top; each
    pixel gets its class colour plus uniform integer noise in ``[-noise, noise]``.
    """
    rng = np.random.default_rng(seed)
    k = len(colours)
    yy, xx = np.mgrid[0:size, 0:size]
    seeds = rng.uniform(0, size, size=(3 * k, 2))
    seed_class = np.arange(3 * k) % k
    d2 = (yy[..., None] - seeds[:, 0]) ** 2 + (xx[..., None] - seeds[:, 1]) ** 2
    truth = seed_class[np.argmin(d2, axis=-1)]
    road = k - 3 if k >= 3 else 0
    width = max(2, size // 32)
    r0, c0 = rng.integers(size // 4, 3 * size // 4, size=2)
    truth[r0:r0 + width, :] = road
    truth[:, c0:c0 + width] = road
    if k >= 6:
        top, left = rng.integers(0, size - size // 4, size=2)
        block = truth[top:top + size // 4, left:left + size // 4]
        block[(np.arange(block.shape[0])[:, None] // 2 + np.arange(block.shape[1])[None, :] // 3) % 3 == 0] = k - 1
    jitter = rng.integers(-noise, noise + 1, size=(size, size, 3))
    image = np.clip(colours[truth] + jitter, 0, 255).astype(np.uint8)
    return image, truth


def random_instance(rng, n: int, max_freq: int = 10, spread: float = 256.0):
    """Random weighted points: coordinates in [0, spread)^3, integer frequencies in 1..max_freq."""
    coords = rng.uniform(0, spread, size=(n, 3))
    freqs = rng.integers(1, max_freq + 1, size=n).astype(np.float64)
    return coords, freqs
