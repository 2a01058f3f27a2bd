"""Exact RGB histograms and uniform subcube pre-partition of the colour cube."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, InvalidInputError

VALID_SIDES = (1, 2, 4, 8, 16, 32, 64, 128, 256)
DEFAULT_SIDE = 32


class Rgb8(NamedTuple):
    r: int
    g: int
    b: int


class SubcubeIndex(NamedTuple):
    ir: int
    ig: int
    ib: int


@dataclass(frozen=True)
class ColourPoint:
    coord: tuple[float, float, float]
    freq: int


@dataclass(frozen=True, eq=False)
class ColourHistogram:
    """Distinct colours of an image, sorted lexicographically, with their counts."""

    colours: np.ndarray  # (m, 3) uint8
    counts: np.ndarray  # (m,) int64
    source_pixel_count: int

    @property
    def entries(self) -> dict[Rgb8, int]:
        return {Rgb8(*map(int, c)): int(n) for c, n in zip(self.colours, self.counts)}

    def __len__(self):
        return len(self.counts)


@dataclass(frozen=True, eq=False)
class QuantizedHistogram:
    """Occupied subcubes as frequency-weighted points.

    Points are ordered lexicographically by subcube index, so position ``j``
    is stable for a given image and side.
    """

    side: int
    indices: np.ndarray  # (n, 3) int64 subcube coordinates
    coords: np.ndarray  # (n, 3) float64 subcube centres
    freqs: np.ndarray  # (n,) int64

    def __len__(self):
        return len(self.freqs)

    @property
    def points(self) -> list[ColourPoint]:
        return [ColourPoint(tuple(map(float, c)), int(f)) for c, f in zip(self.coords, self.freqs)]

    @property
    def index_of(self) -> dict[SubcubeIndex, int]:
        return {SubcubeIndex(*map(int, idx)): j for j, idx in enumerate(self.indices)}

    @property
    def total_frequency(self) -> int:
        return int(self.freqs.sum())

    def lookup_table(self) -> np.ndarray:
        """Dense map from packed subcube index to point position (-1 if unoccupied)."""
        per_axis = 256 // self.side
        table = np.full(per_axis**3, -1, dtype=np.int64)
        packed = (self.indices[:, 0] * per_axis + self.indices[:, 1]) * per_axis + self.indices[:, 2]
        table[packed] = np.arange(len(self.freqs))
        return table

    def __eq__(self, other):
        if not isinstance(other, QuantizedHistogram):
            return NotImplemented
        return (
            self.side == other.side
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.coords, other.coords)
            and np.array_equal(self.freqs, other.freqs)
        )


def check_side(side) -> int:
    if isinstance(side, bool) or not isinstance(side, (int, np.integer)) or int(side) not in VALID_SIDES:
        raise ConfigurationError("cube_side", f"must be a power of two dividing 256, got {side!r}")
    return int(side)


def as_rgb_array(image) -> np.ndarray:
    """Normalise an image to an (H, W, 3) uint8 array.

    Greyscale is replicated across channels; a fourth (alpha) channel is dropped.
    """
    arr = np.asarray(image)
    if arr.size == 0:
        raise InvalidInputError("image is empty")
    if arr.ndim == 2:
        arr = np.repeat(arr[:, :, None], 3, axis=2)
    elif arr.ndim == 3 and arr.shape[2] in (3, 4):
        arr = arr[:, :, :3]
    elif arr.ndim == 3 and arr.shape[2] == 1:
        arr = np.repeat(arr, 3, axis=2)
    else:
        raise InvalidInputError(f"unsupported image shape {arr.shape}")
    if arr.dtype != np.uint8:
        if np.issubdtype(arr.dtype, np.integer) and arr.min() >= 0 and arr.max() <= 255:
            arr = arr.astype(np.uint8)
        else:
            raise InvalidInputError("image channels must be integers in 0..255")
    return np.ascontiguousarray(arr)


def _pack(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.int64)
    return (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]


def build_histogram(image) -> ColourHistogram:
    rgb = as_rgb_array(image)
    packed, counts = np.unique(_pack(rgb).ravel(), return_counts=True)
    colours = np.stack([(packed >> 16) & 255, (packed >> 8) & 255, packed & 255], axis=1)
    return ColourHistogram(colours.astype(np.uint8), counts.astype(np.int64), int(rgb.shape[0] * rgb.shape[1]))


def subcube_of(c, side: int) -> SubcubeIndex:
    side = check_side(side)
    r, g, b = (int(v) for v in c)
    if not all(0 <= v <= 255 for v in (r, g, b)):
        raise InvalidInputError(f"colour {tuple(c)} outside 0..255")
    return SubcubeIndex(r // side, g // side, b // side)


def center_of(i, side: int) -> tuple[float, float, float]:
    side = check_side(side)
    per_axis = 256 // side
    if not all(0 <= int(v) < per_axis for v in i):
        raise InvalidInputError(f"subcube index {tuple(i)} out of range for side {side}")
    half = (side - 1) / 2.0
    return tuple(int(v) * side + half for v in i)


def quantize(h: ColourHistogram, side: int = DEFAULT_SIDE) -> QuantizedHistogram:
    side = check_side(side)
    if len(h) == 0:
        raise InvalidInputError("histogram is empty")
    per_axis = 256 // side
    idx = h.colours.astype(np.int64) // side
    packed = (idx[:, 0] * per_axis + idx[:, 1]) * per_axis + idx[:, 2]
    occupied, inverse = np.unique(packed, return_inverse=True)
    freqs = np.zeros(len(occupied), dtype=np.int64)
    np.add.at(freqs, inverse.ravel(), h.counts)
    indices = np.stack([occupied // (per_axis * per_axis), (occupied // per_axis) % per_axis, occupied % per_axis], axis=1)
    coords = indices.astype(np.float64) * side + (side - 1) / 2.0
    return QuantizedHistogram(side, indices, coords, freqs)


def quantize_image(image, side: int = DEFAULT_SIDE) -> QuantizedHistogram:
    return quantize(build_histogram(image), side)
