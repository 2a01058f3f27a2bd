"""Map a partition of the quantized colour cube back onto image pixels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import Assignment, ClusterModel
from .colour_cube import QuantizedHistogram, as_rgb_array
from .errors import ConsistencyError, InvalidInputError


@dataclass(frozen=True, eq=False)
class LabelImage:
    labels: np.ndarray  # (H, W) int64
    k: int

    @property
    def shape(self):
        return self.labels.shape


@dataclass(frozen=True)
class ClusterStats:
    pixel_count: int
    mean_colour: tuple[float, float, float] | None


@dataclass(frozen=True, eq=False)
class SegmentationOutput:
    label_image: LabelImage
    rendered: np.ndarray  # (H, W, 3) uint8
    masks: list  # k boolean (H, W) arrays, True where the pixel belongs to the cluster
    stats: list  # k ClusterStats

    def mask_image(self, i: int) -> np.ndarray:
        """Mask ``i`` as an 8-bit image: cluster pixels black, the rest white."""
        return np.where(self.masks[i], 0, 255).astype(np.uint8)


def subcube_positions(image, q: QuantizedHistogram) -> np.ndarray:
    rgb = as_rgb_array(image).astype(np.int64)
    per_axis = 256 // q.side
    idx = rgb // q.side
    packed = (idx[..., 0] * per_axis + idx[..., 1]) * per_axis + idx[..., 2]
    pos = q.lookup_table()[packed]
    if (pos < 0).any():
        raise ConsistencyError("image contains colours outside the quantized histogram")
    return pos


def label_pixels(image, q: QuantizedHistogram, a: Assignment) -> LabelImage:
    if len(a.labels) != len(q):
        raise InvalidInputError(f"assignment has {len(a.labels)} labels for {len(q)} points")
    pos = subcube_positions(image, q)
    return LabelImage(a.array[pos], a.k)


def round_channel(values) -> np.ndarray:
    """Round half up and clamp to 0..255."""
    return np.clip(np.floor(np.asarray(values, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def render_and_mask(l: LabelImage, m: ClusterModel, image=None) -> SegmentationOutput:
    """Centroid-coloured rendering, per-cluster masks and pixel statistics.

    Mean colours in the stats are taken over the pixels of ``image`` when it is
    given; otherwise they are left as ``None``.
    """
    if m.k != l.k:
        raise InvalidInputError(f"model has k={m.k}, label image has k={l.k}")
    labels = l.labels
    counts = np.bincount(labels.ravel(), minlength=l.k)
    palette = np.zeros((l.k, 3), dtype=np.uint8)
    for i, c in enumerate(m.centroids):
        if c is None:
            if counts[i]:
                raise ConsistencyError(f"cluster {i} owns {counts[i]} pixels but has no centroid")
            continue
        palette[i] = round_channel(c)
    rendered = palette[labels]
    masks = [labels == i for i in range(l.k)]

    means = [None] * l.k
    if image is not None:
        rgb = as_rgb_array(image)
        if rgb.shape[:2] != labels.shape:
            raise InvalidInputError("image and label image differ in size")
        flat = labels.ravel()
        sums = np.stack([np.bincount(flat, weights=rgb[..., c].ravel().astype(np.float64), minlength=l.k) for c in range(3)], axis=1)
        means = [tuple(float(v) for v in sums[i] / counts[i]) if counts[i] else None for i in range(l.k)]
    stats = [ClusterStats(int(counts[i]), means[i]) for i in range(l.k)]
    return SegmentationOutput(l, rendered, masks, stats)


def segment(image, q: QuantizedHistogram, a: Assignment, m: ClusterModel) -> SegmentationOutput:
    return render_and_mask(label_pixels(image, q, a), m, image)
