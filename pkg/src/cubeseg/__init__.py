"""Colour image segmentation by genetic k-means clustering of the quantized RGB cube."""

from .clustering import (
    Assignment,
    ClusterModel,
    LloydResult,
    ObjectiveReport,
    brute_force_optimum,
    lloyd,
    objective_j,
    weighted_centroids,
)
from .colour_cube import (
    ColourHistogram,
    ColourPoint,
    QuantizedHistogram,
    Rgb8,
    SubcubeIndex,
    build_histogram,
    center_of,
    quantize,
    quantize_image,
    subcube_of,
)
from .errors import (
    BudgetExceededError,
    ConfigurationError,
    ConsistencyError,
    CubesegError,
    InvalidInputError,
)
from .genetic import (
    GaConfig,
    GaResult,
    TraceRecord,
    chromosome_length,
    decode,
    encode,
    mutate,
    one_point_crossover,
    run_ga,
    tournament_select,
)
from .segmentation import LabelImage, SegmentationOutput, label_pixels, render_and_mask, segment

__version__ = "0.1.0"
