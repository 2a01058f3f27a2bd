"""Frequency-weighted k-means objective, Lloyd iterations and an exhaustive oracle.

All point sets are handled as a pair of arrays: ``coords`` of shape (n, 3) and
``freqs`` of shape (n,). Anything with ``coords``/``freqs`` attributes (such as
:class:`~cubeseg.colour_cube.QuantizedHistogram`) or a sequence of
:class:`~cubeseg.colour_cube.ColourPoint` is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError, InvalidInputError

DEFAULT_BUDGET = 10**7
_BRUTE_CHUNK = 1 << 15


@dataclass(frozen=True)
class Assignment:
    labels: tuple[int, ...]
    k: int

    def __post_init__(self):
        labels = tuple(int(v) for v in self.labels)
        object.__setattr__(self, "labels", labels)
        if self.k < 1:
            raise InvalidInputError(f"k must be >= 1, got {self.k}")
        if any(v < 0 or v >= self.k for v in labels):
            raise InvalidInputError(f"labels must lie in 0..{self.k - 1}")

    @classmethod
    def from_array(cls, labels, k: int) -> "Assignment":
        return cls(tuple(np.asarray(labels).tolist()), k)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int64)

    def membership(self) -> np.ndarray:
        """The (k, n) binary membership matrix."""
        u = np.zeros((self.k, len(self.labels)), dtype=np.uint8)
        u[self.array, np.arange(len(self.labels))] = 1
        return u

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True)
class ClusterModel:
    centroids: list  # k entries, each a length-3 ndarray or None for an empty cluster
    weights: list  # k total frequencies

    @property
    def k(self):
        return len(self.weights)


@dataclass(frozen=True)
class ObjectiveReport:
    j: float
    per_cluster: list = field(default_factory=list)


@dataclass(frozen=True)
class LloydResult:
    assignment: Assignment
    model: ClusterModel
    report: ObjectiveReport
    iterations: int
    history: list  # J after each iteration

    def __iter__(self):
        # unpacks as (assignment, model, report, iterations)
        return iter((self.assignment, self.model, self.report, self.iterations))


def point_arrays(points) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(points, "coords") and hasattr(points, "freqs"):
        coords, freqs = points.coords, points.freqs
    elif isinstance(points, tuple) and len(points) == 2 and isinstance(points[0], np.ndarray):
        coords, freqs = points
    else:
        pts = list(points)
        coords = [p.coord for p in pts]
        freqs = [p.freq for p in pts]
    coords = np.asarray(coords, dtype=np.float64).reshape(-1, 3)
    freqs = np.asarray(freqs, dtype=np.float64).reshape(-1)
    if len(coords) != len(freqs):
        raise InvalidInputError("coords and freqs differ in length")
    return coords, freqs


def batch_cluster_terms(coords, freqs, labels, k):
    """Per-cluster weighted sums of squares for a batch of label vectors.

    ``labels`` has shape (P, n). Returns ``(terms, weights, centroids)`` with
    shapes (P, k), (P, k) and (P, k, 3). Centroids of empty clusters are NaN.

    Each row's result depends only on that row, and ``np.bincount``
    accumulates in element order, so a row evaluated alone or inside a larger
    batch gives bit-identical values.
    """
    labels = np.asarray(labels, dtype=np.int64)
    P, n = labels.shape
    flat = (labels + k * np.arange(P, dtype=np.int64)[:, None]).ravel()
    size = P * k
    w = np.tile(freqs, P)
    weights = np.bincount(flat, weights=w, minlength=size)
    sums = np.empty((size, 3))
    for c in range(3):
        sums[:, c] = np.bincount(flat, weights=np.tile(freqs * coords[:, c], P), minlength=size)
    with np.errstate(invalid="ignore", divide="ignore"):
        centroids = sums / weights[:, None]
    diff = np.tile(coords, (P, 1)) - centroids[flat]
    d2 = diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1] + diff[:, 2] * diff[:, 2]
    terms = np.bincount(flat, weights=w * d2, minlength=size)
    return terms.reshape(P, k), weights.reshape(P, k), centroids.reshape(P, k, 3)


def total_from_terms(terms: np.ndarray) -> np.ndarray:
    """Sum per-cluster terms in sorted order so relabelling cannot change a single bit."""
    ordered = np.sort(terms, axis=1)
    total = np.zeros(len(terms))
    for i in range(ordered.shape[1]):
        total = total + ordered[:, i]
    return total


def batch_objective(coords, freqs, labels, k) -> np.ndarray:
    terms, _, _ = batch_cluster_terms(coords, freqs, labels, k)
    return total_from_terms(terms)


def _checked(points, a: Assignment):
    coords, freqs = point_arrays(points)
    if len(a.labels) != len(freqs):
        raise InvalidInputError(f"assignment has {len(a.labels)} labels for {len(freqs)} points")
    return coords, freqs


def _model_from(weights_row, centroid_row) -> ClusterModel:
    centroids = [c.copy() if w > 0 else None for w, c in zip(weights_row, centroid_row)]
    return ClusterModel(centroids, [float(w) for w in weights_row])


def weighted_centroids(points, a: Assignment) -> ClusterModel:
    coords, freqs = _checked(points, a)
    _, weights, centroids = batch_cluster_terms(coords, freqs, a.array[None, :], a.k)
    return _model_from(weights[0], centroids[0])


def objective_j(points, a: Assignment) -> ObjectiveReport:
    coords, freqs = _checked(points, a)
    terms, _, _ = batch_cluster_terms(coords, freqs, a.array[None, :], a.k)
    return ObjectiveReport(float(total_from_terms(terms)[0]), [float(t) for t in terms[0]])


def nearest_labels(coords, centroids, present) -> np.ndarray:
    """Nearest present centroid per point; ties go to the lowest cluster index."""
    diff = coords[:, None, :] - centroids[None, :, :]
    d2 = diff[..., 0] ** 2 + diff[..., 1] ** 2 + diff[..., 2] ** 2
    d2[:, ~present] = np.inf
    return np.argmin(d2, axis=1)


def lloyd(points, k: int, seed: int = 0, max_iter: int = 100) -> LloydResult:
    """Classical alternating k-means on weighted points.

    Initial centroids are ``k`` distinct points drawn without replacement with
    probability proportional to frequency.
    """
    coords, freqs = point_arrays(points)
    n = len(freqs)
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    if k > n:
        raise InvalidInputError(f"k={k} exceeds the number of points n={n}")
    if max_iter < 1:
        raise InvalidInputError("max_iter must be >= 1")
    rng = np.random.default_rng(seed)
    start = rng.choice(n, size=k, replace=False, p=freqs / freqs.sum())
    centroids = coords[np.sort(start)].copy()
    present = np.ones(k, dtype=bool)
    labels = None
    history = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_labels = nearest_labels(coords, centroids, present)
        changed = labels is None or not np.array_equal(new_labels, labels)
        labels = new_labels
        terms, weights, cents = batch_cluster_terms(coords, freqs, labels[None, :], k)
        history.append(float(total_from_terms(terms)[0]))
        present = weights[0] > 0
        centroids = np.where(present[:, None], cents[0], 0.0)
        if not changed:
            break
    a = Assignment.from_array(labels, k)
    model = _model_from(weights[0], cents[0])
    report = ObjectiveReport(history[-1], [float(t) for t in terms[0]])
    return LloydResult(a, model, report, iterations, history)


def brute_force_optimum(points, k: int, budget: int = DEFAULT_BUDGET) -> tuple[Assignment, ObjectiveReport]:
    """Exhaustive minimum of J over all k**n label vectors.

    Label vectors are visited in lexicographic order and only a strictly
    smaller J replaces the incumbent, so ties resolve to the lexicographically
    smallest vector.
    """
    coords, freqs = point_arrays(points)
    n = len(freqs)
    if n == 0:
        raise InvalidInputError("no points")
    if k < 1:
        raise InvalidInputError(f"k must be >= 1, got {k}")
    total = k**n
    if total > budget:
        raise BudgetExceededError(f"{k}**{n} = {total} assignments exceeds the budget of {budget}")
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    best_j, best_code = np.inf, 0
    for start in range(0, total, _BRUTE_CHUNK):
        codes = np.arange(start, min(start + _BRUTE_CHUNK, total), dtype=np.int64)
        labels = (codes[:, None] // powers[None, :]) % k
        js = batch_objective(coords, freqs, labels, k)
        i = int(np.argmin(js))
        if js[i] < best_j:
            best_j, best_code = float(js[i]), int(codes[i])
    labels = (best_code // powers) % k
    a = Assignment.from_array(labels, k)
    return a, objective_j((coords, freqs), a)
