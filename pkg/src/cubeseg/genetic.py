"""Bit-string genetic search over cluster assignments.

A chromosome stores one ``ceil(log2 k)``-bit block per point, most significant
bit first; block values ``>= k`` wrap around modulo ``k``. Every bit string is
therefore a valid assignment with exactly one cluster per point.

The engine is generational: the ``elite_count`` best individuals are copied
unchanged, the rest of the population is bred by tournament selection,
one-point crossover and mutation. All random numbers come from a single
``numpy.random.Generator`` seeded from the config and are drawn in a fixed
order each generation, so a run is fully determined by (points, config).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .clustering import Assignment, batch_objective, point_arrays
from .errors import ConfigurationError, InvalidInputError

log = logging.getLogger(__name__)

MUTATION_MODES = ("chromosome", "bit")
CROSSOVER_GRANULARITIES = ("bit", "label")


@dataclass(frozen=True)
class GaConfig:
    k: int = 6
    population_size: int = 50
    generations: int = 10000
    crossover_rate: float = 0.95
    mutation_rate: float = 0.85
    mutation_mode: str = "chromosome"
    crossover_granularity: str = "bit"
    tournament_size: int = 2
    elite_count: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError("k", "must be >= 1")
        if self.population_size < 1:
            raise ConfigurationError("population_size", "must be >= 1")
        if self.generations < 1:
            raise ConfigurationError("generations", "must be >= 1")
        for name in ("crossover_rate", "mutation_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ConfigurationError(name, f"must be in [0, 1], got {rate}")
        if self.mutation_mode not in MUTATION_MODES:
            raise ConfigurationError("mutation_mode", f"must be one of {MUTATION_MODES}")
        if self.crossover_granularity not in CROSSOVER_GRANULARITIES:
            raise ConfigurationError("crossover_granularity", f"must be one of {CROSSOVER_GRANULARITIES}")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ConfigurationError("tournament_size", "must be in 1..population_size")
        if not 0 <= self.elite_count < self.population_size:
            raise ConfigurationError("elite_count", "must be in 0..population_size-1")

    def with_(self, **changes) -> "GaConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class TraceRecord:
    generation: int
    best_so_far_j: float
    gen_best_j: float
    gen_mean_j: float


@dataclass(frozen=True)
class GaResult:
    best_assignment: Assignment
    best_j: float
    trace: list[TraceRecord] = field(default_factory=list)
    evaluations: int = 0
    best_chromosome: np.ndarray | None = None

    def best_so_far(self) -> np.ndarray:
        return np.array([r.best_so_far_j for r in self.trace])


def bits_per_label(k: int) -> int:
    return 0 if k <= 1 else (k - 1).bit_length()


def chromosome_length(n: int, k: int) -> int:
    return n * bits_per_label(k)


def decode_population(bits: np.ndarray, n: int, k: int) -> np.ndarray:
    """Decode a (P, L) bit matrix into a (P, n) label matrix."""
    b = bits_per_label(k)
    bits = np.asarray(bits)
    P = bits.shape[0]
    if b == 0:
        return np.zeros((P, n), dtype=np.int64)
    weights = 1 << np.arange(b - 1, -1, -1, dtype=np.int64)
    values = bits.reshape(P, n, b).astype(np.int64) @ weights
    return values % k


def decode(c, n: int, k: int) -> Assignment:
    bits = _as_bits(c)
    if len(bits) != chromosome_length(n, k):
        raise InvalidInputError(f"chromosome has {len(bits)} bits, expected {chromosome_length(n, k)}")
    return Assignment.from_array(decode_population(bits[None, :], n, k)[0], k)


def encode(a: Assignment) -> np.ndarray:
    b = bits_per_label(a.k)
    labels = a.array
    shifts = np.arange(b - 1, -1, -1, dtype=np.int64)
    return ((labels[:, None] >> shifts[None, :]) & 1).astype(np.uint8).ravel()


def bits_to_str(c) -> str:
    return "".join("1" if v else "0" for v in _as_bits(c))


def _as_bits(c) -> np.ndarray:
    if isinstance(c, str):
        if set(c) - {"0", "1"}:
            raise InvalidInputError(f"not a bit string: {c!r}")
        return np.frombuffer(c.encode(), dtype=np.uint8) - ord("0")
    return np.asarray(c, dtype=np.uint8).ravel()


def one_point_crossover(p1, p2, cut: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = _as_bits(p1), _as_bits(p2)
    if len(a) != len(b):
        raise InvalidInputError("parents differ in length")
    if len(a) < 2 or not 1 <= cut <= len(a) - 1:
        raise InvalidInputError(f"cut {cut} outside 1..{len(a) - 1}")
    return np.concatenate([a[:cut], b[cut:]]), np.concatenate([b[:cut], a[cut:]])


def mutate(c, rate: float, rng: np.random.Generator, mode: str = "chromosome") -> np.ndarray:
    """Flip one uniformly chosen bit with probability ``rate``.

    ``mode="bit"`` instead flips every bit independently with probability ``rate``.
    """
    bits = _as_bits(c).copy()
    if mode == "chromosome":
        hit = rng.random() < rate
        pos = rng.integers(0, len(bits)) if len(bits) else 0
        if hit and len(bits):
            bits[pos] ^= 1
    elif mode == "bit":
        bits ^= (rng.random(len(bits)) < rate).astype(np.uint8)
    else:
        raise ConfigurationError("mutation_mode", f"must be one of {MUTATION_MODES}")
    return bits


def _tournament_winners(draws: np.ndarray, fitnesses: np.ndarray) -> np.ndarray:
    fit = fitnesses[draws]
    best = fit.min(axis=1, keepdims=True)
    return np.where(fit == best, draws, np.iinfo(np.int64).max).min(axis=1)


def tournament_select(population, fitnesses, size: int, rng: np.random.Generator) -> int:
    """Index of the lowest-J individual among ``size`` draws with replacement."""
    fitnesses = np.asarray(fitnesses, dtype=np.float64)
    if len(fitnesses) == 0 or len(population) != len(fitnesses):
        raise InvalidInputError("population and fitnesses must be non-empty and aligned")
    if size < 1:
        raise ConfigurationError("tournament_size", "must be >= 1")
    draws = rng.integers(0, len(fitnesses), size=(1, size))
    return int(_tournament_winners(draws, fitnesses)[0])


class _Breeder:
    """Vectorised operators for one generation of offspring."""

    def __init__(self, cfg: GaConfig, n: int):
        self.cfg = cfg
        self.n = n
        self.L = chromosome_length(n, cfg.k)
        self.b = bits_per_label(cfg.k)
        self.n_children = cfg.population_size - cfg.elite_count
        self.n_pairs = (self.n_children + 1) // 2
        self.positions = np.arange(self.L)

    def _cuts(self, rng):
        m = self.n_pairs
        if self.cfg.crossover_granularity == "label" and self.n >= 2:
            return rng.integers(1, self.n, size=m) * self.b
        if self.L >= 2:
            return rng.integers(1, self.L, size=m)
        return np.zeros(m, dtype=np.int64)

    def breed(self, pop: np.ndarray, fitness: np.ndarray, rng) -> np.ndarray:
        cfg, m = self.cfg, self.n_pairs
        draws = rng.integers(0, cfg.population_size, size=(2 * m, cfg.tournament_size))
        do_cross = rng.random(m) < cfg.crossover_rate
        cuts = self._cuts(rng)
        if cfg.mutation_mode == "chromosome":
            flip = rng.random(2 * m) < cfg.mutation_rate
            flip_pos = rng.integers(0, max(self.L, 1), size=2 * m)
        else:
            flip_mask = rng.random((2 * m, self.L)) < cfg.mutation_rate

        parents = _tournament_winners(draws, fitness)
        p1, p2 = pop[parents[0::2]], pop[parents[1::2]]
        if self.L >= 2:
            swap = do_cross[:, None] & (self.positions[None, :] >= cuts[:, None])
        else:
            swap = np.zeros((m, self.L), dtype=bool)
        c1 = np.where(swap, p2, p1)
        c2 = np.where(swap, p1, p2)
        children = np.empty((2 * m, self.L), dtype=np.uint8)
        children[0::2], children[1::2] = c1, c2
        if self.L:
            if cfg.mutation_mode == "chromosome":
                rows = np.nonzero(flip)[0]
                children[rows, flip_pos[rows]] ^= 1
            else:
                children ^= flip_mask.astype(np.uint8)
        return children[: self.n_children]


def run_ga(points, cfg: GaConfig, initial=None) -> GaResult:
    """Minimise the frequency-weighted J over label assignments.

    ``initial`` optionally seeds the first rows of the generation-0
    population with given assignments or bit strings.
    """
    coords, freqs = point_arrays(points)
    n, k = len(freqs), cfg.k
    if n == 0:
        raise InvalidInputError("no points to cluster")
    rng = np.random.default_rng(cfg.seed)
    L = chromosome_length(n, k)
    P = cfg.population_size

    pop = rng.integers(0, 2, size=(P, L), dtype=np.uint8)
    for i, seed_c in enumerate(initial or ()):
        if i >= P:
            break
        bits = encode(seed_c) if isinstance(seed_c, Assignment) else _as_bits(seed_c)
        if len(bits) != L:
            raise InvalidInputError("seed chromosome has the wrong length")
        pop[i] = bits

    def evaluate(population):
        return batch_objective(coords, freqs, decode_population(population, n, k), k)

    fitness = evaluate(pop)
    evaluations = P
    g_best = int(np.argmin(fitness))
    best_j, best_bits = float(fitness[g_best]), pop[g_best].copy()
    trace = [TraceRecord(0, best_j, best_j, float(fitness.mean()))]

    breeder = _Breeder(cfg, n)
    for gen in range(1, cfg.generations + 1):
        order = np.argsort(fitness, kind="stable")
        elites = pop[order[: cfg.elite_count]]
        children = breeder.breed(pop, fitness, rng)
        pop = np.concatenate([elites, children]) if cfg.elite_count else children
        fitness = evaluate(pop)
        evaluations += P
        g_best = int(np.argmin(fitness))
        if fitness[g_best] < best_j:
            best_j, best_bits = float(fitness[g_best]), pop[g_best].copy()
        trace.append(TraceRecord(gen, best_j, float(fitness[g_best]), float(fitness.mean())))
        if gen % 1000 == 0:
            log.debug("generation %d best J %.6f", gen, best_j)

    best = Assignment.from_array(decode_population(best_bits[None, :], n, k)[0], k)
    return GaResult(best, best_j, trace, evaluations, best_bits)
