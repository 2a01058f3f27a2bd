import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubeseg.clustering import Assignment, brute_force_optimum, objective_j
from cubeseg.errors import ConfigurationError, InvalidInputError
from cubeseg.genetic import (
    GaConfig,
    _Breeder,
    bits_to_str,
    chromosome_length,
    decode,
    decode_population,
    encode,
    mutate,
    one_point_crossover,
    run_ga,
    tournament_select,
)
from cubeseg.synthetic import random_instance


@pytest.mark.parametrize("n, k, expected", [
    (156, 6, 468), (1, 2, 1), (512, 6, 1536), (10, 1, 0), (10, 8, 30), (10, 9, 40),
])
def test_chromosome_length(n, k, expected):
    assert chromosome_length(n, k) == expected


@pytest.mark.parametrize("block, label", [("000", 0), ("101", 5), ("111", 1), ("110", 0)])
def test_decode_blocks(block, label):
    assert decode(block, 1, 6).labels == (label,)


def test_decode_wrong_length():
    with pytest.raises(InvalidInputError):
        decode("0101", 1, 6)


def test_encode_examples():
    assert bits_to_str(encode(Assignment((0,), 2))) == "0"
    assert bits_to_str(encode(Assignment((5, 0), 6))) == "101000"
    assert len(encode(Assignment((0, 0, 0), 1))) == 0


def test_round_trip_1000(rng):
    for _ in range(1000):
        k = int(rng.integers(1, 17))
        n = int(rng.integers(1, 40))
        a = Assignment.from_array(rng.integers(0, k, n), k)
        c = encode(a)
        assert len(c) == chromosome_length(n, k)
        assert decode(c, n, k) == a


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 16), st.lists(st.integers(0, 1), min_size=1, max_size=60), st.integers(1, 20))
def test_any_bit_string_decodes_to_valid_assignment(k, raw, n):
    b = chromosome_length(1, k)
    bits = (raw * (n * b))[: n * b]
    a = decode(np.array(bits, np.uint8), n, k)
    assert len(a.labels) == n and all(0 <= v < k for v in a.labels)
    assert (a.membership().sum(axis=0) == 1).all()


def test_crossover_examples():
    c1, c2 = one_point_crossover("0000", "1111", 2)
    assert (bits_to_str(c1), bits_to_str(c2)) == ("0011", "1100")
    c1, c2 = one_point_crossover("0000", "1111", 1)
    assert (bits_to_str(c1), bits_to_str(c2)) == ("0111", "1000")
    c1, c2 = one_point_crossover("0110", "0110", 3)
    assert bits_to_str(c1) == bits_to_str(c2) == "0110"


def test_crossover_errors():
    with pytest.raises(InvalidInputError):
        one_point_crossover("000", "1111", 1)
    with pytest.raises(InvalidInputError):
        one_point_crossover("0000", "1111", 4)
    with pytest.raises(InvalidInputError):
        one_point_crossover("0000", "1111", 0)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_crossover_conserves_bits_per_position(data):
    L = data.draw(st.integers(2, 50))
    p1 = np.array(data.draw(st.lists(st.integers(0, 1), min_size=L, max_size=L)), np.uint8)
    p2 = np.array(data.draw(st.lists(st.integers(0, 1), min_size=L, max_size=L)), np.uint8)
    cut = data.draw(st.integers(1, L - 1))
    c1, c2 = one_point_crossover(p1, p2, cut)
    assert np.array_equal(c1 + c2, p1 + p2)


def test_mutation_rates(rng):
    c = rng.integers(0, 2, 468).astype(np.uint8)
    for _ in range(50):
        assert np.array_equal(mutate(c, 0.0, rng), c)
        assert int((mutate(c, 1.0, rng) != c).sum()) == 1
    out = [mutate(c, 0.85, np.random.default_rng(7)) for _ in range(2)]
    assert np.array_equal(out[0], out[1])


def test_mutation_bit_mode(rng):
    c = np.zeros(1000, np.uint8)
    assert np.array_equal(mutate(c, 0.0, rng, mode="bit"), c)
    assert mutate(c, 1.0, rng, mode="bit").sum() == 1000
    flips = mutate(c, 0.25, rng, mode="bit").sum()
    assert 150 < flips < 350


def test_mutation_frequency(rng):
    c = np.zeros(64, np.uint8)
    hits = sum(int(mutate(c, 0.85, rng).any()) for _ in range(4000))
    assert abs(hits / 4000 - 0.85) < 0.03


class FixedDraws:
    def __init__(self, draws):
        self.draws = draws

    def integers(self, low, high, size):
        return np.array(self.draws).reshape(size)


def test_tournament_examples():
    fit = [5.0, 3.0, 3.0, 9.0]
    assert tournament_select(fit, fit, 2, FixedDraws([0, 1])) == 1
    assert tournament_select(fit, fit, 2, FixedDraws([2, 1])) == 1
    assert tournament_select(fit, fit, 1, FixedDraws([3])) == 3
    assert tournament_select(fit, fit, 3, FixedDraws([3, 3, 0])) == 0


def test_tournament_uniform_with_size_one(rng):
    fit = np.arange(5.0)
    picks = [tournament_select(fit, fit, 1, rng) for _ in range(5000)]
    counts = np.bincount(picks, minlength=5)
    assert counts.min() > 850


@pytest.mark.parametrize("kwargs", [
    dict(crossover_rate=1.5), dict(mutation_rate=-0.1), dict(elite_count=50),
    dict(tournament_size=51), dict(tournament_size=0), dict(population_size=0),
    dict(generations=0), dict(k=0), dict(mutation_mode="gene"), dict(crossover_granularity="x"),
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigurationError):
        GaConfig(**kwargs)


def test_config_defaults():
    cfg = GaConfig()
    assert (cfg.population_size, cfg.generations, cfg.crossover_rate, cfg.mutation_rate) == (50, 10000, 0.95, 0.85)
    assert (cfg.tournament_size, cfg.elite_count, cfg.k) == (2, 1, 6)


def test_single_point_single_cluster():
    res = run_ga((np.array([[1.0, 2.0, 3.0]]), np.array([4.0])), GaConfig(k=1, generations=3))
    assert res.best_j == 0.0 and res.trace[0].best_so_far_j == 0.0
    assert res.best_assignment.labels == (0,)


def test_empty_points():
    with pytest.raises(InvalidInputError):
        run_ga((np.zeros((0, 3)), np.zeros(0)), GaConfig(k=2, generations=1))


def three_blobs():
    rng = np.random.default_rng(0)
    centres = np.array([[16, 16, 16], [128, 128, 128], [240, 240, 240]], float)
    coords = np.repeat(centres, 3, axis=0) + rng.uniform(-6, 6, size=(9, 3))
    return coords, np.ones(9)


def test_three_blobs_reach_oracle():
    points = three_blobs()
    _, opt = brute_force_optimum(points, 3)
    res = run_ga(points, GaConfig(k=3, generations=500, seed=1))
    assert res.best_j == pytest.approx(opt.j, rel=1e-9)


def test_trace_shape_and_monotone(rng):
    coords, freqs = random_instance(rng, 40, max_freq=100)
    res = run_ga((coords, freqs), GaConfig(k=4, generations=200, seed=5))
    assert len(res.trace) == 201
    assert [r.generation for r in res.trace] == list(range(201))
    best = res.best_so_far()
    assert (np.diff(best) <= 0).all()
    assert all(r.gen_best_j <= r.gen_mean_j * (1 + 1e-12) for r in res.trace)
    assert res.evaluations == 50 * 201
    assert res.best_j == best[-1]


def test_fitness_equals_objective(rng):
    coords, freqs = random_instance(rng, 30, max_freq=1000)
    res = run_ga((coords, freqs), GaConfig(k=5, generations=50, seed=2))
    assert objective_j((coords, freqs), res.best_assignment).j == res.best_j
    assert decode(res.best_chromosome, 30, 5) == res.best_assignment


@pytest.mark.parametrize("extra", [{}, dict(mutation_mode="bit", mutation_rate=0.01),
                                   dict(crossover_granularity="label"), dict(elite_count=0),
                                   dict(population_size=7, elite_count=2)])
def test_determinism(rng, extra):
    coords, freqs = random_instance(rng, 25)
    cfg = GaConfig(k=3, generations=60, seed=11, **extra)
    a, b = run_ga((coords, freqs), cfg), run_ga((coords, freqs), cfg)
    assert a.best_assignment == b.best_assignment
    assert a.trace == b.trace
    c = run_ga((coords, freqs), cfg.with_(seed=12))
    assert c.trace != a.trace


def test_label_granularity_cuts_on_boundaries(rng):
    breeder = _Breeder(GaConfig(k=6, crossover_granularity="label"), 20)
    cuts = breeder._cuts(rng)
    assert (cuts % 3 == 0).all() and cuts.min() >= 3 and cuts.max() <= 57


def test_label_granularity_single_point():
    # no interior label boundary exists; the bit-level fallback keeps the run valid
    res = run_ga((np.array([[0.0, 0, 0]]), np.array([1.0])), GaConfig(k=4, generations=5, crossover_granularity="label"))
    assert len(res.trace) == 6


def test_seeded_initial_population(rng):
    coords, freqs = random_instance(rng, 12)
    best, opt = brute_force_optimum((coords, freqs), 2)
    res = run_ga((coords, freqs), GaConfig(k=2, generations=1), initial=[best])
    assert res.trace[0].best_so_far_j == opt.j


def test_population_invariants(rng):
    coords, freqs = random_instance(rng, 9)
    cfg = GaConfig(k=3, population_size=9, elite_count=3, generations=20)
    res = run_ga((coords, freqs), cfg)
    assert res.evaluations == 9 * 21
    assert len(res.best_chromosome) == chromosome_length(9, 3)
    assert decode_population(np.zeros((4, 18), np.uint8), 9, 3).shape == (4, 9)
