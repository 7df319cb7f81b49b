import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kcenter.adversary import (
    HIGH,
    LOW,
    EAConfig,
    check_genome,
    decode,
    encode,
    evolve,
    fitness,
    mutate,
    recombine,
)
from kcenter.core import Point
from kcenter.solvers import SolverConfig, SolverKind

DRAGOON = SolverConfig(SolverKind.DRAGOON)
MACQUEEN = SolverConfig(SolverKind.MACQUEEN, seed=3)


def ea(**kw):
    base = dict(n_customers=10, k=2, challenger=MACQUEEN, challenged=DRAGOON, generations=10, seed=1)
    base.update(kw)
    return EAConfig(**base)


def test_defaults():
    cfg = EAConfig(10, 2, MACQUEEN, DRAGOON)
    assert (cfg.population, cfg.generations, cfg.mutation_sigma, cfg.recombination_prob,
            cfg.tournament_size, cfg.recombination_alpha) == (20, 100, 0.05, 0.3, 2, 0.5)


def test_config_validation():
    with pytest.raises(ValueError):
        ea(k=11)
    with pytest.raises(ValueError):
        ea(recombination_prob=1.5)


class TestDecode:
    def test_midpoint(self):
        inst = decode(np.full(4, 0.5), 1)
        assert inst.customers == (Point(50.0, 50.0), Point(50.0, 50.0))

    def test_linear(self):
        inst = decode(np.array([0.1, 0.2, 0.9, 0.4]), 2)
        assert inst.customers == (Point(10.0, 20.0), Point(90.0, 40.0))

    def test_round_trip(self):
        g = np.array([0.1, 0.2, 0.9, 0.4])
        assert np.array_equal(encode(decode(g, 1)), g)
        r = np.random.default_rng(0).random(200)
        np.testing.assert_array_max_ulp(encode(decode(r, 1)), r, maxulp=1)

    def test_check_genome(self):
        check_genome(np.full(6, 0.3), 3)
        with pytest.raises(ValueError):
            check_genome(np.full(5, 0.3))
        with pytest.raises(ValueError):
            check_genome(np.array([0.0, 0.5]))
        with pytest.raises(ValueError):
            check_genome(np.full(4, 0.3), 3)


class TestFitness:
    def test_self_comparison(self):
        g = np.random.default_rng(2).random(20)
        cfg = ea(challenger=DRAGOON, challenged=DRAGOON)
        assert fitness(g, cfg) == 0.0

    def test_k_equals_n(self):
        g = np.random.default_rng(2).random(8)
        assert fitness(g, ea(n_customers=4, k=4)) == 0.0

    def test_antisymmetric(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            g = rng.random(20)
            fwd = fitness(g, ea())
            back = fitness(g, ea(challenger=DRAGOON, challenged=MACQUEEN))
            assert fwd == -back


class TestMutate:
    def test_single_position(self):
        rng = np.random.default_rng(0)
        g = np.full(10, 0.5)
        for _ in range(200):
            child = mutate(g, rng)
            assert np.count_nonzero(child != g) <= 1
            assert np.array_equal(g, np.full(10, 0.5))

    def test_clamp(self):
        class FixedDraw:
            def integers(self, n):
                return 0

            def normal(self, loc, scale):
                return 0.5

        child = mutate(np.array([0.999, 0.5]), FixedDraw())
        assert child[0] == HIGH == 1 - 1e-9

    def test_sigma(self):
        rng = np.random.default_rng(42)
        g = np.full(20, 0.5)
        deltas = []
        for _ in range(10_000):
            child = mutate(g, rng)
            deltas.append((child - g).sum())
        assert np.std(deltas) == pytest.approx(0.05, rel=0.05)


class TestRecombine:
    def test_identical_parents(self):
        rng = np.random.default_rng(0)
        a = np.random.default_rng(1).random(8)
        for _ in range(20):
            assert np.array_equal(recombine(a, a.copy(), rng, prob=1.0), a)

    def test_midpoint(self):
        child = recombine(np.full(4, 0.2), np.full(4, 0.6), np.random.default_rng(0), prob=1.0)
        np.testing.assert_allclose(child, 0.4, rtol=0, atol=1e-15)

    def test_no_fire_copies_first(self):
        a, b = np.full(4, 0.2), np.full(4, 0.6)
        child = recombine(a, b, np.random.default_rng(0), prob=0.0)
        assert np.array_equal(child, a) and child is not a

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            recombine(np.full(4, 0.2), np.full(6, 0.2), np.random.default_rng(0))

    def test_rate(self):
        rng = np.random.default_rng(7)
        a, b = np.full(2, 0.2), np.full(2, 0.6)
        fired = sum(recombine(a, b, rng)[0] != 0.2 for _ in range(10_000))
        assert abs(fired / 10_000 - 0.3) < 0.03


@settings(max_examples=50, deadline=None)
@given(
    genes=st.lists(st.floats(LOW, HIGH), min_size=2, max_size=20).filter(lambda v: len(v) % 2 == 0),
    other=st.floats(LOW, HIGH),
    seed=st.integers(0, 2**32),
)
def test_operators_keep_genomes_valid(genes, other, seed):
    rng = np.random.default_rng(seed)
    a = np.array(genes)
    b = np.full_like(a, other)
    child = mutate(recombine(a, b, rng, prob=0.5), rng, sigma=0.5)
    check_genome(child, len(genes) // 2)


class TestEvolve:
    def test_generations_zero(self):
        res = evolve(ea(generations=0))
        assert len(res.fitness_history) == 1
        assert res.evaluations == 20
        assert res.best_fitness == res.fitness_history[0]

    def test_elitism_and_recompute(self):
        res = evolve(ea(generations=15, seed=11))
        h = res.fitness_history
        assert len(h) == 16
        assert all(b <= a for a, b in zip(h, h[1:]))
        assert fitness(res.best_genome, res.config) == res.best_fitness
        assert res.best_instance == decode(res.best_genome, 2)
        check_genome(res.best_genome, 10)

    def test_reproducible(self):
        a = evolve(ea(generations=5, seed=9))
        b = evolve(ea(generations=5, seed=9))
        assert np.array_equal(a.best_genome, b.best_genome)
        assert a.fitness_history == b.fitness_history

    def test_executor_does_not_change_result(self):
        from concurrent.futures import ThreadPoolExecutor

        serial = evolve(ea(generations=4, seed=3))
        with ThreadPoolExecutor(max_workers=3) as ex:
            threaded = evolve(ea(generations=4, seed=3), executor=ex)
        assert np.array_equal(serial.best_genome, threaded.best_genome)
        assert serial.fitness_history == threaded.fitness_history

    def test_finds_macqueen_beating_dragoon(self):
        res = evolve(ea(generations=100, seed=0))
        assert res.best_fitness < 0
