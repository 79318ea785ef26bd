import numpy as np
import pytest
from numpy.testing import assert_allclose

from fastchain.generator import (
    CycleDecomposition,
    Generator,
    NotInvariant,
    NotIrreducible,
    ProbabilityVector,
    ZeroGenerator,
    combine,
    cycle_generator,
    decompose_into_cycles,
    invariant_measure,
    is_compatible,
    normalize,
)
from fastchain.graph import Cycle, DirectedGraph, complete_graph, segment_graph
from fastchain.rng import RandomStream

from conftest import random_member, random_pi


def test_probability_vector_validation():
    with pytest.raises(ValueError):
        ProbabilityVector([0.5, 0.5, 0.0])
    with pytest.raises(ValueError):
        ProbabilityVector([0.5, 0.6])
    pi = ProbabilityVector([0.5, 0.25, 0.25])
    assert pi.pi_min == 0.25


def test_generator_validation():
    with pytest.raises(ValueError):
        Generator([[0.0, 1.0], [1.0, 0.0]])  # rows must sum to zero
    with pytest.raises(ValueError):
        Generator([[1.0, -1.0], [1.0, -1.0]])  # negative off-diagonal


def test_cycle_generator_uniform(pi3):
    L = cycle_generator(pi3, Cycle([0, 1, 2]))
    assert_allclose(L.rates, [[-1, 1, 0], [0, -1, 1], [1, 0, -1]], atol=1e-15)


def test_cycle_generator_weighted():
    pi = ProbabilityVector([0.5, 0.25, 0.25])
    L = cycle_generator(pi, Cycle([0, 1, 2]))
    assert_allclose([L.rates[0, 1], L.rates[1, 2], L.rates[2, 0]],
                    [2 / 3, 4 / 3, 4 / 3], atol=1e-15)


def test_cycle_generator_short_cycle(pi3):
    L = cycle_generator(pi3, Cycle([0, 1]))
    assert_allclose([L.rates[0, 1], L.rates[1, 0]], [1.5, 1.5])
    assert_allclose(L.rates[2], 0.0)


def test_cycle_generator_invariants():
    stream = RandomStream(31)
    for t in range(20):
        s = stream.spawn(t)
        n = 3 + t % 5
        pi = random_pi(s, n)
        k = 2 + int(s.uniform(1)[0] * (n - 1))
        verts = s.shuffled(list(range(n)))[:k]
        L = cycle_generator(pi, Cycle(verts))
        assert_allclose(L.rates.sum(axis=1), 0.0, atol=1e-12)
        assert_allclose(pi.weights @ L.rates, 0.0, atol=1e-12)
        assert abs(pi.weights @ L.exit_rates() - 1.0) <= 1e-12


def test_invariant_measure_examples(random_walk3, pi3):
    assert_allclose(invariant_measure(random_walk3).weights, pi3.weights, atol=1e-13)
    L = Generator([[-2.0, 2, 0], [1, -2, 1], [0, 2, -2]])
    assert_allclose(invariant_measure(L).weights, [0.25, 0.5, 0.25], atol=1e-13)


def test_invariant_measure_inverts_construction():
    stream = RandomStream(32)
    pi = random_pi(stream, 5)
    L = cycle_generator(pi, Cycle([0, 3, 1, 4, 2]))
    assert_allclose(invariant_measure(L).weights, pi.weights, atol=1e-12)


def test_invariant_measure_requires_irreducible():
    with pytest.raises(NotIrreducible):
        invariant_measure(Generator([[-1.0, 1, 0], [1, -1, 0], [0, 0, 0]]))


def test_normalize(random_walk3, pi3):
    assert_allclose(normalize(random_walk3, pi3).rates, random_walk3.rates)
    L = cycle_generator(pi3, Cycle([0, 1, 2]))
    assert_allclose(normalize(Generator(2.0 * L.rates), pi3).rates, L.rates)
    with pytest.raises(ZeroGenerator):
        normalize(Generator(np.zeros((3, 3))), pi3)


def test_is_compatible(pi3):
    tri = DirectedGraph(3, [(0, 1), (1, 2), (2, 0)])
    assert is_compatible(cycle_generator(pi3, Cycle([0, 1, 2])), tri)
    assert not is_compatible(cycle_generator(pi3, Cycle([0, 2, 1])), tri)
    assert is_compatible(cycle_generator(pi3, Cycle([0, 1])), segment_graph(2))


def test_combine_examples(random_walk3, pi3):
    d = CycleDecomposition([(Cycle([0, 1, 2]), 0.5), (Cycle([0, 2, 1]), 0.5)])
    assert_allclose(combine(d, pi3).rates, random_walk3.rates, atol=1e-15)
    d = CycleDecomposition([(Cycle([0, 1]), 1 / 3), (Cycle([1, 2]), 1 / 3),
                            (Cycle([2, 0]), 1 / 3)])
    assert_allclose(combine(d, pi3).rates, random_walk3.rates, atol=1e-15)


def test_decompose_single_cycle_is_extreme(pi3):
    L = cycle_generator(pi3, Cycle([0, 1, 2]))
    d = decompose_into_cycles(L, pi3)
    assert len(d.terms) == 1
    cyc, w = d.terms[0]
    assert cyc.vertices == (0, 1, 2) and abs(w - 1.0) < 1e-12


def test_decompose_random_walk(random_walk3, pi3):
    d = decompose_into_cycles(random_walk3, pi3)
    assert_allclose(combine(d, pi3).rates, random_walk3.rates, atol=1e-10)
    assert abs(sum(w for _, w in d.terms) - 1.0) <= 1e-10


def test_decompose_combine_roundtrip_random():
    stream = RandomStream(33)
    for t in range(100):
        s = stream.spawn(t)
        n = 3 + t % 4
        pi = random_pi(s, n)
        L, _, _ = random_member(complete_graph(n), pi, s)
        d = decompose_into_cycles(L, pi)
        rebuilt = combine(d, pi)
        assert np.abs(rebuilt.rates - L.rates).max() <= 1e-10
        assert all(w > 0 for _, w in d.terms)
        assert_allclose(invariant_measure(rebuilt).weights, pi.weights, atol=1e-9)


def test_decompose_rejects_nonmembers(pi3):
    skew = Generator([[-2.0, 2, 0], [1, -2, 1], [0, 2, -2]])  # invariant is not uniform
    with pytest.raises(NotInvariant):
        decompose_into_cycles(skew, pi3)


def test_normalize_commutes_with_invariant_measure(random_walk3):
    pi = invariant_measure(random_walk3)
    doubled = Generator(2.0 * random_walk3.rates)
    assert_allclose(invariant_measure(doubled).weights, pi.weights, atol=1e-12)
    assert_allclose(normalize(doubled, pi).rates, random_walk3.rates, atol=1e-12)
