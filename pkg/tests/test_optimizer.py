import numpy as np
import pytest
from numpy.testing import assert_allclose

from fastchain.eigentime import inverse_speed
from fastchain.generator import ProbabilityVector, cycle_generator
from fastchain.graph import Cycle, DirectedGraph, complete_graph
from fastchain.optimizer import (
    TooManyCycles,
    brute_force_minimize,
    epsilon_neighborhood,
    f_wedge,
    frank_wolfe_minimize,
    stationarity_check,
)
from fastchain.rng import RandomStream


def test_k3_uniform_minimizer_is_hamiltonian(pi3):
    report = frank_wolfe_minimize(complete_graph(3), pi3, seed=1)
    assert report.converged
    assert abs(report.f_min - 1.0) <= 1e-8
    candidates = [cycle_generator(pi3, Cycle([0, 1, 2])).rates,
                  cycle_generator(pi3, Cycle([0, 2, 1])).rates]
    dist = min(np.abs(report.minimizer.rates - c).max() for c in candidates)
    assert dist <= 1e-8


def test_s2_uniform_mixture(pi3, s2):
    report = frank_wolfe_minimize(s2, pi3, seed=1)
    assert abs(report.f_min - 16.0 / 9.0) <= 1e-6
    assert_allclose(report.weights, [0.5, 0.5], atol=1e-4)


def test_s2_generic_weights(s2):
    pi = ProbabilityVector([0.2, 0.3, 0.5])
    report = frank_wolfe_minimize(s2, pi, seed=1)
    assert abs(report.f_min - 1.62) <= 1e-6
    w01 = report.weights[[c.vertices for c in report.cycles].index((0, 1))]
    assert abs(w01 - 4.0 / 9.0) <= 1e-4


def test_iterates_monotone_certificate(s2):
    pi = ProbabilityVector([0.15, 0.45, 0.4])
    report = frank_wolfe_minimize(s2, pi, seed=2)
    assert report.converged
    assert report.gap <= 1e-8
    assert abs(inverse_speed(report.minimizer, pi) - report.f_min) <= 1e-10
    assert report.weights.min() >= 0 and abs(report.weights.sum() - 1) <= 1e-12


def test_brute_force_s2(pi3, s2):
    report = brute_force_minimize(s2, pi3, 1000)
    assert abs(report.f_min - 16.0 / 9.0) <= 1e-4


def test_brute_force_singleton():
    tri = DirectedGraph(3, [(0, 1), (1, 2), (2, 0)])
    report = brute_force_minimize(tri, ProbabilityVector.uniform(3), 10)
    assert_allclose(report.weights, [1.0])
    assert abs(report.f_min - 1.0) <= 1e-12


def test_brute_force_cycle_cap():
    with pytest.raises(TooManyCycles):
        brute_force_minimize(complete_graph(4), ProbabilityVector.uniform(4), 10)


def test_brute_force_agrees_with_frank_wolfe_near_uniform():
    stream = RandomStream(400)
    k3 = complete_graph(3)
    for t in range(5):
        s = stream.spawn(t)
        w = 1.0 / 3 + 0.02 * (s.uniform(3) - 0.5)
        pi = ProbabilityVector(w / w.sum())
        fw = frank_wolfe_minimize(k3, pi, seed=t, extra_starts=6)
        bf = brute_force_minimize(k3, pi, 30)
        assert fw.f_min <= bf.f_min + 1e-9  # grid can only be coarser
        assert abs(fw.f_min - bf.f_min) <= 1e-4


def test_stationarity_at_known_minimizers(pi3, s2):
    from fastchain.experiments import s2_closed_form
    from fastchain.graph import enumerate_simple_cycles

    rep = s2_closed_form(pi3)
    station = stationarity_check(rep.generator, pi3, enumerate_simple_cycles(s2))
    assert station.max_gap <= 1e-8

    L = cycle_generator(pi3, Cycle([0, 1, 2]))
    cycles = enumerate_simple_cycles(complete_graph(3))
    station = stationarity_check(L, pi3, cycles)
    assert station.max_gap <= 1e-10
    for c, h, below in zip(cycles, station.h_values, station.below):
        if below:
            assert abs(h - station.f) <= 1e-10
        else:
            assert h <= station.f - (3 - 1) / (2 * 3) + 1e-10


def test_stationarity_flags_interior_non_minimizer(pi3):
    from fastchain.generator import CycleDecomposition, combine
    from fastchain.graph import enumerate_simple_cycles

    cycles = enumerate_simple_cycles(complete_graph(3))
    skew = CycleDecomposition([(cycles[0], 0.6), (cycles[1], 0.25), (cycles[2], 0.15)])
    L = combine(skew, pi3)
    station = stationarity_check(L, pi3, cycles)
    assert station.max_gap > 1e-3


def test_epsilon_neighborhood_values():
    eps = epsilon_neighborhood(3, 1.0 / 3.0)
    assert abs(eps.eps1 - np.log(4.0) / 81.0) <= 1e-15
    assert abs(eps.eps2 - 3.0 ** -12 / 56.0) <= 1e-22
    assert eps.eps == eps.eps2


def test_epsilon_neighborhood_monotone_and_vanishing():
    for n in (3, 5):
        values = [epsilon_neighborhood(n, p).eps
                  for p in np.linspace(1e-4, 1.0 / n, 25)]
        assert all(b >= a - 1e-18 for a, b in zip(values, values[1:]))
    assert epsilon_neighborhood(4, 1e-6).eps < 1e-20
    with pytest.raises(ValueError):
        epsilon_neighborhood(3, 0.5)


def test_f_wedge_examples(pi3, s2):
    assert abs(f_wedge(complete_graph(3), pi3, seed=4) - 1.0) <= 1e-8
    assert abs(f_wedge(s2, pi3, seed=4) - 16.0 / 9.0) <= 1e-6
    # feasibility upper bound through any Hamiltonian generator
    from fastchain.eigentime import hamiltonian_speed_value
    pi = ProbabilityVector([0.5, 0.2, 0.3])
    assert f_wedge(complete_graph(3), pi, seed=4) <= hamiltonian_speed_value(pi) + 1e-10


def test_polytope_fast_path_matches_anchored_solves(pi3):
    """The optimizer's fundamental-matrix route agrees with the public
    anchored-solve operations for F and the per-cycle H values."""
    from fastchain.derivatives import h_cycle
    from fastchain.generator import Generator
    from fastchain.optimizer import CyclePolytope

    from conftest import f_reference, random_pi

    stream = RandomStream(402)
    poly = CyclePolytope(complete_graph(4), random_pi(stream, 4))
    for t in range(5):
        w = stream.spawn(t).simplex(poly.m)
        w = 0.8 * w + 0.2 / poly.m
        w = w / w.sum()
        f, hvals = poly.f_and_h(w)
        assert abs(f - f_reference(poly.rates(w), poly.pi)) <= 1e-10
        member = Generator(poly.rates(w))
        for k in (0, 3, 7):
            assert abs(hvals[k] - h_cycle(member, poly.pi, poly.cycles[k])) <= 1e-9


def test_f_wedge_empirical_continuity(pi3):
    k3 = complete_graph(3)
    base = f_wedge(k3, pi3, seed=5)
    stream = RandomStream(401)
    for t in range(3):
        delta = stream.spawn(t).uniform(3) - 0.5
        delta -= delta.mean()
        delta *= 1e-3 / np.abs(delta).sum()
        pi = ProbabilityVector(1.0 / 3 + delta)
        assert abs(f_wedge(k3, pi, seed=5) - base) <= 0.05
