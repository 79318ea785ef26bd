"""Shared instances and samplers for the test suite.

Random suites are drawn from the package's own deterministic stream so
every run sees the same instances.  Polytope members are sampled as cycle
mixtures, which spans the full feasible set (mixtures of the extreme
points) and guarantees pi-invariance by construction.
"""

import numpy as np
import pytest

from fastchain.eigentime import _hitting_matrix
from fastchain.generator import Generator, ProbabilityVector, cycle_generator
from fastchain.graph import Cycle, DirectedGraph, enumerate_simple_cycles, segment_graph
from fastchain.rng import RandomStream


@pytest.fixture
def pi3():
    return ProbabilityVector.uniform(3)


@pytest.fixture
def uniform_cycle3(pi3):
    """Generator tracing 0 -> 1 -> 2 -> 0 at rate 1; F = 1, M = 2."""
    return cycle_generator(pi3, Cycle([0, 1, 2]))


@pytest.fixture
def random_walk3():
    """Symmetric walk on the 3-cycle; F = 4/3, offdiagonal hitting times 2."""
    return Generator(0.5 * np.array([[-2.0, 1, 1], [1, -2, 1], [1, 1, -2]]))


@pytest.fixture
def s2():
    return segment_graph(2)


def random_pi(stream: RandomStream, n: int, spread: float = 0.6) -> ProbabilityVector:
    """Positive measure bounded away from zero (entries >= (1-spread)/n)."""
    w = spread * stream.simplex(n) + (1.0 - spread) / n
    return ProbabilityVector(w / w.sum())


def random_member(g: DirectedGraph, pi: ProbabilityVector, stream: RandomStream,
                  interior: float = 0.2):
    """Random normalized pi-invariant generator compatible with g, as a cycle
    mixture with every cycle kept slightly active (irreducible)."""
    cycles = enumerate_simple_cycles(g)
    w = stream.simplex(len(cycles))
    w = (1.0 - interior) * w + interior / len(cycles)
    w = w / w.sum()
    rates = sum(wi * cycle_generator(pi, c).rates for wi, c in zip(w, cycles))
    return Generator(rates), cycles, w


def f_reference(rates: np.ndarray, pi: ProbabilityVector) -> float:
    """F through the anchored-solve hitting matrix (finite-difference oracle
    path, independent of the optimizer's fundamental-matrix shortcut)."""
    E = _hitting_matrix(rates, pi.weights)
    return float(pi.weights @ E @ pi.weights)


def random_ham_digraph(n: int, stream: RandomStream, extra: float = 0.25) -> DirectedGraph:
    """Random permutation cycle plus Bernoulli(extra) arcs."""
    perm = stream.shuffled(list(range(n)))
    edges = {(perm[i], perm[(i + 1) % n]) for i in range(n)}
    u = stream.uniform(n * n)
    k = 0
    for i in range(n):
        for j in range(n):
            if i != j:
                if u[k] < extra:
                    edges.add((i, j))
                k += 1
    return DirectedGraph(n, edges)
