"""Markov generators with prescribed invariant measure.

The central convex body is the set of normalized generators compatible with
a graph and leaving a fixed positive probability vector invariant.  Its
extreme points are the single-cycle generators built by
:func:`cycle_generator`; :func:`decompose_into_cycles` writes any member as
a barycentric mixture of those by greedy peeling of the stationary edge
flow, and :func:`combine` is the inverse direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Cycle, DirectedGraph, is_strongly_connected

__all__ = [
    "ProbabilityVector",
    "Generator",
    "CycleDecomposition",
    "NotIrreducible",
    "NotInvariant",
    "NotNormalized",
    "ZeroGenerator",
    "cycle_generator",
    "invariant_measure",
    "normalize",
    "decompose_into_cycles",
    "combine",
    "is_compatible",
    "support_graph",
]

ROW_SUM_TOL = 1e-12
CHECK_TOL = 1e-9
RECONSTRUCT_TOL = 1e-10


class NotIrreducible(ValueError):
    """Support graph of the generator is not strongly connected."""


class NotInvariant(ValueError):
    """pi is not invariant for the generator within tolerance."""


class NotNormalized(ValueError):
    """Generator does not have unit equilibrium jump rate within tolerance."""


class ZeroGenerator(ValueError):
    """All rates vanish; normalization impossible."""


@dataclass(frozen=True)
class ProbabilityVector:
    """Strictly positive probability weights on 0..n-1."""

    weights: np.ndarray = field()

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float).copy()
        if w.ndim != 1:
            raise ValueError("weights must be a vector")
        if np.any(w <= 0):
            raise ValueError("all probabilities must be strictly positive")
        if abs(w.sum() - 1.0) > ROW_SUM_TOL:
            raise ValueError(f"probabilities must sum to 1, got {w.sum()!r}")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def pi_min(self) -> float:
        return float(self.weights.min())

    def __getitem__(self, i: int) -> float:
        return float(self.weights[i])

    def to_json(self) -> list:
        return [float(p) for p in self.weights]

    @classmethod
    def uniform(cls, n: int) -> "ProbabilityVector":
        return cls(np.full(n, 1.0 / n))


@dataclass(frozen=True)
class Generator:
    """Square rate matrix: nonnegative off-diagonal, zero row sums."""

    rates: np.ndarray = field()

    def __init__(self, rates):
        r = np.asarray(rates, dtype=float).copy()
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError("rates must be a square matrix")
        off = r - np.diag(np.diag(r))
        if np.any(off < -ROW_SUM_TOL):
            raise ValueError("off-diagonal rates must be nonnegative")
        rows = np.abs(r.sum(axis=1))
        if np.any(rows > ROW_SUM_TOL * max(1.0, float(np.abs(r).max()))):
            raise ValueError(f"row sums must vanish, max residual {rows.max()!r}")
        r.flags.writeable = False
        object.__setattr__(self, "rates", r)

    @property
    def n(self) -> int:
        return self.rates.shape[0]

    def exit_rates(self) -> np.ndarray:
        """Vector of total jump rates L(x) = -L(x,x)."""
        return -np.diag(self.rates)

    def to_json(self) -> dict:
        return {"n": self.n, "rates": [[float(v) for v in row] for row in self.rates]}

    @classmethod
    def from_json(cls, obj: dict) -> "Generator":
        return cls(np.asarray(obj["rates"], dtype=float))


@dataclass(frozen=True)
class CycleDecomposition:
    """Barycentric weights over cycles; weights positive and summing to 1."""

    terms: tuple = field()

    def __init__(self, terms):
        pairs = tuple((c if isinstance(c, Cycle) else Cycle(c), float(w)) for c, w in terms)
        if any(w <= 0 for _, w in pairs):
            raise ValueError("weights must be strictly positive")
        total = sum(w for _, w in pairs)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"weights must sum to 1, got {total!r}")
        object.__setattr__(self, "terms", tuple(sorted(pairs, key=lambda t: t[0].vertices)))

    def to_json(self) -> list:
        return [{"cycle": c.to_json(), "weight": w} for c, w in self.terms]


def cycle_generator(pi: ProbabilityVector, cycle: Cycle) -> Generator:
    """Unit-speed generator tracing one cycle, normalized and pi-invariant.

    The rate out of cycle vertex a_l toward its successor is
    ``1 / (len(cycle) * pi(a_l))``; rows off the cycle are zero.  The
    stationary flow of the result puts mass 1/len(cycle) on every cycle arc,
    so the equilibrium jump rate is exactly 1.
    """
    n = pi.n
    verts = cycle.vertices
    if any(v >= n for v in verts):
        raise ValueError("cycle vertex out of range")
    rates = np.zeros((n, n))
    m = len(verts)
    for a, b in cycle.arcs():
        rate = 1.0 / (m * pi[a])
        rates[a, b] = rate
        rates[a, a] = -rate
    return Generator(rates)


def support_graph(L: Generator, tol: float = 0.0) -> DirectedGraph:
    """Graph of strictly positive off-diagonal rates."""
    n = L.n
    edges = [(i, j) for i in range(n) for j in range(n)
             if i != j and L.rates[i, j] > tol]
    return DirectedGraph(n, edges)


def _require_irreducible(L: Generator):
    if not is_strongly_connected(support_graph(L)):
        raise NotIrreducible("generator support is not strongly connected")


def invariant_measure(L: Generator) -> ProbabilityVector:
    """The unique positive pi with pi L = 0, sum pi = 1.

    Solves the transposed system with one equation replaced by the
    normalization constraint; irreducibility makes the replacement
    nonsingular.

    Raises
    ------
    NotIrreducible
        If the positive-rate support is not strongly connected.
    """
    _require_irreducible(L)
    n = L.n
    A = L.rates.T.copy()
    A[0, :] = 1.0
    b = np.zeros(n)
    b[0] = 1.0
    pi = np.linalg.solve(A, b)
    pi = pi / pi.sum()
    return ProbabilityVector(pi)


def equilibrium_rate(L: Generator, pi: ProbabilityVector) -> float:
    """Mean jump rate at equilibrium, sum_x pi(x) L(x)."""
    return float(pi.weights @ L.exit_rates())


def normalize(L: Generator, pi: ProbabilityVector) -> Generator:
    """Rescale L so the equilibrium jump rate is 1."""
    c = equilibrium_rate(L, pi)
    if c <= ROW_SUM_TOL:
        raise ZeroGenerator("cannot normalize a zero generator")
    return Generator(L.rates / c)


def is_compatible(L: Generator, g: DirectedGraph) -> bool:
    """True iff every strictly positive off-diagonal rate sits on an arc of g."""
    if L.n != g.n:
        raise ValueError("dimension mismatch")
    n = L.n
    return all((i, j) in g.edges
               for i in range(n) for j in range(n)
               if i != j and L.rates[i, j] > 0)


def _check_member(L: Generator, pi: ProbabilityVector, tol: float = CHECK_TOL):
    resid = np.abs(pi.weights @ L.rates).max()
    if resid > tol:
        raise NotInvariant(f"pi L residual {resid!r} exceeds {tol}")
    c = equilibrium_rate(L, pi)
    if abs(c - 1.0) > tol:
        raise NotNormalized(f"equilibrium rate {c!r} is not 1")


def decompose_into_cycles(L: Generator, pi: ProbabilityVector) -> CycleDecomposition:
    """Write a normalized pi-invariant generator as a mixture of cycle generators.

    Greedy cycle peeling on the stationary edge flow Q(x,y) = pi(x) L(x,y):
    invariance makes Q a circulation, so its positive support always contains
    a directed cycle; subtracting the minimal flow along one zeroes at least
    one arc, which bounds the number of rounds by the arc count.  A cycle A
    carrying flow w contributes weight len(A) * w, because the flow of the
    unit-speed cycle generator is 1/len(A) per arc.

    The mixture is generally not unique; this routine's output is pinned down
    by always walking from the smallest active vertex along smallest-index
    arcs.  Correctness is the reconstruction property checked at the end.

    Raises
    ------
    NotInvariant, NotNormalized
        If L is not (numerically) a member of the target convex set.
    """
    _check_member(L, pi)
    n = L.n
    flow = pi.weights[:, None] * L.rates
    np.fill_diagonal(flow, 0.0)
    peel_tol = 1e-13
    weights: dict = {}

    while True:
        active = flow > peel_tol
        if not active.any():
            break
        # walk forward along active arcs until a vertex repeats
        starts = np.nonzero(active.any(axis=1))[0]
        walk = [int(starts[0])]
        seen = {walk[0]: 0}
        while True:
            u = walk[-1]
            nxt = int(np.nonzero(active[u])[0][0])
            if nxt in seen:
                cyc_vertices = walk[seen[nxt]:]
                break
            seen[nxt] = len(walk)
            walk.append(nxt)
        cyc = Cycle(cyc_vertices)
        arcs = cyc.arcs()
        w = min(flow[a, b] for a, b in arcs)
        for a, b in arcs:
            flow[a, b] -= w
            if flow[a, b] <= peel_tol:
                flow[a, b] = 0.0
        weights[cyc] = weights.get(cyc, 0.0) + len(cyc) * w

    total = sum(weights.values())
    terms = [(c, w / total) for c, w in weights.items() if w / total > 1e-15]
    decomp = CycleDecomposition(terms)
    rebuilt = combine(decomp, pi)
    err = float(np.abs(rebuilt.rates - L.rates).max())
    if err > RECONSTRUCT_TOL:
        raise ArithmeticError(f"decomposition reconstruction error {err!r}")
    return decomp


def combine(d: CycleDecomposition, pi: ProbabilityVector) -> Generator:
    """Barycentric mixture of cycle generators; normalized and pi-invariant."""
    rates = np.zeros((pi.n, pi.n))
    for cyc, w in d.terms:
        rates += w * cycle_generator(pi, cyc).rates
    return Generator(rates)
