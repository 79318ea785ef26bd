"""Discrete-time kernels and the bridges to continuous time.

For an irreducible pi-invariant kernel K the discrete analogue of the
inverse speed is the pi-double-averaged mean hitting time, with eigentime
form sum over the non-unit spectrum of 1/(1 - theta) and Hunter's trace
form 1 + value = tr (I - K + Pi)^{-1}.

The two time scales are linked by the maps

    to_kernel:    K = I + L / l,  l = max_x L(x)      (lands in K0)
    to_generator: L = k (K - I),  k = 1 / sum_x pi(x)(1 - K(x,x))

which satisfy value(K) = l F(L) and F(L) = value(K) / k, and are mutually
inverse between the normalized generators and the kernels K0 with at least
one zero diagonal entry.  Mixing a kernel with the identity only slows it,
so discrete minimization may be restricted to K0, which is why the
continuous infimum never exceeds the discrete one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .generator import (
    Generator,
    NotInvariant,
    NotIrreducible,
    ProbabilityVector,
    _require_irreducible,
)
from .graph import DirectedGraph, is_strongly_connected
from .optimizer import CyclePolytope, f_wedge

__all__ = [
    "Kernel",
    "IdentityKernel",
    "SingularMatrix",
    "frak_f",
    "discrete_hitting_times",
    "discrete_eigentime_spectral",
    "hunter_trace",
    "to_kernel",
    "to_generator",
    "compare_wedges",
    "match_multisets",
]


class IdentityKernel(ValueError):
    """Kernel equals the identity; it generates no motion."""


class SingularMatrix(ValueError):
    """Hunter trace matrix is singular (kernel not irreducible)."""


@dataclass(frozen=True)
class Kernel:
    """Row-stochastic matrix; self-loops allowed."""

    entries: np.ndarray = field()

    def __init__(self, entries):
        k = np.asarray(entries, dtype=float).copy()
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValueError("kernel must be a square matrix")
        if np.any(k < -1e-12):
            raise ValueError("kernel entries must be nonnegative")
        if np.any(np.abs(k.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("kernel rows must sum to 1")
        k.flags.writeable = False
        object.__setattr__(self, "entries", k)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def support_graph(self) -> DirectedGraph:
        n = self.n
        return DirectedGraph(n, [(i, j) for i in range(n) for j in range(n)
                                 if i != j and self.entries[i, j] > 0])

    def to_json(self) -> dict:
        return {"n": self.n, "rates": [[float(v) for v in row] for row in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "Kernel":
        return cls(np.asarray(obj.get("rates", obj.get("entries")), dtype=float))


def _require_kernel_irreducible(K: Kernel):
    if not is_strongly_connected(K.support_graph()):
        raise NotIrreducible("kernel support is not strongly connected")


def _require_kernel_invariant(K: Kernel, pi: ProbabilityVector):
    resid = float(np.abs(pi.weights @ K.entries - pi.weights).max())
    if resid > 1e-9:
        raise NotInvariant(f"pi K residual {resid!r}")


def discrete_hitting_times(K: Kernel) -> np.ndarray:
    """E_x[tau_y] for the chain with kernel K, by first-step analysis."""
    _require_kernel_irreducible(K)
    n = K.n
    E = np.zeros((n, n))
    for y in range(n):
        keep = [i for i in range(n) if i != y]
        A = np.eye(n - 1) - K.entries[np.ix_(keep, keep)]
        E[keep, y] = np.linalg.solve(A, np.ones(n - 1))
    return E


def frak_f(K: Kernel, pi: ProbabilityVector) -> float:
    """Discrete inverse speed: sum_{x,y} pi(x) pi(y) E_x[tau_y]."""
    _require_kernel_invariant(K, pi)
    E = discrete_hitting_times(K)
    return float(pi.weights @ E @ pi.weights)


def discrete_eigentime_spectral(K: Kernel) -> float:
    """Spectral route: sum over the non-unit spectrum of 1/(1 - theta)."""
    vals = np.linalg.eigvals(K.entries)
    order = np.argsort(np.abs(vals - 1.0))
    if len(vals) > 1 and abs(vals[order[1]] - 1.0) < 1e-10:
        raise NotIrreducible("unit eigenvalue is not simple")
    s = np.sum(1.0 / (1.0 - vals[order[1:]]))
    if abs(s.imag) > 1e-8:
        raise ArithmeticError(f"spectral sum has imaginary part {s.imag!r}")
    return float(s.real)


def hunter_trace(K: Kernel, pi: ProbabilityVector) -> float:
    """tr (I - K + Pi)^{-1} with Pi the rank-one matrix of rows pi.

    Equals 1 plus the discrete inverse speed for irreducible pi-invariant
    kernels.
    """
    _require_kernel_invariant(K, pi)
    n = K.n
    M = np.eye(n) - K.entries + np.tile(pi.weights, (n, 1))
    try:
        inv = np.linalg.inv(M)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("I - K + Pi is singular") from exc
    return float(np.trace(inv))


def to_kernel(L: Generator) -> tuple:
    """Fastest embedding of a generator into a kernel: K = I + L / l.

    Returns (K, l) with l the maximal exit rate; K has a zero diagonal
    entry at every argmax vertex, and the discrete inverse speed of K is
    l times the continuous one of L.
    """
    _require_irreducible(L)
    rates = L.exit_rates()
    l = float(rates.max())
    K = Kernel(np.eye(L.n) + L.rates / l)
    return K, l


def to_generator(K: Kernel, pi: ProbabilityVector) -> tuple:
    """Normalized generator of a kernel: L = k (K - I).

    Returns (L, k) with k = 1 / sum_x pi(x) (1 - K(x,x)); F(L) equals the
    discrete inverse speed of K divided by k.  Raises
    :class:`IdentityKernel` when K has no off-diagonal mass.
    """
    _require_kernel_invariant(K, pi)
    loss = float(pi.weights @ (1.0 - np.diag(K.entries)))
    if loss <= 1e-12:
        raise IdentityKernel("kernel equals the identity")
    k = 1.0 / loss
    return Generator(k * (K.entries - np.eye(K.n))), k


def match_multisets(a, b, tol: float = 1e-7) -> bool:
    """Greedy nearest-neighbor pairing of two complex multisets."""
    rem = list(b)
    for z in a:
        if not rem:
            return False
        dists = [abs(z - w) for w in rem]
        k = int(np.argmin(dists))
        if dists[k] > tol:
            return False
        rem.pop(k)
    return not rem


@dataclass(frozen=True)
class WedgeComparison:
    f_wedge: float
    frak_f_wedge: float
    gap: float
    kernel_weights: np.ndarray

    def to_json(self) -> dict:
        return {
            "f_wedge": self.f_wedge,
            "frak_f_wedge": self.frak_f_wedge,
            "gap": self.gap,
            "kernel_weights": [float(w) for w in self.kernel_weights],
        }


def compare_wedges(g: DirectedGraph, pi: ProbabilityVector, seed: int = 0,
                   max_count: int = 100_000) -> WedgeComparison:
    """Both infima side by side; the discrete one can never be smaller.

    Every kernel can be slowed-down-free replaced by its K0 representative,
    and K0 corresponds bijectively to the normalized generators with the
    discrete value equal to max_x L(x) times F(L).  The discrete infimum is
    therefore min over the cycle polytope of maxrate * F, searched here by
    grid plus pairwise pattern descent over the mixture weights (heuristic;
    exact closed forms back it up at desk scale in the tests).
    """
    from .optimizer import brute_force_minimize, frank_wolfe_minimize

    from .optimizer import _composition_count

    poly = CyclePolytope(g, pi, max_count)
    report = frank_wolfe_minimize(g, pi, seed=seed, extra_starts=8, polytope=poly)
    f_best = report.f_min
    if poly.m <= 6:
        res = 60
        while res > 10 and _composition_count(res, poly.m) > 20_000:
            res -= 1
        f_best = min(f_best, brute_force_minimize(g, pi, res).f_min)

    p = pi.weights
    tile = np.tile(p, (pi.n, 1))

    def discrete_objective(w: np.ndarray) -> float:
        if not poly.is_irreducible(w):
            return np.inf
        rates = poly.rates(w)
        Z = np.linalg.inv(tile - rates)
        E = (np.diag(Z)[None, :] - Z) / p[None, :]
        return float((-np.diag(rates)).max()) * float(p @ E @ p)

    # the continuous minimizer is the natural warm start: when its exit
    # rates are constant it is already the discrete minimizer
    w, val = _pattern_search(discrete_objective, poly.m, seed=seed,
                             warm_starts=[report.weights])
    return WedgeComparison(
        f_wedge=float(f_best),
        frak_f_wedge=float(val),
        gap=float(val - f_best),
        kernel_weights=w,
    )


def _disc_value(rates: np.ndarray, pi: np.ndarray) -> float:
    """maxrate(L) * F(L) for a rate matrix, the K0 kernel objective."""
    from .eigentime import _hitting_matrix

    l = float((-np.diag(rates)).max())
    E = _hitting_matrix(rates, pi)
    return l * float(pi @ E @ pi)


def _pattern_search(fun, m: int, seed: int = 0, rounds: int = 2,
                    warm_starts=()) -> tuple:
    """Deterministic multi-start pairwise-transfer descent on the simplex."""
    from .rng import RandomStream

    stream = RandomStream(seed)
    starts = [np.asarray(w, dtype=float) for w in warm_starts]
    starts.append(np.full(m, 1.0 / m))
    for k in range(rounds):
        w = stream.spawn(k).simplex(m)
        starts.append(0.8 * w + 0.2 / m)
    best_w, best_v = None, np.inf
    for w0 in starts:
        w = w0 / w0.sum()
        v = fun(w)
        step = 0.25
        while step > 1e-5:
            improved = False
            for i in range(m):
                for j in range(m):
                    if i == j or w[j] < step:
                        continue
                    cand = w.copy()
                    cand[i] += step
                    cand[j] -= step
                    cv = fun(cand)
                    if cv < v - 1e-13:
                        v, w = cv, cand
                        improved = True
            if not improved:
                step /= 2.0
        if v < best_v:
            best_v, best_w = v, w
    return best_w, best_v
