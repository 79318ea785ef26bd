"""Minimization of the inverse speed F over graph-compatible generator polytopes.

The feasible set is parametrized by barycentric weights over the enumerated
simple cycles of the graph (its extreme points).  The conditional-gradient
loop exploits the exact derivative formula D_A F(L) = F(L) - H_A(L): the
weight average of H_A over the support equals F, so max_A H_A(L) - F(L) is
a nonnegative stationarity gap that vanishes exactly at minimizers, and the
cycle attaining the max is the steepest feasible descent vertex.  Steps are
chosen by exact line search (presampled golden section), either toward the
best vertex or pairwise from the worst supported vertex to the best, which
lets iterates reach vertices and drop weights exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import log

import numpy as np

from .generator import Generator, ProbabilityVector, cycle_generator
from .graph import DirectedGraph, enumerate_simple_cycles, is_strongly_connected
from .rng import RandomStream

__all__ = [
    "OptimizeReport",
    "StationarityReport",
    "EpsilonNeighborhood",
    "TooManyCycles",
    "NotConverged",
    "CyclePolytope",
    "frank_wolfe_minimize",
    "brute_force_minimize",
    "stationarity_check",
    "epsilon_neighborhood",
    "f_wedge",
]

WEIGHT_FLOOR = 1e-14
SNAP_TOL = 1e-9


class TooManyCycles(RuntimeError):
    """Exhaustive grid search is infeasible for this many cycles."""


class NotConverged(RuntimeError):
    """Stationarity gap still above tolerance after the iteration budget."""


@dataclass(frozen=True)
class OptimizeReport:
    cycles: tuple
    weights: np.ndarray
    minimizer: Generator
    f_min: float
    h_values: np.ndarray
    gap: float
    iterations: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "cycles": [c.to_json() for c in self.cycles],
            "weights": [float(w) for w in self.weights],
            "minimizer": self.minimizer.to_json(),
            "f_min": self.f_min,
            "certificate": {
                "h_values": [float(h) for h in self.h_values],
                "gap": self.gap,
            },
            "iterations": self.iterations,
            "converged": self.converged,
        }


class CyclePolytope:
    """Cycle-weight parametrization of the compatible normalized generators."""

    def __init__(self, g: DirectedGraph, pi: ProbabilityVector,
                 max_count: int = 100_000):
        if g.n != pi.n:
            raise ValueError("graph / pi dimension mismatch")
        if not is_strongly_connected(g):
            raise ValueError("graph must be strongly connected")
        self.graph = g
        self.pi = pi
        self.cycles = tuple(enumerate_simple_cycles(g, max_count))
        self._mats = np.stack([cycle_generator(pi, c).rates for c in self.cycles])
        self._arc_rows = [np.array([a for a, _ in c.arcs()]) for c in self.cycles]
        self._arc_cols = [np.array([b for _, b in c.arcs()]) for c in self.cycles]

    @property
    def m(self) -> int:
        return len(self.cycles)

    def rates(self, w: np.ndarray) -> np.ndarray:
        return np.tensordot(w, self._mats, axes=1)

    def is_irreducible(self, w: np.ndarray, tol: float = 0.0) -> bool:
        return _support_strongly_connected(self.rates(w), tol)

    def _hitting(self, rates: np.ndarray) -> tuple:
        """Hitting times through the fundamental matrix Z = (Pi - L)^{-1}.

        The mean-zero Poisson solution of L g = r is -Z r, so
        E_x[tau_y] = (Z[y,y] - Z[x,y]) / pi(y).  Agrees with the per-column
        anchored solves used by the public operations; the two routes are
        cross-checked in the test suite.  Returns (E, Z).
        """
        p = self.pi.weights
        Z = np.linalg.inv(np.tile(p, (len(p), 1)) - rates)
        return (np.diag(Z)[None, :] - Z) / p[None, :], Z

    def f_value(self, w: np.ndarray) -> float:
        """F of the mixture, +inf when the support is not irreducible."""
        if not self.is_irreducible(w):
            return np.inf
        E, _ = self._hitting(self.rates(w))
        p = self.pi.weights
        return float(p @ E @ p)

    def f_and_h(self, w: np.ndarray) -> tuple:
        """F together with the vector of H_A over all enumerated cycles."""
        if not self.is_irreducible(w):
            return np.inf, None
        rates = self.rates(w)
        p = self.pi.weights
        E, Z = self._hitting(rates)
        W = Z @ E
        H = W.T - np.diag(W)[:, None]
        f = float(p @ E @ p)
        hvals = np.array([
            H[self._arc_rows[k], self._arc_cols[k]].mean() for k in range(self.m)
        ])
        return f, hvals


def _support_strongly_connected(rates: np.ndarray, tol: float = 0.0) -> bool:
    adj = rates > tol
    np.fill_diagonal(adj, True)
    return bool(np.linalg.matrix_power(adj.astype(float), rates.shape[0]).all())


def _line_search(fun, lo: float, hi: float, presamples: int = 33,
                 tol: float = 1e-10) -> tuple:
    """Presampled golden-section minimization of fun on [lo, hi].

    F is analytic but not guaranteed unimodal along segments, so a dense
    presample picks the bracket first.  Exact endpoint values are compared
    against the refined interior candidate, so boundary minima are returned
    as exact endpoints (this is what lets iterates land on vertices).
    """
    ts = np.linspace(lo, hi, presamples)
    vals = np.array([fun(t) for t in ts])
    k = int(np.nanargmin(np.where(np.isfinite(vals), vals, np.inf)))
    best_t, best_v = float(ts[k]), float(vals[k])
    a = float(ts[max(k - 1, 0)])
    b = float(ts[min(k + 1, presamples - 1)])
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    for t, v in ((c, fc), (d, fd)):
        if v < best_v:
            best_t, best_v = float(t), float(v)
    return best_t, best_v


def frank_wolfe_minimize(g: DirectedGraph, pi: ProbabilityVector,
                         tol: float = 1e-8, max_iters: int = 10_000,
                         seed: int = 0, extra_starts: int = 4,
                         max_count: int = 100_000,
                         polytope: CyclePolytope | None = None) -> OptimizeReport:
    """Conditional-gradient minimization of F over the cycle polytope.

    Starts from uniform weights over all enumerated cycles (always
    irreducible on a strongly connected graph) plus ``extra_starts`` random
    simplex points with deterministic seeds, and returns the best run.
    Convergence is declared when max_A H_A(L) - F(L) <= tol; the returned
    report carries the full per-cycle certificate either way.

    The gap is a first-order certificate only: non-minimizing stationary
    points satisfy it too (the uniform mixture on a vertex-transitive
    instance is one), which is what the random extra starts are for.

    Raises
    ------
    CycleBudgetExceeded
        Propagated from cycle enumeration when the instance is too large.
    """
    poly = polytope if polytope is not None else CyclePolytope(g, pi, max_count)
    m = poly.m
    starts = [np.full(m, 1.0 / m)]
    stream = RandomStream(seed)
    for k in range(extra_starts):
        w = stream.spawn(k).simplex(m)
        w = 0.9 * w + 0.1 / m  # keep all cycles slightly active: irreducible start
        starts.append(w / w.sum())
    best = None
    for w0 in starts:
        report = _frank_wolfe_single(poly, w0, tol, max_iters)
        if best is None or report.f_min < best.f_min:
            best = report
    return best


def _frank_wolfe_single(poly: CyclePolytope, w0: np.ndarray, tol: float,
                        max_iters: int) -> OptimizeReport:
    m = poly.m
    w = w0.copy()
    f, hvals = poly.f_and_h(w)
    if hvals is None:
        raise ValueError("starting point is not irreducible")
    iterations = 0
    converged = False
    while iterations < max_iters:
        gap = float(hvals.max() - f)
        if gap <= tol:
            converged = True
            break
        iterations += 1
        s = int(np.argmax(hvals))
        e_s = np.zeros(m)
        e_s[s] = 1.0

        def toward(t, w=w, e_s=e_s):
            return poly.f_value((1.0 - t) * w + t * e_s)

        t1, f1 = _line_search(toward, 0.0, 1.0)
        cand = [((1.0 - t1) * w + t1 * e_s, f1)]

        support = np.nonzero(w > WEIGHT_FLOOR)[0]
        if len(support) > 1:
            a = int(support[np.argmin(hvals[support])])
            if a != s:
                shift = float(w[a])
                e_a = np.zeros(m)
                e_a[a] = 1.0

                def pairwise(t, w=w, e_s=e_s, e_a=e_a):
                    return poly.f_value(np.maximum(w + t * (e_s - e_a), 0.0))

                t2, f2 = _line_search(pairwise, 0.0, shift)
                w2 = np.maximum(w + t2 * (e_s - e_a), 0.0)
                cand.append((w2 / w2.sum(), f2))

        w_new, f_new = min(cand, key=lambda c: c[1])
        if not np.isfinite(f_new) or f_new >= f - 1e-15:
            break  # no usable progress; gap reported as is
        w, f = w_new, f_new
        f, hvals = poly.f_and_h(w)

    w, f, hvals = _snap(poly, w, f, hvals)
    gap = float(hvals.max() - f)
    return OptimizeReport(
        cycles=poly.cycles,
        weights=w,
        minimizer=Generator(poly.rates(w)),
        f_min=f,
        h_values=hvals,
        gap=gap,
        iterations=iterations,
        converged=converged or gap <= tol,
    )


def _snap(poly: CyclePolytope, w: np.ndarray, f: float, hvals: np.ndarray) -> tuple:
    """Zero out sub-1e-9 weights when that keeps the mixture irreducible
    and does not worsen F beyond rounding."""
    small = (w > 0) & (w < SNAP_TOL)
    if not small.any():
        return w, f, hvals
    w2 = np.where(small, 0.0, w)
    total = w2.sum()
    if total <= 0:
        return w, f, hvals
    w2 = w2 / total
    f2, h2 = poly.f_and_h(w2)
    if h2 is not None and f2 <= f + 1e-9:
        return w2, f2, h2
    return w, f, hvals


def brute_force_minimize(g: DirectedGraph, pi: ProbabilityVector,
                         grid_resolution: int,
                         max_count: int = 100_000) -> OptimizeReport:
    """Grid scan of the weight simplex; oracle for the conditional-gradient path.

    Enumerates all compositions of ``grid_resolution`` over the cycles
    (at most 6 cycles) and evaluates F on every irreducible grid point.
    """
    if grid_resolution < 10:
        raise ValueError("grid_resolution must be at least 10")
    poly = CyclePolytope(g, pi, max_count)
    m = poly.m
    if m > 6:
        raise TooManyCycles(f"{m} cycles; grid search supports at most 6")
    best_w, best_f = None, np.inf
    evals = 0
    for comp in itertools.combinations(range(grid_resolution + m - 1), m - 1):
        parts = []
        prev = -1
        for c in comp:
            parts.append(c - prev - 1)
            prev = c
        parts.append(grid_resolution + m - 2 - prev)
        w = np.array(parts, dtype=float) / grid_resolution
        f = poly.f_value(w)
        evals += 1
        if f < best_f:
            best_f, best_w = f, w
    f, hvals = poly.f_and_h(best_w)
    return OptimizeReport(
        cycles=poly.cycles,
        weights=best_w,
        minimizer=Generator(poly.rates(best_w)),
        f_min=f,
        h_values=hvals,
        gap=float(hvals.max() - f),
        iterations=evals,
        converged=True,
    )


@dataclass(frozen=True)
class StationarityReport:
    f: float
    h_values: np.ndarray
    below: np.ndarray
    max_gap: float

    def to_json(self) -> dict:
        return {
            "f": self.f,
            "h_values": [float(h) for h in self.h_values],
            "below": [bool(b) for b in self.below],
            "max_gap": self.max_gap,
        }


def stationarity_check(L: Generator, pi: ProbabilityVector, cycles) -> StationarityReport:
    """First-order optimality certificate at L.

    At a minimizer, every cycle below L (all arcs carrying positive rate)
    has H_A = F, and every other cycle has H_A <= F; ``max_gap`` is the
    worst violation of the applicable condition over the given cycles.
    """
    from .eigentime import h_matrix, inverse_speed

    f = inverse_speed(L, pi)
    H = h_matrix(L, pi, check=False)
    hvals = []
    below = []
    gaps = []
    for c in cycles:
        h_a = float(sum(H[a, b] for a, b in c.arcs())) / len(c)
        is_below = all(L.rates[a, b] > 1e-12 for a, b in c.arcs())
        hvals.append(h_a)
        below.append(is_below)
        gaps.append(abs(h_a - f) if is_below else max(0.0, h_a - f))
    return StationarityReport(
        f=f,
        h_values=np.array(hvals),
        below=np.array(below, dtype=bool),
        max_gap=float(max(gaps)) if gaps else 0.0,
    )


@dataclass(frozen=True)
class EpsilonNeighborhood:
    eps1: float
    eps2: float
    eps: float

    def to_json(self) -> dict:
        return {"eps1": self.eps1, "eps2": self.eps2, "eps": self.eps}


def epsilon_neighborhood(n: int, pi_min: float) -> EpsilonNeighborhood:
    """Certified radius around a Hamiltonian-cycle generator.

    Within segment distance eps = min(eps1, eps2) of L_A toward any mixture
    of other cycles, L_A is the unique minimizer of F:
    eps1 = pi_min^4 * ln(1 + 1/(n pi_min^2)) and eps2 = pi_min^12 / 56.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 < pi_min <= 1.0 / n:
        raise ValueError("pi_min must lie in (0, 1/n]")
    eps1 = pi_min ** 4 * log(1.0 + 1.0 / (n * pi_min ** 2))
    eps2 = pi_min ** 12 / 56.0
    return EpsilonNeighborhood(eps1=eps1, eps2=eps2, eps=min(eps1, eps2))


def f_wedge(g: DirectedGraph, pi: ProbabilityVector, tol: float = 1e-8,
            max_iters: int = 10_000, seed: int = 0, extra_starts: int = 8,
            brute_resolution: int = 60, max_count: int = 100_000) -> float:
    """Best achievable F over the polytope: multi-start conditional gradient,
    cross-checked by the grid oracle whenever at most 6 cycles exist.

    The grid resolution is capped so the scan stays around 2e4 points;
    ``brute_resolution`` is the upper bound actually used for few cycles.
    """
    poly = CyclePolytope(g, pi, max_count)
    report = frank_wolfe_minimize(g, pi, tol=tol, max_iters=max_iters, seed=seed,
                                  extra_starts=extra_starts, polytope=poly)
    best = report.f_min
    if poly.m <= 6:
        res = brute_resolution
        while res > 10 and _composition_count(res, poly.m) > 20_000:
            res -= 1
        brute = brute_force_minimize(g, pi, res, max_count=max_count)
        best = min(best, brute.f_min)
    return float(best)


def _composition_count(resolution: int, m: int) -> int:
    from math import comb

    return comb(resolution + m - 1, m - 1)
