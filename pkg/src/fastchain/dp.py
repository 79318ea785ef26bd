"""Exact covering dynamic program over (vertex, unvisited-set) states.

States are pairs (i, A) with A a bitmask over vertices, i not in A.  The
per-step cost is |A| in discrete time and |A|/a_i in continuous time with
per-vertex rate budgets a_i; in both cases the minimized objective is
affine in the randomization of the next vertex, so deterministic successor
choices are optimal and the recursion closes as

    V(i, A) = step_cost(i, |A|) + min_j V(j, A \\ {j}),  V(., {}) = 0,

where j runs over graph successors of i.  Moves to already-visited
vertices stay on the same level |A|, so each level is itself a shortest
path problem, solved here by Dijkstra (all step costs are positive).

A trajectory achieves the lower bound sum_{k=1..N-1} k = N(N-1)/2 at unit
budgets exactly when every step visits a fresh vertex, i.e. when it traces
a Hamiltonian path; graphs with a Hamiltonian cycle achieve it from every
start.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from .graph import DirectedGraph, is_strongly_connected

__all__ = [
    "ValueTable",
    "StateSpaceTooLarge",
    "BudgetInvalid",
    "discrete_value_function",
    "continuous_value_function",
    "optimal_budget_search",
    "extract_policy_path",
    "value_iteration_oracle",
]

MAX_BITS = 20


class StateSpaceTooLarge(RuntimeError):
    """2^n * n states exceed the supported bitmask width."""


class BudgetInvalid(ValueError):
    """Rate budgets must be positive and sum to the vertex count."""


@dataclass(frozen=True)
class ValueTable:
    """Optimal cost-to-go V(i, A) and an argmin successor per state.

    ``values[i, A]`` is only meaningful for valid states (bit i not in A);
    ``policy[i, A]`` is -1 at A = 0 (nothing left to do).  ``budgets`` is
    None for the discrete table and the per-vertex rate vector otherwise.
    """

    n: int
    values: np.ndarray
    policy: np.ndarray
    budgets: np.ndarray | None = None

    def value(self, i: int, mask: int) -> float:
        if mask & (1 << i):
            raise ValueError(f"vertex {i} cannot be in its own unvisited set")
        return float(self.values[i, mask])

    def start_value(self, start: int) -> float:
        """Cost of covering all other vertices from ``start``."""
        full = (1 << self.n) - 1
        return self.value(start, full ^ (1 << start))

    def full_visit_value(self, start: int, successors) -> float:
        """Cost when ``start`` itself also remains to be (re)visited.

        The first move pays n per unit of its duration and goes to a graph
        successor.  In discrete time the lazy self-loop is also available
        (revisit ``start`` immediately); a continuous chain has no
        self-transition, so there the first change must leave.
        """
        full = (1 << self.n) - 1
        options = [self.value(j, full ^ (1 << j)) for j in successors]
        if self.budgets is None:
            options.append(self.value(start, full ^ (1 << start)))
            first = float(self.n)
        else:
            first = self.n / float(self.budgets[start])
        return first + min(options)

    def mean_start_value(self) -> float:
        return float(np.mean([self.start_value(i) for i in range(self.n)]))


def _solve_table(g: DirectedGraph, step_cost, terminal=None) -> ValueTable:
    """Level-by-level Dijkstra over subsets in increasing popcount order.

    ``step_cost(i, size)`` is the positive cost of one move out of vertex i
    while ``size`` vertices remain unvisited; ``terminal`` optionally
    charges a per-vertex cost at the state where nothing is left.
    """
    n = g.n
    if n > MAX_BITS:
        raise StateSpaceTooLarge(f"n={n} exceeds {MAX_BITS}-bit subsets")
    if not is_strongly_connected(g):
        raise ValueError("graph must be strongly connected")
    succ = g.successor_lists()
    pred = g.predecessor_lists()
    size = 1 << n
    values = np.full((n, size), np.inf)
    policy = np.full((n, size), -1, dtype=np.int32)
    values[:, 0] = 0.0 if terminal is None else terminal

    masks_by_popcount = [[] for _ in range(n + 1)]
    for mask in range(1, size):
        masks_by_popcount[mask.bit_count()].append(mask)

    for level in range(1, n + 1):
        for mask in masks_by_popcount[level]:
            outside = [i for i in range(n) if not (mask >> i) & 1]
            if not outside:
                continue
            dist = {}
            for i in outside:
                best = np.inf
                for j in succ[i]:
                    if (mask >> j) & 1:
                        cand = step_cost(i, level) + values[j, mask ^ (1 << j)]
                        if cand < best:
                            best = cand
                if np.isfinite(best):
                    dist[i] = best
            # within-level moves: i -> j with j already visited keeps the mask
            heap = [(v, i) for i, v in dist.items()]
            heapq.heapify(heap)
            done = set()
            while heap:
                v, j = heapq.heappop(heap)
                if j in done:
                    continue
                done.add(j)
                values[j, mask] = v
                for i in pred[j]:
                    if (mask >> i) & 1 or i in done:
                        continue
                    cand = step_cost(i, level) + v
                    if cand < dist.get(i, np.inf):
                        dist[i] = cand
                        heapq.heappush(heap, (cand, i))
            # deterministic argmin successor: smallest id among minimizers
            for i in outside:
                best, arg = np.inf, -1
                for j in succ[i]:
                    target = values[j, mask ^ (1 << j)] if (mask >> j) & 1 else values[j, mask]
                    cand = step_cost(i, level) + target
                    if cand < best - 1e-12:
                        best, arg = cand, j
                policy[i, mask] = arg
    return ValueTable(n=n, values=values, policy=policy)


def discrete_value_function(g: DirectedGraph, start: int = 0,
                            target_set: int | None = None) -> ValueTable:
    """Unit-cost-per-remaining-vertex covering DP; exact for n <= 20.

    ``start`` and ``target_set`` only validate the intended query (the
    table covers all states); the canonical query is
    ``table.start_value(start)``.
    """
    table = _solve_table(g, lambda i, size: float(size))
    _validate_query(g, start, target_set)
    return table


def continuous_value_function(g: DirectedGraph, budgets,
                              start: int = 0,
                              target_set: int | None = None) -> ValueTable:
    """Covering DP with exponential sojourns at per-vertex rate budgets.

    ``budgets`` must be positive and sum to n within 1e-9 (the equilibrium
    normalization with uniform invariant measure).  The optimal policy puts
    the whole rate budget of the current vertex on a single successor, so
    the recursion is V(i, A) = |A|/a_i + min_j V(j, A \\ {j}).
    """
    a = np.asarray(budgets, dtype=float)
    if a.shape != (g.n,) or np.any(a <= 0):
        raise BudgetInvalid("budgets must be positive, one per vertex")
    if abs(a.sum() - g.n) > 1e-9:
        raise BudgetInvalid(f"budgets must sum to n={g.n}, got {a.sum()!r}")
    table = _solve_table(g, lambda i, size: size / a[i])
    _validate_query(g, start, target_set)
    return ValueTable(n=table.n, values=table.values, policy=table.policy, budgets=a)


def _validate_query(g: DirectedGraph, start: int, target_set: int | None):
    if not 0 <= start < g.n:
        raise ValueError(f"start {start} out of range")
    if target_set is not None:
        if target_set >> g.n:
            raise ValueError("target_set has bits beyond the vertex range")


def extract_policy_path(table: ValueTable, start: int,
                        initial_mask: int | None = None) -> list:
    """Follow the stored argmin successors until the unvisited set empties.

    On graphs where the optimum equals the Hamiltonian-path bound the
    result visits every vertex exactly once.
    """
    n = table.n
    mask = ((1 << n) - 1) ^ (1 << start) if initial_mask is None else initial_mask
    path = [start]
    current = start
    guard = 0
    while mask:
        nxt = int(table.policy[current, mask])
        if nxt < 0:
            break
        path.append(nxt)
        mask &= ~(1 << nxt)
        current = nxt
        guard += 1
        if guard > n * (1 << n):
            raise RuntimeError("policy walk did not terminate")
    return path


@dataclass(frozen=True)
class BudgetSearchResult:
    best_budgets: np.ndarray
    best_value: float

    def to_json(self) -> dict:
        return {
            "best_budgets": [float(b) for b in self.best_budgets],
            "best_value": self.best_value,
        }


def optimal_budget_search(g: DirectedGraph, grid: int = 12,
                          start: int | None = None,
                          objective: str = "time") -> BudgetSearchResult:
    """Minimize the covering cost over rate budgets on the simplex sum a = n.

    With ``objective="time"`` (default) the cost of a visit to vertex i is
    its expected sojourn 1/a_i, so the value is the expected time to cover
    the graph; on a Hamiltonian graph that is at least sum_i 1/a_i >= n by
    AM-HM, with equality exactly at the all-ones budget, which the search
    recovers.  ``objective="weighted"`` weights each sojourn by the number
    of still-unvisited vertices (the functional of
    :func:`continuous_value_function`); for that accounting all-ones is
    optimal on cycle graphs but not in general (on the complete 4-graph a
    skewed budget beats it, since rich graphs can reorder visits by
    budget), so no all-ones guarantee is attached.

    Start-averaged by default; with ``start`` given only that start's value
    is minimized.  Coarse simplex grid scan followed by pairwise
    coordinate descent.
    """
    n = g.n
    if n > 6:
        raise StateSpaceTooLarge("budget search supported for n <= 6")
    if grid < 4:
        raise ValueError("grid must be at least 4")
    if objective not in ("time", "weighted"):
        raise ValueError("objective must be 'time' or 'weighted'")
    kind = objective

    def objective(a: np.ndarray) -> float:
        if kind == "time":
            # every visit pays its expected sojourn, the terminal one too
            table = _solve_table(g, lambda i, size: 1.0 / a[i], terminal=1.0 / a)
        else:
            table = continuous_value_function(g, a)
        if start is not None:
            return table.start_value(start)
        return table.mean_start_value()

    best_a, best_v = None, np.inf
    for comp in itertools.combinations(range(grid - 1), n - 1):
        cuts = [-1, *comp, grid - 1]
        parts = np.array([cuts[k + 1] - cuts[k] for k in range(n)], dtype=float)
        if np.any(parts <= 0):
            continue
        a = parts * (n / grid)
        v = objective(a)
        if v < best_v:
            best_v, best_a = v, a

    # pairwise transfer polish with shrinking step
    step = float(n) / grid
    a = best_a.copy()
    while step > 1e-4:
        improved = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                cand = a.copy()
                cand[i] += step
                cand[j] -= step
                if cand[j] <= 1e-9:
                    continue
                v = objective(cand)
                if v < best_v - 1e-13:
                    best_v, a = v, cand
                    improved = True
        if not improved:
            step /= 2.0
    return BudgetSearchResult(best_budgets=a, best_value=float(best_v))


def value_iteration_oracle(g: DirectedGraph, step_cost) -> np.ndarray:
    """Independent cross-check: Bellman sweeps over the whole state space
    until a fixed point.  Exponential-time-ish but fine for n <= 8."""
    n = g.n
    succ = g.successor_lists()
    size = 1 << n
    values = np.full((n, size), np.inf)
    values[:, 0] = 0.0
    changed = True
    while changed:
        changed = False
        for mask in range(1, size):
            level = mask.bit_count()
            for i in range(n):
                if (mask >> i) & 1:
                    continue
                best = np.inf
                for j in succ[i]:
                    nxt = mask ^ (1 << j) if (mask >> j) & 1 else mask
                    cand = step_cost(i, level) + values[j, nxt]
                    if cand < best:
                        best = cand
                if best < values[i, mask] - 1e-12:
                    values[i, mask] = best
                    changed = True
    return values
