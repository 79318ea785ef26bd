"""Exact directional derivatives of the inverse speed F on the generator polytope.

Directions are differences L_dir - L where L_dir ranges over the normalized
pi-invariant generators (in particular single-cycle generators, the extreme
points).  The first derivative along a cycle A is

    D_A F(L) = F(L) - H_A(L),

where H_A averages the perturbation kernel h over the arcs of A.  The
second derivative along the segment toward L_A is assembled as

    d^2/de^2 F((1-e) L + e L_A) |_{e=0} = 2 F - 4 H_A + 2 H_{A,A},

with H_{A,A} the chained second-order term; the mixed form for two cycles
is the symmetric bilinear extension

    2 F - 2 H_A - 2 H_A' + H_{A,A'} + H_{A',A}.

The sign convention is pinned by the Taylor expansion of F along segments
and is validated against central finite differences in the test suite;
displays that disagree with it in sign are rejected by that oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigentime import (
    IdentityViolation,
    _hitting_matrix,
    _poisson_unchecked,
    expected_hitting_times,
    h_matrix,
    inverse_speed,
)
from .generator import (
    CycleDecomposition,
    Generator,
    ProbabilityVector,
    _require_irreducible,
    combine,
    cycle_generator,
    equilibrium_rate,
)
from .graph import Cycle

__all__ = [
    "DirectionInvalid",
    "DerivativeReport",
    "psi_solve",
    "h_cycle",
    "h_direction",
    "h_cross",
    "directional_derivative",
    "second_directional",
    "m_bound",
    "derivative_report",
]


class DirectionInvalid(ValueError):
    """Direction is not a normalized pi-invariant generator within tolerance."""


def _as_direction(direction, pi: ProbabilityVector, tol: float = 1e-9) -> Generator:
    """Coerce a Cycle / Generator / CycleDecomposition into a validated generator."""
    if isinstance(direction, Cycle):
        return cycle_generator(pi, direction)
    if isinstance(direction, CycleDecomposition):
        direction = combine(direction, pi)
    if not isinstance(direction, Generator):
        raise TypeError(f"unsupported direction type {type(direction)!r}")
    if direction.n != pi.n:
        raise DirectionInvalid("dimension mismatch")
    resid = float(np.abs(pi.weights @ direction.rates).max())
    if resid > tol:
        raise DirectionInvalid(f"direction is not pi-invariant, residual {resid!r}")
    c = equilibrium_rate(direction, pi)
    if abs(c - 1.0) > tol:
        raise DirectionInvalid(f"direction is not normalized, rate {c!r}")
    return direction


def _psi_columns(rates: np.ndarray, pi: np.ndarray, dir_rates: np.ndarray,
                 E: np.ndarray) -> np.ndarray:
    """psi_y for every y: anchored solutions of L psi = L_dir phi_y."""
    n = rates.shape[0]
    out = np.zeros((n, n))
    for y in range(n):
        out[:, y] = _poisson_unchecked(rates, dir_rates @ E[:, y], y)
    return out


def psi_solve(L: Generator, pi: ProbabilityVector, cycle: Cycle, y: int,
              check: bool = True) -> np.ndarray:
    """First-order response profile psi_y for a cycle direction.

    Solves L psi = L_A phi_y with psi(y) = 0, phi_y being the hitting-time
    column to y.  With ``check`` on, the solution is compared against the
    independent closed form

        psi_y(x) = (1/n) sum_l (phi_y(a_{l+1}) - phi_y(a_l))
                               (phi_{a_l}(x) - phi_{a_l}(y)),

    and an :class:`IdentityViolation` is raised beyond 1e-8 disagreement.
    The linear-solve value is returned.
    """
    _require_irreducible(L)
    E = expected_hitting_times(L, pi)
    dir_rates = cycle_generator(pi, cycle).rates
    psi = _poisson_unchecked(L.rates, dir_rates @ E[:, y], y)
    if check:
        closed = _psi_closed_form(E, cycle, y)
        err = float(np.abs(psi - closed).max())
        if err > 1e-8:
            raise IdentityViolation(f"psi closed-form disagreement {err!r}")
    return psi


def _psi_closed_form(E: np.ndarray, cycle: Cycle, y: int) -> np.ndarray:
    n_c = len(cycle)
    out = np.zeros(E.shape[0])
    for a, b in cycle.arcs():
        out += (E[b, y] - E[a, y]) * (E[:, a] - E[y, a])
    return out / n_c


def h_cycle(L: Generator, pi: ProbabilityVector, cycle: Cycle) -> float:
    """Arc-average of the perturbation kernel along a cycle: H_A(L)."""
    H = h_matrix(L, pi, check=False)
    return _h_cycle_from_matrix(H, cycle)


def _h_cycle_from_matrix(H: np.ndarray, cycle: Cycle) -> float:
    return float(sum(H[a, b] for a, b in cycle.arcs())) / len(cycle)


def h_direction(L: Generator, pi: ProbabilityVector, direction: Generator) -> float:
    """H for a general direction: sum_{x != y} pi(x) L_dir(x,y) h(x,y)."""
    H = h_matrix(L, pi, check=False)
    off = direction.rates.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.sum(pi.weights[:, None] * off * H))


def directional_derivative(L: Generator, pi: ProbabilityVector, direction) -> float:
    """Derivative of F at L along the segment toward ``direction``.

    ``direction`` may be a :class:`Cycle`, a normalized pi-invariant
    :class:`Generator`, or a :class:`CycleDecomposition`; membership is
    checked at 1e-9 and :class:`DirectionInvalid` raised otherwise.  For a
    cycle A the value is F(L) - H_A(L).
    """
    f = inverse_speed(L, pi)
    if isinstance(direction, Cycle):
        return f - h_cycle(L, pi, direction)
    gen = _as_direction(direction, pi)
    return f - h_direction(L, pi, gen)


def h_cross(L: Generator, pi: ProbabilityVector, cycle_a: Cycle, cycle_b: Cycle,
            E: np.ndarray | None = None, H: np.ndarray | None = None) -> float:
    """Chained second-order term H_{B,A}(L) for cycle directions.

    Equals sum_y pi(y) pi[Psi_y] where Psi_y solves L Psi = L_B psi_y and
    psi_y is the first-order profile for direction A.  Assembled from the
    hitting-time and perturbation matrices:

        (1/(n_A n_B)) sum_{l,k} (h(b_k, a_{l+1}) - h(b_k, a_l))
                                (phi_{a_l}(b_{k+1}) - phi_{a_l}(b_k)).
    """
    if E is None:
        E = expected_hitting_times(L, pi)
    if H is None:
        H = h_matrix(L, pi, check=False)
    total = 0.0
    for a, a1 in cycle_a.arcs():
        for b, b1 in cycle_b.arcs():
            total += (H[b, a1] - H[b, a]) * (E[b1, a] - E[b, a])
    return total / (len(cycle_a) * len(cycle_b))


def _mean_psi_cross_direct(L: Generator, pi: ProbabilityVector,
                           dir_a: Generator, dir_b: Generator) -> float:
    """sum_y pi(y) pi[Psi_y] by two chained anchored solves (oracle path)."""
    E = _hitting_matrix(L.rates, pi.weights)
    psi = _psi_columns(L.rates, pi.weights, dir_a.rates, E)
    total = 0.0
    for y in range(L.n):
        big_psi = _poisson_unchecked(L.rates, dir_b.rates @ psi[:, y], y)
        total += pi[y] * float(pi.weights @ big_psi)
    return total


def second_directional(L: Generator, pi: ProbabilityVector, cycle_a: Cycle,
                       cycle_b: Cycle | None = None, check: bool = True) -> float:
    """Second derivative of F along cycle directions.

    For ``cycle_b`` None or equal to ``cycle_a`` this is the second
    derivative of e -> F((1-e) L + e L_A) at e = 0, namely
    2 F - 4 H_A + 2 H_{A,A}.  For two distinct cycles it is the symmetric
    bilinear Hessian evaluated at the pair of segment directions,
    2 F - 2 H_A - 2 H_B + H_{A,B} + H_{B,A}, which reduces to the former
    when the cycles coincide and matches mixed central finite differences.

    With ``check`` on, every chained term is cross-validated against the
    direct double-solve route at 1e-8.
    """
    if cycle_b is None:
        cycle_b = cycle_a
    _require_irreducible(L)
    E = expected_hitting_times(L, pi)
    H = h_matrix(L, pi, check=False)
    f = float(pi.weights @ E @ pi.weights)
    h_a = _h_cycle_from_matrix(H, cycle_a)
    h_b = _h_cycle_from_matrix(H, cycle_b)
    cross_ba = h_cross(L, pi, cycle_a, cycle_b, E=E, H=H)
    cross_ab = h_cross(L, pi, cycle_b, cycle_a, E=E, H=H)
    if check:
        gen_a = cycle_generator(pi, cycle_a)
        gen_b = cycle_generator(pi, cycle_b)
        direct = _mean_psi_cross_direct(L, pi, gen_a, gen_b)
        if abs(direct - cross_ba) > 1e-8:
            raise IdentityViolation(
                f"chained term mismatch: assembled {cross_ba!r} vs solved {direct!r}")
    return 2.0 * f - 2.0 * h_a - 2.0 * h_b + cross_ab + cross_ba


def m_bound(L: Generator, pi: ProbabilityVector) -> float:
    """M(L) = max_{x,y} E_x[tau_y]; controls all derivative bounds."""
    return float(expected_hitting_times(L, pi).max())


@dataclass(frozen=True)
class DerivativeReport:
    f_value: float
    h_cycle: float
    first: float
    second: float | None
    m_bound: float

    def to_json(self) -> dict:
        return {
            "f_value": self.f_value,
            "h_cycle": self.h_cycle,
            "first": self.first,
            "second": self.second,
            "m_bound": self.m_bound,
        }


def derivative_report(L: Generator, pi: ProbabilityVector, cycle: Cycle,
                      with_second: bool = False) -> DerivativeReport:
    """F, H_A, first and (optionally) second derivative along one cycle."""
    f = inverse_speed(L, pi)
    h_a = h_cycle(L, pi, cycle)
    second = second_directional(L, pi, cycle) if with_second else None
    return DerivativeReport(
        f_value=f,
        h_cycle=h_a,
        first=f - h_a,
        second=second,
        m_bound=m_bound(L, pi),
    )
