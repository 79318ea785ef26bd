"""Hitting-time moments, the inverse communication speed, and spectral identities.

The central functional is

    F(L) = sum_{x,y} pi(x) pi(y) E_x[tau_y],

the mean time for the process generated by L to travel between two
independent samples of its invariant law.  Everything here is computed from
anchored Poisson solves: the column of expected hitting times to y is the
unique g with L g = f_y, g(y) = 0, where f_y = 1_y / pi(y) - 1.  Second
moments come from a second, chained Poisson solve, and the eigentime
identity F(L) = sum over nonzero eigenvalues of -L of 1/lambda provides an
independent spectral route used for cross-checking throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .generator import Generator, NotInvariant, ProbabilityVector, _require_irreducible
from .rng import RandomStream

__all__ = [
    "Spectrum",
    "HittingReport",
    "NotCentered",
    "SpectrumAmbiguous",
    "IdentityViolation",
    "poisson_solve",
    "expected_hitting_times",
    "kemeny_times",
    "inverse_speed",
    "spectrum",
    "eigentime_spectral",
    "second_moment_hitting",
    "h_matrix",
    "spectral_second_identity",
    "return_time_identities",
    "simulate_hitting",
    "hitting_report",
    "hamiltonian_speed_value",
]

ZERO_EIGEN_TOL = 1e-8


class NotCentered(ValueError):
    """Right-hand side of a Poisson solve has nonzero pi-mean."""


class SpectrumAmbiguous(ValueError):
    """Second-smallest eigenvalue magnitude is below tolerance; input is
    numerically reducible and the zero eigenvalue cannot be isolated."""


class IdentityViolation(ArithmeticError):
    """Two independent computation paths for the same quantity disagree."""


@dataclass(frozen=True)
class Spectrum:
    """Nonzero eigenvalues of -L with multiplicity, conjugation-closed."""

    values: tuple

    def sum_reciprocals(self, power: int = 1) -> float:
        s = sum(1.0 / (lam ** power) for lam in self.values)
        if abs(s.imag) > ZERO_EIGEN_TOL:
            raise SpectrumAmbiguous(f"reciprocal sum has imaginary part {s.imag!r}")
        return float(s.real)

    def to_json(self) -> list:
        vals = sorted(self.values, key=lambda z: (z.real, z.imag))
        return [[float(z.real), float(z.imag)] for z in vals]


@dataclass(frozen=True)
class HittingReport:
    """Bundle of all hitting-time functionals of one generator."""

    expectations: np.ndarray
    second_moments: np.ndarray
    kemeny: float
    f_value: float
    h: np.ndarray

    def to_json(self) -> dict:
        return {
            "expectations": self.expectations.tolist(),
            "second_moments": self.second_moments.tolist(),
            "kemeny": self.kemeny,
            "f_value": self.f_value,
            "h_matrix": self.h.tolist(),
        }


def _center_indicator(pi: ProbabilityVector, y: int) -> np.ndarray:
    f = np.full(pi.n, -1.0)
    f[y] += 1.0 / pi[y]
    return f


def poisson_solve(L: Generator, pi: ProbabilityVector, rhs: np.ndarray, anchor: int) -> np.ndarray:
    """Solve L g = rhs with g(anchor) = 0.

    The anchored system drops the (linearly dependent) anchor row and the
    anchor column; irreducibility makes the reduced matrix nonsingular.

    Parameters
    ----------
    rhs : array
        Must have pi-mean zero within 1e-9; otherwise no solution exists.
    anchor : int
        Vertex where the solution is pinned to zero.

    Raises
    ------
    NotCentered, NotIrreducible
    """
    rhs = np.asarray(rhs, dtype=float)
    if abs(float(pi.weights @ rhs)) > 1e-9:
        raise NotCentered(f"pi-mean of rhs is {float(pi.weights @ rhs)!r}")
    _require_irreducible(L)
    return _poisson_unchecked(L.rates, rhs, anchor)


def _poisson_unchecked(rates: np.ndarray, rhs: np.ndarray, anchor: int) -> np.ndarray:
    n = rates.shape[0]
    keep = [i for i in range(n) if i != anchor]
    A = rates[np.ix_(keep, keep)]
    g = np.zeros(n)
    g[keep] = np.linalg.solve(A, rhs[keep])
    return g


def _hitting_matrix(rates: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Matrix with entry (x, y) = E_x[tau_y], by one anchored solve per column."""
    n = rates.shape[0]
    E = np.zeros((n, n))
    for y in range(n):
        f = np.full(n, -1.0)
        f[y] += 1.0 / pi[y]
        E[:, y] = _poisson_unchecked(rates, f, y)
    return E


def expected_hitting_times(L: Generator, pi: ProbabilityVector) -> np.ndarray:
    """E_x[tau_y] for all pairs; diagonal is zero."""
    _require_irreducible(L)
    return _hitting_matrix(L.rates, pi.weights)


def kemeny_times(L: Generator, pi: ProbabilityVector) -> np.ndarray:
    """Vector of sum_y pi(y) E_x[tau_y]; constant in x (the Kemeny constant)."""
    return expected_hitting_times(L, pi) @ pi.weights


def inverse_speed(L: Generator, pi: ProbabilityVector) -> float:
    """F(L): pi-average over both start and target of the hitting times.

    Raises
    ------
    NotInvariant
        If pi is not invariant for L within 1e-9.
    NotIrreducible
    """
    resid = float(np.abs(pi.weights @ L.rates).max())
    if resid > 1e-9:
        raise NotInvariant(f"pi L residual {resid!r}")
    E = expected_hitting_times(L, pi)
    return float(pi.weights @ E @ pi.weights)


def spectrum(L: Generator) -> Spectrum:
    """Eigenvalues of -L with the single zero eigenvalue removed by magnitude.

    Uses the dense nonsymmetric eigensolver (balanced Hessenberg reduction
    plus shifted QR via LAPACK).  Raises :class:`SpectrumAmbiguous` when the
    second-smallest magnitude is below 1e-8, since then the zero eigenvalue
    of a numerically reducible input cannot be told apart.
    """
    vals = np.linalg.eigvals(-L.rates)
    order = np.argsort(np.abs(vals))
    vals = vals[order]
    if len(vals) > 1 and abs(vals[1]) < ZERO_EIGEN_TOL:
        raise SpectrumAmbiguous(
            f"second-smallest eigenvalue magnitude {abs(vals[1])!r} < {ZERO_EIGEN_TOL}")
    kept = sorted(vals[1:], key=lambda z: (z.real, z.imag))
    return Spectrum(tuple(complex(z) for z in kept))


def eigentime_spectral(L: Generator) -> float:
    """Sum of reciprocals of the nonzero eigenvalues of -L.

    Equals :func:`inverse_speed` for irreducible members of the normalized
    pi-invariant family (the eigentime identity), but is also defined for
    reducible inputs with an isolated zero eigenvalue, where it extends F.
    """
    return spectrum(L).sum_reciprocals(1)


def second_moment_hitting(L: Generator, pi: ProbabilityVector) -> np.ndarray:
    """E_x[tau_y^2] for all pairs, via a chained pair of Poisson solves.

    With phi_y the hitting-time column to y and aux_y the anchored solution
    of L aux = phi_y - pi[phi_y], the second moment is
    2 (pi[phi_y] phi_y(x) - aux_y(x)).  A Monte Carlo oracle for this
    formula is :func:`simulate_hitting`.
    """
    _require_irreducible(L)
    n = L.n
    E = _hitting_matrix(L.rates, pi.weights)
    M2 = np.zeros((n, n))
    for y in range(n):
        phi = E[:, y]
        mean = float(pi.weights @ phi)
        aux = _poisson_unchecked(L.rates, phi - mean, y)
        M2[:, y] = 2.0 * (mean * phi - aux)
    return M2


def h_matrix(L: Generator, pi: ProbabilityVector, check: bool = True) -> np.ndarray:
    """First-order perturbation kernel h(x, y) = E_y[tau_x^2]/2 - E_pi[tau_x] E_y[tau_x].

    Computed as minus the chained-Poisson solution evaluated crosswise; when
    ``check`` is set the moment-formula route is evaluated too and the two
    must agree within 1e-8.
    """
    _require_irreducible(L)
    n = L.n
    E = _hitting_matrix(L.rates, pi.weights)
    H = np.zeros((n, n))
    for x in range(n):
        phi = E[:, x]
        mean = float(pi.weights @ phi)
        aux = _poisson_unchecked(L.rates, phi - mean, x)
        H[x, :] = -aux
    if check:
        M2 = second_moment_hitting(L, pi)
        means = pi.weights @ E
        alt = 0.5 * M2.T - means[:, None] * E.T
        err = float(np.abs(H - alt).max())
        if err > 1e-8:
            raise IdentityViolation(f"h-matrix two-path disagreement {err!r}")
    return H


def spectral_second_identity(L: Generator, pi: ProbabilityVector) -> tuple:
    """Both sides of sum_{x,y} pi(x) pi(y) h(x,y) = sum 1/lambda^2."""
    lhs = float(pi.weights @ h_matrix(L, pi, check=False) @ pi.weights)
    rhs = spectrum(L).sum_reciprocals(2)
    return lhs, rhs


@dataclass(frozen=True)
class ReturnTimeReport:
    """Start-averaged hitting / return times to one target, with the
    spectral sums they are classically equated to."""

    hitting_avg: float
    spectral_sum: float
    return_avg: float
    spectral_sum_plus_one: float


def return_time_identities(L: Generator, pi: ProbabilityVector, y: int) -> ReturnTimeReport:
    """Start-averaged hitting and return times to y against spectral sums.

    ``hitting_avg`` is sum_x pi(x) E_x[tau_y]; ``return_avg`` replaces the
    x = y term by the mean return time E_y[T_y], computed by one-step
    conditioning (mean holding time 1/L(y) plus the jump-averaged hitting
    time back to y).

    By the Kac formula pi(y) E_y[T_y] = 1/L(y), so return_avg - hitting_avg
    = 1/L(y) exactly, and the classical "+1" shift of the spectral sum can
    only hold at vertices with unit exit rate; both sides are reported
    rather than asserted.  The identities that do hold unconditionally are
    the target-averaged (Kemeny) ones, see :func:`kemeny_times`.
    """
    _require_irreducible(L)
    E = expected_hitting_times(L, pi)
    s = spectrum(L).sum_reciprocals(1)
    hitting_avg = float(pi.weights @ E[:, y])
    rate_y = -L.rates[y, y]
    jump = L.rates[y, :].copy()
    jump[y] = 0.0
    ret = 1.0 / rate_y + float(jump @ E[:, y]) / rate_y
    return ReturnTimeReport(
        hitting_avg=hitting_avg,
        spectral_sum=s,
        return_avg=hitting_avg + pi[y] * ret,
        spectral_sum_plus_one=1.0 + s,
    )


@dataclass(frozen=True)
class SimulationReport:
    mean: float
    second_moment: float
    std_error: float
    second_moment_std_error: float
    samples: int


def simulate_hitting(L: Generator, x: int, y: int, samples: int, seed: int) -> SimulationReport:
    """Monte Carlo estimate of E_x[tau_y] and E_x[tau_y^2].

    Simulates the jump chain with exponential holding times, all sample
    paths advanced in lockstep; draws come from the frozen counter-based
    stream so results are bit-reproducible for a given seed.

    ``std_error`` is the standard error of the mean estimate,
    ``second_moment_std_error`` the one of the second-moment estimate.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _require_irreducible(L)
    if x == y:
        return SimulationReport(0.0, 0.0, 0.0, 0.0, samples)
    n = L.n
    rates = L.exit_rates()
    P = L.rates / rates[:, None]
    np.fill_diagonal(P, 0.0)
    cum = np.cumsum(P, axis=1)
    cum[:, -1] = 1.0

    stream = RandomStream(seed)
    state = np.full(samples, x, dtype=np.int64)
    total = np.zeros(samples)
    active = np.ones(samples, dtype=bool)
    while active.any():
        idx = np.nonzero(active)[0]
        s = state[idx]
        hold = stream.exponential(len(idx)) / rates[s]
        total[idx] += hold
        u = stream.uniform(len(idx))
        nxt = (cum[s] < u[:, None]).sum(axis=1)
        state[idx] = nxt
        active[idx] = nxt != y
    m1 = float(total.mean())
    m2 = float((total ** 2).mean())
    var1 = float(total.var(ddof=1)) if samples > 1 else 0.0
    var2 = float((total ** 2).var(ddof=1)) if samples > 1 else 0.0
    return SimulationReport(
        mean=m1,
        second_moment=m2,
        std_error=float(np.sqrt(var1 / samples)),
        second_moment_std_error=float(np.sqrt(var2 / samples)),
        samples=samples,
    )


def hitting_report(L: Generator, pi: ProbabilityVector) -> HittingReport:
    """Assemble expectations, second moments, Kemeny constant, F, and h."""
    E = expected_hitting_times(L, pi)
    M2 = second_moment_hitting(L, pi)
    H = h_matrix(L, pi, check=False)
    kem = E @ pi.weights
    return HittingReport(
        expectations=E,
        second_moments=M2,
        kemeny=float(kem.mean()),
        f_value=float(pi.weights @ E @ pi.weights),
        h=H,
    )


def hamiltonian_speed_value(pi: ProbabilityVector) -> float:
    """Closed-form F of any Hamiltonian-cycle generator for this pi:
    (N/2) sum_{x != y} pi(x) pi(y).  Independent of the cycle chosen."""
    w = pi.weights
    return 0.5 * pi.n * float(1.0 - w @ w)
