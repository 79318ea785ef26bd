"""Command-line entry point.

Subcommands cover evaluation of a single generator (``eval``), polytope
minimization (``optimize``), the covering dynamic program (``dp``), the
discrete-time bridge (``discrete``), the slow-mass counterexample search
(``counterexample``), the segment closed forms (``s2``), and the
near-uniform robustness probe (``probe-theorem2``).  All inputs and outputs
are JSON; identical inputs and seeds give byte-identical output.  Every
report embeds a ``checks`` block with the identity residuals verified
during the run.

Exit codes: 0 success, 2 bad input, 3 numeric failure (no convergence or
exhausted search), 4 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from ._serialize import dumps
from .derivatives import derivative_report, m_bound
from .discrete_time import (
    Kernel,
    compare_wedges,
    discrete_eigentime_spectral,
    frak_f,
    hunter_trace,
    to_generator,
    to_kernel,
)
from .dp import continuous_value_function, discrete_value_function, extract_policy_path
from .eigentime import (
    expected_hitting_times,
    hitting_report,
    inverse_speed,
    kemeny_times,
    spectral_second_identity,
    spectrum,
)
from .experiments import (
    SearchExhausted,
    find_counterexample,
    s2_closed_form,
    theorem2_probe,
    triangle_leaf_graph,
)
from .generator import Generator, ProbabilityVector, invariant_measure
from .graph import Cycle, CycleBudgetExceeded, DirectedGraph, complete_graph, segment_graph
from .optimizer import brute_force_minimize, f_wedge, frank_wolfe_minimize, stationarity_check


class InputError(ValueError):
    pass


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_graph(path: str) -> DirectedGraph:
    obj = _load_json(path)
    try:
        return DirectedGraph.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad graph file {path}: {exc}") from exc


def _load_pi(path: str) -> ProbabilityVector:
    obj = _load_json(path)
    try:
        return ProbabilityVector(np.asarray(obj, dtype=float))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad probability file {path}: {exc}") from exc


def _load_generator(path: str) -> Generator:
    obj = _load_json(path)
    try:
        return Generator.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad generator file {path}: {exc}") from exc


def _load_kernel(path: str) -> Kernel:
    obj = _load_json(path)
    try:
        return Kernel.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad kernel file {path}: {exc}") from exc


def _emit(doc: dict, out: str | None) -> None:
    text = dumps(doc)
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _thread_cap() -> int:
    """FASTCHAIN_THREADS caps internal parallelism; 0 or unset means auto.
    The current implementation is sequential, so the cap is recorded only."""
    try:
        return int(os.environ.get("FASTCHAIN_THREADS", "0"))
    except ValueError:
        return 0


def _cmd_eval(args) -> int:
    L = _load_generator(args.generator)
    pi = _load_pi(args.pi) if args.pi else invariant_measure(L)
    rep = hitting_report(L, pi)
    spec = spectrum(L)
    lhs2, rhs2 = spectral_second_identity(L, pi)
    kem = kemeny_times(L, pi)
    doc = {
        "f": rep.f_value,
        "spectrum": spec.to_json(),
        "hitting": rep.to_json(),
        "pi": pi.to_json(),
        "checks": {
            "hitting_vs_spectral": abs(rep.f_value - spec.sum_reciprocals(1)),
            "spectral_second": abs(lhs2 - rhs2),
            "kemeny_spread": float(kem.max() - kem.min()),
        },
    }
    if args.derivatives:
        E = expected_hitting_times(L, pi)
        cycles = _cycles_below(L)
        doc["derivatives"] = [
            {
                "cycle": c.to_json(),
                **derivative_report(L, pi, c, with_second=args.second).to_json(),
            }
            for c in cycles
        ]
        doc["m_bound"] = m_bound(L, pi)
        doc["checks"]["m_vs_f_over_pimin_sq"] = float(
            E.max() - rep.f_value / pi.pi_min ** 2)
    _emit(doc, args.output)
    return 0


def _cycles_below(L: Generator) -> list:
    from .generator import support_graph
    from .graph import enumerate_simple_cycles

    return enumerate_simple_cycles(support_graph(L))


def _cmd_optimize(args) -> int:
    g = _load_graph(args.graph)
    pi = _load_pi(args.pi)
    report = frank_wolfe_minimize(g, pi, tol=args.tol, max_iters=args.max_iters,
                                  seed=args.seed, extra_starts=args.starts)
    station = stationarity_check(report.minimizer, pi, report.cycles)
    doc = report.to_json()
    doc["checks"] = {
        "stationarity_gap": station.max_gap,
        "f_recomputed": abs(station.f - report.f_min),
    }
    _emit(doc, args.output)
    return 0 if report.converged else 3


def _cmd_dp(args) -> int:
    g = _load_graph(args.graph)
    checks = {}
    if args.mode == "discrete":
        table = discrete_value_function(g, start=args.start)
    else:
        budgets = (np.asarray(_load_json(args.budgets), dtype=float)
                   if args.budgets else np.ones(g.n))
        table = continuous_value_function(g, budgets, start=args.start)
        unit = discrete_value_function(g, start=args.start)
        if args.budgets is None:
            checks["continuous_matches_discrete_at_unit_budgets"] = abs(
                table.start_value(args.start) - unit.start_value(args.start))
    bound = g.n * (g.n - 1) / 2
    checks["value_minus_hamiltonian_bound"] = float(
        table.start_value(args.start) - bound)
    if args.full_set:
        value = table.full_visit_value(args.start, g.successors(args.start))
        options = list(g.successors(args.start))
        if table.budgets is None:
            options.append(args.start)
        first = min(options,
                    key=lambda j: (table.value(j, ((1 << g.n) - 1) ^ (1 << j)), j))
        path = [args.start] + extract_policy_path(table, first)
    else:
        value = table.start_value(args.start)
        path = extract_policy_path(table, args.start)
    doc = {"value": float(value), "path": path, "mode": args.mode, "checks": checks}
    _emit(doc, args.output)
    return 0


def _cmd_discrete(args) -> int:
    if args.compare:
        g = _load_graph(args.graph)
        pi = _load_pi(args.pi)
        comp = compare_wedges(g, pi, seed=args.seed)
        doc = comp.to_json()
        doc["checks"] = {"wedge_gap_nonnegative": comp.gap}
        _emit(doc, args.output)
        return 0
    if not args.kernel:
        raise InputError("discrete needs --kernel (or --compare with --graph)")
    K = _load_kernel(args.kernel)
    pi = _load_pi(args.pi)
    value = frak_f(K, pi)
    trace = hunter_trace(K, pi)
    spectral = discrete_eigentime_spectral(K)
    L, k = to_generator(K, pi)
    back, _ = to_kernel(L)
    doc = {
        "frak_f": value,
        "hunter_trace": trace,
        "generator": L.to_json(),
        "k": k,
        "checks": {
            "hitting_vs_spectral": abs(value - spectral),
            "hunter_vs_frak_f": abs(trace - (1.0 + value)),
            "generator_value_ratio": abs(inverse_speed(L, pi) - value / k),
            "roundtrip_if_k0": float(np.abs(back.entries - K.entries).max()
                                     if np.min(np.diag(K.entries)) < 1e-12 else 0.0),
        },
    }
    _emit(doc, args.output)
    return 0


def _cmd_counterexample(args) -> int:
    g = _load_graph(args.graph) if args.graph else triangle_leaf_graph()
    report = find_counterexample(g)
    doc = report.to_json()
    doc["checks"] = {
        "margin_positive": report.margin,
        "hamiltonian_value_spread": float(max(report.hamiltonian_values)
                                          - min(report.hamiltonian_values)),
    }
    _emit(doc, args.output)
    return 0


def _cmd_s2(args) -> int:
    pi = _load_pi(args.pi)
    report = s2_closed_form(pi)
    station = stationarity_check(report.generator, pi,
                                 [Cycle([0, 1]), Cycle([1, 2])])
    doc = report.to_json()
    doc["checks"] = {
        "stationarity_gap": station.max_gap,
        "f_vs_hitting": abs(report.f_min - inverse_speed(report.generator, pi)),
    }
    _emit(doc, args.output)
    return 0


def _cmd_probe(args) -> int:
    g = _load_graph(args.graph)
    report = theorem2_probe(g, args.size, args.trials, args.seed)
    doc = report.to_json()
    doc["checks"] = {"worst_vertex_distance": report.worst_distance}
    _emit(doc, args.output)
    return 0


def _selftest() -> int:
    """Identity suite on built-in instances; prints one line per check."""
    from .generator import combine, cycle_generator, decompose_into_cycles

    results = []

    def check(name: str, residual: float, tol: float):
        results.append((name, residual, tol, abs(residual) <= tol))

    pi3 = ProbabilityVector.uniform(3)
    ham = cycle_generator(pi3, Cycle([0, 1, 2]))
    check("hamiltonian_f_is_1", inverse_speed(ham, pi3) - 1.0, 1e-12)
    check("eigentime_identity",
          inverse_speed(ham, pi3) - spectrum(ham).sum_reciprocals(1), 1e-10)
    lhs, rhs = spectral_second_identity(ham, pi3)
    check("spectral_second_identity", lhs - rhs, 1e-10)

    srw = Generator(0.5 * np.array([[-2.0, 1, 1], [1, -2, 1], [1, 1, -2]]))
    check("random_walk_f_is_4_3", inverse_speed(srw, pi3) - 4.0 / 3.0, 1e-12)
    dec = decompose_into_cycles(srw, pi3)
    check("decompose_roundtrip",
          float(np.abs(combine(dec, pi3).rates - srw.rates).max()), 1e-12)

    K, l = to_kernel(ham)
    check("kernel_bridge", frak_f(K, pi3) - l * inverse_speed(ham, pi3), 1e-10)
    check("hunter", hunter_trace(K, pi3) - (1.0 + frak_f(K, pi3)), 1e-10)

    seg = segment_graph(2)
    check("segment_f_wedge_16_9", f_wedge(seg, pi3, seed=7) - 16.0 / 9.0, 1e-7)
    brute = brute_force_minimize(seg, pi3, 1000)
    check("segment_brute_force", brute.f_min - 16.0 / 9.0, 1e-4)

    k3 = complete_graph(3)
    check("k3_minimum_is_1", f_wedge(k3, pi3, seed=7) - 1.0, 1e-8)

    table = discrete_value_function(k3)
    check("k3_dp_bound", table.start_value(0) - 3.0, 0.0)

    width = max(len(name) for name, *_ in results)
    ok = True
    for name, residual, tol, passed in results:
        ok &= passed
        print(f"{name:<{width}}  residual={residual: .3e}  tol={tol:.1e}  "
              f"{'PASS' if passed else 'FAIL'}")
    print("selftest:", "PASS" if ok else "FAIL")
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fastchain", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"fastchain {__version__}")
    p.add_argument("--selftest", action="store_true",
                   help="run the built-in identity suite and exit")
    sub = p.add_subparsers(dest="command")

    q = sub.add_parser("eval", help="hitting report, spectrum, and identities of one generator")
    q.add_argument("--generator", required=True)
    q.add_argument("--pi", default=None, help="defaults to the invariant measure")
    q.add_argument("--derivatives", action="store_true")
    q.add_argument("--second", action="store_true", help="include second derivatives")
    q.add_argument("--output", default=None)
    q.set_defaults(func=_cmd_eval)

    q = sub.add_parser("optimize", help="minimize F over the cycle polytope")
    q.add_argument("--graph", required=True)
    q.add_argument("--pi", required=True)
    q.add_argument("--tol", type=float, default=1e-8)
    q.add_argument("--max-iters", type=int, default=10_000, dest="max_iters")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--starts", type=int, default=8, help="extra random starts")
    q.add_argument("--output", default=None)
    q.set_defaults(func=_cmd_optimize)

    q = sub.add_parser("dp", help="covering dynamic program")
    q.add_argument("--graph", required=True)
    q.add_argument("--mode", choices=["discrete", "continuous"], default="discrete")
    q.add_argument("--budgets", default=None)
    q.add_argument("--full-set", action="store_true", dest="full_set")
    q.add_argument("--start", type=int, default=0)
    q.add_argument("--output", default=None)
    q.set_defaults(func=_cmd_dp)

    q = sub.add_parser("discrete", help="discrete-time kernel evaluation / wedge comparison")
    q.add_argument("--compare", action="store_true")
    q.add_argument("--graph", default=None)
    q.add_argument("--kernel", default=None)
    q.add_argument("--pi", required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--output", default=None)
    q.set_defaults(func=_cmd_discrete)

    q = sub.add_parser("counterexample", help="search for a measure beating all Hamiltonian generators")
    q.add_argument("--graph", default=None, help="defaults to the triangle-plus-leaf instance")
    q.add_argument("--output", default=None)
    q.set_defaults(func=_cmd_counterexample)

    q = sub.add_parser("s2", help="segment-graph closed-form minimizer")
    q.add_argument("--pi", required=True)
    q.add_argument("--output", default=None)
    q.set_defaults(func=_cmd_s2)

    q = sub.add_parser("probe-theorem2", help="near-uniform Hamiltonian robustness probe")
    q.add_argument("--graph", required=True)
    q.add_argument("--size", type=float, default=0.01)
    q.add_argument("--trials", type=int, default=20)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--output", default=None)
    q.set_defaults(func=_cmd_probe)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _thread_cap()
    if args.selftest:
        return _selftest()
    if not getattr(args, "command", None):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except CycleBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SearchExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
