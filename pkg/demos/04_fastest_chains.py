"""Finding the fastest chain on a graph
=======================================

Minimizing F over the polytope of graph-compatible normalized generators is
a conditional-gradient loop: the exact derivative formula names the best
cycle to move toward, and an exact line search lets iterates land on
vertices of the polytope.  On Hamiltonian graphs with uniform measure the
minimizer is a pure Hamiltonian tour; on the 3-vertex segment (no
Hamiltonian cycle) it is a mixture known in closed form.
"""

import numpy as np

from fastchain import (
    ProbabilityVector,
    brute_force_minimize,
    epsilon_neighborhood,
    f_wedge,
    frank_wolfe_minimize,
    s2_closed_form,
)
from fastchain.graph import complete_graph, segment_graph

pi = ProbabilityVector.uniform(3)
k3 = complete_graph(3)
report = frank_wolfe_minimize(k3, pi, seed=0)
print("K3, uniform measure:")
print("  f_min =", report.f_min, " converged:", report.converged)
print("  weights over", [c.vertices for c in report.cycles])
print("  =", np.round(report.weights, 6), "(a pure Hamiltonian tour)")

# The segment 0 - 1 - 2 has no Hamiltonian cycle; the best chain hedges
# between the two short tours.
s2 = segment_graph(2)
report = frank_wolfe_minimize(s2, pi, seed=0)
print("\nsegment, uniform: f_min =", report.f_min, "(16/9)")
print("  weights:", np.round(report.weights, 6))

# Lopsided measures shift the hedge; the closed form knows exactly where.
pi_skew = ProbabilityVector([0.2, 0.3, 0.5])
closed = s2_closed_form(pi_skew)
report = frank_wolfe_minimize(s2, pi_skew, seed=0)
print("\nsegment, pi = (0.2, 0.3, 0.5):")
print("  optimizer:", report.f_min, " closed form:", closed.f_min)
print("  weight on (0,1):", report.weights[0], " closed form p:", closed.weight_01)

# A coarse grid scan over the mixture simplex agrees.
bf = brute_force_minimize(s2, pi_skew, grid_resolution=500)
print("  grid scan:", bf.f_min)

# Best value over all compatible chains, as one number:
print("\nf_wedge(K3, uniform) =", f_wedge(k3, pi, seed=0))

# The certified radius around a Hamiltonian tour inside which it is the
# unique minimizer (tiny, but fully explicit):
eps = epsilon_neighborhood(3, pi.pi_min)
print("certified neighborhood radius:", eps.eps, " (eps1 =", eps.eps1,
      ", eps2 =", eps.eps2, ")")
