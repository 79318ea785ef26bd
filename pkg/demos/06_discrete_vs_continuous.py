"""Discrete chains, continuous chains, and why continuous wins
==============================================================

A kernel K and a generator L tell the same story at different clocks.  The
map K = I + L / maxrate embeds generators into kernels with at least one
non-lazy state; its inverse is L = k (K - I).  Both maps scale the speed
functional by an explicit constant at least 1, so the best continuous chain
is never slower than the best discrete one.
"""

import numpy as np

from fastchain import (
    Cycle,
    Kernel,
    ProbabilityVector,
    compare_wedges,
    cycle_generator,
    discrete_eigentime_spectral,
    frak_f,
    hunter_trace,
    inverse_speed,
    to_generator,
    to_kernel,
)
from fastchain.graph import complete_graph, segment_graph

pi = ProbabilityVector.uniform(3)

# The cyclic permutation kernel is the discrete Hamiltonian tour.
perm = Kernel(np.array([[0.0, 1, 0], [0, 0, 1], [1, 0, 0]]))
print("discrete tour: value =", frak_f(perm, pi))
print("spectral route:", discrete_eigentime_spectral(perm))
print("Hunter trace (1 + value):", hunter_trace(perm, pi))

# Laziness rescales the value linearly: mixing with the identity slows.
lazy = Kernel(0.5 * np.eye(3) + 0.5 * perm.entries)
print("\nhalf-lazy tour value:", frak_f(lazy, pi), "(doubled)")

# Bridges: the tour kernel and the rate-1 tour generator are images of each
# other, and the speed constants are exactly the max exit rate.
L = cycle_generator(pi, Cycle([0, 1, 2]))
K, l = to_kernel(L)
print("\nto_kernel(tour generator): l =", l, ", kernel =\n", K.entries)
back, k = to_generator(K, pi)
print("round trip error:", np.abs(back.rates - L.rates).max(), ", k =", k)
print("value(K) = l * F(L):", frak_f(K, pi), "=", l * inverse_speed(L, pi))

# The two infima side by side.  Equality holds when the continuous
# minimizer has constant exit rates (uniform Hamiltonian case);
# on the segment the discrete side pays the max-rate factor 3/2.
for g, name in ((complete_graph(3), "K3"), (segment_graph(2), "segment")):
    comp = compare_wedges(g, pi, seed=0)
    print(f"\n{name}: continuous {comp.f_wedge:.6f}  discrete {comp.frak_f_wedge:.6f}"
          f"  gap {comp.gap:.6f}")
