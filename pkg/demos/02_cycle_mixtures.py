"""Every balanced generator is a mixture of cycles
==================================================

The normalized generators leaving pi invariant form a convex polytope whose
extreme points are the single-cycle generators: deterministic tours of a
subset of states with rates 1/(len * pi).  Decomposing a generator into
cycles and recombining is the workhorse of everything else in the package.
"""

import numpy as np

from fastchain import (
    Cycle,
    CycleDecomposition,
    Generator,
    ProbabilityVector,
    combine,
    cycle_generator,
    decompose_into_cycles,
    invariant_measure,
)

pi = ProbabilityVector.uniform(3)
walk = Generator(0.5 * np.array([[-2.0, 1, 1], [1, -2, 1], [1, 1, -2]]))

# Greedy peeling of the stationary edge flow produces one valid mixture:
dec = decompose_into_cycles(walk, pi)
for cyc, w in dec.terms:
    print(f"weight {w:.4f} on cycle {cyc.vertices}")
print("reconstruction error:",
      np.abs(combine(dec, pi).rates - walk.rates).max())

# Mixtures are not unique: the same walk is also half a clockwise plus half
# a counterclockwise tour.
other = CycleDecomposition([(Cycle([0, 1, 2]), 0.5), (Cycle([0, 2, 1]), 0.5)])
print("\nalternative mixture reconstructs too:",
      np.abs(combine(other, pi).rates - walk.rates).max())

# Combining any weights gives a normalized pi-invariant generator for free.
pi = ProbabilityVector([0.5, 0.3, 0.2])
blend = combine(CycleDecomposition([(Cycle([0, 1]), 0.25),
                                    (Cycle([0, 1, 2]), 0.75)]), pi)
print("\nblend rates:\n", np.round(blend.rates, 4))
print("equilibrium jump rate:", -float(pi.weights @ np.diag(blend.rates)))
print("recovered invariant measure:", invariant_measure(blend).weights)

# The cycle generator itself is the unique member supported on its arcs.
pure = cycle_generator(pi, Cycle([0, 1, 2]))
print("\npure tour for a lopsided measure spends rate 1/(3 pi(x)):\n",
      np.round(pure.rates, 4))
