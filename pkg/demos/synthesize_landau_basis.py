"""Synthesize Gabor-like elements for the landau44 kernel and check orthonormality.

The old-variable elements are sampled on a grid; their trapezoidal inner
products are compared with the Gram entries computed in the new variables.
"""

import math

import numpy as np

from gaborlike import FactorizedState, catalog_kernel, gram_gabor_factorized, synthesize, synthesize_grid
from gaborlike.windows import LatticeSpec

kernel = catalog_kernel("landau44")
state = FactorizedState.of("gauss", "gauss")
lattice = LatticeSpec.gabor(math.sqrt(math.pi), math.sqrt(math.pi), 2)

print("Psi_o(0) =", synthesize(kernel, state, [0.0, 0.0]))
print("Psi_o(1, 2) =", synthesize(kernel, state, [1.0, 2.0]))

axis = np.linspace(-12, 12, 241)
h = axis[1] - axis[0]
base = synthesize_grid(kernel, state, [axis, axis])
print("grid norm of Psi_o:", base.norm())

for l, k in [((0, 0), (0, 0)), ((1, 0), (0, 0)), ((0, 1), (1, -1))]:
    elem = synthesize_grid(kernel, state.gabor_atoms(lattice, l, k), [axis, axis])
    old = np.sum(np.conj(elem.values) * base.values) * h * h
    new = gram_gabor_factorized(state, lattice, l, k)
    print(f"l={l} k={k}: old-variable {old:.10f}  new-variable {new:.10f}")
