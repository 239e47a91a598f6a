"""Gabor frame bounds for box and Gaussian windows, and frame sums inside them."""

import math

import numpy as np

from gaborlike import FactorizedState, estimate_frame_bounds_1d, frame_sum, random_gaussians
from gaborlike.windows import LatticeSpec, make_window

cases = [("box", 2 * math.pi, 1.0), ("gauss", math.sqrt(math.pi), math.sqrt(math.pi))]
for name, a, b in cases:
    fb = estimate_frame_bounds_1d(make_window(name), a, b, basis_size=128, truncation=10)
    print(f"{name}: a*b = {a * b:.4f}  A = {fb.lower:.4f}  B = {fb.upper:.4f}  converged = {fb.converged}")

# products of 1-D bounds bracket the sums of a two-dimensional tensor system
fb = estimate_frame_bounds_1d(make_window("gauss"), math.sqrt(math.pi), math.sqrt(math.pi), 128, 10)
state = FactorizedState.of("gauss", "gauss")
lattice = LatticeSpec.gabor(math.sqrt(math.pi), math.sqrt(math.pi), 2)
print(f"2-D band: [{fb.lower**2:.4f}, {fb.upper**2:.4f}]")
for f in random_gaussians(np.random.default_rng(1), 2, 4):
    print(f"  {f.label}: sum |<Psi_lk, f>|^2 / ||f||^2 = {frame_sum(f, state, lattice, 8):.4f}")
