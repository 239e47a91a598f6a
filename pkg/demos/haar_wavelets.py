"""Wavelet-like elements from the Haar generator under the landau44 kernel."""

import numpy as np

from gaborlike import FactorizedState, catalog_kernel, closed_form, wavelet_basis_element, wavelet_gram_table

state = FactorizedState.of("haar", "haar")
kernel = catalog_kernel("landau44")

table = wavelet_gram_table(state, 2)
print("exact Gram table over |j|, |k| <= 2: max |Omega - delta| =", table.max_deviation)

for x in ([0.5, 1.0], [2 * np.pi, 0.0], [-3.0, 4.0]):
    v = wavelet_basis_element(kernel, state, (0, 0), (0, 0), x)
    print(f"x={x}: synthesized {v:.12f}  closed form {closed_form('haar_landau', x):.12f}")

for j in [(1, 0), (0, 2), (2, 2)]:
    v = wavelet_basis_element(kernel, state, j, (0, 0), [1.0, 2.5])
    print(f"j={j} k=(0, 0) at (1, 2.5): |element| = {abs(v):.6f}")
