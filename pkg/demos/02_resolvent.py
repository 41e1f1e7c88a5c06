"""
Applying the resolvent G
========================

G = (1/2)(Delta + 1/2)^{-1} acts mode by mode.  We check G(1) = 1, compare
the collocation and kernel backends and run the positivity checks.
"""

import numpy as np

from wpcurv import GridFunction, ResolventOperator, build_grid, lemma1_suite
from wpcurv.resolvent import random_band_limited

grid = build_grid()
op = ResolventOperator(grid)
kernel = ResolventOperator(grid, backend="kernel_convolution")

one = GridFunction.constant(grid)
print("sup |G(1) - 1| =", np.max(np.abs(op.apply(one).on_grid() - 1)))

rng = np.random.default_rng(0)
f = random_band_limited(grid, rng)
a, b = op.apply(f).on_grid(), kernel.apply(f).on_grid()
print("backend disagreement (relative):", np.max(np.abs(a - b)) / np.max(np.abs(a)))
print("forward residual:", op.residual(f))

# positivity, mass preservation, positivity preservation, Cauchy-Schwarz
g = random_band_limited(grid, rng)
for line in lemma1_suite(op, f, g).lines():
    print(" ", line)
