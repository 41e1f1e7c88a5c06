"""
The orthonormal basis and its sup-norms
=======================================

Builds the first few basis differentials, checks their Weil-Petersson
Gram matrix and compares numerical sup-norms with the closed form.
"""

import math

import numpy as np

from wpcurv import basis_element, build_grid, sup_norm_exact, sup_norm_numeric, wp_inner

grid = build_grid()

# Gram matrix of nu_2 .. nu_8 by quadrature
basis = [basis_element(n) for n in range(2, 9)]
gram = np.array([[wp_inner(a, b, grid) for b in basis] for a in basis])
print("max |Gram - I| =", np.max(np.abs(gram - np.eye(len(basis)))))

# the sup-norm sits at |z| = sqrt((n-2)/(n+2)) and shrinks like n^{-1/2}
print(f"{'n':>3} {'numeric':>14} {'exact':>14} {'radius':>10}")
for n in (2, 3, 5, 10, 20):
    res = sup_norm_numeric(basis_element(n))
    print(f"{n:>3} {res.value:14.10f} {sup_norm_exact(n):14.10f} {res.radius:10.6f}")

# nu_2 attains the sharp constant sqrt(3 / (4 pi))
print("sup |nu_2| - sqrt(3/(4 pi)) =", sup_norm_exact(2) - math.sqrt(3 / (4 * math.pi)))
