"""
Curvature of the Weil-Petersson metric
======================================

Holomorphic sectional curvatures decay to zero, sectional curvatures stay
above -3/(2 pi) and the truncated Ricci sums creep towards -13/(12 pi).
"""

import math

from wpcurv import CurvatureContext, holo_sectional, ricci_partial, sectional

ctx = CurvatureContext()

print("holomorphic sectional curvature s_n")
for n in (2, 3, 5, 10, 20, 40):
    r = holo_sectional(n, ctx)
    print(f"  n = {n:>2}: {r.value: .10f}  (est_error {r.est_error:.1e})")

worst = min(sectional(m, n, ctx).value for m in range(2, 13) for n in range(m + 1, 13))
print(f"most negative K(m, n), m < n <= 12: {worst:.6f}  vs  {-3 / (2 * math.pi):.6f}")

rp = ricci_partial(2, 64, ctx)
print("Ricci partial sums for alpha = 2")
for N in (2, 4, 8, 16, 32, 64):
    print(f"  N = {N:>2}: {rp.partial_sums[N - 2]: .6f}")
print(f"Aitken estimate {rp.extrapolated:.6f}, Einstein constant {-13 / (12 * math.pi):.6f}")
