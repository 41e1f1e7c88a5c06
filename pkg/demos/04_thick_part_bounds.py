"""
Thick-part bounds for moduli space
==================================

The constant C(r) controls the lower curvature bounds at a surface with
injectivity radius r.  Upper bounds depend on the genus only.
"""

import numpy as np

from wpcurv import thick_part_bounds, thick_part_constant

for r in np.geomspace(1e-2, 10, 7):
    print(f"C({r:7.3f}) = {thick_part_constant(r).value:.10f}")

for g in (2, 3, 10):
    b = thick_part_bounds(g, 0.5)
    print(f"g = {g:>2}: holo in [{b.lower_holo:.4f}, {b.upper_holo:.4f}], "
          f"scalar in [{b.lower_scalar:.4f}, {b.upper_scalar:.4f}]")
