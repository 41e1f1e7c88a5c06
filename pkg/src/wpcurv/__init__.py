"""Weil-Petersson curvature on the universal Teichmueller space.

Submodules
----------
disk        hyperbolic disk geometry and quadrature grids
beltrami    harmonic Beltrami differentials, sup-norms, C(r), projection kernel
resolvent   the operator G = (1/2)(Delta + 1/2)^{-1}
curvature   Riemann tensor, sectional/Ricci curvatures, thick-part bounds
report, cli configuration, result files, command line
"""

from .beltrami import (
    HarmonicBeltrami,
    ProjectionKernel,
    basis_element,
    lambda_sup,
    projection_kernel_eval,
    prop1_chain,
    sup_norm_exact,
    sup_norm_numeric,
    thick_part_constant,
    wp_inner,
)
from .curvature import (
    CurvatureContext,
    holo_sectional,
    ricci_partial,
    riemann_entry,
    sectional,
    thick_part_bounds,
)
from .disk import DiskAutomorphism, automorphism_apply, build_grid, hyperbolic_disk_radius, rho
from .errors import AccuracyError, ConfigurationError, DomainError, NumericalError
from .resolvent import GridFunction, RadialProfile, ResolventOperator, apply_G, apply_G_mode, lemma1_suite

__version__ = "0.1.0"
