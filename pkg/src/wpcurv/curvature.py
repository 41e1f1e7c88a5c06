"""Weil-Petersson curvature of the universal Teichmueller space in the ``nu_n`` basis.

All curvature quantities are built from the integrals

    I(a, b, l, d) = iint G(nu_a conj(nu_b)) nu_l conj(nu_d) rho d^2z,

with the Riemann tensor

    R(a, b, l, d) = -I(a, b, l, d) - I(a, d, l, b).

Products ``nu_a conj(nu_b)`` are formed analytically as single-mode
profiles ``(1 - t)^4 / 16 * c_a c_b * u^(a+b-4) e^{i(b-a) theta}``.  Each
``G`` solve is therefore a single radial problem.  The angular integral
is done on the grid's equispaced nodes, so the selection rule
``a - b + l - d = 0`` shows up in the computed values rather than being
assumed.

Every reported value carries ``est_error``.  This is the difference from
the same computation on a half-resolution radial grid, plus a
round-off floor.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .beltrami import basis_norm_factor, thick_part_constant
from .disk import DEFAULT_ANGULAR_ORDER, DEFAULT_RADIAL_COUNT, build_grid
from .errors import ConfigurationError, DomainError
from .resolvent import DEFAULT_SOLVER_TOL, RadialProfile, ResolventOperator, SolveCache

__all__ = [
    "CurvatureContext",
    "default_context",
    "CurvatureReport",
    "riemann_entry",
    "holo_sectional",
    "sectional",
    "RicciPartial",
    "ricci_partial",
    "aitken",
    "ThickPartBounds",
    "thick_part_bounds",
    "EINSTEIN_CONSTANT",
    "HOLO_LOWER_BOUND",
]

EINSTEIN_CONSTANT = -13.0 / (12.0 * math.pi)
HOLO_LOWER_BOUND = -3.0 / (2.0 * math.pi)

# est_error never drops below this many ulps of the value's scale
_ROUNDOFF_ULPS = 1000.0


class _Level:
    """Grid, operator and memoized pair integrals at one resolution."""

    def __init__(self, radial_count, angular_order, backend, solver_tol, cache):
        self.grid = build_grid(radial_count, angular_order)
        self.op = ResolventOperator(self.grid, backend, solver_tol, cache)

    def product_profile(self, a, b) -> RadialProfile:
        """``nu_a conj(nu_b)``: mode ``b - a``, reduced ``s^4/16 c_a c_b t^(min(a,b)-2)``."""
        g = self.grid
        reduced = g.s**4 / 16.0 * basis_norm_factor(a) * basis_norm_factor(b) * g.t ** (min(a, b) - 2)
        return RadialProfile(b - a, reduced, g)

    @functools.lru_cache(maxsize=4096)
    def G_product(self, a, b) -> RadialProfile:
        return self.op.apply_mode(self.product_profile(a, b))

    def pair_integral(self, a, b, l, d) -> complex:
        g = self.grid
        h = self.G_product(a, b)
        second = d - l
        # rho * nu_l conj(nu_d) in reduced form: s^2/4 c_l c_d t^(min(l,d)-2)
        rho_second = g.s**2 / 4.0 * basis_norm_factor(l) * basis_norm_factor(d) * g.t ** (min(l, d) - 2)
        radial = h.values * g.radial_nodes ** abs(second) * rho_second
        angular = g.angular_mean(h.mode + second)
        return 2.0 * np.pi * np.dot(g.radial_weights, radial) * angular


class CurvatureContext:
    """Working and half-resolution levels sharing one solve cache.

    Thread-safe for concurrent evaluation: levels are read-only apart from
    their memo tables, whose entries are deterministic.
    """

    def __init__(
        self,
        radial_count: int = DEFAULT_RADIAL_COUNT,
        angular_order: int = DEFAULT_ANGULAR_ORDER,
        backend: str = "mode_bvp",
        solver_tol: float = DEFAULT_SOLVER_TOL,
        cache: SolveCache | None = None,
    ):
        if radial_count < 8:
            raise ConfigurationError("radial_count must be >= 8 (half grid needs >= 4 nodes)")
        self.cache = cache if cache is not None else SolveCache()
        self.fine = _Level(radial_count, angular_order, backend, solver_tol, self.cache)
        self.coarse = _Level(radial_count // 2, angular_order, backend, solver_tol, self.cache)
        self.angular_order = angular_order

    @property
    def grid(self):
        return self.fine.grid

    def meta(self) -> dict:
        return {**self.fine.grid.meta(), "backend": self.fine.op.backend,
                "half_radial_count": self.coarse.grid.radial_count}

    def check_indices(self, *indices):
        for n in indices:
            if int(n) != n or n < 2:
                raise DomainError(f"basis index must be an integer >= 2, got {n!r}")
            if n - 2 > self.angular_order:
                raise ConfigurationError(
                    f"index {n} needs angular_order >= {n - 2} (have {self.angular_order})"
                )

    def integral(self, a, b, l, d):
        """``I(a, b, l, d)`` at both resolutions."""
        return self.fine.pair_integral(a, b, l, d), self.coarse.pair_integral(a, b, l, d)


@functools.lru_cache(maxsize=1)
def default_context() -> CurvatureContext:
    return CurvatureContext()


def _est(fine, coarse):
    scale = max(abs(fine), 1.0)
    return float(abs(fine - coarse) + _ROUNDOFF_ULPS * np.finfo(float).eps * scale)


@dataclass(frozen=True)
class CurvatureReport:
    quantity: str
    indices: tuple
    value: complex | float
    est_error: float
    grid_meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"quantity": self.quantity, "indices": list(self.indices)}
        if isinstance(self.value, complex):
            out["value"] = self.value.real
            out["value_imag"] = self.value.imag
        else:
            out["value"] = self.value
        out["est_error"] = self.est_error
        out["grid"] = dict(self.grid_meta)
        return out


def _riemann_pair(ctx, a, b, l, d):
    f1, c1 = ctx.integral(a, b, l, d)
    f2, c2 = ctx.integral(a, d, l, b)
    return -f1 - f2, -c1 - c2


def riemann_entry(alpha, beta, lam, delta, ctx: CurvatureContext | None = None) -> CurvatureReport:
    """``R_{alpha beta-bar lam delta-bar}`` of the WP metric on T_H(1).

    Sign convention: ``R = -iint G(nu_a nu_b-bar) nu_l nu_d-bar rho - iint G(nu_a nu_d-bar) nu_l nu_b-bar rho``,
    so holomorphic sectional curvatures are negative.
    """
    ctx = ctx or default_context()
    ctx.check_indices(alpha, beta, lam, delta)
    fine, coarse = _riemann_pair(ctx, alpha, beta, lam, delta)
    return CurvatureReport("riemann_entry", (alpha, beta, lam, delta), complex(fine),
                           _est(fine, coarse), ctx.meta())


def holo_sectional(n, ctx: CurvatureContext | None = None) -> CurvatureReport:
    """``s_n = -2 iint G(|nu_n|^2) |nu_n|^2 rho``."""
    ctx = ctx or default_context()
    ctx.check_indices(n)
    fine, coarse = ctx.integral(n, n, n, n)
    fine, coarse = -2.0 * fine.real, -2.0 * coarse.real
    return CurvatureReport("holo_sectional", (n,), float(fine), _est(fine, coarse), ctx.meta())


def sectional(m, n, ctx: CurvatureContext | None = None) -> CurvatureReport:
    """Sectional curvature of the real plane spanned by ``nu_m`` and ``nu_n`` (m != n).

    ``K = Re I(m,n,m,n) - I(m,m,n,n)/2 - I(m,n,n,m)/2``.
    """
    ctx = ctx or default_context()
    ctx.check_indices(m, n)
    if m == n:
        raise DomainError("sectional curvature needs two distinct basis vectors")

    def K(level):
        return (level.pair_integral(m, n, m, n).real
                - 0.5 * level.pair_integral(m, m, n, n).real
                - 0.5 * level.pair_integral(m, n, n, m).real)

    fine, coarse = K(ctx.fine), K(ctx.coarse)
    return CurvatureReport("sectional", (m, n), float(fine), _est(fine, coarse), ctx.meta())


def aitken(seq):
    """Aitken delta-squared transform of a sequence (length shrinks by 2)."""
    x = np.asarray(seq, dtype=float)
    if len(x) < 3:
        return x.copy()
    d1 = x[1:-1] - x[:-2]
    d2 = x[2:] - 2.0 * x[1:-1] + x[:-2]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x[2:] - (x[2:] - x[1:-1]) ** 2 / d2
    return np.where(d2 == 0, x[2:], out)


@dataclass(frozen=True)
class RicciPartial:
    """Partial sums ``sum_{beta=2}^{N} R_{alpha beta-bar beta alpha-bar}`` for N = 2 .. cutoff."""

    alpha: int
    cutoffs: np.ndarray
    partial_sums: np.ndarray
    est_errors: np.ndarray
    grid_meta: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return float(self.partial_sums[-1])

    @property
    def est_error(self) -> float:
        return float(self.est_errors[-1])

    @property
    def extrapolated(self) -> float:
        """Last term of the Aitken-transformed partial-sum sequence."""
        return float(aitken(self.partial_sums)[-1])

    def reports(self):
        return [
            CurvatureReport("ricci_partial", (self.alpha, int(N)), float(v), float(e), self.grid_meta)
            for N, v, e in zip(self.cutoffs, self.partial_sums, self.est_errors)
        ]


def ricci_partial(alpha, cutoff, ctx: CurvatureContext | None = None, workers: int | None = None) -> RicciPartial:
    """Truncated Ricci curvature ``sum_{beta=2}^{cutoff} R_{alpha beta-bar beta alpha-bar}``.

    Each summand is ``-(I(a,b,b,a) + I(a,a,b,b)) <= 0``, so the partial sums
    decrease towards the Einstein constant ``-13/(12 pi)``.
    """
    ctx = ctx or default_context()
    ctx.check_indices(alpha, cutoff)
    if cutoff < alpha:
        raise DomainError("cutoff must be >= alpha")
    betas = list(range(2, cutoff + 1))

    def term(b):
        return _riemann_pair(ctx, alpha, b, b, alpha)

    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            terms = list(pool.map(term, betas))
    else:
        terms = [term(b) for b in betas]
    fine = np.cumsum([t[0].real for t in terms])
    coarse = np.cumsum([t[1].real for t in terms])
    est = np.array([_est(f, c) for f, c in zip(fine, coarse)])
    return RicciPartial(alpha, np.array(betas), fine, est, ctx.meta())


@dataclass(frozen=True)
class ThickPartBounds:
    """Curvature bounds at a genus-``g`` surface with injectivity radius ``r``.

    Lower bounds depend on ``r`` through ``C(r)``; upper bounds depend on the
    genus only.  The sectional curvature has no negative upper bound.
    """

    genus: int
    inj_radius: float
    c_value: float
    dim: int
    lower_holo: float
    lower_sect: float
    lower_ricci: float
    lower_scalar: float
    upper_holo: float
    upper_ricci: float
    upper_scalar: float

    BOUND_FIELDS = ("lower_holo", "lower_sect", "lower_ricci", "lower_scalar",
                    "upper_holo", "upper_ricci", "upper_scalar")

    def consistent(self) -> bool:
        pairs = [(self.lower_holo, self.upper_holo), (self.lower_ricci, self.upper_ricci),
                 (self.lower_scalar, self.upper_scalar)]
        values = [getattr(self, f) for f in self.BOUND_FIELDS]
        return all(lo <= hi for lo, hi in pairs) and all(v < 0 for v in values)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("genus", "inj_radius", "c_value", "dim") + self.BOUND_FIELDS}


def thick_part_bounds(g: int, r: float) -> ThickPartBounds:
    if int(g) != g or g < 2:
        raise DomainError("genus must be an integer >= 2")
    C = thick_part_constant(r).value
    g = int(g)
    dim = 3 * g - 3
    lower = -2.0 * C * C
    return ThickPartBounds(
        genus=g,
        inj_radius=float(r),
        c_value=C,
        dim=dim,
        lower_holo=lower,
        lower_sect=lower,
        lower_ricci=lower,
        lower_scalar=dim * lower,
        upper_holo=-1.0 / (2.0 * math.pi * (g - 1)),
        upper_ricci=-1.0 / (2.0 * math.pi * (g - 1)),
        upper_scalar=-3.0 * (3 * g - 2) / (4.0 * math.pi),
    )
