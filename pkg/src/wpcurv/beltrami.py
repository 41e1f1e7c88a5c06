"""Harmonic Beltrami differentials on the disk.

A harmonic Beltrami differential is ``nu = rho^{-1} conj(q)`` with ``q``
holomorphic.  We store ``q`` through the coefficients ``a_n`` of

    q(z) = sum_{n >= 2} (n^3 - n) a_n z^(n-2),

so that ``nu(0) = 3 a_2 / 2``.  The functions ``nu_n`` with
``a_n = sqrt(2 / (pi (n^3 - n)))`` form an orthonormal basis for the
Weil-Petersson inner product ``<a, b> = iint nu_a conj(nu_b) rho d^2z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np
from scipy import optimize, special

from .disk import QuadratureGrid, build_grid, hyperbolic_disk_radius
from .errors import AccuracyError, DomainError

__all__ = [
    "HarmonicBeltrami",
    "basis_element",
    "basis_norm_factor",
    "wp_inner",
    "sup_norm_exact",
    "sup_norm_numeric",
    "SupNorm",
    "ThickPartConstant",
    "thick_part_constant",
    "LEMMA2_CONSTANT",
    "Prop1Chain",
    "prop1_chain",
    "ProjectionKernel",
    "projection_kernel_eval",
    "projection_reproduce",
    "lambda_sup",
]

# Sharp sup-norm / WP-norm ratio on the disk, attained by nu_2.
LEMMA2_CONSTANT = math.sqrt(3.0 / (4.0 * math.pi))

DEFAULT_MAX_TRUNCATION = 64


def _weight(n):
    return n**3 - n


def basis_norm_factor(n: int) -> float:
    """``sqrt(2 (n^3 - n) / pi)``, the leading factor of ``nu_n``."""
    return math.sqrt(2.0 * _weight(n) / math.pi)


@dataclass(frozen=True)
class HarmonicBeltrami:
    """Finite harmonic Beltrami differential given by its ``a_n`` (n >= 2)."""

    coefficients: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        coeffs = {}
        for n, a in dict(self.coefficients).items():
            if int(n) != n or n < 2:
                raise DomainError(f"coefficient index must be an integer >= 2, got {n!r}")
            if a != 0:
                coeffs[int(n)] = complex(a)
        object.__setattr__(self, "coefficients", dict(sorted(coeffs.items())))

    @classmethod
    def from_array(cls, values, start: int = 2):
        return cls({start + i: v for i, v in enumerate(values)})

    @property
    def indices(self) -> list[int]:
        return list(self.coefficients)

    @property
    def max_index(self) -> int:
        return max(self.coefficients, default=2)

    def __add__(self, other):
        out = dict(self.coefficients)
        for n, a in other.coefficients.items():
            out[n] = out.get(n, 0) + a
        return HarmonicBeltrami(out)

    def __mul__(self, c):
        return HarmonicBeltrami({n: c * a for n, a in self.coefficients.items()})

    __rmul__ = __mul__

    def q_coefficients(self) -> np.ndarray:
        """Taylor coefficients of ``q`` in ``z^(n-2)``, index 0 .. max_index-2."""
        b = np.zeros(self.max_index - 1, dtype=complex)
        for n, a in self.coefficients.items():
            b[n - 2] = _weight(n) * a
        return b

    def q(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polynomial.polynomial.polyval(z, self.q_coefficients())

    def __call__(self, z):
        """Evaluate ``nu(z) = (1 - |z|^2)^2 / 4 * conj(q(z))``."""
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= 1):
            raise DomainError("point must satisfy |z| < 1")
        out = (1.0 - np.abs(z) ** 2) ** 2 / 4.0 * np.conj(self.q(z))
        return complex(out) if out.ndim == 0 else out

    @property
    def center_value(self) -> complex:
        """``nu(0) = 3 a_2 / 2``."""
        return 1.5 * np.conj(self.coefficients.get(2, 0j))

    def wp_norm_sq(self) -> float:
        """Closed form ``(pi/2) sum (n^3 - n) |a_n|^2``."""
        return 0.5 * math.pi * sum(_weight(n) * abs(a) ** 2 for n, a in self.coefficients.items())

    def wp_norm(self) -> float:
        return math.sqrt(self.wp_norm_sq())

    def on_grid(self, grid: QuadratureGrid) -> np.ndarray:
        """Samples on ``grid.points()``, with the boundary factor taken from ``grid.s``."""
        u = grid.radial_nodes
        phase = np.exp(-1j * grid.angles)
        out = np.zeros((grid.radial_count, grid.angular_count), dtype=complex)
        for n, a in self.coefficients.items():
            radial = _weight(n) * np.conj(a) * u ** (n - 2)
            out += np.outer(radial, phase ** (n - 2))
        return (grid.s**2 / 4.0)[:, None] * out


def basis_element(n: int) -> HarmonicBeltrami:
    """The orthonormal basis element ``nu_n = rho^{-1} sqrt(2(n^3-n)/pi) conj(z)^(n-2)``."""
    if int(n) != n or n < 2:
        raise DomainError(f"basis index must be an integer >= 2, got {n!r}")
    n = int(n)
    return HarmonicBeltrami({n: basis_norm_factor(n) / _weight(n)})


def wp_inner(a: HarmonicBeltrami, b: HarmonicBeltrami, grid: QuadratureGrid | None = None) -> complex:
    """Weil-Petersson inner product ``iint nu_a conj(nu_b) rho d^2z`` by quadrature.

    With the coefficient convention above this equals
    ``(pi/2) sum (n^3 - n) conj(a_n) b_n``.
    """
    grid = grid or build_grid()
    if grid.outer_radius != 1.0:
        raise AccuracyError("WP inner product needs a grid covering the whole disk")
    top = max(a.max_index, b.max_index)
    if top - 2 > grid.angular_order:
        raise AccuracyError(
            f"angular mode {top - 2} exceeds grid angular_order {grid.angular_order}"
        )
    # radial integrand after cancelling rho: polynomial of degree top in t
    if top > 2 * grid.radial_count - 1:
        raise AccuracyError(f"radial_count {grid.radial_count} too small for index {top}")
    integrand = a.on_grid(grid) * np.conj(b.on_grid(grid))
    return complex(grid.integrate(integrand, "hyperbolic"))


def sup_norm_exact(n: int) -> float:
    """Closed-form sup-norm of ``nu_n``.

    ``sqrt(2(n^3-n)/pi) * 4/(n+2)^2 * ((n-2)/(n+2))^((n-2)/2)``, attained at
    ``|z| = sqrt((n-2)/(n+2))``.
    """
    if int(n) != n or n < 2:
        raise DomainError(f"basis index must be an integer >= 2, got {n!r}")
    n = int(n)
    power = ((n - 2) / (n + 2)) ** ((n - 2) / 2) if n > 2 else 1.0
    return basis_norm_factor(n) * 4.0 / (n + 2) ** 2 * power


class SupNorm(NamedTuple):
    value: float
    radius: float
    angle: float


def _angular_max(b: np.ndarray, u: float, samples: int) -> tuple[float, float]:
    """max over theta of |sum_j b_j (u e^{-i theta})^j| and the maximizing angle."""
    deg = len(b) - 1
    if np.count_nonzero(b) <= 1:
        j = int(np.flatnonzero(b)[0]) if np.any(b) else 0
        return abs(b[j]) * u**j, 0.0
    coeffs = b * u ** np.arange(deg + 1)
    thetas = 2 * np.pi * np.arange(samples) / samples
    # sum_j c_j e^{-i j theta} is an FFT of the zero-padded coefficients
    padded = np.zeros(samples, dtype=complex)
    padded[: deg + 1] = coeffs
    vals = np.abs(np.fft.fft(padded))
    j = int(np.argmax(vals))
    h = 2 * np.pi / samples

    def neg(theta):
        return -abs(np.polynomial.polynomial.polyval(np.exp(-1j * theta), coeffs))

    res = optimize.minimize_scalar(
        neg, bounds=(thetas[j] - h, thetas[j] + h), method="bounded", options={"xatol": 1e-12}
    )
    if -res.fun >= vals[j]:
        return -res.fun, float(res.x % (2 * np.pi))
    return vals[j], thetas[j]


def sup_norm_numeric(v: HarmonicBeltrami, sweep: int = 513, xatol: float = 1e-10) -> SupNorm:
    """Numerical sup-norm of a finite harmonic Beltrami differential.

    The angular maximum ``M(u)`` of ``|nu|`` on the circle of radius ``u`` is
    swept over ``u`` in [0, 1]; the best sample is polished by bounded Brent
    (golden section with parabolic steps) to ``xatol`` in radius.
    """
    if not v.coefficients:
        return SupNorm(0.0, 0.0, 0.0)
    b = np.conj(v.q_coefficients())
    samples = max(256, 8 * len(b))

    def profile(u):
        m, _ = _angular_max(b, u, samples)
        return (1.0 - u * u) ** 2 / 4.0 * m

    us = np.linspace(0.0, 1.0, sweep)
    # coarse sweep: sampled angular maxima for all radii in one FFT
    padded = np.zeros((sweep, samples), dtype=complex)
    padded[:, : len(b)] = b[None, :] * us[:, None] ** np.arange(len(b))[None, :]
    vals = (1.0 - us**2) ** 2 / 4.0 * np.max(np.abs(np.fft.fft(padded, axis=1)), axis=1)
    i = int(np.argmax(vals))
    lo, hi = us[max(i - 1, 0)], us[min(i + 1, sweep - 1)]
    res = optimize.minimize_scalar(
        lambda u: -profile(u), bounds=(lo, hi), method="bounded", options={"xatol": xatol}
    )
    best_u, best = (float(res.x), -float(res.fun)) if -res.fun >= vals[i] else (float(us[i]), float(vals[i]))
    _, angle = _angular_max(b, best_u, samples)
    return SupNorm(best, best_u, angle)


@dataclass(frozen=True)
class ThickPartConstant:
    """Sup-norm/WP-norm constant ``C(r)`` for injectivity radius ``r``."""

    r: float
    value: float


def _log_cosh(x: float) -> float:
    if x < 1.0:
        return math.log1p(2.0 * math.sinh(x / 2.0) ** 2)
    return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)


def _one_minus_sech6(r: float) -> float:
    """``1 - (4 e^r / (e^r + 1)^2)^3`` = ``1 - sech(r/2)^6``, stable for small r."""
    return -math.expm1(-6.0 * _log_cosh(r / 2.0))


def thick_part_constant(r: float) -> ThickPartConstant:
    """``C(r) = {(4 pi / 3) [1 - (4 e^r / (e^r + 1)^2)^3]}^(-1/2)``.

    Decreasing in ``r``; tends to ``sqrt(3/(4 pi))`` as r -> infinity and
    behaves like ``1 / (sqrt(pi) r)`` as r -> 0.
    """
    r = float(r)
    if not r > 0 or math.isnan(r):
        raise DomainError("injectivity radius must be positive")
    return ThickPartConstant(r, (4.0 * math.pi / 3.0 * _one_minus_sech6(r)) ** -0.5)


@dataclass(frozen=True)
class Prop1Chain:
    """Terms of the centre-value estimate on the hyperbolic disk ``D(0, r)``.

    ``wp_sq >= wp_sq_lower >= center_bound`` where ``wp_sq_lower`` is the
    part of ``||nu||^2`` carried by ``D(0, r)`` and ``center_bound`` keeps
    only its ``n = 2`` term, ``(4 pi / 3) |nu(0)|^2 (1 - sech(r/2)^6)``.
    """

    r: float
    euclidean_radius: float
    wp_sq: float
    wp_sq_lower: float
    center_bound: float
    nu0: complex

    @property
    def holds(self) -> bool:
        slack = 1e-13 * max(self.wp_sq, 1e-300)
        return self.wp_sq + slack >= self.wp_sq_lower and self.wp_sq_lower + slack >= self.center_bound


def prop1_chain(v: HarmonicBeltrami, r: float) -> Prop1Chain:
    r = float(r)
    if not r > 0:
        raise DomainError("hyperbolic radius must be positive")
    R = hyperbolic_disk_radius(r)
    T = R * R
    # 2 pi (n^3-n)^2 |a_n|^2 int_0^R u^(2n-4) (1-u^2)^2/4 u du
    #   = (pi/2) (n^3-n) |a_n|^2 I_T(n-1, 3)
    lower = 0.0
    for n, a in v.coefficients.items():
        lower += 0.5 * math.pi * _weight(n) * abs(a) ** 2 * special.betainc(n - 1, 3, T)
    nu0 = v.center_value
    center = 4.0 * math.pi / 3.0 * abs(nu0) ** 2 * _one_minus_sech6(r)
    return Prop1Chain(r, R, v.wp_norm_sq(), lower, center, nu0)


@dataclass(frozen=True)
class ProjectionKernel:
    """Kernel ``P(z, w) = rho(z) rho(w) sum_{n=2}^{N} conj(nu_n(z)) nu_n(w)``."""

    truncation: int = DEFAULT_MAX_TRUNCATION

    def __post_init__(self):
        if int(self.truncation) != self.truncation or self.truncation < 2:
            raise DomainError("projection kernel truncation must be an integer >= 2")

    def coefficients(self) -> np.ndarray:
        """``c_n^2 = 2 (n^3 - n) / pi`` for n = 2 .. N."""
        n = np.arange(2, self.truncation + 1, dtype=float)
        return 2.0 * (n**3 - n) / np.pi


def projection_kernel_eval(P: ProjectionKernel, z, w):
    """Evaluate ``P(z, w)``.

    ``rho(z) rho(w) conj(nu_n(z)) nu_n(w)`` reduces to ``c_n^2 z^(n-2) conj(w)^(n-2)``,
    which is what is summed here.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(z) >= 1) or np.any(np.abs(w) >= 1):
        raise DomainError("points must lie in the open unit disk")
    out = np.polynomial.polynomial.polyval(z * np.conj(w), P.coefficients())
    return complex(out) if out.ndim == 0 else out


def projection_reproduce(P: ProjectionKernel, z: complex, grid: QuadratureGrid | None = None) -> float:
    """``iint |P(z, w)|^2 rho(w)^{-1} d^2w`` by quadrature in ``w``.

    Equals ``P(z, z)`` by the projection property.
    """
    grid = grid or build_grid()
    if P.truncation - 2 > grid.angular_order:
        raise AccuracyError(
            f"truncation {P.truncation} needs angular_order >= {P.truncation - 2}"
        )
    vals = np.abs(projection_kernel_eval(P, z, grid.points())) ** 2
    # rho^{-1} d^2w = (s^2 / 4) u du dtheta
    weights = grid.weights_2d("euclidean") * (grid.s**2 / 4.0)[:, None]
    return float(np.sum(weights * vals))


def _diag_density(N: int, u):
    """``sum_{n=2}^{N} |nu_n(u)|^2`` as a function of the radius."""
    t = np.asarray(u, dtype=float) ** 2
    c = ProjectionKernel(N).coefficients()
    return (1.0 - t) ** 4 / 16.0 * np.polynomial.polynomial.polyval(t, c)


def lambda_sup(P: ProjectionKernel, sweep: int = 2049) -> float:
    """``sup_z sum_{n=2}^{N} |nu_n(z)|^2`` by radial sweep and Brent polish."""
    N = P.truncation
    us = np.linspace(0.0, 1.0, sweep)
    vals = _diag_density(N, us)
    i = int(np.argmax(vals))
    lo, hi = us[max(i - 1, 0)], us[min(i + 1, sweep - 1)]
    res = optimize.minimize_scalar(
        lambda u: -_diag_density(N, u), bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    return float(max(vals[i], -res.fun))
