"""Hyperbolic geometry of the unit disk and quadrature for integrals over it.

Points of the disk are plain Python/numpy complex numbers.  The hyperbolic
metric has density ``rho(z) = 4 / (1 - |z|^2)^2`` (curvature -1).

The quadrature grid uses Gauss-Legendre nodes in ``t = |z|^2`` paired with
equispaced angles.  Every integrand met in this package is, mode by mode, a
polynomial in ``t`` times a power of ``1 - t``, which this rule integrates
exactly or spectrally.  The complementary variable ``s = 1 - t`` is stored
directly so boundary factors never come from a cancelling subtraction.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConfigurationError, DomainError

__all__ = [
    "rho",
    "hyperbolic_disk_radius",
    "hyperbolic_radius_of",
    "hyperbolic_area",
    "DiskAutomorphism",
    "automorphism_apply",
    "QuadratureGrid",
    "build_grid",
    "DEFAULT_RADIAL_COUNT",
    "DEFAULT_ANGULAR_ORDER",
]

DEFAULT_RADIAL_COUNT = 128
DEFAULT_ANGULAR_ORDER = 64

MIN_RADIAL_COUNT = 4


def _check_in_disk(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("point must satisfy |z| < 1")
    return z


def rho(z):
    """Hyperbolic metric density ``4 / (1 - |z|^2)^2``.

    Accepts a scalar or an array of complex points; raises
    :class:`DomainError` if any point is on or outside the unit circle.
    """
    z = _check_in_disk(z)
    one_minus = 1.0 - (z.real**2 + z.imag**2)
    out = 4.0 / one_minus**2
    return float(out) if out.ndim == 0 else out


def hyperbolic_disk_radius(r):
    """Euclidean radius of the hyperbolic disk of radius ``r`` about 0.

    ``(e^r - 1) / (e^r + 1)``, evaluated as ``tanh(r / 2)``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(np.isnan(r)):
        raise DomainError("hyperbolic radius must be non-negative")
    out = np.tanh(r / 2.0)
    return float(out) if out.ndim == 0 else out


def hyperbolic_radius_of(euclidean_radius):
    """Inverse of :func:`hyperbolic_disk_radius`: ``log((1 + R) / (1 - R))``."""
    R = np.asarray(euclidean_radius, dtype=float)
    if np.any(R < 0) or np.any(R >= 1):
        raise DomainError("Euclidean radius must lie in [0, 1)")
    out = 2.0 * np.arctanh(R)
    return float(out) if out.ndim == 0 else out


def hyperbolic_area(r):
    """Closed-form area ``4 pi sinh^2(r/2)`` of a hyperbolic disk of radius r."""
    if r < 0:
        raise DomainError("hyperbolic radius must be non-negative")
    return 4.0 * math.pi * math.sinh(r / 2.0) ** 2


@dataclass(frozen=True)
class DiskAutomorphism:
    """Holomorphic automorphism ``w -> (e^{i a} w + c) / (1 + conj(c) e^{i a} w)``.

    It sends the origin to ``center`` and preserves the hyperbolic metric.
    """

    center: complex = 0j
    rotation: float = 0.0

    def __post_init__(self):
        if abs(self.center) >= 1.0:
            raise DomainError("automorphism center must lie in the open disk")
        object.__setattr__(self, "center", complex(self.center))

    def __call__(self, w):
        w = _check_in_disk(w)
        c = self.center
        rw = np.exp(1j * self.rotation) * w
        out = (rw + c) / (1.0 + np.conj(c) * rw)
        return complex(out) if out.ndim == 0 else out

    def derivative(self, w):
        w = _check_in_disk(w)
        c = self.center
        e = np.exp(1j * self.rotation)
        out = e * (1.0 - abs(c) ** 2) / (1.0 + np.conj(c) * e * w) ** 2
        return complex(out) if out.ndim == 0 else out


def automorphism_apply(a: DiskAutomorphism, w):
    return a(w)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Polar tensor grid on the disk ``|z| < outer_radius``.

    Attributes
    ----------
    radial_nodes : ndarray
        Radii ``u_i`` in increasing order.
    radial_weights : ndarray
        Weights with ``sum(w_i g(u_i)) ~= int_0^R g(u) u du``, i.e. the
        Euclidean area element with the angular factor removed.
    angular_order : int
        Largest angular frequency |k| a single factor may carry.  The rule
        uses ``2 * angular_order + 1`` equispaced angles, so products of two
        such factors integrate exactly in the angle.
    area_weighting : {"hyperbolic", "euclidean"}
        Default measure for :meth:`integrate` and :meth:`integrate_radial`.
    t, s : ndarray
        ``u^2`` and ``1 - u^2`` at the nodes (``s`` computed without
        cancellation).
    """

    radial_nodes: np.ndarray
    radial_weights: np.ndarray
    angular_order: int
    area_weighting: str
    t: np.ndarray
    s: np.ndarray
    outer_radius: float = 1.0

    @property
    def radial_count(self) -> int:
        return len(self.radial_nodes)

    @property
    def angular_count(self) -> int:
        return 2 * self.angular_order + 1

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.angular_count) / self.angular_count

    @property
    def hyperbolic_weights(self) -> np.ndarray:
        """Radial weights multiplied by ``rho`` at the nodes."""
        return self.radial_weights * 4.0 / self.s**2

    def points(self) -> np.ndarray:
        """Complex node array of shape ``(radial_count, angular_count)``."""
        return self.radial_nodes[:, None] * np.exp(1j * self.angles)[None, :]

    def weights_2d(self, weighting=None) -> np.ndarray:
        radial = self._radial(weighting)
        return np.outer(radial, np.full(self.angular_count, 2.0 * np.pi / self.angular_count))

    def _radial(self, weighting):
        weighting = weighting or self.area_weighting
        if weighting == "hyperbolic":
            return self.hyperbolic_weights
        if weighting == "euclidean":
            return self.radial_weights
        raise ConfigurationError(f"unknown area weighting {weighting!r}")

    def integrate_radial(self, values, weighting=None):
        """``2 pi * int values(u) u du`` (times ``rho`` for hyperbolic weighting).

        This is the integral of a rotation-invariant function given by its
        samples on the radial nodes.
        """
        return 2.0 * np.pi * np.dot(self._radial(weighting), values)

    def integrate(self, f, weighting=None):
        """Integrate ``f(z)`` (callable or sampled on :meth:`points`) over the disk."""
        vals = f(self.points()) if callable(f) else np.asarray(f)
        return np.sum(self.weights_2d(weighting) * vals)

    def angular_mean(self, mode: int) -> complex:
        """Discrete mean of ``exp(i mode theta)`` over the angular nodes."""
        return np.mean(np.exp(1j * mode * self.angles))

    def meta(self) -> dict:
        return {
            "radial_count": self.radial_count,
            "angular_order": self.angular_order,
            "outer_radius": self.outer_radius,
        }


@functools.lru_cache(maxsize=64)
def build_grid(
    radial_count: int = DEFAULT_RADIAL_COUNT,
    angular_order: int = DEFAULT_ANGULAR_ORDER,
    outer_radius: float = 1.0,
    area_weighting: str = "hyperbolic",
) -> QuadratureGrid:
    """Build (and memoize) a quadrature grid.

    Grids are immutable and cached, so equal arguments return the same object.
    """
    if int(radial_count) != radial_count or radial_count < MIN_RADIAL_COUNT:
        raise ConfigurationError(f"radial_count must be an integer >= {MIN_RADIAL_COUNT}")
    if int(angular_order) != angular_order or angular_order < 0:
        raise ConfigurationError("angular_order must be a non-negative integer")
    if not 0.0 < outer_radius <= 1.0:
        raise ConfigurationError("outer_radius must lie in (0, 1]")
    if area_weighting not in ("hyperbolic", "euclidean"):
        raise ConfigurationError(f"unknown area weighting {area_weighting!r}")

    x, w = leggauss(int(radial_count))
    T = outer_radius**2
    t = T * (1.0 + x) / 2.0
    if outer_radius == 1.0:
        s = (1.0 - x) / 2.0
    else:
        s = 1.0 - t
    weights = 0.5 * T * w / 2.0  # u du = dt / 2
    u = np.sqrt(t)
    for arr in (u, weights, t, s):
        arr.flags.writeable = False
    return QuadratureGrid(
        radial_nodes=u,
        radial_weights=weights,
        angular_order=int(angular_order),
        area_weighting=area_weighting,
        t=t,
        s=s,
        outer_radius=float(outer_radius),
    )
