"""The operator ``G = (1/2) (Delta + 1/2)^{-1}`` on the disk, ``Delta = -rho^{-1} d dbar``.

Functions are handled one angular Fourier mode at a time.  A mode-``k``
term ``h(z) = e^{i k theta} u^|k| phi(u^2)`` satisfies ``G f = h`` exactly
when the reduced profile ``phi(t)`` solves the radial problem

    phi - (1 - t)^2 / 2 * (t phi'' + (|k| + 1) phi') = F(t),

with ``F`` the reduced profile of ``f``.  This follows from
``d dbar = Laplacian / 4`` and
``Laplacian(z^k g(|z|^2)) = 4 z^k (t g'' + (k + 1) g')``.  The equation is
singular at both ends of [0, 1].  At ``t = 0`` the factor ``u^|k|`` already
encodes regularity.  At ``t = 1`` the derivative terms drop out, and the
bounded solution satisfies ``phi(1) = F(1)``.

Two backends are provided:

``mode_bvp``
    Polynomial collocation at the grid's Gauss-Legendre nodes in ``t`` plus
    the endpoint ``t = 1``.  At that endpoint the collocated equation is
    exactly the degenerate boundary condition.
``kernel_convolution``
    Integration against the angular modes of the resolvent kernel
    ``G(z, w) = Q_1(cosh d(z, w)) / pi``, with Q_1 the Legendre function of
    the second kind.  The mode kernels have the closed form used in
    :func:`mode_kernel`.  Needs ``f`` decaying at the boundary (at least
    like ``(1 - |z|^2)^2``); for non-decaying data the kernel terms cancel
    catastrophically near ``|z| = 1``.
"""

from __future__ import annotations

import functools
import hashlib
import math
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import leggauss

from .disk import QuadratureGrid, build_grid
from .errors import AccuracyError, ConfigurationError, NumericalError

__all__ = [
    "RadialProfile",
    "GridFunction",
    "ResolventOperator",
    "SolveCache",
    "apply_G",
    "apply_G_mode",
    "mode_kernel",
    "Lemma1Report",
    "lemma1_suite",
    "random_band_limited",
    "BACKENDS",
    "SPECTRAL_POINT",
]

BACKENDS = ("mode_bvp", "kernel_convolution")
SPECTRAL_POINT = -0.5
DEFAULT_SOLVER_TOL = 1e-10


# ---------------------------------------------------------------- profiles


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Angular mode ``k`` of a function on the disk: ``e^{i k theta} H(u)``.

    The radial part is kept in reduced form ``H(u) = u^|k| reduced(u^2)``
    so powers of ``u`` are tracked exactly instead of being divided out of
    samples.
    """

    mode: int
    reduced: np.ndarray
    grid: QuadratureGrid

    def __post_init__(self):
        arr = np.asarray(self.reduced)
        if arr.shape != (self.grid.radial_count,):
            raise ConfigurationError("profile samples must match the grid's radial nodes")
        arr = arr.astype(complex if np.iscomplexobj(arr) else float, copy=True)
        arr.flags.writeable = False
        object.__setattr__(self, "reduced", arr)
        object.__setattr__(self, "mode", int(self.mode))

    @property
    def values(self) -> np.ndarray:
        """Samples of ``H`` on the radial nodes."""
        return self.grid.radial_nodes ** abs(self.mode) * self.reduced

    def value_at_origin(self) -> complex:
        if self.mode != 0:
            return 0.0
        # reduced is a polynomial in t; extrapolate to t = 0
        return _interpolate(self.grid, self.reduced, np.array([0.0]))[0]

    def __mul__(self, other):
        if isinstance(other, RadialProfile):
            k = self.mode + other.mode
            excess = (abs(self.mode) + abs(other.mode) - abs(k)) // 2
            return RadialProfile(k, self.reduced * other.reduced * self.grid.t**excess, self.grid)
        return RadialProfile(self.mode, self.reduced * other, self.grid)

    __rmul__ = __mul__

    def __add__(self, other):
        if other.mode != self.mode:
            raise ValueError("cannot add profiles of different modes")
        return RadialProfile(self.mode, self.reduced + other.reduced, self.grid)

    def conj(self):
        return RadialProfile(-self.mode, np.conj(self.reduced), self.grid)

    def digest(self) -> str:
        h = hashlib.sha1()
        h.update(np.ascontiguousarray(self.reduced).tobytes())
        h.update(str(self.reduced.dtype).encode())
        return h.hexdigest()


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A band-limited function on the disk as a map ``k -> RadialProfile``."""

    grid: QuadratureGrid
    modes: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, p in self.modes.items():
            if p.grid is not self.grid:
                raise ConfigurationError("all profiles must share the function's grid")
            if p.mode != k:
                raise ValueError(f"profile for key {k} carries mode {p.mode}")
            clean[int(k)] = p
        object.__setattr__(self, "modes", dict(sorted(clean.items())))

    @classmethod
    def from_reduced(cls, grid, reduced_by_mode):
        return cls(grid, {k: RadialProfile(k, r, grid) for k, r in reduced_by_mode.items()})

    @classmethod
    def constant(cls, grid, c=1.0):
        return cls.from_reduced(grid, {0: np.full(grid.radial_count, float(c))})

    @classmethod
    def single(cls, profile: RadialProfile):
        return cls(profile.grid, {profile.mode: profile})

    @property
    def max_mode(self) -> int:
        return max((abs(k) for k in self.modes), default=0)

    def is_real(self, tol=1e-13) -> bool:
        for k, p in self.modes.items():
            other = self.modes.get(-k)
            scale = max(np.max(np.abs(p.reduced)), 1.0)
            if other is None:
                if np.max(np.abs(p.reduced)) > tol * scale:
                    return False
            elif np.max(np.abs(other.reduced - np.conj(p.reduced))) > tol * scale:
                return False
        return True

    def __add__(self, other):
        out = dict(self.modes)
        for k, p in other.modes.items():
            out[k] = out[k] + p if k in out else p
        return GridFunction(self.grid, out)

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, other):
        if not isinstance(other, GridFunction):
            return GridFunction(self.grid, {k: p * other for k, p in self.modes.items()})
        out = {}
        for p in self.modes.values():
            for q in other.modes.values():
                r = p * q
                out[r.mode] = out[r.mode] + r if r.mode in out else r
        return GridFunction(self.grid, out)

    __rmul__ = __mul__

    def conj(self):
        return GridFunction(self.grid, {-k: p.conj() for k, p in self.modes.items()})

    def on_grid(self) -> np.ndarray:
        """Samples on ``grid.points()``; real array when the function is real."""
        angles = self.grid.angles
        out = np.zeros((self.grid.radial_count, self.grid.angular_count), dtype=complex)
        for k, p in self.modes.items():
            out += np.outer(p.values, np.exp(1j * k * angles))
        return out.real if self.is_real() else out

    def integrate(self, weighting="hyperbolic"):
        """``iint f rho d^2z`` (or Euclidean); only mode 0 survives the angle."""
        p = self.modes.get(0)
        if p is None:
            return 0.0
        return self.grid.integrate_radial(p.values, weighting)

    def inner(self, other, weighting="hyperbolic"):
        """``iint f g rho d^2z`` (no conjugation), computed mode by mode."""
        total = 0.0
        for k, p in self.modes.items():
            q = other.modes.get(-k)
            if q is not None:
                total = total + self.grid.integrate_radial((p * q).values, weighting)
        return total


def _scaled_log_barycentric(x):
    """Barycentric weights ``1 / prod_{j != i} (x_i - x_j)``, normalised to max 1."""
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    sign = np.prod(np.sign(diff), axis=1)
    logw = -np.sum(np.log(np.abs(diff)), axis=1)
    return sign * np.exp(logw - logw.max())


@functools.lru_cache(maxsize=32)
def _bary_weights(grid: QuadratureGrid) -> np.ndarray:
    return _scaled_log_barycentric(np.asarray(grid.t))


def _interpolate(grid: QuadratureGrid, samples, points):
    """Evaluate the polynomial in ``t`` through ``samples`` at ``points``."""
    t = grid.t
    w = _bary_weights(grid)
    points = np.asarray(points, dtype=float)
    diff = points[:, None] - t[None, :]
    hit = diff == 0
    diff[hit] = 1.0
    c = w / diff
    out = (c @ samples) / c.sum(axis=1)
    rows, cols = np.nonzero(hit)
    if len(rows):
        out = np.array(out, dtype=np.result_type(out, samples))
        out[rows] = np.asarray(samples)[cols]
    return out


# ------------------------------------------------------- collocation backend


def _differentiation_matrices(x):
    """First and second barycentric differentiation matrices on nodes ``x``."""
    w = _scaled_log_barycentric(x)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    D1 = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(D1, 0.0)
    np.fill_diagonal(D1, -D1.sum(axis=1))
    D2 = 2.0 * D1 * (np.diag(D1)[:, None] - 1.0 / dx)
    np.fill_diagonal(D2, 0.0)
    np.fill_diagonal(D2, -D2.sum(axis=1))
    return D1, D2


@functools.lru_cache(maxsize=32)
def _collocation_setup(grid: QuadratureGrid):
    x = np.append(grid.t, 1.0)
    s = np.append(grid.s, 0.0)
    D1, D2 = _differentiation_matrices(x)
    # weights extrapolating samples on grid.t to t = 1
    ext = _bary_weights(grid) / (1.0 - grid.t)
    ext = ext / ext.sum()
    return x, s, D1, D2, ext


@functools.lru_cache(maxsize=512)
def _mode_matrix(grid: QuadratureGrid, k: int):
    x, s, D1, D2, _ = _collocation_setup(grid)
    A = np.eye(len(x)) - (0.5 * s**2)[:, None] * (x[:, None] * D2 + (abs(k) + 1) * D1)
    return A, scipy.linalg.lu_factor(A)


def _forward_reduced(grid: QuadratureGrid, k: int, phi_aug):
    """``2 (Delta + 1/2)`` applied to a reduced profile sampled on ``grid.t`` and ``t = 1``."""
    A, _ = _mode_matrix(grid, k)
    return A @ phi_aug


def _solve_bvp(grid: QuadratureGrid, k: int, F, tol: float):
    _, _, _, _, ext = _collocation_setup(grid)
    rhs = np.append(F, ext @ F)
    A, lu = _mode_matrix(grid, k)
    phi = scipy.linalg.lu_solve(lu, rhs)
    resid = np.max(np.abs(A @ phi - rhs))
    scale = max(np.max(np.abs(rhs)), np.max(np.abs(phi)), 1e-300)
    if not np.all(np.isfinite(phi)) or resid > tol * scale:
        raise NumericalError(
            f"radial solve for mode {k} missed tolerance",
            {"mode": k, "residual": float(resid), "scale": float(scale), "tol": tol,
             "radial_count": grid.radial_count},
        )
    return phi[:-1]


# ------------------------------------------------------------ kernel backend


def _lam(n, u, v):
    """Coefficient of ``e^{i n psi}`` in ``log|1 - z conj(w)| - log|z - w|``."""
    n = abs(n)
    hi = np.maximum(u, v)
    lo = np.minimum(u, v)
    if n == 0:
        return -np.log(hi)
    return ((lo / hi) ** n - (u * v) ** n) / (2.0 * n)


def mode_kernel(k: int, u, v, one_minus_u2=None, one_minus_v2=None):
    """Angular mode ``k`` of the resolvent kernel ``Q_1(cosh d(z, w)) / pi``.

    ``(1 / 2 pi) int_0^{2 pi} G(u, v e^{i psi}) e^{-i k psi} d psi`` for
    radii ``u, v``.  Uses ``Q_1(x) = x L - 1`` with
    ``L = log|1 - z conj(w)| - log|z - w|`` and
    ``x = 1 + 2|z - w|^2 / ((1 - u^2)(1 - v^2))``, whose Fourier series are
    explicit.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    su = 1.0 - u * u if one_minus_u2 is None else one_minus_u2
    sv = 1.0 - v * v if one_minus_v2 is None else one_minus_v2
    D = su * sv
    a = 1.0 + 2.0 * (u * u + v * v) / D
    b = 4.0 * u * v / D
    out = a * _lam(k, u, v) - 0.5 * b * (_lam(k - 1, u, v) + _lam(k + 1, u, v))
    if k == 0:
        out = out - 1.0
    return out / math.pi


@functools.lru_cache(maxsize=8)
def _split_rule(order: int):
    x, w = leggauss(order)
    return (1.0 + x) / 2.0, w / 2.0


def _solve_kernel(grid: QuadratureGrid, k: int, F, order: int | None = None):
    order = order or grid.radial_count
    xq, wq = _split_rule(order)
    k = abs(k)
    out = np.empty(grid.radial_count, dtype=np.result_type(F, float))
    for i, (u, su) in enumerate(zip(grid.radial_nodes, grid.s)):
        total = 0.0
        for lo, hi in ((0.0, u), (u, 1.0)):
            v = lo + (hi - lo) * xq
            wv = (hi - lo) * wq
            sv = (1.0 - v) * (1.0 + v)
            f = v**k * _interpolate(grid, F, v * v)
            # iint G(z, w) f(w) rho(w) d^2w, angular part done by mode_kernel
            integrand = mode_kernel(k, u, v, su, sv) * f * (4.0 / sv**2) * v
            total = total + 2.0 * np.pi * np.dot(wv, integrand)
        out[i] = total / u**k
    return out


# ------------------------------------------------------------------ caching


class SolveCache:
    """Memo of radial solves keyed by ``(backend, grid, mode, profile digest)``.

    Safe for concurrent use: entries are deterministic, so a racing
    duplicate insert is harmless.  With ``directory`` set, entries are also
    persisted as ``.npy`` files under ``directory/namespace``, written
    atomically.
    """

    def __init__(self, directory=None, namespace="default"):
        self._mem = {}
        self._lock = threading.Lock()
        self.directory = Path(directory) / namespace if directory else None
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(backend, grid, mode, digest):
        return (backend, grid.radial_count, grid.angular_order, grid.outer_radius, mode, digest)

    def _path(self, key):
        name = hashlib.sha1(repr(key).encode()).hexdigest()
        return self.directory / f"{name}.npy"

    def get(self, key):
        with self._lock:
            hit = self._mem.get(key)
        if hit is None and self.directory is not None:
            path = self._path(key)
            if path.exists():
                hit = np.load(path)
                hit.flags.writeable = False
                with self._lock:
                    self._mem.setdefault(key, hit)
        with self._lock:
            if hit is None:
                self.misses += 1
            else:
                self.hits += 1
        return hit

    def put(self, key, value):
        value = np.array(value)
        value.flags.writeable = False
        with self._lock:
            value = self._mem.setdefault(key, value)
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)
            path = self._path(key)
            if not path.exists():
                fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
                with os.fdopen(fd, "wb") as fh:
                    np.save(fh, value)
                os.replace(tmp, path)
        return value

    def __len__(self):
        return len(self._mem)


# ---------------------------------------------------------------- operator


@dataclass(frozen=True, eq=False)
class ResolventOperator:
    """Applicator for ``G = (1/2)(Delta + 1/2)^{-1}`` on a fixed grid."""

    grid: QuadratureGrid = field(default_factory=build_grid)
    backend: str = "mode_bvp"
    solver_tol: float = DEFAULT_SOLVER_TOL
    cache: SolveCache | None = field(default_factory=SolveCache)

    spectral_point = SPECTRAL_POINT

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigurationError(f"unknown backend {self.backend!r}; choose from {BACKENDS}")
        if self.grid.outer_radius != 1.0:
            raise ConfigurationError("the resolvent needs a grid covering the whole disk")
        if not self.solver_tol > 0:
            raise ConfigurationError("solver tolerance must be positive")

    def apply_mode(self, p: RadialProfile) -> RadialProfile:
        if p.grid is not self.grid:
            raise ConfigurationError("profile lives on a different grid")
        k = p.mode
        if abs(k) > self.grid.angular_order:
            raise AccuracyError(f"mode {k} exceeds grid angular_order {self.grid.angular_order}")
        key = None
        if self.cache is not None:
            key = SolveCache.key(self.backend, self.grid, abs(k), p.digest())
            hit = self.cache.get(key)
            if hit is not None:
                return RadialProfile(k, hit, self.grid)
        F = p.reduced
        if np.iscomplexobj(F):
            # real linear operator: solve real and imaginary parts together
            phi = self._solve(k, F.real) + 1j * self._solve(k, F.imag)
        else:
            phi = self._solve(k, F)
        if key is not None:
            phi = self.cache.put(key, phi)
        return RadialProfile(k, phi, self.grid)

    def _solve(self, k, F):
        if not np.any(F):
            return np.zeros_like(F)
        if self.backend == "mode_bvp":
            return _solve_bvp(self.grid, k, F, self.solver_tol)
        return _solve_kernel(self.grid, k, F)

    def apply(self, f: GridFunction) -> GridFunction:
        if f.grid is not self.grid:
            raise ConfigurationError("function lives on a different grid")
        return GridFunction(self.grid, {k: self.apply_mode(p) for k, p in f.modes.items()})

    def forward(self, h: GridFunction) -> GridFunction:
        """``2 (Delta + 1/2) h`` by collocation, evaluated on the radial nodes."""
        out = {}
        for k, p in h.modes.items():
            aug = np.append(p.reduced, _interpolate(self.grid, p.reduced, np.array([1.0])))
            out[k] = RadialProfile(k, _forward_reduced(self.grid, k, aug)[:-1], self.grid)
        return GridFunction(self.grid, out)

    def residual(self, f: GridFunction, h: GridFunction | None = None) -> float:
        """``max |2 (Delta + 1/2) G f - f|`` over interior nodes."""
        h = self.apply(f) if h is None else h
        r = self.forward(h) - f
        return float(np.max(np.abs(r.on_grid()))) if r.modes else 0.0


def apply_G(op: ResolventOperator, f: GridFunction) -> GridFunction:
    return op.apply(f)


def apply_G_mode(op: ResolventOperator, p: RadialProfile) -> RadialProfile:
    return op.apply_mode(p)


# ------------------------------------------------ positivity checks


@dataclass
class Lemma1Report:
    """Outcome of the four checks A-D; each entry is ``(value, passed)``.

    A: ``iint G(f) f rho`` (minimum over f, g), must be >= -tol_a.
    B: largest mass defect ``|iint G(f) rho - iint f rho|`` (relative), <= tol_b.
    C: minimum of ``G`` over nonnegative inputs, >= -tol_c.
    D: largest excess ``|G(fg)| - G(f^2)^(1/2) G(g^2)^(1/2)`` on the nodes, <= tol_d.
    """

    A: tuple
    B: tuple
    C: tuple
    D: tuple

    @property
    def passed(self) -> bool:
        return all(entry[1] for entry in (self.A, self.B, self.C, self.D))

    def lines(self):
        for name in "ABCD":
            value, ok = getattr(self, name)
            yield f"{name}: {'pass' if ok else 'FAIL'} ({value:.3e})"


def lemma1_suite(op, f, g, tol_a=1e-7, tol_b=1e-7, tol_c=1e-9, tol_d=1e-8) -> Lemma1Report:
    """Run positivity (A), mass preservation (B), positivity preservation (C)
    and the Cauchy-Schwarz-type bound (D) for real ``f`` and ``g``."""
    if not (f.is_real() and g.is_real()):
        raise ValueError("positivity checks need real-valued functions")
    Gf, Gg = op.apply(f), op.apply(g)

    a_val = min(np.real(Gf.inner(f)), np.real(Gg.inner(g)))

    def mass_defect(h, Gh):
        m = h.integrate()
        return abs(Gh.integrate() - m) / max(abs(m), 1.0)

    b_val = max(mass_defect(f, Gf), mass_defect(g, Gg))

    ff, gg, fg = f * f, g * g, f * g
    Gff, Ggg, Gfg = op.apply(ff), op.apply(gg), op.apply(fg)
    nonneg = [Gff, Ggg]
    for h, Gh in ((f, Gf), (g, Gg)):
        if np.min(h.on_grid()) >= 0:
            nonneg.append(Gh)
    c_val = min(float(np.min(np.real(h.on_grid()))) for h in nonneg)

    bound = np.sqrt(np.clip(Gff.on_grid(), 0, None) * np.clip(Ggg.on_grid(), 0, None))
    d_val = float(np.max(np.abs(Gfg.on_grid()) - bound))

    return Lemma1Report(
        A=(float(a_val), a_val >= -tol_a),
        B=(float(b_val), b_val <= tol_b),
        C=(c_val, c_val >= -tol_c),
        D=(d_val, d_val <= tol_d),
    )


def random_band_limited(grid, rng, max_mode=3, degree=3, decay=3):
    """Random real band-limited test function.

    Returns ``sum_k e^{ik theta} u^|k| (1 - u^2)^decay p_k(u^2)`` with
    Gaussian polynomial coefficients.  With ``decay >= 3`` the function is
    integrable against ``rho`` and its image under ``G`` is analytic up to
    the boundary.
    """
    modes = {}
    basis = np.vstack([grid.t**j for j in range(degree + 1)])
    for k in range(0, max_mode + 1):
        if k == 0:
            c = rng.standard_normal(degree + 1)
        else:
            c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        r = grid.s**decay * (c @ basis)
        modes[k] = r
        if k:
            modes[-k] = np.conj(r)
    return GridFunction.from_reduced(grid, modes)
