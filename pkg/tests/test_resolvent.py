import threading

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from wpcurv.disk import build_grid
from wpcurv.errors import AccuracyError, ConfigurationError, NumericalError
from wpcurv.resolvent import (
    GridFunction,
    RadialProfile,
    ResolventOperator,
    SolveCache,
    apply_G,
    apply_G_mode,
    lemma1_suite,
    mode_kernel,
    random_band_limited,
)
from wpcurv.beltrami import basis_element

from oracles import MANUFACTURED, evaluate as _eval, manufactured as _manufactured

@pytest.mark.parametrize("h_expr, k", MANUFACTURED)
def test_manufactured_solutions(op, grid, h_expr, k):
    h_fn, f_fn = _manufactured(h_expr, k)
    f = RadialProfile(k, _eval(f_fn, grid.t), grid)
    got = op.apply_mode(f).values
    want = grid.radial_nodes**k * _eval(h_fn, grid.t)
    assert np.allclose(got, want, rtol=1e-6, atol=1e-10)


@pytest.mark.parametrize("h_expr, k", MANUFACTURED[1:3])
def test_manufactured_kernel_backend(kernel_op, grid, h_expr, k):
    h_fn, f_fn = _manufactured(h_expr, k)
    f = RadialProfile(k, _eval(f_fn, grid.t), grid)
    got = kernel_op.apply_mode(f).values
    want = grid.radial_nodes**k * _eval(h_fn, grid.t)
    assert np.allclose(got, want, rtol=1e-6, atol=1e-8)


def test_constant_fixed(op, grid):
    one = GridFunction.constant(grid)
    assert np.max(np.abs(op.apply(one).on_grid() - 1.0)) < 1e-8


def _brute_mode(k, u, v):
    su, sv = 1 - u * u, 1 - v * v

    def G(psi):
        dist2 = u * u + v * v - 2 * u * v * np.cos(psi)
        x = 1 + 2 * dist2 / (su * sv)
        return (0.5 * x * np.log((x + 1) / (x - 1)) - 1) / np.pi

    val, _ = integrate.quad(G, 0, 2 * np.pi, weight="cos", wvar=k, limit=400, epsabs=1e-14)
    return val / (2 * np.pi)


@pytest.mark.parametrize("k", [0, 1, 2, 5])
@pytest.mark.parametrize("u, v", [(0.2, 0.7), (0.5, 0.3), (0.9, 0.1), (0.05, 0.6)])
def test_mode_kernel_matches_angular_integral(k, u, v):
    assert mode_kernel(k, u, v) == pytest.approx(_brute_mode(k, u, v), rel=1e-8, abs=1e-13)


def test_mode_kernel_symmetric():
    u, v = 0.37, 0.81
    for k in range(4):
        assert mode_kernel(k, u, v) == pytest.approx(mode_kernel(k, v, u), rel=1e-13)
        assert mode_kernel(-k, u, v) == pytest.approx(mode_kernel(k, u, v), rel=1e-13)


def test_backends_agree(op, kernel_op, grid):
    rng = np.random.default_rng(7)
    for _ in range(20):
        f = random_band_limited(grid, rng)
        a = op.apply(f).on_grid()
        b = kernel_op.apply(f).on_grid()
        assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(a))


def test_mass_preserved(op, grid):
    rng = np.random.default_rng(11)
    for _ in range(10):
        f = random_band_limited(grid, rng)
        m = f.integrate()
        assert op.apply(f).integrate() == pytest.approx(m, rel=1e-8, abs=1e-10)


def test_self_adjoint(op, grid):
    rng = np.random.default_rng(3)
    for _ in range(10):
        f = random_band_limited(grid, rng)
        g = random_band_limited(grid, rng)
        lhs = op.apply(f).inner(g)
        rhs = f.inner(op.apply(g))
        assert abs(lhs - rhs) < 1e-7 * max(1.0, abs(lhs))


def test_modes_preserved_and_vanish_at_origin(op, grid):
    f = random_band_limited(grid, np.random.default_rng(5), max_mode=4)
    Gf = op.apply(f)
    assert set(Gf.modes) == set(f.modes)
    assert Gf.is_real(tol=1e-12)
    for k, p in Gf.modes.items():
        if k:
            assert p.value_at_origin() == 0.0


def test_mode_and_full_application_consistent(op, grid):
    f = random_band_limited(grid, np.random.default_rng(9), max_mode=2)
    Gf = apply_G(op, f)
    for k, p in f.modes.items():
        assert np.array_equal(apply_G_mode(op, p).reduced, Gf.modes[k].reduced)


def test_residual_small(op, grid):
    f = random_band_limited(grid, np.random.default_rng(1))
    assert op.residual(f) < 1e-8


@pytest.mark.parametrize("n, m", [(2, 3), (2, 5), (4, 7)])
def test_lemma1_on_beltrami_densities(op, grid, n, m):
    def density(v):
        # |nu_n|^2 is radial, so one angular column holds it
        col = v.on_grid(grid)[:, 0]
        return GridFunction.from_reduced(grid, {0: np.abs(col) ** 2})

    rep = lemma1_suite(op, density(basis_element(n)), density(basis_element(m)))
    assert rep.passed, list(rep.lines())


def test_lemma1_random(op, grid):
    rng = np.random.default_rng(2024)
    for _ in range(20):
        rep = lemma1_suite(op, random_band_limited(grid, rng), random_band_limited(grid, rng))
        assert rep.passed, list(rep.lines())


def test_positivity_on_random_functions(op, grid):
    rng = np.random.default_rng(17)
    vals = []
    for _ in range(100):
        f = random_band_limited(grid, rng)
        vals.append(np.real(op.apply(f).inner(f)))
    assert min(vals) >= -1e-7


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 6), st.lists(st.floats(-3, 3), min_size=1, max_size=4))
def test_linearity(k, coeffs):
    grid = build_grid(64, 16)
    op = ResolventOperator(grid, cache=None)
    F = grid.s**3 * np.polynomial.polynomial.polyval(grid.t, coeffs)
    p = RadialProfile(k, F, grid)
    one = op.apply_mode(p).reduced
    two = op.apply_mode(p * 2.5).reduced
    assert np.allclose(two, 2.5 * one, rtol=1e-12, atol=1e-14)


def test_mode_beyond_angular_order(grid):
    op = ResolventOperator(grid, cache=None)
    p = RadialProfile(grid.angular_order + 1, grid.s**3, grid)
    with pytest.raises(AccuracyError):
        op.apply_mode(p)


def test_solver_tolerance_enforced(grid):
    op = ResolventOperator(grid, solver_tol=1e-30, cache=None)
    with pytest.raises(NumericalError) as info:
        op.apply_mode(RadialProfile(3, grid.s**3 * (1 + grid.t), grid))
    assert info.value.diagnostics["mode"] == 3


def test_bad_configuration(grid):
    with pytest.raises(ConfigurationError):
        ResolventOperator(grid, backend="fft")
    with pytest.raises(ConfigurationError):
        ResolventOperator(build_grid(32, 8, outer_radius=0.5))
    other = build_grid(32, 8)
    with pytest.raises(ConfigurationError):
        ResolventOperator(grid).apply_mode(RadialProfile(0, other.s, other))


def test_cache_hits_and_threads(grid):
    cache = SolveCache()
    op = ResolventOperator(grid, cache=cache)
    f = random_band_limited(grid, np.random.default_rng(0), max_mode=2)
    first = op.apply(f).on_grid()
    misses = cache.misses
    results = []

    def work():
        results.append(op.apply(f).on_grid())

    threads = [threading.Thread(target=work) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert cache.misses == misses
    assert all(np.array_equal(r, first) for r in results)


def test_cache_persists_to_disk(tmp_path, grid):
    f = random_band_limited(grid, np.random.default_rng(4), max_mode=1)
    a = ResolventOperator(grid, cache=SolveCache(tmp_path)).apply(f).on_grid()
    assert list((tmp_path / "default").glob("*.npy"))
    fresh = SolveCache(tmp_path)
    b = ResolventOperator(grid, cache=fresh).apply(f).on_grid()
    assert fresh.misses == 0 and fresh.hits > 0
    assert np.array_equal(a, b)
    assert not list((tmp_path / "default").glob("*.tmp"))
