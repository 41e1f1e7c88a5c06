"""One test per acceptance criterion; each prints a pass/fail line.

The lines are also collected and repeated in the terminal summary.
"""

import itertools
import math
import time

import mpmath
import numpy as np

from conftest import ACCEPTANCE_LINES
from oracles import C_oracle, MANUFACTURED, evaluate, manufactured
from wpcurv.beltrami import (
    HarmonicBeltrami,
    ProjectionKernel,
    basis_element,
    lambda_sup,
    projection_kernel_eval,
    projection_reproduce,
    prop1_chain,
    sup_norm_exact,
    sup_norm_numeric,
    thick_part_constant,
    wp_inner,
)
from wpcurv.curvature import (
    CurvatureContext,
    aitken,
    holo_sectional,
    ricci_partial,
    riemann_entry,
    sectional,
    thick_part_bounds,
)
from wpcurv.disk import build_grid
from wpcurv.resolvent import (
    GridFunction,
    RadialProfile,
    ResolventOperator,
    lemma1_suite,
    random_band_limited,
)

LOWER = -3 / (2 * math.pi)
EINSTEIN = -13 / (12 * math.pi)


def _record(k, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_orthonormality():
    t0 = time.perf_counter()
    grid = build_grid()
    basis = {n: basis_element(n) for n in range(2, 17)}
    err = max(abs(wp_inner(basis[m], basis[n], grid) - (m == n))
              for m in basis for n in basis)
    dt = time.perf_counter() - t0
    _record(1, err < 1e-10 and dt < 10, f"max |<nu_m,nu_n> - delta| = {err:.2e}, {dt:.2f}s")


def test_criterion_02_resolvent_selftest():
    t0 = time.perf_counter()
    grid = build_grid()
    op = ResolventOperator(grid, cache=None)
    g1 = float(np.max(np.abs(op.apply(GridFunction.constant(grid)).on_grid() - 1.0)))
    rels = []
    for h_expr, k in MANUFACTURED[1:]:
        h_fn, f_fn = manufactured(h_expr, k)
        got = op.apply_mode(RadialProfile(k, evaluate(f_fn, grid.t), grid)).values
        want = grid.radial_nodes**k * evaluate(h_fn, grid.t)
        rels.append(float(np.max(np.abs(got - want)) / np.max(np.abs(want))))
    dt = time.perf_counter() - t0
    ok = g1 < 1e-8 and max(rels) < 1e-6 and dt < 30
    _record(2, ok, f"|G(1)-1| = {g1:.2e}, manufactured rel = {max(rels):.2e} (3 cases), {dt:.2f}s")


def test_criterion_03_lemma1():
    grid = build_grid()
    op = ResolventOperator(grid)
    rng = np.random.default_rng(20240101)
    worst = {"A": math.inf, "B": 0.0, "C": math.inf, "D": -math.inf}
    failures = 0
    for _ in range(100):
        rep = lemma1_suite(op, random_band_limited(grid, rng), random_band_limited(grid, rng),
                           tol_a=1e-7, tol_b=1e-7, tol_c=1e-9, tol_d=1e-8)
        failures += not rep.passed
        for name in "ABCD":
            pick = max if name in "BD" else min
            worst[name] = pick(worst[name], getattr(rep, name)[0])
    detail = ", ".join(f"{k}={v:.2e}" for k, v in worst.items())
    _record(3, failures == 0, f"100 samples, {failures} failures; worst {detail}")


def test_criterion_04_lower_bound():
    t0 = time.perf_counter()
    ctx = CurvatureContext()
    s = [holo_sectional(n, ctx).value for n in range(2, 41)]
    K = [sectional(m, n, ctx).value for m, n in itertools.combinations(range(2, 13), 2)]
    dt = time.perf_counter() - t0
    ok = (all(LOWER - 1e-6 <= v < 0 for v in s) and all(LOWER - 1e-6 <= v < 0 for v in K)
          and dt < 300)
    _record(4, ok, f"min s_n = {min(s):.6f}, min K = {min(K):.6f} vs -3/(2pi) = {LOWER:.6f}, {dt:.2f}s")


def test_criterion_05_no_negative_upper_bound():
    ctx = CurvatureContext()
    s = {n: holo_sectional(n, ctx).value for n in range(2, 41)}
    within = all(abs(v) <= 64 / (math.pi * (n + 2)) for n, v in s.items())
    decays = abs(s[40]) < abs(s[2]) / 4
    _record(5, within and decays,
            f"|s_n| <= 64/(pi(n+2)) for n <= 40: {within}; |s_40| = {abs(s[40]):.3e} < |s_2|/4 = {abs(s[2]) / 4:.3e}")


def test_criterion_06_einstein_constant():
    t0 = time.perf_counter()
    rp = ricci_partial(2, 64, CurvatureContext())
    sums = rp.partial_sums
    monotone = bool(np.all(np.diff(sums) <= 0))
    above = bool(np.all(sums >= EINSTEIN - 1e-3))
    limit = float(aitken(sums)[-1])
    rel = abs(limit - EINSTEIN) / abs(EINSTEIN)
    dt = time.perf_counter() - t0
    ok = monotone and above and rel < 0.05 and dt < 600
    _record(6, ok, f"monotone={monotone}, raw={sums[-1]:.5f}, aitken={limit:.5f}, "
                   f"target={EINSTEIN:.5f}, rel={rel:.2%}, {dt:.2f}s")


def _random_beltrami(rng):
    size = int(rng.integers(1, 6))
    coeffs = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return HarmonicBeltrami.from_array(coeffs / np.arange(2, 2 + size) ** 2)


def test_criterion_07_prop1_machinery():
    rs = np.geomspace(1e-3, 20, 50)
    sweep = max(abs(thick_part_constant(r).value - C_oracle(r)) / C_oracle(r) for r in rs)
    limit = abs(thick_part_constant(30.0).value - math.sqrt(3 / (4 * math.pi)))
    small = thick_part_constant(1e-3).value * 1e-3 * math.sqrt(math.pi)
    rng = np.random.default_rng(7)
    chain_ok = all(prop1_chain(_random_beltrami(rng), r).holds
                   for _ in range(100) for r in (0.1, 0.5, 1.0, 2.0))
    ok = sweep < 1e-12 and limit < 1e-6 and 0.99 <= small <= 1.01 and chain_ok
    _record(7, ok, f"sweep rel err {sweep:.1e}, |C(30) - sqrt(3/4pi)| = {limit:.1e}, "
                   f"C(1e-3) r sqrt(pi) = {small:.5f}, chain holds: {chain_ok}")


def test_criterion_08_sup_norm():
    worst_val, worst_rad = 0.0, 0.0
    for n in range(2, 21):
        res = sup_norm_numeric(basis_element(n))
        worst_val = max(worst_val, abs(res.value - sup_norm_exact(n)) / sup_norm_exact(n))
        worst_rad = max(worst_rad, abs(res.radius - math.sqrt((n - 2) / (n + 2))))
    nu2 = abs(sup_norm_numeric(basis_element(2)).value - math.sqrt(3 / (4 * math.pi)))
    ok = worst_val < 1e-8 and worst_rad < 1e-6 and nu2 < 1e-12
    _record(8, ok, f"value rel {worst_val:.1e}, radius {worst_rad:.1e}, |nu_2| sup err {nu2:.1e}")


def test_criterion_09_projection_kernel():
    grid = build_grid()
    worst = 0.0
    for N in (4, 16, 64):
        P = ProjectionKernel(N)
        for z in (0j, 0.3 + 0j, 0.6j):
            ref = projection_kernel_eval(P, z, z).real
            worst = max(worst, abs(projection_reproduce(P, z, grid) - ref) / ref)
    lams = [lambda_sup(ProjectionKernel(N)) for N in (2, 4, 8, 16, 32, 64)]
    bound = 3 / (4 * math.pi)
    ok = worst < 1e-8 and max(lams) <= bound + 1e-6 and all(np.diff(lams) >= 0)
    _record(9, ok, f"reproducing rel err {worst:.1e}; Lambda(64) = {lams[-1]:.12f} <= {bound:.12f}")


def test_criterion_10_selection_rule():
    t0 = time.perf_counter()
    ctx = CurvatureContext()
    R = {idx: riemann_entry(*idx, ctx).value for idx in itertools.product(range(2, 9), repeat=4)}
    off = max(abs(v) for (a, b, l, d), v in R.items() if a - b + l - d != 0)
    sym_on = max(max(abs(R[(l, b, a, d)] - v), abs(R[(a, d, l, b)] - v)) / abs(v)
                 for (a, b, l, d), v in R.items() if a - b + l - d == 0)
    dt = time.perf_counter() - t0
    ok = off < 1e-10 and sym_on < 1e-10 and dt < 300
    _record(10, ok, f"off-stratum max {off:.1e}, symmetry rel err {sym_on:.1e} over {len(R)} entries, {dt:.2f}s")


def test_criterion_11_bounds_calculator():
    g, r = 2, 0.5
    b = thick_part_bounds(g, r)
    mpmath.mp.dps = 40
    C = mpmath.mpf(C_oracle(r))
    expect = {
        "c_value": C,
        "lower_holo": -2 * C**2,
        "lower_sect": -2 * C**2,
        "lower_ricci": -2 * C**2,
        "lower_scalar": -2 * (3 * g - 3) * C**2,
        "upper_holo": -1 / (2 * mpmath.pi * (g - 1)),
        "upper_ricci": -1 / (2 * mpmath.pi * (g - 1)),
        "upper_scalar": -3 * (3 * g - 2) / (4 * mpmath.pi),
    }
    err = max(abs(getattr(b, k) - float(v)) for k, v in expect.items())
    ordered = (b.lower_holo <= b.upper_holo and b.lower_ricci <= b.upper_ricci
               and b.lower_scalar <= b.upper_scalar)
    _record(11, err < 1e-12 and ordered, f"max deviation {err:.1e}, lower <= upper: {ordered}")
