"""Independent reference computations shared by the test modules."""

import mpmath
import numpy as np
import sympy as sp

X, Y = sp.symbols("x y", real=True)
T = sp.symbols("t", positive=True)

# smooth h and its angular mode; all bounded up to |z| = 1
MANUFACTURED = [
    (sp.Integer(1) + 0 * X, 0),
    ((1 - X**2 - Y**2) ** 3 * (2 + X**2 + Y**2), 0),
    (sp.expand((X + sp.I * Y) ** 2 * (1 - X**2 - Y**2) ** 3), 2),
    (sp.expand((X + sp.I * Y) * (3 - (X**2 + Y**2) ** 2)), 1),
]


def manufactured(h_expr, k):
    """Reduced profiles of h and f = h - (1 - |z|^2)^2 / 8 * lap(h) for a mode-k h."""
    lap = sp.diff(h_expr, X, 2) + sp.diff(h_expr, Y, 2)
    f_expr = sp.expand(h_expr - (1 - X**2 - Y**2) ** 2 / 8 * lap)

    def reduced(expr):
        # along theta = 0 the mode-k function is u^k * phi(u^2)
        on_axis = sp.cancel(sp.expand(expr.subs(Y, 0)) / X**k)
        return sp.lambdify(T, sp.expand(on_axis.subs(X, sp.sqrt(T))), "numpy")

    return reduced(h_expr), reduced(f_expr)


def evaluate(fn, t):
    return np.broadcast_to(np.asarray(fn(t), dtype=complex), t.shape).copy()


def C_oracle(r):
    """C(r) in 50-digit arithmetic straight from the exponential form."""
    mpmath.mp.dps = 50
    r = mpmath.mpf(r)
    x = 4 * mpmath.e**r / (mpmath.e**r + 1) ** 2
    return float((4 * mpmath.pi / 3 * (1 - x**3)) ** mpmath.mpf(-0.5))
