"""Independent oracles and random generators shared by the tests."""

import numpy as np
from scipy.linalg import solve_triangular, toeplitz

from slicereg.series import TruncatedSeries


def random_series(rng, degree, rho=0.5, a0=None, a1=None, real=False):
    """Coefficients ``U(-1, 1)^4 * rho^n``; optional fixed ``a0``/``a1``."""
    c = rng.uniform(-1.0, 1.0, (degree + 1, 4)) * (rho ** np.arange(degree + 1))[:, None]
    if real:
        c[:, 1:] = 0.0
    if a0 is not None:
        c[0] = a0
    if a1 is not None and degree >= 1:
        c[1] = a1
    return TruncatedSeries(c)


def random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def lagrange_reversion(a):
    """Compositional inverse of a real series ``sum a_n z^n`` (``a_0 = 0``, ``a_1 != 0``).

    Uses ``b_n = [z^(n-1)] (z / g(z))^n / n``; the reciprocal of ``g(z)/z`` comes
    from a lower-triangular Toeplitz solve, powers from ``np.convolve``.
    """
    a = np.asarray(a, dtype=float)
    N = len(a) - 1
    shifted = a[1:]  # g(z)/z
    T = toeplitz(shifted, np.zeros(N))
    e0 = np.zeros(N)
    e0[0] = 1.0
    h = solve_triangular(T, e0, lower=True)  # z / g(z) up to z^(N-1)
    b = np.zeros(N + 1)
    p = np.ones(1)
    for n in range(1, N + 1):
        p = np.convolve(p, h)[:N]
        b[n] = p[n - 1] / n
    return b


def telescoping_oracle(N):
    """``(1 - q) * sum q^n = 1``: the expected coefficients."""
    out = np.zeros((N + 1, 4))
    out[0, 0] = 1.0
    return out


def symbolic_bullet(g, w, degree):
    """Bullet composition over sympy quaternions; series are dicts ``{n: Quaternion}``."""
    from sympy.algebras.quaternion import Quaternion as SQ

    zero = SQ(0, 0, 0, 0)

    def star(a, b):
        out = {}
        for i, x in a.items():
            for j, y in b.items():
                if i + j <= degree:
                    out[i + j] = out.get(i + j, zero) + x * y
        return out

    result = {}
    power = {0: SQ(1, 0, 0, 0)}
    for n in range(degree + 1):
        if n in g:
            for m, c in power.items():
                result[m] = result.get(m, zero) + c * g[n]
        power = star(power, w)
    return {k: v for k, v in result.items() if v != zero}
