"""Pure Python (numpy) kernels. Reference backend and fallback for ``_ckernels``.

All functions take and return float64 arrays whose trailing axis is
``(w, x, y, z)``. Coefficient arrays have shape ``(n + 1, 4)``; coefficients
sit on the right of powers of ``q``. Preconditions are checked by the callers
in :mod:`slicereg.series`.
"""

import numpy as np

from .quat import qinv_array, qmul_array

NAME = "python"


def star_mul(a, b, degree):
    out = np.zeros((degree + 1, 4))
    nb = b.shape[0]
    for r in range(min(a.shape[0], degree + 1)):
        top = min(nb - 1, degree - r)
        if top < 0:
            break
        out[r : r + top + 1] += qmul_array(a[r], b[: top + 1])
    return out


def star_inverse(a, degree):
    inv0 = qinv_array(a[0])
    out = np.zeros((degree + 1, 4))
    out[0] = inv0
    na = a.shape[0]
    for n in range(1, degree + 1):
        top = min(n, na - 1)
        r = np.arange(1, top + 1)
        acc = qmul_array(a[r], out[n - r]).sum(axis=0)
        out[n] = -qmul_array(inv0, acc)
    return out


def bullet_compose(g, w, degree):
    out = np.zeros((degree + 1, 4))
    power = np.zeros((degree + 1, 4))
    power[0, 0] = 1.0
    for n in range(min(g.shape[0], degree + 1)):
        # order(w^{*n}) >= n, so only rows n.. carry anything
        out[n:] += qmul_array(power[n:], g[n])
        if n < g.shape[0] - 1:
            power = star_mul(power, w, degree)
    return out


def evaluate(coeffs, points):
    points = np.asarray(points, dtype=float)
    acc = np.zeros_like(points)
    power = np.zeros_like(points)
    power[..., 0] = 1.0
    last = coeffs.shape[0] - 1
    for n in range(last + 1):
        acc += qmul_array(power, coeffs[n])
        if n < last:
            power = qmul_array(power, points)
    return acc


def bullet_inverse_right(g, degree):
    """Coefficients ``b`` with ``g . b = q``; needs ``g[0] == 0``, ``g[1]`` invertible."""
    inv1 = qinv_array(g[1])
    b = np.zeros((degree + 1, 4))
    if degree < 1:
        return b
    # powers[k, m] is the coefficient of q^m in b^{*k}
    powers = np.zeros((degree + 1, degree + 1, 4))
    b[1] = inv1
    powers[1, 1] = inv1
    ng = g.shape[0]
    for n in range(2, degree + 1):
        for k in range(2, n + 1):
            m = np.arange(k - 1, n)
            powers[k, n] = qmul_array(powers[k - 1, m], b[n - m]).sum(axis=0)
        top = min(n, ng - 1)
        if top >= 2:
            s = qmul_array(powers[2 : top + 1, n], g[2 : top + 1]).sum(axis=0)
        else:
            s = np.zeros(4)
        b[n] = -qmul_array(s, inv1)
        powers[1, n] = b[n]
    return b


def bullet_inverse_left(g, degree):
    """Coefficients ``b`` with ``b . g = q``; needs ``g[0] == 0``, ``g[1]`` invertible."""
    b = np.zeros((degree + 1, 4))
    if degree < 1:
        return b
    powers = np.zeros((degree + 1, degree + 1, 4))
    powers[0, 0, 0] = 1.0
    for k in range(1, degree + 1):
        powers[k] = star_mul(powers[k - 1], g, degree)
    for n in range(1, degree + 1):
        rhs = np.zeros(4)
        if n == 1:
            rhs[0] = 1.0
        if n > 1:
            rhs = rhs - qmul_array(powers[1:n, n], b[1:n]).sum(axis=0)
        b[n] = qmul_array(qinv_array(powers[n, n]), rhs)
    return b
