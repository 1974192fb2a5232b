"""Named series (Koebe, Carathéodory extremals, Möbius) and class-preserving operators."""

from __future__ import annotations

import numpy as np

from .errors import (
    NonInvertibleConstantTerm,
    NonUnitRotor,
    NotIntrinsic,
    NotNormalized,
    ParameterOutOfRange,
)
from .quat import (
    UNIT_I,
    Quaternion,
    UnitImaginary,
    qconj_array,
    qmul,
    qmul_array,
    slice_exp,
)
from .series import (
    DEFAULT_DEGREE,
    TruncatedSeries,
    evaluate,
    slice_derivative,
    star_inverse,
    star_mul,
)

# ---------------------------------------------------------------------------
# constructors


def identity(N: int = DEFAULT_DEGREE) -> TruncatedSeries:
    return TruncatedSeries.identity(N)


def half_identity(N: int = DEFAULT_DEGREE) -> TruncatedSeries:
    """``q / 2``, the standard Schwarz function for subordination examples."""
    return TruncatedSeries.monomial(1, 0.5, N)


def geometric(N: int = DEFAULT_DEGREE) -> TruncatedSeries:
    """``q (1 - q)^{-1} = sum_{n>=1} q^n``, the extremal convex function."""
    c = np.zeros((N + 1, 4))
    c[1:, 0] = 1.0
    return TruncatedSeries(c)


def koebe(N: int = DEFAULT_DEGREE) -> TruncatedSeries:
    """``K(q) = q (1 - q)^{-2} = sum_n n q^n``."""
    c = np.zeros((N + 1, 4))
    c[:, 0] = np.arange(N + 1, dtype=float)
    return TruncatedSeries(c)


def caratheodory_extremal(theta: float = 0.0, I: UnitImaginary = UNIT_I, N: int = DEFAULT_DEGREE) -> TruncatedSeries:
    """``a_1 = 1`` and ``a_n = 2 e^{I (n - 1) theta} / n``; derivative ``(1 + q e^{I theta}) / (1 - q e^{I theta})``."""
    c = np.zeros((N + 1, 4))
    if N >= 1:
        c[1, 0] = 1.0
    for n in range(2, N + 1):
        c[n] = slice_exp((n - 1) * theta, I).to_array() * (2.0 / n)
    return TruncatedSeries(c)


def mobius_series(t: float, N: int = DEFAULT_DEGREE) -> TruncatedSeries:
    """``T_t(q) = (q + t)(1 + t q)^{-1}`` for real ``|t| < 1``."""
    if not -1.0 < t < 1.0:
        raise ParameterOutOfRange(f"Möbius parameter must satisfy |t| < 1, got {t}")
    c = np.zeros((N + 1, 4))
    c[0, 0] = t
    n = np.arange(1, N + 1)
    c[1:, 0] = (1.0 - t * t) * (-t) ** (n - 1)
    return TruncatedSeries(c)


# ---------------------------------------------------------------------------
# operators


def _require_normalized(f: TruncatedSeries, what: str, tol: float = 1e-12) -> None:
    if not f.is_normalized(tol):
        raise NotNormalized(f"{what} needs a normalized series (a0 = 0, a1 = 1)")


def _require_intrinsic(f: TruncatedSeries, what: str) -> None:
    if not f.is_real():
        raise NotIntrinsic(f"{what} needs real (intrinsic) coefficients")


def dilation(f: TruncatedSeries, r: float) -> TruncatedSeries:
    """``r^{-1} f(r q)``: coefficients ``a_n r^{n-1}``."""
    if not 0.0 < r <= 1.0:
        raise ParameterOutOfRange(f"dilation radius must lie in (0, 1], got {r}")
    scale = r ** (np.arange(f.degree + 1, dtype=float) - 1.0)
    return TruncatedSeries(f.coeffs * scale[:, None])


def rotate_conjugate(f: TruncatedSeries, u: Quaternion, tol: float = 1e-10) -> TruncatedSeries:
    """Coefficients ``u a_n conj(u)`` for a unit quaternion ``u``."""
    if abs(u.norm() - 1.0) > tol:
        raise NonUnitRotor(f"rotor must have norm 1, got {u.norm():.6g}")
    ua = qmul_array(u.to_array(), f.coeffs)
    return TruncatedSeries(qmul_array(ua, qconj_array(u.to_array())))


def rotation_eval(f: TruncatedSeries, phi: float, I: UnitImaginary, q) -> Quaternion:
    """Pointwise ``e^{-I phi} f(e^{I phi} q)``; in general not a left power series."""
    if not isinstance(q, Quaternion):
        q = Quaternion.from_seq(q)
    e = slice_exp(phi, I)
    return qmul(e.conj(), evaluate(f, qmul(e, q)))


def alexander_op(f: TruncatedSeries) -> TruncatedSeries:
    """``A(f)(q) = int_0^q t^{-1} f(t) dt``: coefficients ``a_k / k``."""
    _require_normalized(f, "Alexander operator")
    k = np.arange(f.degree + 1, dtype=float)
    k[0] = 1.0
    return TruncatedSeries(f.coeffs / k[:, None])


def libera_op(f: TruncatedSeries) -> TruncatedSeries:
    """``L(f)(q) = 2 q^{-1} int_0^q f(t) dt``: coefficients ``2 a_k / (k + 1)``."""
    _require_normalized(f, "Libera operator")
    k = np.arange(f.degree + 1, dtype=float)
    return TruncatedSeries(f.coeffs * (2.0 / (k + 1.0))[:, None])


def ratio_transform(f: TruncatedSeries, a: float, check_radii=(0.1, 0.3, 0.5, 0.7, 0.9), angles: int = 64) -> TruncatedSeries:
    """``g = f a * (a - f)^{-*}`` for intrinsic ``f`` with ``f(0) = 0``.

    Omitting ``a`` from the image of ``f`` cannot be decided from coefficients;
    it is checked on a sample of the disk and raises ``ParameterOutOfRange``
    when a sampled value lands on ``a``.
    """
    if a == 0:
        raise NonInvertibleConstantTerm("ratio transform needs a != 0, since (a - f)(0) = a")
    _require_intrinsic(f, "ratio transform")
    _require_normalized(f, "ratio transform")
    _check_omits(f, float(a), check_radii, angles)
    denom = TruncatedSeries.constant(float(a), f.degree) - f
    return star_mul(f * float(a), star_inverse(denom))


def _check_omits(f: TruncatedSeries, a: float, radii, angles: int, eps: float = 1e-10) -> None:
    from .series import evaluate_many, tail_estimate

    theta = 2.0 * np.pi * np.arange(angles) / angles
    for r in radii:
        if tail_estimate(f, r) > 1e-9:
            continue
        pts = np.zeros((angles, 4))
        pts[:, 0] = r * np.cos(theta)
        pts[:, 1] = r * np.sin(theta)
        vals = evaluate_many(f, pts)
        dist = np.sqrt((vals[:, 0] - a) ** 2 + vals[:, 1] ** 2)
        if dist.min() <= eps:
            raise ParameterOutOfRange(f"value {a} is attained by f near radius {r}")


def odd_sqrt_transform(f: TruncatedSeries) -> TruncatedSeries:
    """``g(q) = sqrt(f(q^2))`` as the odd series ``q + b_3 q^3 + ...``.

    With ``f(t) = t h(t)``, ``h(0) = 1``, the branch ``s = sqrt(h)`` with
    ``s(0) = +1`` is built by coefficient recursion and ``g(q) = q s(q^2)``.
    """
    _require_intrinsic(f, "odd square-root transform")
    _require_normalized(f, "odd square-root transform")
    N = f.degree
    h = f.coeffs[1:, 0]
    m = (N - 1) // 2
    s = np.zeros(m + 1)
    s[0] = 1.0
    for n in range(1, m + 1):
        acc = float(np.dot(s[1:n], s[n - 1 : 0 : -1])) if n > 1 else 0.0
        hn = h[n] if n < len(h) else 0.0
        s[n] = 0.5 * (hn - acc)
    c = np.zeros((N + 1, 4))
    c[1 : 2 * m + 2 : 2, 0] = s
    return TruncatedSeries(c)


def substitute_square(f: TruncatedSeries, N: int | None = None) -> TruncatedSeries:
    """``f(q^2)``, truncated at ``N`` (default ``2 deg f``)."""
    N = 2 * f.degree if N is None else N
    c = np.zeros((N + 1, 4))
    top = min(f.degree, N // 2)
    c[: 2 * top + 1 : 2] = f.coeffs[: top + 1]
    return TruncatedSeries(c)


def q_times_derivative(f: TruncatedSeries) -> TruncatedSeries:
    """``q * d_s f`` at the degree of ``f``."""
    d = slice_derivative(f)
    c = np.zeros((f.degree + 1, 4))
    c[1:] = d.coeffs[: f.degree]
    return TruncatedSeries(c)


BUILTINS = {
    "koebe": koebe,
    "caratheodory-extremal": lambda N: caratheodory_extremal(0.0, UNIT_I, N),
    "identity": identity,
    "half-identity": half_identity,
    "geometric": geometric,
}


def builtin(name: str, N: int = DEFAULT_DEGREE) -> TruncatedSeries:
    try:
        return BUILTINS[name](N)
    except KeyError:
        raise KeyError(f"unknown builtin series {name!r}; choose from {sorted(BUILTINS)}") from None


__all__ = [
    "BUILTINS",
    "alexander_op",
    "builtin",
    "caratheodory_extremal",
    "dilation",
    "geometric",
    "half_identity",
    "identity",
    "koebe",
    "libera_op",
    "mobius_series",
    "odd_sqrt_transform",
    "q_times_derivative",
    "ratio_transform",
    "rotate_conjugate",
    "rotation_eval",
    "substitute_square",
]
