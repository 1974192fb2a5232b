"""Truncated left power series ``sum_n q^n a_n`` with quaternion coefficients.

Every series carries an explicit truncation degree ``N`` and exactly ``N + 1``
coefficients. Identities between series hold modulo ``q^(N+1)``. Coefficients
sit to the right of the powers, which fixes the meaning of the star product
(coefficient convolution), of evaluation and of the bullet composition
``(g . w)(q) = sum_n w(q)^{*n} a_n``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    InputFormatError,
    NonInvertibleConstantTerm,
    NonOrthogonalUnits,
    NonzeroConstantTerm,
    NotNormalizable,
)
from .quat import (
    EPS,
    UNIT_I,
    Quaternion,
    UnitImaginary,
    as_qarray,
    embed_slice,
    qmul,
    qnorm_array,
)

DEFAULT_DEGREE = 64

#: Threshold for "coefficient is zero" in :func:`order` and for invertibility.
COEFF_EPS = 1e-12

#: Series shorter than this are treated as exact polynomials by :func:`tail_estimate`.
POLYNOMIAL_DEGREE = 8


class TruncatedSeries:
    """Degree-``N`` truncation of a left power series; immutable."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        arr = np.array(as_qarray(coeffs), dtype=float, copy=True)
        if arr.ndim == 1:
            arr = arr.reshape(1, 4)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("coefficient array must have shape (N + 1, 4) with N >= 0")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series coefficients must be finite")
        arr.flags.writeable = False
        self._c = arr

    # construction -------------------------------------------------------

    @classmethod
    def zeros(cls, degree: int) -> "TruncatedSeries":
        return cls(np.zeros((degree + 1, 4)))

    @classmethod
    def constant(cls, value, degree: int = 0) -> "TruncatedSeries":
        c = np.zeros((degree + 1, 4))
        c[0] = _qvec(value)
        return cls(c)

    @classmethod
    def one(cls, degree: int = 0) -> "TruncatedSeries":
        return cls.constant(1.0, degree)

    @classmethod
    def identity(cls, degree: int = 1) -> "TruncatedSeries":
        return cls.monomial(1, 1.0, degree)

    @classmethod
    def monomial(cls, n: int, coeff, degree: int | None = None) -> "TruncatedSeries":
        """``q^n coeff``, truncated at ``degree`` (default ``n``)."""
        degree = n if degree is None else degree
        c = np.zeros((degree + 1, 4))
        if n <= degree:
            c[n] = _qvec(coeff)
        return cls(c)

    @classmethod
    def from_real(cls, values: Sequence[float]) -> "TruncatedSeries":
        c = np.zeros((len(values), 4))
        c[:, 0] = values
        return cls(c)

    # access ---------------------------------------------------------------

    @property
    def degree(self) -> int:
        return self._c.shape[0] - 1

    @property
    def coeffs(self) -> np.ndarray:
        """Read-only ``(N + 1, 4)`` view of the coefficients."""
        return self._c

    def __len__(self):
        return self._c.shape[0]

    def __getitem__(self, n: int) -> Quaternion:
        if n < 0 or n > self.degree:
            return Quaternion()
        return Quaternion.from_seq(self._c[n])

    def __iter__(self):
        for row in self._c:
            yield Quaternion.from_seq(row)

    def norms(self) -> np.ndarray:
        return qnorm_array(self._c)

    def truncate(self, degree: int) -> "TruncatedSeries":
        """Drop or zero-pad coefficients to reach ``degree``."""
        if degree <= self.degree:
            return TruncatedSeries(self._c[: degree + 1])
        c = np.zeros((degree + 1, 4))
        c[: len(self)] = self._c
        return TruncatedSeries(c)

    # algebra --------------------------------------------------------------

    def _aligned(self, other: "TruncatedSeries"):
        n = max(self.degree, other.degree)
        return self.truncate(n)._c, other.truncate(n)._c

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        a, b = self._aligned(other)
        return TruncatedSeries(a + b)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        a, b = self._aligned(other)
        return TruncatedSeries(a - b)

    def __neg__(self):
        return TruncatedSeries(-self._c)

    def __mul__(self, other):
        """Real scalars scale; a quaternion multiplies every coefficient on the right."""
        if isinstance(other, (int, float)):
            return TruncatedSeries(self._c * float(other))
        if isinstance(other, Quaternion):
            return self.right_mul(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return TruncatedSeries(self._c * float(other))
        if isinstance(other, Quaternion):
            return self.left_mul(other)
        return NotImplemented

    def right_mul(self, c: Quaternion) -> "TruncatedSeries":
        from .quat import qmul_array

        return TruncatedSeries(qmul_array(self._c, c.to_array()))

    def left_mul(self, c: Quaternion) -> "TruncatedSeries":
        from .quat import qmul_array

        return TruncatedSeries(qmul_array(c.to_array(), self._c))

    def __matmul__(self, other):
        """``f @ g`` is the star product."""
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return star_mul(self, other)

    def __call__(self, q) -> Quaternion:
        return evaluate(self, q)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def max_diff(self, other: "TruncatedSeries") -> float:
        a, b = self._aligned(other)
        return float(np.max(qnorm_array(a - b))) if len(a) else 0.0

    def allclose(self, other: "TruncatedSeries", atol: float = 1e-12) -> bool:
        return self.max_diff(other) <= atol

    def is_real(self, eps: float = COEFF_EPS) -> bool:
        return bool(np.all(np.sqrt(np.sum(self._c[:, 1:] ** 2, axis=1)) <= eps))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        """``a0 = 0`` and ``a1 = 1``, i.e. ``f(0) = 0`` and ``f'(0) = 1``."""
        if self.degree < 1:
            return False
        return bool(
            np.linalg.norm(self._c[0]) <= tol and np.linalg.norm(self._c[1] - [1.0, 0, 0, 0]) <= tol
        )

    def __repr__(self):
        return f"TruncatedSeries(degree={self.degree})"

    # serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {"degree": self.degree, "coeffs": self._c.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data) -> "TruncatedSeries":
        if not isinstance(data, dict) or "coeffs" not in data:
            raise InputFormatError("series JSON must be an object with a 'coeffs' array")
        coeffs = data["coeffs"]
        if not isinstance(coeffs, list) or not coeffs:
            raise InputFormatError("'coeffs' must be a non-empty array")
        rows = []
        for row in coeffs:
            if not isinstance(row, (list, tuple)) or len(row) != 4:
                raise InputFormatError("each coefficient must be an array [w, x, y, z]")
            try:
                vals = [float(v) for v in row]
            except (TypeError, ValueError) as exc:
                raise InputFormatError(f"non-numeric coefficient {row!r}") from exc
            if not all(math.isfinite(v) for v in vals):
                raise InputFormatError("coefficients must be finite")
            rows.append(vals)
        degree = data.get("degree", len(rows) - 1)
        if not isinstance(degree, int) or isinstance(degree, bool) or degree != len(rows) - 1:
            raise InputFormatError(f"'degree' {degree!r} does not match {len(rows)} coefficients")
        return cls(np.array(rows))

    @classmethod
    def from_json(cls, text: str) -> "TruncatedSeries":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "w", "x", "y", "z"])
        for n, row in enumerate(self._c):
            writer.writerow([n, *(repr(float(v)) for v in row)])
        return buf.getvalue()


def _qvec(value) -> np.ndarray:
    if isinstance(value, Quaternion):
        return value.to_array()
    if isinstance(value, (int, float)):
        return np.array([float(value), 0.0, 0.0, 0.0])
    return as_qarray(value)


# ---------------------------------------------------------------------------
# products, powers, inverses


def star_mul(f: TruncatedSeries, g: TruncatedSeries, degree: int | None = None) -> TruncatedSeries:
    """Star product: ``c_n = sum_{r=0}^n a_r b_{n-r}``.

    The result degree is ``min(cap, deg f + deg g)`` where ``cap`` defaults
    to the larger of the two input degrees.
    """
    cap = max(f.degree, g.degree) if degree is None else degree
    return TruncatedSeries(kernels.star_mul(f.coeffs, g.coeffs, min(cap, f.degree + g.degree)))


def star_pow(f: TruncatedSeries, n: int, degree: int | None = None) -> TruncatedSeries:
    if n < 0:
        raise ValueError("star power must be a nonnegative integer")
    degree = f.degree if degree is None else degree
    result = TruncatedSeries.one(degree)
    base = f.truncate(degree)
    # square-and-multiply; star powers of a single series commute
    while n:
        if n & 1:
            result = star_mul(result, base, degree)
        n >>= 1
        if n:
            base = star_mul(base, base, degree)
    return result


def star_inverse(f: TruncatedSeries, degree: int | None = None, eps: float = COEFF_EPS) -> TruncatedSeries:
    """Reciprocal with respect to the star product (``f * f^{-*} = 1``)."""
    degree = f.degree if degree is None else degree
    if np.linalg.norm(f.coeffs[0]) <= eps:
        raise NonInvertibleConstantTerm("star inverse needs an invertible constant term a0")
    return TruncatedSeries(kernels.star_inverse(f.coeffs, degree))


def order(f: TruncatedSeries, eps: float = COEFF_EPS) -> float:
    """Index of the first nonzero coefficient; ``math.inf`` for the zero series."""
    nz = np.nonzero(f.norms() > eps)[0]
    return int(nz[0]) if nz.size else math.inf


# ---------------------------------------------------------------------------
# composition


def bullet_compose(g: TruncatedSeries, w: TruncatedSeries, degree: int | None = None, eps: float = COEFF_EPS) -> TruncatedSeries:
    """``(g . w)(q) = sum_n w(q)^{*n} a_n`` for ``w`` with ``w(0) = 0``."""
    if np.linalg.norm(w.coeffs[0]) > eps:
        raise NonzeroConstantTerm("bullet composition needs w(0) = 0 (b0 = 0)")
    degree = max(g.degree, w.degree) if degree is None else degree
    wc = np.array(w.coeffs)
    wc[0] = 0.0
    return TruncatedSeries(kernels.bullet_compose(g.coeffs, wc, degree))


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


def bullet_inverse(g: TruncatedSeries, side: Side | str = Side.RIGHT, degree: int | None = None, eps: float = COEFF_EPS) -> TruncatedSeries:
    """Compositional inverse with respect to the bullet composition.

    ``side=RIGHT`` returns ``h`` with ``g . h = q``; ``side=LEFT`` returns
    ``h`` with ``h . g = q``. Both need ``g(0) = 0`` and ``g'(0) != 0``.
    """
    side = Side(side)
    degree = g.degree if degree is None else degree
    c = g.coeffs
    if np.linalg.norm(c[0]) > eps:
        raise NotNormalizable("compositional inverse needs g(0) = 0")
    if g.degree < 1 or np.linalg.norm(c[1]) <= eps:
        raise NotNormalizable("compositional inverse needs an invertible g'(0) = a1")
    gc = np.array(c)
    gc[0] = 0.0
    if side is Side.RIGHT:
        return TruncatedSeries(kernels.bullet_inverse_right(gc, degree))
    return TruncatedSeries(kernels.bullet_inverse_left(gc, degree))


def composition_radius_bound(
    g_radius: float,
    w: TruncatedSeries,
    r_max: float = 1.0,
    xtol: float = 1e-6,
    tail_tol: float = 1e-9,
) -> float:
    """Largest ``r`` in ``(0, r_max)`` with ``sum_n r^n |b_n| < g_radius``.

    Radii where the truncation tail ``|b_N| r^N / (1 - r)`` exceeds
    ``tail_tol`` count as divergent. Returns 0 when no radius qualifies.
    """
    if np.linalg.norm(w.coeffs[0]) > COEFF_EPS:
        raise NonzeroConstantTerm("radius bound needs w(0) = 0")
    norms = w.norms()
    n_idx = np.arange(len(norms))
    top = norms[-1]

    def ok(r: float) -> bool:
        if r <= 0.0:
            return True
        if top > 0.0 and (r >= 1.0 or top * r ** w.degree / (1.0 - r) > tail_tol):
            return False
        return float(np.sum(norms[1:] * r ** n_idx[1:])) < g_radius

    lo, hi = 0.0, float(r_max)
    if ok(hi - xtol / 2):
        return hi - xtol / 2
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# calculus and evaluation


def slice_derivative(f: TruncatedSeries) -> TruncatedSeries:
    """Termwise derivative: coefficient ``(n + 1) a_{n+1}`` at index ``n``."""
    if f.degree == 0:
        return TruncatedSeries.zeros(0)
    n = np.arange(1, f.degree + 1, dtype=float)[:, None]
    return TruncatedSeries(f.coeffs[1:] * n)


def evaluate(f: TruncatedSeries, q) -> Quaternion:
    if not isinstance(q, Quaternion):
        q = Quaternion.real(q) if isinstance(q, (int, float)) else Quaternion.from_seq(q)
    out = kernels.evaluate(f.coeffs, q.to_array().reshape(1, 4))
    return Quaternion.from_seq(out[0])


def evaluate_many(f: TruncatedSeries, points) -> np.ndarray:
    """Evaluate at every point of a ``(..., 4)`` array."""
    pts = np.asarray(as_qarray(points), dtype=float)
    return kernels.evaluate(f.coeffs, pts)


def tail_estimate(f: TruncatedSeries, r) -> np.ndarray:
    """Heuristic size of the discarded tail ``sum_{n>N} q^n a_n`` at ``|q| = r``.

    Uses ``c r^(N+1) / (1 - r)^2`` with ``c`` the larger norm of the last two
    coefficients, which is exact for linearly growing coefficients (Koebe)
    and zero for series whose top coefficients vanish. Series of degree
    below ``POLYNOMIAL_DEGREE`` are read as exact polynomials (hand-written
    inputs such as ``q^2 + q J``).
    """
    r = np.asarray(r, dtype=float)
    norms = f.norms()
    c = float(norms[-2:].max())
    if c == 0.0 or f.degree < POLYNOMIAL_DEGREE:
        return np.zeros_like(r)
    with np.errstate(divide="ignore", over="ignore"):
        est = c * r ** (f.degree + 1) / (1.0 - r) ** 2
    return np.where(r < 1.0, est, np.inf)


# ---------------------------------------------------------------------------
# representation formula and splitting


def representation_formula(f_plus: Quaternion, f_minus: Quaternion, I: UnitImaginary, J: UnitImaginary) -> Quaternion:
    """``f(x + I y)`` from ``f(x + J y)`` and ``f(x - J y)``."""
    half_sum = (f_plus + f_minus) * 0.5
    ij = qmul(I.quaternion, J.quaternion)
    return half_sum + qmul(ij, f_minus - f_plus) * 0.5


@dataclass(frozen=True)
class SliceDecomposition:
    """``f(x + I y) = alpha + I beta`` with ``alpha``, ``beta`` independent of ``I``."""

    alpha: Quaternion
    beta: Quaternion


def slice_decomposition(f: TruncatedSeries, x: float, y: float, J: UnitImaginary = UNIT_I) -> SliceDecomposition:
    fp = evaluate(f, embed_slice(x, y, J))
    fm = evaluate(f, embed_slice(x, -y, J))
    alpha = (fp + fm) * 0.5
    beta = qmul(J.quaternion, fm - fp) * 0.5
    return SliceDecomposition(alpha, beta)


@dataclass(frozen=True)
class SplitPair:
    """``a_n = a1_n + a2_n J`` with ``a1_n, a2_n`` in the slice of ``I``.

    Slice values are stored as Python complex numbers via ``x + I y -> x + 1j y``.
    """

    I: UnitImaginary
    J: UnitImaginary
    f1_coeffs: np.ndarray
    f2_coeffs: np.ndarray

    def recombine(self) -> TruncatedSeries:
        rows = []
        jq = self.J.quaternion
        for c1, c2 in zip(self.f1_coeffs, self.f2_coeffs):
            a1 = embed_slice(c1.real, c1.imag, self.I)
            a2 = embed_slice(c2.real, c2.imag, self.I)
            rows.append((a1 + qmul(a2, jq)).to_list())
        return TruncatedSeries(np.array(rows))


def split_coefficients(f: TruncatedSeries, I: UnitImaginary, J: UnitImaginary, tol: float = 1e-10) -> SplitPair:
    if abs(I.dot(J)) > tol:
        raise NonOrthogonalUnits(f"units are not orthogonal (<I,J> = {I.dot(J):.3g})")
    iq, jq = I.quaternion, J.quaternion
    ivec = I.to_array()
    f1 = np.empty(len(f), dtype=complex)
    f2 = np.empty(len(f), dtype=complex)
    for n, a in enumerate(f):
        iai = qmul(qmul(iq, a), iq)
        a1 = (a - iai) * 0.5
        a2 = qmul((a + iai) * 0.5, jq.conj())
        f1[n] = complex(a1.w, float(np.dot(a1.vec, ivec)))
        f2[n] = complex(a2.w, float(np.dot(a2.vec, ivec)))
    return SplitPair(I, J, f1, f2)


# ---------------------------------------------------------------------------
# classification


class SeriesClass(enum.Enum):
    INTRINSIC = "intrinsic"
    SLICE_PRESERVING = "slice-preserving"
    GENERAL = "general"


@dataclass(frozen=True)
class Classification:
    kind: SeriesClass
    unit: UnitImaginary | None = None

    def to_dict(self) -> dict:
        return {"class": self.kind.value, "unit": None if self.unit is None else self.unit.to_list()}


def classify(f: TruncatedSeries, eps: float = COEFF_EPS) -> Classification:
    """Intrinsic (real coefficients), slice preserving (one common slice) or general."""
    vecs = f.coeffs[:, 1:]
    vnorm = np.sqrt(np.sum(vecs**2, axis=1))
    nonreal = np.nonzero(vnorm > eps)[0]
    if nonreal.size == 0:
        return Classification(SeriesClass.INTRINSIC)
    ref = vecs[nonreal[0]] / vnorm[nonreal[0]]
    # parallel (either sign) to the first imaginary direction
    cross = np.cross(vecs[nonreal], ref)
    if np.all(np.sqrt(np.sum(cross**2, axis=1)) <= eps * np.maximum(1.0, vnorm[nonreal])):
        return Classification(SeriesClass.SLICE_PRESERVING, UnitImaginary.normalized(*ref))
    return Classification(SeriesClass.GENERAL)


def series_from_coeffs(values: Iterable) -> TruncatedSeries:
    return TruncatedSeries(as_qarray(list(values)))
