"""Quaternion arithmetic, trigonometric form and slice embeddings.

Scalar values are :class:`Quaternion` instances. Bulk work (grids, series
coefficients) uses float64 arrays whose last axis holds ``(w, x, y, z)``;
the ``*_array`` helpers below operate on those with numpy broadcasting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import QuaternionZeroDivision, ZeroArgument

#: Absolute threshold on the vector-part norm below which a quaternion is real,
#: and on the full norm below which it is treated as zero.
EPS = 1e-12


@dataclass(frozen=True, slots=True)
class Quaternion:
    """The quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_seq(cls, seq: Iterable[float]) -> "Quaternion":
        w, x, y, z = (float(v) for v in seq)
        return cls(w, x, y, z)

    @classmethod
    def real(cls, value: float) -> "Quaternion":
        return cls(float(value), 0.0, 0.0, 0.0)

    def __iter__(self):
        yield self.w
        yield self.x
        yield self.y
        yield self.z

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def to_list(self) -> list[float]:
        return [self.w, self.x, self.y, self.z]

    @property
    def vec(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        if isinstance(other, Quaternion):
            return qmul(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def vec_norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def is_real(self, eps: float = EPS) -> bool:
        return self.vec_norm() <= eps

    def inverse(self, eps: float = EPS) -> "Quaternion":
        return qinv(self, eps)

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _coerce(value) -> Quaternion | None:
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float)):
        return Quaternion.real(value)
    return None


ONE = Quaternion(1.0)
ZERO = Quaternion()
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True, slots=True)
class UnitImaginary:
    """A purely imaginary unit quaternion; squares to -1."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        n = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(n - 1.0) > 1e-12:
            raise ValueError(f"imaginary unit must have norm 1, got {n!r}")

    @classmethod
    def normalized(cls, x: float, y: float, z: float) -> "UnitImaginary":
        n = math.sqrt(x * x + y * y + z * z)
        if n <= EPS:
            raise ZeroArgument("cannot normalize a zero vector into an imaginary unit")
        return cls(float(x / n), float(y / n), float(z / n))

    @property
    def quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.z]

    def dot(self, other: "UnitImaginary") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def __neg__(self):
        return UnitImaginary(-self.x, -self.y, -self.z)


UNIT_I = UnitImaginary(1.0, 0.0, 0.0)
UNIT_J = UnitImaginary(0.0, 1.0, 0.0)
UNIT_K = UnitImaginary(0.0, 0.0, 1.0)

#: Unit used for real quaternions, whose imaginary unit is arbitrary.
DEFAULT_UNIT = UNIT_I


@dataclass(frozen=True, slots=True)
class PolarForm:
    """``q = r (cos a + I sin a)`` with ``a`` in ``[0, pi]``."""

    r: float
    a: float
    I: UnitImaginary
    degenerate: bool = False

    def to_quaternion(self) -> Quaternion:
        return embed_slice(self.r * math.cos(self.a), self.r * math.sin(self.a), self.I)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a b``."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def qinv(a: Quaternion, eps: float = EPS) -> Quaternion:
    n2 = a.norm2()
    if math.sqrt(n2) < eps:
        raise QuaternionZeroDivision(f"quaternion {a!r} is not invertible")
    return Quaternion(a.w / n2, -a.x / n2, -a.y / n2, -a.z / n2)


def unit_imaginary(
    q: Quaternion, eps: float = EPS, default: UnitImaginary = DEFAULT_UNIT
) -> tuple[UnitImaginary, bool]:
    """Return ``(I_q, degenerate)``; real ``q`` yields ``(default, True)``."""
    n = q.vec_norm()
    if n <= eps:
        return default, True
    return UnitImaginary(q.x / n, q.y / n, q.z / n), False


def polar_form(q: Quaternion, eps: float = EPS, default: UnitImaginary = DEFAULT_UNIT) -> PolarForm:
    r = q.norm()
    if r <= eps:
        raise ZeroArgument("zero has no trigonometric form")
    unit, degenerate = unit_imaginary(q, eps, default)
    if degenerate:
        a = 0.0 if q.w > 0 else math.pi
    else:
        # atan2 keeps full precision near a = 0 and a = pi, unlike acos(w / r)
        a = math.atan2(q.vec_norm(), q.w)
    return PolarForm(r, a, unit, degenerate)


def embed_slice(x: float, y: float, unit: UnitImaginary) -> Quaternion:
    """The point ``x + I y`` of the slice through ``unit``."""
    return Quaternion(float(x), y * unit.x, y * unit.y, y * unit.z)


def slice_exp(theta: float, unit: UnitImaginary) -> Quaternion:
    """``e^{I theta} = cos(theta) + I sin(theta)``."""
    return embed_slice(math.cos(theta), math.sin(theta), unit)


def orthogonal_unit(unit: UnitImaginary) -> UnitImaginary:
    """A deterministic imaginary unit perpendicular to ``unit``."""
    v = unit.to_array()
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    w = np.cross(v, axis)
    return UnitImaginary.normalized(*w)


def parse_unit(text: str) -> UnitImaginary:
    """Parse ``i``, ``j``, ``k`` (any case, optional sign) or ``x,y,z``."""
    s = text.strip().lower()
    sign = 1.0
    if s[:1] in "+-" and s[1:] in ("i", "j", "k"):
        sign = -1.0 if s[0] == "-" else 1.0
        s = s[1:]
    named = {"i": UNIT_I, "j": UNIT_J, "k": UNIT_K}
    if s in named:
        u = named[s]
        return u if sign > 0 else -u
    parts = [float(p) for p in s.replace(" ", "").split(",")]
    if len(parts) != 3:
        raise ValueError(f"cannot parse imaginary unit {text!r}")
    return UnitImaginary.normalized(*parts)


# ---------------------------------------------------------------------------
# array helpers, last axis = (w, x, y, z)


def as_qarray(values) -> np.ndarray:
    if isinstance(values, Quaternion):
        return values.to_array()
    if isinstance(values, (list, tuple)) and values and isinstance(values[0], Quaternion):
        return np.array([v.to_list() for v in values], dtype=float)
    arr = np.asarray(values, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"expected trailing axis of length 4, got shape {arr.shape}")
    return arr


def qmul_array(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    bw, bx, by, bz = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def qconj_array(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def qnorm_array(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2, axis=-1))


def qinv_array(a: np.ndarray) -> np.ndarray:
    """Elementwise inverse; zero entries produce inf/nan, callers mask them."""
    a = np.asarray(a, dtype=float)
    n2 = np.sum(a * a, axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        return qconj_array(a) / n2


def qarg_array(a: np.ndarray) -> np.ndarray:
    """Argument in ``[0, pi]``: the angle between ``a`` and the positive real axis."""
    a = np.asarray(a, dtype=float)
    return np.arctan2(np.sqrt(np.sum(a[..., 1:] ** 2, axis=-1)), a[..., 0])


def to_quaternion(row) -> Quaternion:
    return Quaternion.from_seq(row)
